"""Command-line front end: ``spinsep --config run.cfg [--command ...]``.

Exit status: 0 success, 1 usage/config error, 2 numerical or integration
failure, 3 resource limit. Output files are written only after every
computation of the command has succeeded.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from .config import COMMANDS, RunConfig, load_config
from .dynamics import evolve, write_trajectory_csv
from .errors import ConfigError, NumericalError, ResourceLimitError
from .hamiltonian import build, dump_matrix
from .io import write_csv, write_text
from .jumps import (class_ensemble_average, fit_beta, stochastic_ensemble, thermal_compare,
                    uniform_class_mean)
from .kernels import DEFAULT_BACKEND
from .observables import MAX_EIGEN_SPINS, diagonal_ensemble_average, spin_series, time_average
from .surfaces import class_of, degeneracy_classes, separability_report

logger = logging.getLogger("spinsep")

JUMP_HEADER = (
    "jump model: replacement by a product basis state drawn uniformly from the\n"
    "initial state's diagonal-energy class (targets are basis states, not\n"
    "energy eigenstates; the latter reading is not implemented)\n"
)


def _header(cfg: RunConfig, command: str) -> list[str]:
    lines = [ln for ln in cfg.resolved_lines() if not ln.startswith(("command =", "out ="))]
    return [f"command = {command}", f"backend = {DEFAULT_BACKEND}"] + lines


def _spin_names(n: int) -> list[str]:
    return [f"Iz{i}" for i in range(1, n + 1)]


def _require_basis_initial(cfg: RunConfig, command: str) -> int:
    if cfg.initial is None:
        raise ConfigError(f"command {command!r} needs a basis-state 'initial', not 'amplitudes'")
    return cfg.initial


def cmd_evolve(cfg: RunConfig):
    """Per-spin <I_z^i>(t) and norm/energy diagnostics."""
    system = cfg.system()
    h = build(system)
    traj = evolve(h, cfg.initial_vector(), cfg.integrator())
    series = spin_series(traj)
    avg = time_average(traj, cfg.t_start)
    hdr = _header(cfg, "evolve")
    drift_n = float(np.abs(traj.norms - 1).max())
    drift_e = float(np.abs(traj.energies - traj.energies[0]).max())

    files = {
        "iz.csv": lambda p: write_csv(p, ["t"] + _spin_names(system.n),
                                      np.column_stack([series.times, series.values]), hdr),
        "diagnostics.csv": lambda p: write_csv(p, ["t", "norm", "energy"],
                                               np.column_stack([traj.times, traj.norms,
                                                                traj.energies]), hdr),
    }
    if cfg.export_amplitudes:
        files["trajectory.csv"] = lambda p: write_trajectory_csv(traj, p, hdr)
    if cfg.dump_hamiltonian:
        files["hamiltonian.txt"] = lambda p: dump_matrix(h, p)
    summary = (
        "time averages <I_z^i>_av: " + ", ".join(f"{x:.6f}" for x in avg.per_spin_avg) + "\n"
        f"max |norm - 1| = {drift_n:.3e}, max |E - E0| = {drift_e:.3e} "
        f"(||H|| bound {h.norm_bound:.6g})\n"
    )
    return files, summary


def cmd_separability(cfg: RunConfig):
    init = _require_basis_initial(cfg, "separability")
    rep = separability_report(cfg.system(), init, cfg.integrator(), cfg.ceiling,
                              cfg.class_tolerance)
    hdr = _header(cfg, "separability")
    text = rep.to_text()
    files = {
        "separability.txt": lambda p: write_text(p, text, hdr),
        "separability.csv": lambda p: write_csv(
            p, ["target_index", "class_id", "max_overlap", "flagged"], rep.csv_rows(), hdr),
    }
    return files, text


def _thermal_block(title, ens, omega):
    lines = [title, "  per-spin <I_z^i>_av: " + ", ".join(f"{x:.6f}" for x in ens.per_spin_avg)]
    try:
        comp = thermal_compare(ens, omega)
    except ValueError as exc:
        lines.append(f"  beta fit undefined: {exc}")
        rows = [(i, x, e, float("nan"), float("nan"), float("nan"))
                for i, (x, e) in enumerate(zip(ens.per_spin_avg, ens.stderr), 1)]
        return lines, rows
    p = comp.prediction
    lines += [
        f"  spin mean {np.mean(ens.per_spin_avg):.6f} -> beta = {p.beta:.6g} "
        f"(A = {p.A:.6g}, -tanh(beta*omega/2)/2 = {p.predicted_avg:.6f})",
        f"  Tr(rho I_z) from exp(-beta*omega*I_z): {comp.direct_trace:.15g}",
        "  residuals: " + ", ".join(f"{r:.3e}" for r in comp.residuals),
    ]
    return lines, list(comp.csv_rows())


def cmd_jumps(cfg: RunConfig):
    init = _require_basis_initial(cfg, "jumps")
    system = cfg.system()
    h = build(system)
    icfg = cfg.integrator()
    classes = degeneracy_classes(h, cfg.class_tolerance)
    cls = classes[class_of(classes, init)]
    ens = class_ensemble_average(h, cls, icfg, cfg.t_start, workers=cfg.workers)
    lines, rows = _thermal_block(
        "slow-jump limit (equal-weight class ensemble over "
        + ", ".join(f"Phi_{k}" for k in cls.members) + "):", ens, system.omega)
    fast = uniform_class_mean(cls.members, system.n)
    lines.append("fast-jump limit (uniform mean of m_i over class patterns): "
                 + ", ".join(f"{x:.6f}" for x in fast))
    hdr = _header(cfg, "jumps")
    names = ["spin", "avg", "stderr", "beta", "predicted", "residual"]
    files = {"jumps.csv": lambda p: write_csv(p, names, rows, hdr)}
    if cfg.stochastic:
        sens = stochastic_ensemble(h, init, cfg.jump_config(), icfg, workers=cfg.workers)
        slines, srows = _thermal_block(
            f"random jumps (rate {cfg.rate:g}, {cfg.n_trajectories} trajectories, "
            f"seed {cfg.seed}, {sum(sens.provenance['n_jumps'])} jumps total):",
            sens, system.omega)
        slines.append("  stderr: " + ", ".join(f"{x:.3e}" for x in sens.stderr))
        lines += slines
        files["jumps_stochastic.csv"] = lambda p: write_csv(p, names, srows, hdr)
    text = JUMP_HEADER + "\n" + "\n".join(lines) + "\n"
    files["jumps.txt"] = lambda p: write_text(p, text, hdr)
    return files, text


def cmd_oracle(cfg: RunConfig):
    system = cfg.system()
    if system.n > MAX_EIGEN_SPINS:
        raise ResourceLimitError(f"oracle limited to N <= {MAX_EIGEN_SPINS}, got {system.n}")
    h = build(system)
    v0 = cfg.initial_vector()
    de = diagonal_ensemble_average(h, v0).per_spin_avg
    ta = time_average(evolve(h, v0, cfg.integrator()), cfg.t_start).per_spin_avg
    rows = [(i, t, d, abs(t - d)) for i, (t, d) in enumerate(zip(ta, de), 1)]
    hdr = _header(cfg, "oracle")
    text = "spin  time_average        diagonal_ensemble   abs_diff\n" + "".join(
        f"{i:4d}  {t:<18.12g}  {d:<18.12g}  {e:.3e}\n" for i, t, d, e in rows)
    files = {"oracle.csv": lambda p: write_csv(
        p, ["spin", "time_average", "diagonal_ensemble", "abs_diff"], rows, hdr)}
    return files, text


COMMAND_FUNCS = {"evolve": cmd_evolve, "separability": cmd_separability,
                 "jumps": cmd_jumps, "oracle": cmd_oracle}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    val = int(text)
    if not 0 <= val < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return val


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spinsep", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, metavar="PATH", help="key = value config file")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides 'out')")
    p.add_argument("--seed", type=_u64, metavar="U64", help="RNG seed (overrides 'seed')")
    p.add_argument("--command", choices=COMMANDS, help="experiment (overrides 'command')")
    p.add_argument("--version", action="version", version=f"spinsep {__version__}")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, {"out": args.out, "seed": args.seed,
                                        "command": args.command})
        files, summary = COMMAND_FUNCS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"spinsep: error: {exc}", file=sys.stderr)
        return 1
    except ResourceLimitError as exc:
        print(f"spinsep: resource limit: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"spinsep: numerical failure: {exc}", file=sys.stderr)
        return 2
    os.makedirs(cfg.out, exist_ok=True)
    for name, write in files.items():
        write(os.path.join(cfg.out, name))
    sys.stdout.write(summary)
    print(f"wrote {', '.join(sorted(files))} to {cfg.out}")
    return 0


def main(argv=None) -> None:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
