"""Random jumps between equal-energy basis states and the thermal closure.

A jump replaces the current state by a basis state drawn uniformly from the
degeneracy class of the initial basis state. Jumps happen at exponentially
distributed waiting times (rounded up to whole RK4 steps); between jumps the
state follows the ordinary unitary RK4 evolution. The slow-jump limit is the
equal-weight average of the plain long-time averages of all class members,
computed by :func:`class_ensemble_average` without any randomness.

The jump targets are product states with equal diagonal energy, not energy
eigenstates.

Fitting a single-spin density matrix ``rho = A exp(-beta omega I_z)`` to an
average ``<I_z>`` gives ``<I_z> = -tanh(beta omega / 2) / 2``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .basis import basis_vector, m_table
from .dynamics import IntegratorConfig, Trajectory, _check_run, check_step, evolve
from .errors import ConfigError, NumericalError
from .hamiltonian import HamiltonianMatrix, SpinSystem, build
from .kernels import Propagator
from .observables import spin_values, time_average
from .surfaces import DegeneracyClass, class_of, default_tolerance, degeneracy_classes


@dataclass(frozen=True)
class JumpConfig:
    rate: float = 0.01
    seed: int = 0
    n_trajectories: int = 16
    class_tolerance: float | None = None  # None: 1e-9 * ||H||

    def __post_init__(self):
        if not self.rate >= 0 or not math.isfinite(self.rate):
            raise ConfigError(f"jump rate must be finite and >= 0, got {self.rate}")
        if int(self.n_trajectories) != self.n_trajectories or self.n_trajectories < 1:
            raise ConfigError(f"n_trajectories must be an integer >= 1, got {self.n_trajectories}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed}")
        if self.class_tolerance is not None and not self.class_tolerance >= 0:
            raise ConfigError("class_tolerance must be >= 0")


@dataclass(frozen=True, eq=False)
class JumpEnsemble:
    per_spin_avg: np.ndarray
    stderr: np.ndarray
    records: np.ndarray  # one row of per-spin averages per member/trajectory
    method: str
    provenance: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class JumpTrajectory:
    per_spin_avg: np.ndarray
    jump_times: np.ndarray
    jump_targets: np.ndarray
    n_samples: int


def _resolve_class(h: HamiltonianMatrix, members, tol=None) -> DegeneracyClass:
    if isinstance(members, DegeneracyClass):
        return members
    members = tuple(sorted(int(k) for k in members))
    if not members:
        raise ConfigError("degeneracy class is empty")
    return DegeneracyClass(float(h.diagonal_energies[members[0] - 1]), members)


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def class_ensemble_average(system: SpinSystem | HamiltonianMatrix, members,
                           cfg: IntegratorConfig | None = None, t_start: float = 0.0,
                           workers: int = 1, backend: str | None = None) -> JumpEnsemble:
    """Equal-weight mean of the long-time averages started from each class member."""
    cfg = cfg or IntegratorConfig()
    h = system if isinstance(system, HamiltonianMatrix) else build(system)
    cls = _resolve_class(h, members)
    n = int(h.dim).bit_length() - 1

    def run(k):
        traj = evolve(h, basis_vector(k, n), cfg, backend=backend)
        return time_average(traj, t_start).per_spin_avg

    records = np.array(_map(run, cls.members, workers))
    return JumpEnsemble(
        per_spin_avg=records.mean(axis=0),
        stderr=np.zeros(n),
        records=records,
        method="class-ensemble",
        provenance={"members": cls.members, "dt": cfg.dt, "t_end": cfg.t_end,
                    "record_stride": cfg.record_stride, "t_start": t_start},
    )


def uniform_class_mean(members, n: int) -> np.ndarray:
    """Per-spin mean of m_i over the class's basis patterns (fast-jump limit)."""
    rows = m_table(n)[[k - 1 for k in members]]
    return rows.mean(axis=0)


def stochastic_jump_trajectory(system: SpinSystem | HamiltonianMatrix, initial: int,
                               jcfg: JumpConfig, cfg: IntegratorConfig | None = None,
                               member: int = 0, backend: str | None = None) -> JumpTrajectory:
    """One jump-augmented run; returns its per-spin time averages.

    The random stream is seeded from ``(jcfg.seed, member)``. With rate 0 the
    result is bitwise identical to ``time_average(evolve(...))``.
    """
    cfg = cfg or IntegratorConfig()
    h = system if isinstance(system, HamiltonianMatrix) else build(system)
    n = int(h.dim).bit_length() - 1
    tol = default_tolerance(h) if jcfg.class_tolerance is None else jcfg.class_tolerance
    classes = degeneracy_classes(h, tol)
    targets = np.array(classes[class_of(classes, initial)].members)
    if targets.size == 0:
        raise ConfigError(f"no jump targets for initial state {initial}")
    e0 = h.diagonal_energies[initial - 1]
    check_step(h, cfg.dt)

    rng = np.random.default_rng([int(jcfg.seed), int(member)])
    prop = Propagator(h, backend)
    stride, n_steps, dt = cfg.record_stride, cfg.n_steps, cfg.dt
    psi = basis_vector(initial, n)
    chunks, times, hits = [], [], []
    step = 0
    while True:
        wait = math.inf
        if jcfg.rate > 0:
            wait = max(1, math.ceil(rng.exponential(1.0 / jcfg.rate) / dt))
        if step + wait >= n_steps:
            recs, psi = prop.run(psi, dt, n_steps - step, stride, step % stride, True)
            chunks.append(recs)
            break
        recs, psi = prop.run(psi, dt, wait, stride, step % stride, False)
        chunks.append(recs)
        step += wait
        target = int(targets[rng.integers(targets.size)])
        if abs(h.diagonal_energies[target - 1] - e0) > tol:
            raise NumericalError(f"jump to Phi_{target} does not conserve diagonal energy")
        psi = basis_vector(target, n)
        times.append(step * dt)
        hits.append(target)

    states = chunks[0] if len(chunks) == 1 else np.concatenate(chunks)
    if jcfg.rate == 0:
        # same diagnostics as a plain run
        _check_run(Trajectory(np.arange(len(states)) * cfg.sample_interval, states, h, cfg,
                              states[0]))
    elif not np.isfinite(states).all():
        raise NumericalError("non-finite amplitudes in jump trajectory")
    pops = states.real ** 2 + states.imag ** 2
    avg = spin_values(pops).mean(axis=0)
    return JumpTrajectory(avg, np.array(times), np.array(hits, dtype=int), len(states))


def stochastic_ensemble(system: SpinSystem | HamiltonianMatrix, initial: int, jcfg: JumpConfig,
                        cfg: IntegratorConfig | None = None, workers: int = 1,
                        backend: str | None = None) -> JumpEnsemble:
    """Average ``jcfg.n_trajectories`` independent jump runs; reports the standard error."""
    cfg = cfg or IntegratorConfig()
    h = system if isinstance(system, HamiltonianMatrix) else build(system)
    runs = _map(lambda m: stochastic_jump_trajectory(h, initial, jcfg, cfg, m, backend),
                range(jcfg.n_trajectories), workers)
    records = np.array([r.per_spin_avg for r in runs])
    k = len(records)
    stderr = records.std(axis=0, ddof=1) / math.sqrt(k) if k > 1 else np.zeros(records.shape[1])
    return JumpEnsemble(
        per_spin_avg=records.mean(axis=0),
        stderr=stderr,
        records=records,
        method="stochastic",
        provenance={"initial": initial, "rate": jcfg.rate, "seed": jcfg.seed,
                    "n_trajectories": k, "n_jumps": [len(r.jump_times) for r in runs],
                    "dt": cfg.dt, "t_end": cfg.t_end},
    )


@dataclass(frozen=True)
class ThermalPrediction:
    beta: float
    A: float
    predicted_avg: float
    omega: float

    def density_matrix(self) -> np.ndarray:
        """rho = A exp(-beta omega I_z) on the (up, down) single-spin basis."""
        iz = np.diag([0.5, -0.5])
        return self.A * scipy.linalg.expm(-self.beta * self.omega * iz)

    def trace_iz(self) -> float:
        """Tr(rho I_z) evaluated from the matrix exponential."""
        return float(np.trace(self.density_matrix() @ np.diag([0.5, -0.5])))


def fit_beta(avg: float, omega: float) -> ThermalPrediction:
    """Invert <I_z> = -tanh(beta omega / 2) / 2 for beta; negative beta is allowed."""
    if omega == 0:
        raise ValueError("omega = 0 leaves beta undetermined")
    if not abs(avg) < 0.5:
        raise ValueError(f"|avg| must be < 1/2 for finite beta, got {avg}")
    beta = -(2.0 / omega) * math.atanh(2.0 * avg)
    x = 0.5 * beta * omega
    pred = ThermalPrediction(beta, 1.0 / (2.0 * math.cosh(x)), -0.5 * math.tanh(x), omega)
    if abs(pred.predicted_avg - avg) > 1e-12:
        raise NumericalError(f"beta fit does not round-trip: {pred.predicted_avg} vs {avg}")
    return pred


@dataclass(frozen=True, eq=False)
class ThermalComparison:
    ensemble: JumpEnsemble
    prediction: ThermalPrediction
    residuals: np.ndarray
    direct_trace: float

    def csv_rows(self):
        p = self.prediction
        for i, (avg, err, res) in enumerate(zip(self.ensemble.per_spin_avg,
                                                self.ensemble.stderr, self.residuals), 1):
            yield (i, avg, err, p.beta, p.predicted_avg, res)


def thermal_compare(ens: JumpEnsemble, omega: float) -> ThermalComparison:
    """Fit beta to the spin-averaged value and report per-spin residuals."""
    pred = fit_beta(float(np.mean(ens.per_spin_avg)), omega)
    residuals = np.abs(ens.per_spin_avg - pred.predicted_avg)
    return ThermalComparison(ens, pred, residuals, pred.trace_iz())
