"""Fixed-step RK4 integration of the coefficient equation i dC/dt = H C."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import IntegrationDiverged, NumericalError
from .hamiltonian import HamiltonianMatrix, SpinSystem, build
from .kernels import Propagator

logger = logging.getLogger(__name__)

STABILITY_GUARD = 0.05


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, horizon and sampling of an RK4 run (hbar = 1).

    ``t_end`` must be an integer multiple of ``dt``. Snapshots are kept every
    ``record_stride`` steps, starting with the initial state.
    """

    dt: float = 1e-3
    t_end: float = 1000.0
    record_stride: int = 10
    abort_threshold: float = 1e-6

    def __post_init__(self):
        if not self.dt > 0 or not math.isfinite(self.dt):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0 or not math.isfinite(self.t_end):
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError(f"record_stride must be an integer >= 1, got {self.record_stride}")
        if not self.abort_threshold > 0:
            raise ValueError("abort_threshold must be positive")
        ratio = self.t_end / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError(f"t_end = {self.t_end} is not a multiple of dt = {self.dt}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def sample_interval(self) -> float:
        return self.dt * self.record_stride

    def refined(self, factor: int = 2) -> "IntegratorConfig":
        """Same sampling times with ``dt`` divided by ``factor``."""
        return IntegratorConfig(self.dt / factor, self.t_end,
                                self.record_stride * factor, self.abort_threshold)

    def with_t_end(self, t_end: float) -> "IntegratorConfig":
        return IntegratorConfig(self.dt, t_end, self.record_stride, self.abort_threshold)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Snapshots of C(t) from one run plus everything needed to reproduce it."""

    times: np.ndarray
    states: np.ndarray
    hamiltonian: HamiltonianMatrix
    config: IntegratorConfig
    initial: np.ndarray
    backend: str = field(default="")

    @property
    def system(self) -> SpinSystem | None:
        return self.hamiltonian.system

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @cached_property
    def populations(self) -> np.ndarray:
        return self.states.real ** 2 + self.states.imag ** 2

    @cached_property
    def norms(self) -> np.ndarray:
        return self.populations.sum(axis=1)

    @cached_property
    def energies(self) -> np.ndarray:
        hv = self.states @ self.hamiltonian.matrix.T
        return np.einsum("ij,ij->i", self.states.conj(), hv).real


def _as_state(v, dim: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (dim,):
        raise ValueError(f"state of shape {v.shape} does not match dimension {dim}")
    if not np.all(np.isfinite(v)):
        raise NumericalError("initial state has non-finite amplitudes")
    return v


def rk4_step(h, v, dt: float) -> np.ndarray:
    """One classical RK4 step of dC/dt = -i H C, without renormalization."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    mat = np.asarray(h)
    c = _as_state(v, mat.shape[0])
    f = lambda x: -1j * (mat @ x)  # noqa: E731
    with np.errstate(invalid="ignore", over="ignore"):
        k1 = f(c)
        k2 = f(c + 0.5 * dt * k1)
        k3 = f(c + 0.5 * dt * k2)
        k4 = f(c + dt * k3)
        out = c + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NumericalError("non-finite amplitudes after RK4 step")
    return out


def check_step(h: HamiltonianMatrix, dt: float) -> float:
    """Return dt * ||H|| and log a warning when it exceeds the guard."""
    product = dt * h.norm_bound
    if product > STABILITY_GUARD:
        logger.warning("dt * ||H|| = %.3g exceeds the recommended %.2g", product, STABILITY_GUARD)
    return product


def evolve(system: SpinSystem | HamiltonianMatrix, v0, cfg: IntegratorConfig | None = None,
           backend: str | None = None) -> Trajectory:
    """Integrate from ``v0`` to ``cfg.t_end`` and return the recorded trajectory.

    ``system`` may be a :class:`SpinSystem` or an already built
    :class:`HamiltonianMatrix`. Raises :class:`IntegrationDiverged` naming the
    first sample time where ``|norm - 1|`` exceeds ``cfg.abort_threshold``.
    """
    cfg = cfg or IntegratorConfig()
    h = system if isinstance(system, HamiltonianMatrix) else build(system)
    v0 = _as_state(v0, h.dim)
    drift0 = abs(np.vdot(v0, v0).real - 1.0)
    if drift0 > 1e-12:
        raise ValueError(f"initial state is not normalized (|norm - 1| = {drift0:.3e})")
    check_step(h, cfg.dt)
    prop = Propagator(h, backend)
    states, _ = prop.run(v0, cfg.dt, cfg.n_steps, cfg.record_stride)
    times = np.arange(states.shape[0]) * cfg.sample_interval
    traj = Trajectory(times, states, h, cfg, v0.copy(), prop.backend)
    _check_run(traj)
    return traj


def _check_run(traj: Trajectory) -> None:
    finite = np.isfinite(traj.states).all(axis=1)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise IntegrationDiverged(float(traj.times[bad]), math.inf, traj.config.abort_threshold)
    drift = np.abs(traj.norms - 1.0)
    over = np.nonzero(drift > traj.config.abort_threshold)[0]
    if over.size:
        k = int(over[0])
        raise IntegrationDiverged(float(traj.times[k]), float(drift[k]), traj.config.abort_threshold)


def write_trajectory_csv(traj: Trajectory, path, header_lines=()) -> None:
    """Export ``t, re_C1, im_C1, ..., norm, energy`` with 17 significant digits."""
    from .io import write_csv

    dim = traj.hamiltonian.dim
    names = ["t"]
    for k in range(1, dim + 1):
        names += [f"re_C{k}", f"im_C{k}"]
    names += ["norm", "energy"]
    cols = [traj.times]
    for k in range(dim):
        cols += [traj.states[:, k].real, traj.states[:, k].imag]
    cols += [traj.norms, traj.energies]
    write_csv(path, names, np.column_stack(cols), header_lines)
