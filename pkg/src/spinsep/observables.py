"""Spin projections <I_z^i>(t), long-time averages and the diagonal ensemble."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import m_table
from .errors import EmptyWindowError, NumericalError, ResourceLimitError
from .hamiltonian import HamiltonianMatrix, SpinSystem, build

MAX_EIGEN_SPINS = 10
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpinExpectationSeries:
    times: np.ndarray
    values: np.ndarray  # shape (n_samples, N)


@dataclass(frozen=True, eq=False)
class AverageReport:
    per_spin_avg: np.ndarray
    window: tuple
    method: str
    n_samples: int = 0

    @property
    def mean(self) -> float:
        return float(np.mean(self.per_spin_avg))


def _n_spins(dim: int) -> int:
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def iz_expectation(v, i: int) -> float:
    """<v| I_z^i |v> for spin ``i`` (1-based)."""
    v = np.asarray(v)
    n = _n_spins(v.shape[0])
    if not 1 <= i <= n:
        raise IndexError(f"spin index {i} out of range 1..{n}")
    pops = v.real ** 2 + v.imag ** 2
    return float(pops @ m_table(n)[:, i - 1])


def spin_values(populations: np.ndarray) -> np.ndarray:
    """Map |C_n|^2 rows of shape (..., 2^N) to <I_z^i> rows of shape (..., N)."""
    return populations @ m_table(_n_spins(populations.shape[-1]))


def spin_series(traj) -> SpinExpectationSeries:
    return SpinExpectationSeries(traj.times, spin_values(traj.populations))


def time_average(traj, t_start: float = 0.0) -> AverageReport:
    """Arithmetic mean of <I_z^i> over recorded samples with t >= t_start."""
    mask = traj.times >= t_start
    if not mask.any():
        raise EmptyWindowError(
            f"no samples at t >= {t_start} (trajectory ends at {traj.times[-1]:.6g})")
    values = spin_values(traj.populations[mask])
    return AverageReport(values.mean(axis=0), (float(t_start), float(traj.times[-1])),
                         "running-RK4", int(mask.sum()))


def energy_and_norm(traj) -> tuple[np.ndarray, np.ndarray]:
    """Per-snapshot (norm, energy) series."""
    return traj.norms, traj.energies


def eigen_groups(energies: np.ndarray, tol: float) -> list[slice]:
    """Split sorted eigenvalues into runs whose neighbours differ by <= tol."""
    groups, start = [], 0
    for k in range(1, len(energies) + 1):
        if k == len(energies) or energies[k] - energies[k - 1] > tol:
            groups.append(slice(start, k))
            start = k
    return groups


def diagonal_ensemble_average(system: SpinSystem | HamiltonianMatrix, v0) -> AverageReport:
    """Exact infinite-time average of <I_z^i> from the eigendecomposition of H.

    Sums ``<v0| P_E I_z^i P_E |v0>`` over the projectors ``P_E`` of distinct
    eigenvalues, so degenerate eigenspaces are handled exactly. Eigenvalues
    closer than ``1e-9 * ||H||`` count as one.
    """
    h = system if isinstance(system, HamiltonianMatrix) else build(system)
    n = _n_spins(h.dim)
    if n > MAX_EIGEN_SPINS:
        raise ResourceLimitError(
            f"diagonal ensemble limited to N <= {MAX_EIGEN_SPINS} spins, got {n}")
    v0 = np.asarray(v0, dtype=np.complex128)
    try:
        energies, vecs = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    tol = DEGENERACY_RTOL * h.norm_bound
    weights = np.zeros(h.dim)
    for g in eigen_groups(energies, tol):
        block = vecs[:, g]
        proj = block @ (block.conj().T @ v0)
        weights += proj.real ** 2 + proj.imag ** 2
    avg = weights @ m_table(n)
    return AverageReport(avg, (0.0, float("inf")), "diagonal-ensemble", 0)
