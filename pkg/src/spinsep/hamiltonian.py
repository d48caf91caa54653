"""Dense matrix of H = H_z + H_d + P on the product basis.

    H_z = omega * sum_i I_z^i
    H_d = sum_{i<j} a_ij [I_z^i I_z^j - 1/4 (I_+^i I_-^j + I_-^i I_+^j)]
    P   = sum_{i<j} a_ij [I_+^i I_+^j + I_-^i I_-^j]

Spin-1/2 ladder operators carry unit coefficients. The coefficient equation
``i dC_m/dt = sum_n C_n H_nm`` equals ``i dC/dt = H C`` because H is Hermitian
and, for real couplings, real symmetric.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .basis import MAX_SPINS, dimension, m_table


@dataclass(frozen=True)
class SpinSystem:
    """N spins in a Zeeman field ``omega`` with pair couplings ``a_ij``.

    ``couplings`` maps 1-based pairs ``(i, j)``, ``i < j``, to ``a_ij``;
    missing pairs are uncoupled.
    """

    n: int
    omega: float
    couplings: dict = field(default_factory=dict, hash=False)
    include_p: bool = True

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not 2 <= self.n <= MAX_SPINS:
            raise ValueError(f"spin count must be an integer in [2, {MAX_SPINS}], got {self.n!r}")
        if not np.isfinite(self.omega):
            raise ValueError("omega must be finite")
        clean = {}
        for (i, j), a in self.couplings.items():
            i, j = int(i), int(j)
            if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"invalid coupling pair ({i}, {j}) for {self.n} spins")
            key = (min(i, j), max(i, j))
            if key in clean:
                raise ValueError(f"coupling {key} given twice")
            a = float(a)
            if not np.isfinite(a):
                raise ValueError(f"coupling {key} is not finite")
            clean[key] = a
        object.__setattr__(self, "couplings", dict(sorted(clean.items())))
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def uniform(cls, n: int, omega: float, a: float, include_p: bool = True) -> "SpinSystem":
        pairs = itertools.combinations(range(1, n + 1), 2)
        return cls(n, omega, {p: a for p in pairs}, include_p)

    def coupling(self, i: int, j: int) -> float:
        return self.couplings.get((min(i, j), max(i, j)), 0.0)

    def relabel(self, perm) -> "SpinSystem":
        """System with spin ``i`` renamed to ``perm[i - 1]`` (1-based labels)."""
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError(f"{perm} is not a permutation of 1..{self.n}")
        couplings = {(perm[i - 1], perm[j - 1]): a for (i, j), a in self.couplings.items()}
        return SpinSystem(self.n, self.omega, couplings, self.include_p)

    @property
    def dim(self) -> int:
        return dimension(self.n)


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    """Read-only dense Hamiltonian together with the system it came from."""

    matrix: np.ndarray
    system: SpinSystem | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def diagonal_energies(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    @cached_property
    def norm_bound(self) -> float:
        """Max absolute row sum, a cheap upper bound on the spectral radius."""
        return float(np.abs(self.matrix).sum(axis=1).max())

    @cached_property
    def is_real(self) -> bool:
        return not np.any(self.matrix.imag)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def build(system: SpinSystem) -> HamiltonianMatrix:
    n, dim = system.n, system.dim
    m = m_table(n)
    pos = np.arange(dim)
    h = np.zeros((dim, dim), dtype=np.complex128)
    h[pos, pos] = system.omega * m.sum(axis=1)
    for (i, j), a in system.couplings.items():
        if a == 0.0:
            continue
        mi, mj = m[:, i - 1], m[:, j - 1]
        h[pos, pos] += a * mi * mj
        partner = pos ^ ((1 << (i - 1)) | (1 << (j - 1)))
        anti = mi != mj
        h[partner[anti], pos[anti]] += -0.25 * a
        if system.include_p:
            h[partner[~anti], pos[~anti]] += a
    h.flags.writeable = False
    return HamiltonianMatrix(h, system)


def apply(h: HamiltonianMatrix, v) -> np.ndarray:
    """H @ v; the result is a derivative ingredient and is not normalized."""
    v = np.asarray(v)
    if v.shape[0] != h.dim or v.ndim not in (1, 2):
        raise ValueError(f"vector of shape {v.shape} does not match dimension {h.dim}")
    return h.matrix @ v


def check_hermitian(h, tol: float = 0.0) -> bool:
    mat = np.asarray(h)
    if tol < 0:
        raise ValueError("tol must be non-negative")
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    return bool(np.max(np.abs(mat - mat.conj().T), initial=0.0) <= tol)


def dump_matrix(h: HamiltonianMatrix, path) -> None:
    """Write nonzero entries as ``row col real imag`` (1-based, 17 digits)."""
    rows, cols = np.nonzero(h.matrix)
    with open(path, "w", newline="\n") as fh:
        for r, c in zip(rows, cols):
            z = h.matrix[r, c]
            fh.write(f"{r + 1} {c + 1} {z.real:.17g} {z.imag:.17g}\n")


def load_matrix(path, dim: int) -> np.ndarray:
    """Inverse of :func:`dump_matrix`."""
    out = np.zeros((dim, dim), dtype=np.complex128)
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            r, c, re, im = line.split()
            out[int(r) - 1, int(c) - 1] = complex(float(re), float(im))
    return out
