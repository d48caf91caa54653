"""Product basis of single-spin I_z eigenstates.

A basis state is stored as an N-bit word: bit ``i - 1`` is 1 when spin ``i``
has m = +1/2 and 0 when m = -1/2. States are numbered 1..2^N with spin 1 the
fastest-varying spin and "all up" first, so for three spins

    1: up up up      2: dn up up      3: up dn up      4: dn dn up
    5: up up dn      6: dn up dn      7: up dn dn      8: dn dn dn

which gives ``k = 1 + sum_i (1 - bit_i) * 2**(i - 1)``. Internally the
0-based vector position is ``k - 1``, i.e. the bitwise complement of the word.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_SPINS = 14


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_SPINS:
        raise ValueError(f"spin count must be in [1, {MAX_SPINS}], got {n}")


@dataclass(frozen=True)
class BasisState:
    """One product state; ``word`` bit i-1 set means spin i is up."""

    word: int
    n: int

    def __post_init__(self):
        _check_n(self.n)
        if not 0 <= self.word < (1 << self.n):
            raise ValueError(f"word {self.word} does not fit in {self.n} bits")

    @property
    def index(self) -> int:
        """1-based basis number."""
        return pattern_to_index(self)

    @property
    def position(self) -> int:
        """0-based position in amplitude vectors."""
        return self.index - 1

    def is_up(self, i: int) -> bool:
        _check_spin(i, self.n)
        return bool((self.word >> (i - 1)) & 1)

    @property
    def m(self) -> tuple[Fraction, ...]:
        half = Fraction(1, 2)
        return tuple(half if self.is_up(i) else -half for i in range(1, self.n + 1))

    @classmethod
    def from_spins(cls, spins) -> "BasisState":
        """Build from a sequence of +1/-1 (or True/False for up/down)."""
        word = 0
        for i, s in enumerate(spins):
            if s not in (1, -1, True, False):
                raise ValueError(f"spin value {s!r} is not up/down")
            if s is True or s == 1:
                word |= 1 << i
        return cls(word, len(spins))

    def __str__(self) -> str:
        return "(" + "".join("↑" if self.is_up(i) else "↓"
                             for i in range(1, self.n + 1)) + ")"


def _check_spin(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexError(f"spin index {i} out of range 1..{n}")


def dimension(n: int) -> int:
    _check_n(n)
    return 1 << n


def index_to_pattern(k: int, n: int) -> BasisState:
    """Spin pattern of basis state ``k`` (1-based)."""
    dim = dimension(n)
    if not 1 <= k <= dim:
        raise IndexError(f"basis index {k} out of range 1..{dim}")
    return BasisState(~(k - 1) & (dim - 1), n)


def pattern_to_index(s: BasisState) -> int:
    return (~s.word & ((1 << s.n) - 1)) + 1


def m_total(s: BasisState) -> Fraction:
    """Total magnetic quantum number of a product state."""
    ups = bin(s.word).count("1")
    return Fraction(2 * ups - s.n, 2)


def flip(s: BasisState, i: int) -> BasisState:
    """Invert spin ``i`` (1-based)."""
    _check_spin(i, s.n)
    return BasisState(s.word ^ (1 << (i - 1)), s.n)


@lru_cache(maxsize=None)
def _m_table(n: int) -> np.ndarray:
    pos = np.arange(dimension(n))[:, None]
    down = (pos >> np.arange(n)[None, :]) & 1
    table = 0.5 - down.astype(np.float64)
    table.flags.writeable = False
    return table


def m_table(n: int) -> np.ndarray:
    """Array of shape (2^n, n): entry [p, i] is m of spin i+1 in state p+1.

    Read-only and cached per n.
    """
    return _m_table(n)


def basis_vector(k: int, n: int) -> np.ndarray:
    """Normalized complex amplitude vector of basis state ``k``."""
    dim = dimension(n)
    if not 1 <= k <= dim:
        raise IndexError(f"basis index {k} out of range 1..{dim}")
    v = np.zeros(dim, dtype=np.complex128)
    v[k - 1] = 1.0
    return v
