"""Backend selection for the RK4 hot loop.

The compiled Cython kernel is used when it was built; otherwise, or when the
environment variable ``SPINSEP_PURE_PYTHON`` is set to a non-empty value, the
numpy fallback in :mod:`spinsep._fallback` is used. Both integrate
``dC/dt = -i H C`` with the classical four-stage Runge-Kutta scheme and agree
to round-off, though not bitwise.
"""
from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

from . import _fallback

try:
    if os.environ.get("SPINSEP_PURE_PYTHON"):
        raise ImportError("compiled kernel disabled by SPINSEP_PURE_PYTHON")
    from . import _rk4
except ImportError:
    _rk4 = None

BACKENDS = ("cython", "python") if _rk4 is not None else ("python",)
DEFAULT_BACKEND = BACKENDS[0]


def record_count(n_steps: int, stride: int, offset: int = 0, include_last: bool = True) -> int:
    last = n_steps if include_last else n_steps - 1
    first = (-offset) % stride
    if last < first:
        return 0
    return (last - first) // stride + 1


class Propagator:
    """RK4 stepper bound to one Hamiltonian matrix."""

    def __init__(self, h, backend: str | None = None):
        backend = backend or DEFAULT_BACKEND
        if backend not in BACKENDS:
            raise ValueError(f"backend {backend!r} unavailable; have {BACKENDS}")
        self.backend = backend
        mat = np.ascontiguousarray(np.asarray(h), dtype=np.complex128)
        self.dim = mat.shape[0]
        if backend == "cython":
            csr = sp.csr_matrix(mat)
            csr.sort_indices()
            self._data = np.ascontiguousarray(csr.data, dtype=np.complex128).view(np.float64)
            self._indices = np.ascontiguousarray(csr.indices, dtype=np.intc)
            self._indptr = np.ascontiguousarray(csr.indptr, dtype=np.intc)
        else:
            self._minus_ih = -1j * mat

    def run(self, psi, dt: float, n_steps: int, stride: int = 1, offset: int = 0,
            include_last: bool = True):
        """Integrate ``n_steps`` steps from ``psi``.

        Returns ``(records, final)`` where ``records`` has one row per
        recorded step (see :func:`record_count`) and ``final`` is the state
        after the last step. The input array is not modified.
        """
        if n_steps < 0 or stride < 1:
            raise ValueError("n_steps must be >= 0 and stride >= 1")
        c = np.array(psi, dtype=np.complex128, copy=True)
        if c.shape != (self.dim,):
            raise ValueError(f"state of shape {c.shape} does not match dimension {self.dim}")
        n_rec = record_count(n_steps, stride, offset, include_last)
        out = np.empty((n_rec, self.dim), dtype=np.complex128)
        if self.backend == "cython":
            written = _rk4.propagate(
                self._data, self._indices, self._indptr, c.view(np.float64),
                float(dt), int(n_steps), int(stride), int(offset), bool(include_last),
                out.view(np.float64),
            )
        else:
            written = _fallback.propagate(
                self._minus_ih, c, float(dt), int(n_steps), int(stride), int(offset),
                bool(include_last), out,
            )
        assert written == n_rec
        return out, c
