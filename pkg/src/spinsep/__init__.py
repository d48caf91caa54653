"""Exact RK4 dynamics of small dipolar spin-1/2 systems.

Energy-surface separability scans in coefficient space, long-time averages
with a diagonal-ensemble oracle, and quantum-jump ensembles with a fitted
spin temperature.
"""
__version__ = "0.1.0"

from .basis import BasisState, basis_vector, flip, index_to_pattern, m_total, pattern_to_index
from .hamiltonian import HamiltonianMatrix, SpinSystem, apply, build, check_hermitian
from .dynamics import IntegratorConfig, Trajectory, evolve, rk4_step
from .kernels import BACKENDS, DEFAULT_BACKEND

__all__ = [
    "BACKENDS",
    "DEFAULT_BACKEND",
    "BasisState",
    "HamiltonianMatrix",
    "IntegratorConfig",
    "SpinSystem",
    "Trajectory",
    "apply",
    "basis_vector",
    "build",
    "check_hermitian",
    "evolve",
    "flip",
    "index_to_pattern",
    "m_total",
    "pattern_to_index",
    "rk4_step",
]
