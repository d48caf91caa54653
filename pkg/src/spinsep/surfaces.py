"""Confinement of trajectories among energetically equivalent basis states.

Basis states with equal diagonal energy <Phi_k|H|Phi_k> form a degeneracy
class. A class member the trajectory never comes close to (max |C_k|^2 stays
under a ceiling) is flagged as separated, even when H couples it directly to
the initial state.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .basis import basis_vector, index_to_pattern
from .dynamics import IntegratorConfig, evolve
from .hamiltonian import HamiltonianMatrix, SpinSystem, build
from .observables import time_average

DEFAULT_CEILING = 0.99
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class DegeneracyClass:
    diagonal_energy: float
    members: tuple  # 1-based basis indices, ascending

    def __contains__(self, k) -> bool:
        return k in self.members

    def __len__(self) -> int:
        return len(self.members)


def default_tolerance(h: HamiltonianMatrix) -> float:
    return DEGENERACY_RTOL * h.norm_bound


def degeneracy_classes(h: HamiltonianMatrix, tol: float | None = None) -> list[DegeneracyClass]:
    """Partition basis indices by diagonal energy (absolute tolerance ``tol``).

    Energies are sorted and split wherever neighbours differ by more than
    ``tol``. Classes are returned in order of their smallest member.
    """
    tol = default_tolerance(h) if tol is None else tol
    if tol < 0:
        raise ValueError("tol must be non-negative")
    diag = h.diagonal_energies
    order = np.argsort(diag, kind="stable")
    classes = []
    start = 0
    for k in range(1, len(order) + 1):
        if k == len(order) or diag[order[k]] - diag[order[k - 1]] > tol:
            members = tuple(sorted(int(p) + 1 for p in order[start:k]))
            classes.append(DegeneracyClass(float(diag[members[0] - 1]), members))
            start = k
    classes.sort(key=lambda c: c.members[0])
    return classes


def class_of(classes, k: int) -> int:
    """0-based position of the class containing basis index ``k``."""
    for cid, c in enumerate(classes):
        if k in c.members:
            return cid
    raise IndexError(f"basis index {k} not in any class")


def max_overlap_scan(traj, targets) -> dict:
    """max over recorded samples of |C_k(t)|^2 for each target index k."""
    dim = traj.states.shape[1]
    out = {}
    pops = traj.populations
    for k in targets:
        if not 1 <= k <= dim:
            raise IndexError(f"basis index {k} out of range 1..{dim}")
        out[int(k)] = float(pops[:, k - 1].max())
    return out


def coupling_graph_components(h, threshold: float = 0.0) -> list[list[int]]:
    """Connected components of the graph with edges where |H_nm| > threshold."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    mat = np.abs(np.asarray(h))
    adj = mat > threshold
    np.fill_diagonal(adj, False)
    n_comp, labels = connected_components(sp.csr_matrix(adj), directed=False)
    comps = [[] for _ in range(n_comp)]
    for p, lab in enumerate(labels):
        comps[lab].append(p + 1)
    comps.sort(key=lambda c: c[0])
    return comps


@dataclass(frozen=True, eq=False)
class SeparabilityReport:
    initial_state: int
    max_overlap: np.ndarray  # indexed by basis index - 1
    classes: list
    class_ids: np.ndarray  # class position per basis index - 1
    direct_coupling: np.ndarray  # |H_{k, initial}|
    components: list
    per_spin_avg: np.ndarray
    ceiling: float
    config: IntegratorConfig = field(default=None)

    @property
    def initial_class(self) -> DegeneracyClass:
        return self.classes[self.class_ids[self.initial_state - 1]]

    @property
    def reached(self) -> np.ndarray:
        return self.max_overlap >= self.ceiling

    @property
    def flagged(self) -> np.ndarray:
        """Same class as the initial state, yet never reached."""
        same = self.class_ids == self.class_ids[self.initial_state - 1]
        flags = same & ~self.reached
        flags[self.initial_state - 1] = False
        return flags

    def separated_targets(self) -> list[int]:
        return [int(k) + 1 for k in np.nonzero(self.flagged)[0]]

    def csv_rows(self):
        for p in range(len(self.max_overlap)):
            yield (p + 1, int(self.class_ids[p]) + 1, self.max_overlap[p], int(self.flagged[p]))

    def to_text(self) -> str:
        n = len(self.per_spin_avg)
        init = self.initial_state
        lines = [
            f"initial state: Phi_{init} {index_to_pattern(init, n)}",
            f"ceiling for 'reached': max |C_k|^2 >= {self.ceiling:g}",
            f"initial class (E_diag = {self.initial_class.diagonal_energy:.12g}): "
            + ", ".join(f"Phi_{k}" for k in self.initial_class.members),
            "",
            "target  pattern      class  E_diag            |H_k,init|  max|C_k|^2          flag",
        ]
        for p in range(len(self.max_overlap)):
            k = p + 1
            cid = int(self.class_ids[p])
            tag = "initial" if k == init else ("SEPARATED" if self.flagged[p] else
                                              ("reached" if self.reached[p] else ""))
            lines.append(
                f"{k:6d}  {str(index_to_pattern(k, n)):<11}  {cid + 1:5d}  "
                f"{self.classes[cid].diagonal_energy:<16.10g}  {self.direct_coupling[p]:10.4g}  "
                f"{self.max_overlap[p]:<18.12g}  {tag}")
        lines += [
            "",
            f"coupling-graph components: {len(self.components)}"
            + (" (initial state's component has "
               f"{len(next(c for c in self.components if init in c))} states)"),
            "per-spin time averages <I_z^i>_av: "
            + ", ".join(f"{x:.6f}" for x in self.per_spin_avg),
        ]
        sep = self.separated_targets()
        if sep:
            directly = [k for k in sep if self.direct_coupling[k - 1] > 0]
            lines.append("separated same-energy states: " + ", ".join(f"Phi_{k}" for k in sep))
            if directly:
                lines.append("  of which directly coupled to the initial state: "
                             + ", ".join(f"Phi_{k}" for k in directly))
        return "\n".join(lines) + "\n"


def separability_report(system: SpinSystem, initial: int, cfg: IntegratorConfig | None = None,
                        ceiling: float = DEFAULT_CEILING, tol: float | None = None,
                        backend: str | None = None) -> SeparabilityReport:
    """Evolve from basis state ``initial`` and tabulate which states it reaches."""
    cfg = cfg or IntegratorConfig()
    h = build(system)
    traj = evolve(h, basis_vector(initial, system.n), cfg, backend=backend)
    classes = degeneracy_classes(h, tol)
    ids = np.empty(h.dim, dtype=int)
    for cid, c in enumerate(classes):
        ids[[k - 1 for k in c.members]] = cid
    overlaps = traj.populations.max(axis=0)
    coupling = np.abs(h.matrix[:, initial - 1])
    coupling[initial - 1] = 0.0
    return SeparabilityReport(
        initial_state=initial,
        max_overlap=overlaps,
        classes=classes,
        class_ids=ids,
        direct_coupling=coupling,
        components=coupling_graph_components(h),
        per_spin_avg=time_average(traj).per_spin_avg,
        ceiling=ceiling,
        config=cfg,
    )
