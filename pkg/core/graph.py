###############################################################################################
#
# Tight-binding graphs and their partitions into a central graph and single-root branches.
#
# INFO: Matrix elements are stored as they appear in H, in units of J. The -J sign
#       of nearest-neighbour couplings is applied by the model constructors in models/.
#
###############################################################################################

import enum
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from helpers.config import HERMITIAN_TOL
from helpers.errors import DimensionMismatch, DuplicateEdge, GraphError, IndexOutOfRange, SelfLoop

Hopping = Tuple[int, int, complex]
Onsite = Tuple[int, complex]
Coupling = Tuple[int, complex]


@dataclass(frozen=True)
class GraphSpec:
    """
    A tight-binding graph as plain data.

    Attributes
    ----------
    n_nodes : int
        Number of nodes, indexed from 0.
    hoppings : tuple of (i, j, t)
        Matrix element H[i, j] = t; H[j, i] is set to conj(t).
    onsites : tuple of (i, v)
        Added to the diagonal entry H[i, i].
    """
    n_nodes: int
    hoppings: Tuple[Hopping, ...] = ()
    onsites: Tuple[Onsite, ...] = ()

    def __post_init__(self):
        if int(self.n_nodes) < 1:
            raise GraphError("A graph needs at least one node, got n_nodes = {}".format(self.n_nodes))
        object.__setattr__(self, "n_nodes", int(self.n_nodes))
        object.__setattr__(self, "hoppings", tuple((int(i), int(j), complex(t)) for i, j, t in self.hoppings))
        object.__setattr__(self, "onsites", tuple((int(i), complex(v)) for i, v in self.onsites))

    def edges(self) -> List[Tuple[int, int]]:
        """Unordered hopping pairs as (min, max)."""
        return [(min(i, j), max(i, j)) for i, j, _ in self.hoppings]


@dataclass(frozen=True)
class Branch:
    """
    A branch subgraph hanging off a single root node of the center.

    `couplings` holds (branch_site, g) where g is the matrix element H_ca(root, site),
    i.e. H[root, site].
    """
    sites: Tuple[int, ...]
    root: int
    couplings: Tuple[Coupling, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        object.__setattr__(self, "root", int(self.root))
        object.__setattr__(self, "couplings", tuple((int(j), complex(g)) for j, g in self.couplings))

    def coupling_vector(self) -> np.ndarray:
        """The couplings g_j laid out in the order of `sites` (zero where absent)."""
        position = {site: n for n, site in enumerate(self.sites)}
        g = np.zeros(len(self.sites), dtype=complex)
        for site, value in self.couplings:
            g[position[site]] += value
        return g


@dataclass(frozen=True)
class Partition:
    center: Tuple[int, ...]
    branches: Tuple[Branch, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(int(c) for c in self.center))
        object.__setattr__(self, "branches", tuple(self.branches))

    @property
    def roots(self) -> Tuple[int, ...]:
        return tuple(b.root for b in self.branches)

    def block_order(self) -> List[int]:
        """Node order (first branch, center, remaining branches) that exposes the block form of H."""
        if not self.branches:
            return list(self.center)
        order = list(self.branches[0].sites) + list(self.center)
        for branch in self.branches[1:]:
            order += list(branch.sites)
        return order


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    """
    Dense complex matrix (or block of one) with a cached hermiticity flag.

    The array is copied on construction and made read-only.
    """
    values: np.ndarray
    hermitian: bool = field(init=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.ndim != 2:
            raise DimensionMismatch("Expected a 2-d array, got shape {}".format(values.shape))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "hermitian", _is_hermitian(values))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        return np.array(self.values, dtype=dtype)


def _is_hermitian(values: np.ndarray) -> bool:
    rows, cols = values.shape
    if rows != cols:
        return False
    if values.size == 0:
        return True
    return bool(np.max(np.abs(values - values.conj().T)) < HERMITIAN_TOL)


def _check_index(i: int, n: int, what: str):
    if not 0 <= i < n:
        raise IndexOutOfRange("{} index {} outside [0, {})".format(what, i, n))


# ============================================================================
#  assembly and blocks
# ============================================================================
def build_hamiltonian(spec: GraphSpec) -> HamiltonianMatrix:
    """
    Assemble the dense Hamiltonian of a graph.

    Parameters
    ----------
    spec : GraphSpec

    Returns
    -------
    H : HamiltonianMatrix
        H[i, j] = t and H[j, i] = conj(t) for every hopping, the onsite values summed
        on the diagonal, zero elsewhere.
    """
    n = spec.n_nodes
    H = np.zeros((n, n), dtype=complex)
    seen = set()

    for i, j, t in spec.hoppings:
        _check_index(i, n, "Hopping")
        _check_index(j, n, "Hopping")
        if i == j:
            raise SelfLoop("Hopping from node {} to itself; use an onsite entry instead".format(i))
        edge = (min(i, j), max(i, j))
        if edge in seen:
            raise DuplicateEdge("Nodes {} and {} are joined by more than one hopping".format(*edge))
        seen.add(edge)
        H[i, j] = t
        H[j, i] = np.conj(t)

    for i, v in spec.onsites:
        _check_index(i, n, "Onsite")
        H[i, i] += v

    return HamiltonianMatrix(H)


def extract_block(H: HamiltonianMatrix, rows: Sequence[int], cols: Sequence[int]) -> HamiltonianMatrix:
    """Submatrix H[rows, cols] in the given node order."""
    n_rows, n_cols = H.shape
    for r in rows:
        _check_index(r, n_rows, "Row")
    for c in cols:
        _check_index(c, n_cols, "Column")
    rows = np.asarray(list(rows), dtype=int)
    cols = np.asarray(list(cols), dtype=int)
    return HamiltonianMatrix(H.values[np.ix_(rows, cols)])


def make_branch(spec: GraphSpec, sites: Iterable[int], root: int) -> Branch:
    """Build a Branch whose couplings are read off the assembled H_ca row of `root`."""
    H = build_hamiltonian(spec).values
    sites = tuple(sites)
    _check_index(root, spec.n_nodes, "Root")
    couplings = tuple((j, H[root, j]) for j in sites if H[root, j] != 0)
    return Branch(sites=sites, root=root, couplings=couplings)


# ============================================================================
#  partition validation
# ============================================================================
class ViolationKind(enum.Enum):
    SINGLE_ROOT = "SingleRootViolation"
    BRANCH_CROSS_COUPLING = "BranchCrossCoupling"
    COVERAGE_GAP = "CoverageGap"
    ROOT_NOT_IN_CENTER = "RootNotInCenter"
    FOREIGN_COUPLING_SITE = "ForeignCouplingSite"
    COUPLING_MISMATCH = "CouplingMismatch"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    message: str
    nodes: Tuple[int, ...] = ()


@dataclass(frozen=True)
class PartitionReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v.kind for v in self.violations}


def validate_partition(spec: GraphSpec, p: Partition) -> PartitionReport:
    """
    Check that a partition has the single-root structure the projection relies on.

    Violations are collected, never raised: an empty report means the partition is valid.
    """
    n = spec.n_nodes
    violations = []

    # Every node belongs to exactly one of center / branches
    owner = {}
    groups = [("center", p.center)] + [("branch {}".format(b), br.sites) for b, br in enumerate(p.branches)]
    for name, nodes in groups:
        for node in nodes:
            if not 0 <= node < n:
                violations.append(Violation(ViolationKind.COVERAGE_GAP,
                                            "{} lists node {} outside [0, {})".format(name, node, n), (node,)))
            elif node in owner:
                violations.append(Violation(ViolationKind.COVERAGE_GAP,
                                            "node {} assigned to both {} and {}".format(node, owner[node], name), (node,)))
            else:
                owner[node] = name
    for node in range(n):
        if node not in owner:
            violations.append(Violation(ViolationKind.COVERAGE_GAP, "node {} is unassigned".format(node), (node,)))

    center = set(p.center)
    branch_of = {}
    for b, branch in enumerate(p.branches):
        for site in branch.sites:
            branch_of.setdefault(site, b)

    for b, branch in enumerate(p.branches):
        sites = set(branch.sites)
        if branch.root not in center or branch.root in sites:
            violations.append(Violation(ViolationKind.ROOT_NOT_IN_CENTER,
                                        "branch {} has root {} outside the center".format(b, branch.root), (branch.root,)))
        for site, _ in branch.couplings:
            if site not in sites:
                violations.append(Violation(ViolationKind.FOREIGN_COUPLING_SITE,
                                            "branch {} declares a coupling on node {} which is not one of its sites".format(b, site),
                                            (site,)))

    # Edge structure: the zero blocks of the block form
    attachments = {}
    for i, j in spec.edges():
        bi, bj = branch_of.get(i), branch_of.get(j)
        if bi is not None and bj is not None and bi != bj:
            violations.append(Violation(ViolationKind.BRANCH_CROSS_COUPLING,
                                        "edge ({}, {}) joins branch {} and branch {}".format(i, j, bi, bj), (i, j)))
        elif bi is not None and j in center:
            attachments.setdefault(bi, set()).add(j)
        elif bj is not None and i in center:
            attachments.setdefault(bj, set()).add(i)

    for b, branch in enumerate(p.branches):
        foreign = sorted(attachments.get(b, set()) - {branch.root})
        if foreign:
            violations.append(Violation(ViolationKind.SINGLE_ROOT,
                                        "branch {} couples to center node(s) {} besides its root {}".format(b, foreign, branch.root),
                                        tuple(foreign)))

    # Declared couplings must be the H_ca matrix elements
    if not violations:
        H = build_hamiltonian(spec).values
        for b, branch in enumerate(p.branches):
            declared = branch.coupling_vector()
            actual = H[branch.root, list(branch.sites)]
            if not np.allclose(declared, actual, rtol=0.0, atol=HERMITIAN_TOL):
                violations.append(Violation(ViolationKind.COUPLING_MISMATCH,
                                            "branch {} couplings {} differ from H[{}, sites] = {}".format(
                                                b, declared.tolist(), branch.root, actual.tolist()),
                                            (branch.root,)))

    return PartitionReport(tuple(violations))
