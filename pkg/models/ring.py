###############################################################################################
#
# A uniform ring of 2N sites used as a scattering center between two semi-infinite leads.
#
# INFO: Ring site l = 1..2N is node l - 1. Lead a attaches to site 1, lead b to site N+1, both
#       with matrix element -sqrt(2). The incident energy is fixed to E_k = V = -2 cos k, with
#       lead a on the incoming side.
#
###############################################################################################

import enum
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.graph import GraphSpec, HamiltonianMatrix, Partition, build_hamiltonian, make_branch
from core.numerics import Spectrum, eig_general
from helpers.errors import DimensionMismatch, IndexOutOfRange, InvalidArgument

LEAD_COUPLING = -math.sqrt(2.0)
LEAD_HOPPING = -1.0

# Max-entry tolerance of the symmetry checks
SYMMETRY_TOL = 1e-12

# Eigenvalues closer than this are one level split by a defective projection; at k = pi/2 the
# split is ~eps^(1/3)
CLUSTER_WIDTH = 1e-4


@dataclass(frozen=True)
class RingParams:
    n: int
    k: float

    def __post_init__(self):
        if int(self.n) < 2:
            raise InvalidArgument("The ring needs N >= 2 (2N >= 4 sites), got N = {}".format(self.n))
        object.__setattr__(self, "n", int(self.n))
        if not 0 < self.k < math.pi:
            raise InvalidArgument("k must lie in (0, pi), got {}".format(self.k))

    @property
    def v(self) -> float:
        return -2.0 * math.cos(self.k)

    @property
    def energy(self) -> float:
        """Incident energy E_k, equal to V."""
        return self.v

    @property
    def size(self) -> int:
        return 2 * self.n


class LeadSide(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True, eq=False)
class ScatteringState:
    """
    Unit-amplitude plane wave through the ring at E_k = V.

    `f_c` holds the 2N ring amplitudes in node order; the lead amplitudes are functions of the
    lead label l (l <= -1 on lead a, l >= 1 on lead b).
    """
    params: RingParams
    f_c: np.ndarray

    def f_a(self, l: int) -> complex:
        if l > -1:
            raise IndexOutOfRange("lead a sites are l <= -1, got {}".format(l))
        return complex(np.exp(1j * self.params.k * (l + 1)))

    def f_b(self, l: int) -> complex:
        if l < 1:
            raise IndexOutOfRange("lead b sites are l >= 1, got {}".format(l))
        return complex(np.exp(1j * self.params.k * (l + self.params.n + 1)))

    def on_graph(self, lead_length: int) -> np.ndarray:
        """The state laid out on the nodes of ring_graph(params, lead_length)."""
        m = np.arange(lead_length)
        f_a = np.exp(-1j * self.params.k * m)
        f_b = np.exp(1j * self.params.k * (m + 1 + self.params.n + 1))
        return np.concatenate([self.f_c, f_a, f_b])


def ring_scattering_state(params: RingParams) -> ScatteringState:
    """f_c(l) = e^{ikl} / sqrt(2) for l = 1..N+1, mirrored by f_c(l) = f_c(2N+2-l)."""
    n, k = params.n, params.k
    labels = np.arange(1, 2 * n + 1)
    mirrored = np.where(labels <= n + 1, labels, 2 * n + 2 - labels)
    return ScatteringState(params=params, f_c=np.exp(1j * k * mirrored) / math.sqrt(2.0))


# ============================================================================
#  graphs
# ============================================================================
def ring_center_spec(params: RingParams) -> GraphSpec:
    """The closed ring with -V on sites 1 and N+1."""
    n2 = params.size
    hoppings = [(j, (j + 1) % n2, -1.0) for j in range(n2)]
    return GraphSpec(n_nodes=n2, hoppings=hoppings, onsites=[(0, -params.v), (params.n, -params.v)])


def ring_graph(params: RingParams, lead_length: int) -> Tuple[GraphSpec, Partition]:
    """
    Ring plus two leads truncated after `lead_length` sites.

    Nodes 0..2N-1 are the ring, the next `lead_length` nodes are lead a from l = -1 outwards,
    the last `lead_length` nodes are lead b from l = 1 outwards.
    """
    if lead_length < 1:
        raise InvalidArgument("lead_length must be positive, got {}".format(lead_length))
    center = ring_center_spec(params)
    n2 = params.size
    lead_a = list(range(n2, n2 + lead_length))
    lead_b = list(range(n2 + lead_length, n2 + 2 * lead_length))

    hoppings = list(center.hoppings)
    hoppings.append((0, lead_a[0], LEAD_COUPLING))
    hoppings.append((params.n, lead_b[0], LEAD_COUPLING))
    for lead in (lead_a, lead_b):
        hoppings += [(lead[m], lead[m + 1], LEAD_HOPPING) for m in range(lead_length - 1)]

    spec = GraphSpec(n_nodes=n2 + 2 * lead_length, hoppings=hoppings, onsites=center.onsites)
    partition = Partition(center=range(n2),
                          branches=(make_branch(spec, lead_a, root=0), make_branch(spec, lead_b, root=params.n)))
    return spec, partition


# ============================================================================
#  lead self-energies
# ============================================================================
def lead_self_energy(k: float, side: LeadSide) -> complex:
    """Self-energy of a semi-infinite lead at E = -2 cos k: -2e^{-ik} incoming, -2e^{ik} outgoing."""
    if side == LeadSide.INPUT:
        return -2.0 * complex(np.exp(-1j * k))
    return -2.0 * complex(np.exp(1j * k))


def surface_self_energy(z: complex, coupling: float = LEAD_COUPLING, hopping: float = LEAD_HOPPING) -> complex:
    """
    Self-energy of a semi-infinite uniform chain coupled through its end site, at complex z.

    The end-site Green function is g = s / t with s the root of s^2 - (z/t) s + 1 = 0 that
    decays into the lead (|s| < 1). On the real axis inside the band, where both roots have
    |s| = 1, the retarded one (Im g < 0) is returned.
    """
    roots = np.roots([1.0, -z / hopping, 1.0])
    if abs(abs(roots[0]) - abs(roots[1])) < 1e-12:
        s = min(roots, key=lambda r: (r / hopping).imag)
    else:
        s = min(roots, key=abs)
    return complex(coupling ** 2 * s / hopping)


# ============================================================================
#  projection Hamiltonian and its spectrum
# ============================================================================
def ring_effective_hamiltonian(params: RingParams) -> HamiltonianMatrix:
    """Ring hoppings -1 with +2i sin k on site 1 and -2i sin k on site N+1."""
    H = np.array(build_hamiltonian(ring_center_spec(params)).values)
    gain = 2j * math.sin(params.k)
    H[0, 0] = gain
    H[params.n, params.n] = -gain
    return HamiltonianMatrix(H)


def ring_effective_spectrum(params: RingParams) -> Spectrum:
    """
    Eigenpairs of the ring projection, with eigenvalue clusters narrower than CLUSTER_WIDTH
    replaced by their mean.

    At k N / pi integer the levels +-V hit the band and the projection is defective; the
    eigensolver splits such a level by ~sqrt(eps), or ~eps^(1/3) where +V, -V and a band level meet at
    k = pi/2, but the split values sum to the exact trace.
    """
    spectrum = eig_general(ring_effective_hamiltonian(params))
    return Spectrum(eigenvalues=merge_clusters(spectrum.eigenvalues, CLUSTER_WIDTH),
                    eigenvectors=spectrum.eigenvectors, hermitian_input=False)


def merge_clusters(values: np.ndarray, width: float) -> np.ndarray:
    """Replace every run of sorted values with consecutive gaps below `width` by the run mean."""
    values = np.asarray(values, dtype=complex)
    order = np.lexsort((values.imag, values.real))
    merged = values.copy()
    start = 0
    for m in range(1, len(order) + 1):
        if m == len(order) or abs(values[order[m]] - values[order[m - 1]]) >= width:
            run = order[start:m]
            merged[run] = np.mean(values[run])
            start = m
    return merged


def ring_plus_v_state(params: RingParams) -> np.ndarray:
    """
    Unit eigenvector of the projection at +V, taken as the null vector of M - V in the mirror
    symmetric sector.

    The symmetric sector holds +V once, so the null vector is unique even where +V sits on a
    band level.
    """
    M = ring_effective_hamiltonian(params).values
    Q = _symmetric_basis(params.size)
    S = Q.T @ M @ Q - params.v * np.eye(Q.shape[1])
    _, _, vh = np.linalg.svd(S)
    vector = Q @ vh[-1].conj()
    return vector / np.linalg.norm(vector)


def ring_analytic_spectrum(params: RingParams) -> np.ndarray:
    """The band -2 cos(j pi / N), j = 1..N-1, twice each, plus the two levels +V and -V."""
    band = -2.0 * np.cos(np.arange(1, params.n) * math.pi / params.n)
    return np.sort(np.concatenate([band, band, [params.v, -params.v]]))


def ring_secular_residual(kappa: float, k: float, n: int) -> float:
    return math.sin(kappa * n) * (math.sin(kappa) ** 2 - math.sin(k) ** 2)


# ============================================================================
#  symmetries
# ============================================================================
def reflection_matrix(size: int, axis_site: int) -> np.ndarray:
    """Permutation |j> -> |(axis_site - j) mod size>; reflects the ring about a line through node axis_site / 2."""
    P = np.zeros((size, size))
    j = np.arange(size)
    P[(axis_site - j) % size, j] = 1.0
    return P


def _square(M) -> np.ndarray:
    A = np.array(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch("Expected a square matrix, got shape {}".format(A.shape))
    return A


def pt_check(M, axis_site: int) -> bool:
    """
    True iff P conj(M) P = M, with P the reflection j -> axis_site - j (mod size).

    The balanced gain and loss of the ring projection sit on nodes 0 and N and are swapped by
    axis_site = N.
    """
    A = _square(M)
    P = reflection_matrix(A.shape[0], axis_site)
    return bool(np.max(np.abs(P @ A.conj() @ P - A), initial=0.0) < SYMMETRY_TOL)


def mirror_check(M, axis_site: int = 0) -> bool:
    """True iff the reflection j -> axis_site - j (mod size) commutes with M."""
    A = _square(M)
    P = reflection_matrix(A.shape[0], axis_site)
    return bool(np.max(np.abs(P @ A @ P - A), initial=0.0) < SYMMETRY_TOL)


def _symmetric_basis(size: int) -> np.ndarray:
    """Columns e_0, (e_j + e_{2N-j}) / sqrt(2) for j = 1..N-1, e_N."""
    if size % 2:
        raise DimensionMismatch("A ring of 2N sites was expected, got {}".format(size))
    n = size // 2
    Q = np.zeros((size, n + 1))
    Q[0, 0] = 1.0
    Q[n, n] = 1.0
    for j in range(1, n):
        Q[j, j] = Q[size - j, j] = 1.0 / math.sqrt(2.0)
    return Q


def ring_symmetric_sector(M) -> HamiltonianMatrix:
    """M restricted to states symmetric under the mirror through ring sites 1 and N+1."""
    A = _square(M)
    Q = _symmetric_basis(A.shape[0])
    return HamiltonianMatrix(Q.T @ A @ Q)
