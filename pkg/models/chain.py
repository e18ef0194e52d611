###############################################################################################
#
# The finite uniform chain cut into two end branches and a central part.
#
# INFO: Sites are labelled j = 1..N in the closed forms below and stored 0-based (node j - 1).
#       Hoppings carry the -J sign, J = 1.
#
###############################################################################################

import cmath
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.graph import GraphSpec, HamiltonianMatrix, Partition, make_branch
from helpers.errors import IndexOutOfRange, InvalidArgument, PotentialUndefined

# Closed-form potentials are undefined when a denominator falls below this
DENOMINATOR_TOL = 1e-12


@dataclass(frozen=True)
class ChainPartitionParams:
    """
    A chain of N = n_a + n_c + n_b sites with wavenumber k.

    Branch a is sites 1..n_a, the center n_a+1..n_a+n_c and branch b the rest.
    """
    n_a: int
    n_c: int
    n_b: int
    k: float

    def __post_init__(self):
        for name in ("n_a", "n_c", "n_b"):
            if int(getattr(self, name)) < 1:
                raise InvalidArgument("{} must be a positive integer, got {}".format(name, getattr(self, name)))
            object.__setattr__(self, name, int(getattr(self, name)))
        if not 0 < self.k < math.pi:
            raise InvalidArgument("k must lie in (0, pi), got {}".format(self.k))

    @property
    def n(self) -> int:
        return self.n_a + self.n_c + self.n_b

    @classmethod
    def from_mode(cls, n_a: int, n_c: int, n_b: int, mode: int) -> "ChainPartitionParams":
        """Params for the full-chain eigenstate k = mode * pi / (N + 1)."""
        n = n_a + n_c + n_b
        if not 1 <= mode <= n:
            raise IndexOutOfRange("mode {} outside [1, {}]".format(mode, n))
        return cls(n_a, n_c, n_b, mode * math.pi / (n + 1))


@dataclass(frozen=True)
class BetheAmplitudes:
    """f(j) = A e^{i kappa j} + B e^{-i kappa j}."""
    A: complex
    B: complex
    kappa: complex

    def __call__(self, j) -> np.ndarray:
        j = np.asarray(j)
        return self.A * np.exp(1j * self.kappa * j) + self.B * np.exp(-1j * self.kappa * j)


# ============================================================================
#  constructors
# ============================================================================
def chain_graph(n: int) -> GraphSpec:
    """Open chain of n sites with hoppings -1."""
    if n < 1:
        raise InvalidArgument("A chain needs at least one site, got {}".format(n))
    return GraphSpec(n_nodes=n, hoppings=[(j, j + 1, -1.0) for j in range(n - 1)])


def chain_partition(params: ChainPartitionParams) -> Tuple[GraphSpec, Partition]:
    """The open chain and its (branch a, center, branch b) partition."""
    spec = chain_graph(params.n)
    start, stop = params.n_a, params.n_a + params.n_c
    branch_a = make_branch(spec, range(0, start), root=start)
    branch_b = make_branch(spec, range(stop, params.n), root=stop - 1)
    return spec, Partition(center=range(start, stop), branches=(branch_a, branch_b))


def chain_effective_matrix(n_c: int, V_A: complex, V_B: complex) -> HamiltonianMatrix:
    """Center chain of n_c sites with V_A on its first and V_B on its last site."""
    H = np.zeros((n_c, n_c), dtype=complex)
    for j in range(n_c - 1):
        H[j, j + 1] = H[j + 1, j] = -1.0
    H[0, 0] += V_A
    H[n_c - 1, n_c - 1] += V_B
    return HamiltonianMatrix(H)


def energy_to_wavenumber(E: complex) -> complex:
    """kappa with E = -2 cos(kappa); complex outside the band |E| <= 2."""
    return complex(np.arccos(complex(-E / 2)))


# ============================================================================
#  closed forms
# ============================================================================
def chain_eigenpair(n: int, mode: int) -> Tuple[float, np.ndarray]:
    """
    Eigenpair `mode` of the open n-site chain.

    Returns
    -------
    E : float
        -2 cos k with k = mode * pi / (n + 1).
    f : (n,) ndarray
        sqrt(2 / (n + 1)) sin(k j), j = 1..n; unit norm.
    """
    if not 1 <= mode <= n:
        raise IndexOutOfRange("mode {} outside [1, {}]".format(mode, n))
    k = mode * math.pi / (n + 1)
    j = np.arange(1, n + 1)
    return -2.0 * math.cos(k), math.sqrt(2.0 / (n + 1)) * np.sin(k * j)


def _safe_ratio(num: float, den: float, what: str) -> float:
    if abs(den) < DENOMINATOR_TOL:
        raise PotentialUndefined("{} is undefined: its denominator {:.3e} vanishes".format(what, den))
    return num / den


def chain_root_potentials(params: ChainPartitionParams) -> Tuple[float, float]:
    """
    On-site potentials the two branches put on the ends of the center.

        V_A = -sin(k n_a) / sin(k (n_a + 1))
        V_B = -sin(k (n_a + n_c + 1)) / sin(k (n_a + n_c))

    Raises
    ------
    PotentialUndefined
        When the root of a branch is a node of the state.
    """
    k, n_a, n_c = params.k, params.n_a, params.n_c
    V_A = -_safe_ratio(math.sin(k * n_a), math.sin(k * (n_a + 1)), "V_A")
    V_B = -_safe_ratio(math.sin(k * (n_a + n_c + 1)), math.sin(k * (n_a + n_c)), "V_B")
    return V_A, V_B


def chain_secular_residual(kappa: complex, n_c: int, V_A: complex, V_B: complex) -> complex:
    """sin(kappa (n_c+1)) + (V_A + V_B) sin(kappa n_c) + V_A V_B sin(kappa (n_c-1))."""
    return complex(cmath.sin(kappa * (n_c + 1))
                   + (V_A + V_B) * cmath.sin(kappa * n_c)
                   + V_A * V_B * cmath.sin(kappa * (n_c - 1)))


def chain_combined_secular_residual(k: float, kappa: complex, n_a: int, n_c: int) -> complex:
    """
    The secular residual with V_A and V_B written out in terms of k.

    Vanishes at kappa = k for every cut of the chain.
    """
    den = math.sin(k * (n_a + 1)) * math.sin(k * (n_a + n_c))
    prefactor = _safe_ratio(math.sin(k), den, "The combined residual")
    bracket = math.sin(k * (n_c - 1)) * cmath.sin(kappa * n_c) - math.sin(k * n_c) * cmath.sin(kappa * (n_c - 1))
    return complex(prefactor * bracket + 2 * cmath.sin(kappa * n_c) * (cmath.cos(kappa) - math.cos(k)))


def chain_restricted_eigenvector(k: float, n_a: int, n_c: int) -> Tuple[BetheAmplitudes, np.ndarray]:
    """
    Eigenvector of the center with end potentials, at E = -2 cos k.

    The Bethe amplitudes satisfy B / A = -exp(-2 i k n_a), so f(j) is proportional to
    sin(k (n_a + j)), j = 1..n_c. The vector is scaled to max |f| = 1 with its first nonzero
    entry positive, and A, B carry the same scale.
    """
    chain_root_potentials(ChainPartitionParams(n_a, n_c, 1, k))

    A = cmath.exp(1j * k * n_a) / 2j
    amplitudes = BetheAmplitudes(A=A, B=-A * cmath.exp(-2j * k * n_a), kappa=k)
    f = np.sin(k * (n_a + np.arange(1, n_c + 1)))

    first = f[np.flatnonzero(np.abs(f) > DENOMINATOR_TOL)[0]]
    scale = math.copysign(1.0, first) / np.max(np.abs(f))
    scaled = BetheAmplitudes(A=amplitudes.A * scale, B=amplitudes.B * scale, kappa=k)
    return scaled, f * scale
