###############################################################################################
#
# Projection of a partitioned graph onto its central graph.
#
# Each branch a hangs off a single root node A of the center, so
#
#     H_ca (E - H_a)^-1 H_ac
#
# has a single nonzero entry at (A, A): an energy dependent on-site potential. The projection
# Hamiltonian is H_c plus one such potential per branch, and it reproduces every eigenpair of the
# full graph restricted to the center.
#
###############################################################################################

import enum
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from core.graph import Branch, GraphSpec, HamiltonianMatrix, Partition, build_hamiltonian, extract_block
from core.numerics import eig_hermitian, resolvent_apply, smallest_singular_value
from helpers.config import POLE_WINDOW, RESIDUAL_TOL, ROOT_AMPLITUDE_TOL, ROOT_SEARCH_MAXITER
from helpers.errors import GridTooCoarseWarning, InvalidArgument, NotHermitian, SingularResolvent, ZeroRootAmplitude

logger = logging.getLogger(__name__)

# |f_root| at or below this is treated as zero by self_energy_from_state
ZERO_AMPLITUDE = 1e-12


@dataclass(frozen=True)
class SelfEnergy:
    """Effective on-site potential at a branch-root node, evaluated at one energy."""
    root: Optional[int]
    energy: complex
    value: complex


def _coupling_vector(couplings, n: int, sites: Optional[Sequence[int]]) -> np.ndarray:
    position = {site: k for k, site in enumerate(sites)} if sites is not None else None
    g = np.zeros(n, dtype=complex)
    for site, value in couplings:
        g[position[site] if position is not None else site] += value
    return g


def branch_self_energy(H_branch, couplings, E: complex, sites: Optional[Sequence[int]] = None,
                       root: Optional[int] = None) -> SelfEnergy:
    """
    Self-energy of one branch at its root: sum_{j,j'} g_j conj(g_j') [(E - H_a)^-1]_{j j'}.

    Parameters
    ----------
    H_branch : (n, n) HamiltonianMatrix or array
        The branch block H_a.
    couplings : sequence of (site, g)
        g is the matrix element H_ca(root, site). Sites are positions in H_branch, or
        global node indices when `sites` gives the node order of H_branch.
    E : complex
    sites : sequence of int, optional
    root : int, optional
        Only recorded on the result.

    Returns
    -------
    SelfEnergy
    """
    n = np.asarray(H_branch).shape[0]
    g = _coupling_vector(couplings, n, sites)
    # (E - H_a) x = H_ac column = conj(g)
    x = resolvent_apply(H_branch, E, g.conj())
    return SelfEnergy(root=root, energy=E, value=complex(g @ x))


def self_energy_from_state(g, f_branch: Union[Mapping, Callable, np.ndarray], f_root: complex) -> complex:
    """
    Self-energy as the coupling-weighted sum of branch amplitudes over the root amplitude.

    `f_branch` is anything indexable (or callable) by the sites named in `g`.
    """
    if abs(f_root) <= ZERO_AMPLITUDE:
        raise ZeroRootAmplitude("Root amplitude {} vanishes; the potential is undefined".format(f_root))
    amplitude = f_branch if callable(f_branch) else f_branch.__getitem__
    return complex(sum(value * amplitude(site) for site, value in g) / f_root)


def branch_poles(H_branch, couplings, sites: Optional[Sequence[int]] = None) -> List[Tuple[float, float]]:
    """
    Eigenvalues of a Hermitian branch with their residues |<v_m, g*>|^2 in the self-energy.

    A residue of zero means the eigenvalue is not a pole of the self-energy.
    """
    spectrum = eig_hermitian(H_branch)
    g = _coupling_vector(couplings, len(spectrum), sites)
    weights = np.abs(g @ spectrum.eigenvectors) ** 2
    return [(float(lam), float(w)) for lam, w in zip(spectrum.eigenvalues, weights)]


def assemble_effective(H_c, center: Sequence[int], self_energies) -> HamiltonianMatrix:
    """H_c with each self-energy added on the diagonal entry of its root."""
    values = np.array(H_c, dtype=complex)
    position = {node: k for k, node in enumerate(center)}
    for sigma in self_energies:
        k = position[sigma.root]
        values[k, k] += sigma.value
    return HamiltonianMatrix(values)


class CenterProjection:
    """
    The blocks of H for one partition, kept around so many energies can be evaluated cheaply.

    Couplings are read from H itself (H_ca(root, j) = H[root, j]); validate_partition checks
    that the declared couplings agree.
    """

    def __init__(self, spec: GraphSpec, partition: Partition):
        self.spec = spec
        self.partition = partition
        self.H = build_hamiltonian(spec)
        self.center = list(partition.center)
        self.H_c = extract_block(self.H, self.center, self.center)
        self.branch_blocks = []
        for branch in partition.branches:
            sites = list(branch.sites)
            H_a = extract_block(self.H, sites, sites)
            H_ac = extract_block(self.H, sites, self.center)
            couplings = tuple(zip(sites, self.H.values[branch.root, sites]))
            self.branch_blocks.append((branch, H_a, H_ac, couplings))

    def self_energies(self, E: complex) -> List[SelfEnergy]:
        result = []
        for b, (branch, H_a, _, couplings) in enumerate(self.branch_blocks):
            try:
                sigma = branch_self_energy(H_a, couplings, E, sites=branch.sites, root=branch.root)
            except SingularResolvent as e:
                raise e.for_branch(b, branch.root) from e
            result.append(sigma)
        return result

    def matrix(self, E: complex) -> HamiltonianMatrix:
        return assemble_effective(self.H_c, self.center, self.self_energies(E))

    def reconstruct(self, E: complex, f_center) -> np.ndarray:
        f_center = np.asarray(f_center, dtype=complex)
        f = np.zeros(self.spec.n_nodes, dtype=complex)
        f[self.center] = f_center
        for b, (branch, H_a, H_ac, _) in enumerate(self.branch_blocks):
            try:
                f_a = resolvent_apply(H_a, E, H_ac.values @ f_center)
            except SingularResolvent as e:
                raise e.for_branch(b, branch.root) from e
            f[list(branch.sites)] = f_a
        return f

    def poles(self) -> List[Tuple[float, float, int]]:
        """(eigenvalue, residue, root) for every branch eigenvalue."""
        found = []
        for branch, H_a, _, couplings in self.branch_blocks:
            for lam, w in branch_poles(H_a, couplings, sites=branch.sites):
                found.append((lam, w, branch.root))
        return found


def effective_hamiltonian(spec: GraphSpec, p: Partition, E: complex) -> HamiltonianMatrix:
    """
    Projection Hamiltonian H_c + sum over branches of their root self-energies.

    Raises
    ------
    SingularResolvent
        Tagged with the branch whose (E - H_a)^-1 does not exist.
    """
    return CenterProjection(spec, p).matrix(E)


def reconstruct_branch_amplitudes(spec: GraphSpec, p: Partition, E: complex, f_center) -> np.ndarray:
    """Full amplitude vector (global node order) with f_a = (E - H_a)^-1 H_ac f_c on every branch."""
    return CenterProjection(spec, p).reconstruct(E, f_center)


# ============================================================================
#  consistency of the full and projected eigenproblems
# ============================================================================
class ProjectionStatus(enum.Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    SKIPPED_ZERO_ROOT_AMPLITUDE = "SkippedZeroRootAmplitude"
    SKIPPED_SINGULAR_BRANCH = "SkippedSingularBranch"

    @property
    def skipped(self) -> bool:
        return self in (ProjectionStatus.SKIPPED_ZERO_ROOT_AMPLITUDE, ProjectionStatus.SKIPPED_SINGULAR_BRANCH)


@dataclass(frozen=True)
class ConsistencyEntry:
    index: int
    energy: float
    residual: Optional[float]
    status: ProjectionStatus


@dataclass(frozen=True)
class ConsistencyReport:
    entries: Tuple[ConsistencyEntry, ...]
    tolerance: float

    @property
    def consistent(self) -> bool:
        return all(e.status != ProjectionStatus.INCONSISTENT for e in self.entries)

    @property
    def max_residual(self) -> float:
        residuals = [e.residual for e in self.entries if e.residual is not None]
        return max(residuals, default=0.0)

    def counts(self) -> dict:
        counts = {status.value: 0 for status in ProjectionStatus}
        for e in self.entries:
            counts[e.status.value] += 1
        return counts

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[e.index, e.energy, e.residual, e.status.value] for e in self.entries],
            columns=["index", "energy", "residual", "status"],
        )


def verify_projection(spec: GraphSpec, p: Partition, tol: float = RESIDUAL_TOL) -> ConsistencyReport:
    """
    Check H_c(E) f_c = E f_c for every eigenpair (E, f) of the full graph.

    Eigenpairs with a node on some root, or whose energy is an eigenvalue of a branch, cannot be
    projected and are reported as skipped. Degenerate eigenvectors are checked one by one.
    """
    projection = CenterProjection(spec, p)
    if not projection.H.hermitian:
        raise NotHermitian("verify_projection needs a Hermitian full Hamiltonian")

    spectrum = eig_hermitian(projection.H)
    center = projection.center
    roots = list(p.roots)
    entries = []

    for index, (E, f) in enumerate(zip(spectrum.eigenvalues, spectrum.eigenvectors.T)):
        E = float(E)
        norm = np.linalg.norm(f)
        if roots and np.min(np.abs(f[roots])) < ROOT_AMPLITUDE_TOL * norm:
            logger.debug("E = {:.12e}: root amplitude vanishes, skipped".format(E))
            entries.append(ConsistencyEntry(index, E, None, ProjectionStatus.SKIPPED_ZERO_ROOT_AMPLITUDE))
            continue
        try:
            H_eff = projection.matrix(E)
        except SingularResolvent as e:
            logger.debug("E = {:.12e}: {}".format(E, e))
            entries.append(ConsistencyEntry(index, E, None, ProjectionStatus.SKIPPED_SINGULAR_BRANCH))
            continue

        f_c = f[center]
        residual = float(np.linalg.norm(H_eff.values @ f_c - E * f_c) / np.linalg.norm(f_c))
        if residual <= tol:
            status = ProjectionStatus.CONSISTENT
        else:
            status = ProjectionStatus.INCONSISTENT
            logger.warning("E = {:.12e}: projected residual {:.3e} above {:.1e}".format(E, residual, tol))
        entries.append(ConsistencyEntry(index, E, residual, status))

    return ConsistencyReport(tuple(entries), tol)


# ============================================================================
#  self-consistent eigenvalues of the projection Hamiltonian
# ============================================================================
def find_center_eigenvalues(spec: GraphSpec, p: Partition, E_min: float, E_max: float,
                            grid: int, tol: float) -> List[float]:
    """
    Energies E in (E_min, E_max) that are eigenvalues of their own projection Hamiltonian H_c(E).

    The smallest singular value s(E) of E - H_c(E) is scanned on a uniform grid, every interior
    local minimum is refined by golden section search to `tol`, and minima with s ~ 0 are kept.
    Windows of POLE_WINDOW * tol around branch eigenvalues are never evaluated. A pole is itself
    reported when the center without the diverging roots is singular there (the eigenvector of
    the full graph then vanishes on the root).

    Emits GridTooCoarseWarning when two eigenvalues of the full graph share a grid cell.
    """
    if grid < 3:
        raise InvalidArgument("grid needs at least 3 points, got {}".format(grid))
    if not E_max > E_min:
        raise InvalidArgument("empty energy range ({}, {})".format(E_min, E_max))

    projection = CenterProjection(spec, p)
    if not projection.H.hermitian:
        raise NotHermitian("find_center_eigenvalues needs a Hermitian full Hamiltonian")

    window = POLE_WINDOW * tol
    poles = projection.poles()
    singular = np.array(sorted(lam for lam, _, _ in poles))
    n_c = len(projection.center)

    def near_singular(E, width):
        return singular.size > 0 and np.min(np.abs(singular - E)) <= width

    def s(E):
        if near_singular(E, window):
            return math.inf
        try:
            H_eff = projection.matrix(E)
        except SingularResolvent:
            return math.inf
        return smallest_singular_value(E * np.eye(n_c) - H_eff.values)

    def accepted(E, value):
        H_eff = projection.matrix(E)
        return value <= math.sqrt(tol) * (1.0 + np.linalg.norm(H_eff.values, 2))

    energies = np.linspace(E_min, E_max, grid)
    values = np.array([s(E) for E in energies])
    cell = energies[1] - energies[0]

    roots = []
    for i in range(1, grid - 1):
        if not (np.isfinite(values[i]) and values[i] <= values[i - 1] and values[i] <= values[i + 1]):
            continue
        lo, hi = energies[i - 1], energies[i + 1]
        for lam in singular:
            if lo - window < lam < energies[i]:
                lo = max(lo, lam + window)
            elif energies[i] <= lam < hi + window:
                hi = min(hi, lam - window)
        if not lo < energies[i] < hi:
            continue
        s_lo, s_hi = s(lo), s(hi)
        if not (values[i] < s_lo and values[i] < s_hi):
            # the minimum runs into a pole window; handled with the poles below
            continue
        scale = max(2.0 * abs(energies[i]), 1.0)
        try:
            result = minimize_scalar(s, bracket=(lo, energies[i], hi), method="golden",
                                     options={"xtol": tol / scale, "maxiter": ROOT_SEARCH_MAXITER})
        except ValueError:
            continue
        E_star, s_star = float(result.x), float(result.fun)
        if near_singular(E_star, 2 * window) or not np.isfinite(s_star):
            continue
        if accepted(E_star, s_star):
            logger.debug("Root at E = {:.12e} (s = {:.3e})".format(E_star, s_star))
            roots.append(E_star)

    roots += _pole_roots(projection, poles, E_min, E_max, window, tol)

    # Merge duplicates found from neighbouring grid cells
    merged = []
    for E in sorted(roots):
        if merged and abs(E - merged[-1]) <= 100 * tol:
            continue
        merged.append(E)

    full = np.sort(np.linalg.eigvalsh(projection.H.values))
    full = full[(full > E_min) & (full < E_max)]
    if full.size > 1 and np.min(np.diff(full)) < cell:
        warnings.warn(GridTooCoarseWarning(
            "Eigenvalues {:.6e} apart share a grid cell of width {:.6e}; increase grid".format(np.min(np.diff(full)), cell)),
            stacklevel=2)

    return merged


def _pole_roots(projection: CenterProjection, poles, E_min, E_max, window, tol) -> List[float]:
    """Branch poles at which the center, with the diverging roots removed, is singular."""
    found = []
    seen = []
    for lam, _, _ in sorted(poles):
        if not E_min < lam < E_max or any(abs(lam - other) <= window for other in seen):
            continue
        seen.append(lam)

        diverging = set()
        for other, w, root in poles:
            if abs(other - lam) <= window:
                branch_g = [couplings for branch, _, _, couplings in projection.branch_blocks if branch.root == root]
                norm_g = max(np.linalg.norm([g for c in branch_g for _, g in c]), 1.0)
                if w > (ROOT_AMPLITUDE_TOL * norm_g) ** 2:
                    diverging.add(root)
        if not diverging:
            continue

        rest = [k for k, node in enumerate(projection.center) if node not in diverging]
        if not rest:
            continue
        H_rest = np.array(projection.H_c.values)
        try:
            for b, (branch, H_a, _, couplings) in enumerate(projection.branch_blocks):
                if branch.root in diverging:
                    continue
                sigma = branch_self_energy(H_a, couplings, lam, sites=branch.sites, root=branch.root)
                k = projection.center.index(branch.root)
                H_rest[k, k] += sigma.value
        except SingularResolvent:
            continue

        M = (lam * np.eye(len(projection.center)) - H_rest)[np.ix_(rest, rest)]
        value = smallest_singular_value(M)
        if value <= math.sqrt(tol) * (1.0 + np.linalg.norm(M, 2)):
            logger.debug("Root at branch pole E = {:.12e} (s = {:.3e})".format(lam, value))
            found.append(float(lam))
    return found
