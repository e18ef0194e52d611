import math

import numpy as np
import pytest

from conftest import SEEDS, random_partitioned_graph
from core.graph import GraphSpec, Partition, build_hamiltonian, extract_block
from core.numerics import eig_general, eig_hermitian, match_eigenvalues, subspace_distance
from helpers.errors import GridTooCoarseWarning, InvalidArgument, NotHermitian, SingularResolvent, ZeroRootAmplitude
from models.chain import ChainPartitionParams, chain_eigenpair, chain_graph, chain_partition
from models.ring import RingParams, ring_scattering_state
from pipeline.partition import (CenterProjection, ProjectionStatus, branch_poles, branch_self_energy,
                                effective_hamiltonian, find_center_eigenvalues, reconstruct_branch_amplitudes,
                                self_energy_from_state, verify_projection)

SQRT2 = math.sqrt(2.0)


def chain_block(n):
    return build_hamiltonian(chain_graph(n))


def branch_gap(H, branch, E):
    """Distance from E to the spectrum of a branch."""
    H_a = extract_block(H, branch.sites, branch.sites)
    return float(np.min(np.abs(eig_hermitian(H_a).eigenvalues - E)))


# ============================================================================
#  branch_self_energy
# ============================================================================
def test_single_site_branch():
    sigma = branch_self_energy(np.array([[0.0]]), [(0, 1.0)], 2.0)
    assert sigma.value == pytest.approx(0.5)
    assert sigma.energy == 2.0


def test_five_site_chain_branch_at_minus_sqrt2():
    sigma = branch_self_energy(chain_block(5), [(4, -1.0)], -SQRT2, root=5)
    assert abs(sigma.value - (-SQRT2 / 2)) < 1e-12
    assert abs(sigma.value.imag) < 1e-15
    assert sigma.root == 5


def test_global_site_labels():
    sigma = branch_self_energy(chain_block(5), [(14, -1.0)], -SQRT2, sites=[10, 11, 12, 13, 14])
    assert abs(sigma.value - (-SQRT2 / 2)) < 1e-12


def test_branch_at_one_of_its_eigenvalues():
    with pytest.raises(SingularResolvent):
        branch_self_energy(chain_block(5), [(4, -1.0)], -2 * math.cos(math.pi / 6))


def test_real_branches_give_real_self_energies():
    rng = np.random.default_rng(11)
    for seed in SEEDS:
        spec, p = random_partitioned_graph(seed)
        projection = CenterProjection(spec, p)
        E = rng.uniform(-3, 3)
        try:
            sigmas = projection.self_energies(E)
        except SingularResolvent:
            continue
        for sigma in sigmas:
            assert abs(sigma.value.imag) < 1e-12


def test_self_energy_poles_change_sign():
    H_a = chain_block(5)
    for lam, weight in branch_poles(H_a, [(4, -1.0)]):
        assert weight > 1e-3
        below = branch_self_energy(H_a, [(4, -1.0)], lam - 1e-6).value.real
        above = branch_self_energy(H_a, [(4, -1.0)], lam + 1e-6).value.real
        assert np.sign(1 / below) != np.sign(1 / above)


def test_uncoupled_eigenvector_has_no_pole():
    # the odd mode of a 3-site chain has a node on the middle site
    poles = branch_poles(chain_block(3), [(1, -1.0)])

    def weight(energy):
        return min(poles, key=lambda pole: abs(pole[0] - energy))[1]

    assert weight(0.0) < 1e-20
    assert weight(-SQRT2) > 0.1


# ============================================================================
#  self_energy_from_state
# ============================================================================
def test_lead_self_energy_from_the_scattering_state():
    k = math.pi / 3
    value = self_energy_from_state([(-1, -SQRT2)], {-1: 1.0}, np.exp(1j * k) / SQRT2)
    assert abs(value - (-2 * np.exp(-1j * k))) < 1e-14

    state = ring_scattering_state(RingParams(4, k))
    assert abs(self_energy_from_state([(-1, -SQRT2)], state.f_a, state.f_c[0]) - (-2 * np.exp(-1j * k))) < 1e-14


def test_zero_branch_amplitudes():
    assert self_energy_from_state([(3, -1.0), (4, -0.5)], np.zeros(5), 0.3) == 0


def test_vanishing_root_amplitude():
    with pytest.raises(ZeroRootAmplitude):
        self_energy_from_state([(0, -1.0)], [1.0], 0.0)


def test_two_routes_on_the_15_site_chain():
    E, f = chain_eigenpair(15, 4)
    from_state = self_energy_from_state([(4, -1.0)], f, f[5])
    from_resolvent = branch_self_energy(chain_block(5), [(4, -1.0)], E).value
    assert abs(from_state - from_resolvent) < 1e-12
    assert abs(from_state - (-SQRT2 / 2)) < 1e-12


def test_two_routes_agree_on_random_graphs():
    checked = 0
    for seed in SEEDS:
        spec, p = random_partitioned_graph(seed)
        H = build_hamiltonian(spec)
        spectrum = eig_hermitian(H)
        for E, f in zip(spectrum.eigenvalues, spectrum.eigenvectors.T):
            for branch in p.branches:
                f_root = f[branch.root]
                # keep norm(f) / |f_root| <= 20 so the bound stays near 1e-10 relative
                if abs(f_root) < 0.05 * np.linalg.norm(f) or branch_gap(H, branch, E) < 1e-6:
                    continue
                H_a = extract_block(H, branch.sites, branch.sites)
                resolvent = branch_self_energy(H_a, branch.couplings, E, sites=branch.sites).value
                state = self_energy_from_state(branch.couplings, f, f_root)
                scale = (1 + abs(resolvent)) * np.linalg.norm(f) / abs(f_root)
                assert abs(resolvent - state) <= 1e-10 * scale
                checked += 1
    assert checked > 100


# ============================================================================
#  effective_hamiltonian
# ============================================================================
def test_15_site_projection_hamiltonian(chain15):
    spec, p = chain15
    H_eff = effective_hamiltonian(spec, p, -SQRT2).values
    np.testing.assert_allclose(np.diag(H_eff), [-SQRT2 / 2, 0, 0, -SQRT2], atol=1e-12)
    off = H_eff - np.diag(np.diag(H_eff))
    np.testing.assert_array_equal(off, build_hamiltonian(chain_graph(4)).values)


def test_15_site_projection_spectrum(chain15):
    spec, p = chain15
    spectrum = eig_general(effective_hamiltonian(spec, p, -SQRT2))
    expected = [SQRT2, 0.0, -SQRT2, -3 * SQRT2 / 2]
    assert np.max(match_eigenvalues(spectrum.eigenvalues, expected)) < 1e-10
    vector = spectrum.eigenvectors[:, spectrum.closest(-SQRT2)]
    assert subspace_distance(vector, [SQRT2, 1.0, 0.0, -1.0]) < 1e-9


def test_no_branches_gives_the_center_block():
    spec = chain_graph(4)
    H_eff = effective_hamiltonian(spec, Partition(center=range(4)), 0.3)
    np.testing.assert_array_equal(H_eff.values, build_hamiltonian(spec).values)


def test_singular_branch_is_identified(chain15):
    spec, p = chain15
    with pytest.raises(SingularResolvent) as info:
        effective_hamiltonian(spec, p, -math.sqrt(3))
    assert info.value.branch == 0
    assert info.value.root == 5


def test_projection_matches_explicit_inverse():
    rng = np.random.default_rng(5)
    checked = 0
    for seed in SEEDS:
        spec, p = random_partitioned_graph(seed, n_branches=3)
        H = build_hamiltonian(spec)
        E = rng.uniform(-3, 3)
        if min(branch_gap(H, b, E) for b in p.branches) < 1e-2:
            continue
        center = list(p.center)
        expected = np.array(H.values[np.ix_(center, center)])
        for b in p.branches:
            sites = list(b.sites)
            inverse = np.linalg.inv(E * np.eye(len(sites)) - H.values[np.ix_(sites, sites)])
            expected += H.values[np.ix_(center, sites)] @ inverse @ H.values[np.ix_(sites, center)]

        H_eff = effective_hamiltonian(spec, p, E).values
        np.testing.assert_allclose(H_eff, expected, rtol=0, atol=1e-10 * (1 + np.max(np.abs(expected))))

        # the branches only touch the diagonal entries of their roots
        correction = H_eff - H.values[np.ix_(center, center)]
        touched = {center.index(b.root) for b in p.branches}
        for i in range(len(center)):
            for j in range(len(center)):
                if i != j or i not in touched:
                    assert correction[i, j] == 0
        checked += 1
    assert checked > 30


# ============================================================================
#  reconstruct_branch_amplitudes
# ============================================================================
def test_15_site_reconstruction(chain15):
    spec, p = chain15
    f = reconstruct_branch_amplitudes(spec, p, -SQRT2, [SQRT2, 1.0, 0.0, -1.0])
    j = np.arange(1, 16)
    np.testing.assert_allclose(f, -SQRT2 * np.sin(j * math.pi / 4), atol=1e-12)


def test_zero_center_reconstructs_zero(chain15):
    spec, p = chain15
    assert not np.any(reconstruct_branch_amplitudes(spec, p, -SQRT2, np.zeros(4)))


def test_reconstruction_matches_full_eigenvectors():
    for seed in SEEDS:
        spec, p = random_partitioned_graph(seed)
        report = verify_projection(spec, p)
        spectrum = eig_hermitian(build_hamiltonian(spec))
        for entry in report.entries:
            if entry.status != ProjectionStatus.CONSISTENT:
                continue
            f = spectrum.eigenvectors[:, entry.index]
            rebuilt = reconstruct_branch_amplitudes(spec, p, entry.energy, f[list(p.center)])
            assert np.linalg.norm(rebuilt - f) <= 1e-8


# ============================================================================
#  verify_projection
# ============================================================================
def test_15_site_verification(chain15):
    spec, p = chain15
    report = verify_projection(spec, p)
    assert len(report.entries) == 15
    assert report.consistent

    entry = min(report.entries, key=lambda e: abs(e.energy + SQRT2))
    assert entry.status == ProjectionStatus.CONSISTENT
    assert entry.residual < 1e-10

    # E = 0 has a node on the left root
    entry = min(report.entries, key=lambda e: abs(e.energy))
    assert entry.status == ProjectionStatus.SKIPPED_ZERO_ROOT_AMPLITUDE
    assert entry.residual is None


def test_nodal_root_is_skipped():
    spec, p = chain_partition(ChainPartitionParams(3, 4, 4, math.pi / 4))
    report = verify_projection(spec, p)
    entry = min(report.entries, key=lambda e: abs(e.energy + SQRT2))
    assert entry.status.skipped
    assert report.consistent
    assert report.counts()["Inconsistent"] == 0


def test_no_branches_is_consistent():
    spec = chain_graph(6)
    report = verify_projection(spec, Partition(center=range(6)))
    assert all(e.status == ProjectionStatus.CONSISTENT for e in report.entries)
    assert report.max_residual < 1e-12


def test_consistency_on_random_graphs():
    for seed in SEEDS:
        spec, p = random_partitioned_graph(seed)
        report = verify_projection(spec, p)
        assert len(report.entries) == spec.n_nodes
        assert report.consistent, seed
        for entry in report.entries:
            if entry.status == ProjectionStatus.CONSISTENT:
                assert entry.residual <= 1e-8


def test_tight_tolerance_reports_inconsistent(chain15):
    spec, p = chain15
    report = verify_projection(spec, p, tol=0.0)
    # exact zero residuals are possible, so only require that the status follows the residual
    for entry in report.entries:
        if entry.residual is not None:
            assert (entry.status == ProjectionStatus.INCONSISTENT) == (entry.residual > 0.0)


def test_report_frame(chain15):
    spec, p = chain15
    frame = verify_projection(spec, p).to_frame()
    assert list(frame.columns) == ["index", "energy", "residual", "status"]
    assert len(frame) == 15


def test_verification_needs_a_hermitian_graph():
    spec = GraphSpec(n_nodes=2, hoppings=[(0, 1, -1)], onsites=[(0, 1j)])
    with pytest.raises(NotHermitian):
        verify_projection(spec, Partition(center=[0, 1]))


# ============================================================================
#  find_center_eigenvalues
# ============================================================================
def test_15_site_self_consistent_energies(chain15):
    spec, p = chain15
    found = np.array(find_center_eigenvalues(spec, p, -2.5, 2.5, 2000, 1e-10))
    for expected in (-SQRT2, 0.0, SQRT2):
        assert np.min(np.abs(found - expected)) < 1e-8
    # the out-of-band level of the fixed-energy matrix is not a full eigenvalue
    assert np.min(np.abs(found + 3 * SQRT2 / 2)) > 1e-3

    full = -2 * np.cos(np.arange(1, 16) * math.pi / 16)
    assert len(found) == 15
    np.testing.assert_allclose(np.sort(found), np.sort(full), atol=1e-8)


def test_no_branches_returns_the_center_spectrum():
    found = find_center_eigenvalues(chain_graph(3), Partition(center=range(3)), -2.5, 2.5, 500, 1e-10)
    np.testing.assert_allclose(found, [-SQRT2, 0.0, SQRT2], atol=1e-8)


def test_single_branch_roots_are_the_full_eigenvalues():
    grid = 4000
    tested = 0
    for seed in range(30):
        spec, p = random_partitioned_graph(seed, n_branches=1)
        H = build_hamiltonian(spec)
        spectrum = eig_hermitian(H)
        bound = float(np.max(np.sum(np.abs(H.values), axis=1))) + 0.5
        cell = 2 * bound / (grid - 1)

        branch = p.branches[0]
        poles = eig_hermitian(extract_block(H, branch.sites, branch.sites)).eigenvalues
        E = spectrum.eigenvalues
        root_amplitudes = np.abs(spectrum.eigenvectors[branch.root, :])
        if (np.min(np.diff(E)) < 5 * cell or np.min(np.abs(E[:, None] - poles[None, :])) < 5 * cell
                or np.min(root_amplitudes) < 1e-6):
            continue

        found = np.array(find_center_eigenvalues(spec, p, -bound, bound, grid, 1e-10))
        assert len(found) == len(E), seed
        np.testing.assert_allclose(found, E, atol=1e-8)
        tested += 1
    assert tested >= 10


def test_grid_too_coarse_warning():
    spec = GraphSpec(n_nodes=2, onsites=[(0, 0.0), (1, 1e-3)])
    with pytest.warns(GridTooCoarseWarning):
        find_center_eigenvalues(spec, Partition(center=[0, 1]), -1.0, 1.0, 11, 1e-10)


def test_root_search_arguments():
    spec = chain_graph(3)
    with pytest.raises(InvalidArgument):
        find_center_eigenvalues(spec, Partition(center=range(3)), -1.0, 1.0, 2, 1e-10)
    with pytest.raises(InvalidArgument):
        find_center_eigenvalues(spec, Partition(center=range(3)), 1.0, -1.0, 100, 1e-10)
