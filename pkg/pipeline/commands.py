###############################################################################################
#
# One function per CLI command. Each runs the computation and returns a RunReport; printing and
# exit handling stay in main.py.
#
###############################################################################################

import logging
import math
import warnings
from typing import Optional

import numpy as np

from core.graph import GraphSpec, Partition, build_hamiltonian
from core.numerics import align_phase, eig_general, eig_hermitian, match_eigenvalues, subspace_distance
from helpers.config import RING_SPECTRUM_TOL
from helpers.errors import GraphfoldError, GridTooCoarseWarning
from helpers.report import EXIT_OK, EXIT_VIOLATION, RunReport
from models.chain import (ChainPartitionParams, chain_effective_matrix, chain_eigenpair, chain_partition,
                          chain_restricted_eigenvector, chain_root_potentials)
from models.ring import (LeadSide, RingParams, lead_self_energy, mirror_check, pt_check, ring_analytic_spectrum,
                         ring_center_spec, ring_effective_hamiltonian, ring_effective_spectrum,
                         ring_plus_v_state, ring_scattering_state)
from pipeline.partition import (CenterProjection, SelfEnergy, assemble_effective, find_center_eigenvalues,
                                verify_projection)

logger = logging.getLogger(__name__)


def _require_partition(partition: Optional[Partition], command: str) -> Partition:
    if partition is None:
        raise GraphfoldError("'{}' needs a graph file with a partition".format(command))
    return partition


def verify(spec: GraphSpec, partition: Optional[Partition], tol: float, source: str = "") -> RunReport:
    """Consistency of every full eigenpair with the projected equation; a graph without a partition is all center."""
    if partition is None:
        partition = Partition(center=range(spec.n_nodes))
    report = verify_projection(spec, partition, tol=tol)

    rows = [{"index": e.index, "energy": e.energy, "residual": e.residual, "status": e.status.value}
            for e in report.entries]
    return RunReport(
        command="verify",
        inputs={"file": source, "tol": tol},
        results={"eigenpairs": rows, "counts": report.counts(), "max_residual": report.max_residual,
                 "consistent": report.consistent},
        exit_code=EXIT_OK if report.consistent else EXIT_VIOLATION,
    )


def spectrum(spec: GraphSpec, source: str = "") -> RunReport:
    H = build_hamiltonian(spec)
    result = eig_hermitian(H) if H.hermitian else eig_general(H)
    rows = [{"index": n, "energy": E} for n, E in enumerate(result.eigenvalues)]
    return RunReport(command="spectrum", inputs={"file": source},
                     results={"hermitian": H.hermitian, "eigenvalues": rows})


def effective(spec: GraphSpec, partition: Optional[Partition], energy: float, source: str = "") -> RunReport:
    """Root self-energies and the eigenvalues of the projection Hamiltonian at a fixed energy."""
    partition = _require_partition(partition, "effective")
    projection = CenterProjection(spec, partition)
    sigmas = projection.self_energies(energy)
    H_eff = assemble_effective(projection.H_c, projection.center, sigmas)
    result = eig_general(H_eff)

    return RunReport(
        command="effective",
        inputs={"file": source, "energy": energy},
        results={
            "self_energies": [{"root": s.root, "value": s.value} for s in sigmas],
            "eigenvalues": [{"index": n, "energy": E} for n, E in enumerate(result.eigenvalues)],
        },
    )


def roots(spec: GraphSpec, partition: Optional[Partition], emin: Optional[float], emax: Optional[float],
          grid: int, tol: float, source: str = "") -> RunReport:
    """Self-consistent eigenvalues of the projection Hamiltonian, compared with the full spectrum."""
    partition = _require_partition(partition, "roots")
    H = build_hamiltonian(spec)
    # Gershgorin bound on the spectrum
    bound = float(np.max(np.sum(np.abs(H.values), axis=1))) + 0.5
    emin = -bound if emin is None else emin
    emax = bound if emax is None else emax

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", GridTooCoarseWarning)
        found = find_center_eigenvalues(spec, partition, emin, emax, grid, tol)
    advisories = [str(w.message) for w in caught if issubclass(w.category, GridTooCoarseWarning)]
    for message in advisories:
        logger.warning(message)

    full = np.linalg.eigvalsh(H.values) if H.hermitian else np.linalg.eigvals(H.values)
    rows = [{"energy": E, "distance_to_full": float(np.min(np.abs(full - E)))} for E in found]
    return RunReport(
        command="roots",
        inputs={"file": source, "emin": emin, "emax": emax, "grid": grid, "tol": tol},
        results={"roots": rows, "advisories": advisories},
    )


# ============================================================================
#  demos of the two solvable models
# ============================================================================
def chain_demo(n_a: int, n_c: int, n_b: int, mode: int, tol: float) -> RunReport:
    """
    The open chain cut into (n_a, n_c, n_b) at eigenstate `mode`: root potentials, the spectrum
    of the center with end potentials and its eigenvector at the full-chain energy.
    """
    params = ChainPartitionParams.from_mode(n_a, n_c, n_b, mode)
    energy, f_full = chain_eigenpair(params.n, mode)
    V_A, V_B = chain_root_potentials(params)

    spec, partition = chain_partition(params)
    sigmas = CenterProjection(spec, partition).self_energies(energy)
    potential_deviation = max(abs(sigmas[0].value - V_A), abs(sigmas[1].value - V_B))

    M = chain_effective_matrix(n_c, V_A, V_B)
    levels = eig_hermitian(M).eigenvalues
    amplitudes, f = chain_restricted_eigenvector(params.k, n_a, n_c)
    residual = float(np.linalg.norm(M.values @ f - energy * f) / np.linalg.norm(f))
    distance = subspace_distance(f, f_full[list(partition.center)])

    passed = residual <= tol and distance <= math.sqrt(tol) and potential_deviation <= tol
    return RunReport(
        command="chain-demo",
        inputs={"Na": n_a, "Nc": n_c, "Nb": n_b, "n": mode},
        results={
            "k": params.k,
            "energy": energy,
            "V_A": V_A,
            "V_B": V_B,
            "self_energy_deviation": potential_deviation,
            "effective_spectrum": [{"index": n, "energy": E} for n, E in enumerate(levels)],
            "restricted_eigenvector": f,
            "A": amplitudes.A,
            "B": amplitudes.B,
            "eigenvector_residual": residual,
            "restriction_distance": distance,
        },
        exit_code=EXIT_OK if passed else EXIT_VIOLATION,
    )


def ring_demo(n: int, k: float) -> RunReport:
    """
    The ring with two leads at E_k = V: effective spectrum against the band plus +-V, the PT and
    mirror flags, and the +V eigenvector against the scattering state on the ring.
    """
    params = RingParams(n, k)
    M = ring_effective_hamiltonian(params)
    result = ring_effective_spectrum(params)
    analytic = ring_analytic_spectrum(params)
    deviation = float(np.max(match_eigenvalues(result.eigenvalues, analytic)))

    assembled = assemble_effective(build_hamiltonian(ring_center_spec(params)), range(params.size), [
        SelfEnergy(0, params.energy, lead_self_energy(k, LeadSide.INPUT)),
        SelfEnergy(params.n, params.energy, lead_self_energy(k, LeadSide.OUTPUT)),
    ])
    assembly_deviation = float(np.max(np.abs(assembled.values - M.values)))

    reference = ring_scattering_state(params).f_c
    reference = reference / np.linalg.norm(reference)
    vector = align_phase(ring_plus_v_state(params), reference)
    vector_distance = float(np.linalg.norm(vector - reference))

    pt = pt_check(M, axis_site=params.n)
    max_imag = float(np.max(np.abs(result.eigenvalues.imag)))
    passed = pt and max(deviation, max_imag, vector_distance) <= RING_SPECTRUM_TOL
    return RunReport(
        command="ring-demo",
        inputs={"N": n, "k": k},
        results={
            "V": params.v,
            "spectrum": [{"index": m, "computed": E, "analytic": a}
                         for m, (E, a) in enumerate(zip(result.eigenvalues, analytic))],
            "max_deviation": deviation,
            "max_imag": max_imag,
            "pt_symmetric": pt,
            "mirror_symmetric": mirror_check(M, axis_site=0),
            "assembly_deviation": assembly_deviation,
            "plus_v_eigenvector_distance": vector_distance,
        },
        exit_code=EXIT_OK if passed else EXIT_VIOLATION,
    )
