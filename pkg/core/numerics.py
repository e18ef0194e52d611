###############################################################################################
#
# Dense complex linear algebra: resolvent solves and eigendecompositions.
#
# INFO: The resolvent (E - H)^-1 is never formed. Every solve goes through one LU factorisation
#       whose LAPACK condition estimate decides whether the inverse exists at all.
#
###############################################################################################

import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import linalg
from scipy.linalg import LinAlgWarning, get_lapack_funcs
from scipy.optimize import linear_sum_assignment

from core.graph import HamiltonianMatrix
from helpers.config import RCOND_MIN
from helpers.errors import ConvergenceFailure, DimensionMismatch, NotHermitian, SingularResolvent

MatrixLike = Union[HamiltonianMatrix, np.ndarray]

# Residual bound of eigenpairs, relative to the Frobenius norm of the matrix
EIG_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    Eigenvalues and right eigenvectors (as columns, same order).

    Hermitian input gives real eigenvalues in ascending order and orthonormal vectors;
    general input gives complex eigenvalues sorted by (real, imag) and unit-norm vectors.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    hermitian_input: bool

    def __len__(self):
        return len(self.eigenvalues)

    def residuals(self, H: MatrixLike) -> np.ndarray:
        """||H v_i - lambda_i v_i||_2 for every pair."""
        A = _square(H)
        return np.linalg.norm(A @ self.eigenvectors - self.eigenvectors * self.eigenvalues, axis=0)

    def closest(self, energy: complex) -> int:
        """Index of the eigenvalue nearest to `energy`."""
        return int(np.argmin(np.abs(self.eigenvalues - energy)))


def _square(H: MatrixLike) -> np.ndarray:
    A = np.array(H, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch("Expected a square matrix, got shape {}".format(A.shape))
    return A


def _factor(M: np.ndarray):
    """LU factors of M and the reciprocal 1-norm condition estimate."""
    anorm = np.linalg.norm(M, 1)
    if anorm == 0:
        return None, 0.0
    with warnings.catch_warnings():
        # exact zero pivots are reported through rcond below
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = linalg.lu_factor(M, check_finite=False)
    if np.any(np.diag(lu) == 0):
        return (lu, piv), 0.0
    gecon, = get_lapack_funcs(("gecon",), (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    if info != 0:
        return (lu, piv), 0.0
    return (lu, piv), float(rcond)


def resolvent_apply(H: MatrixLike, E: complex, V) -> np.ndarray:
    """
    Solve (E·I - H) X = V.

    Parameters
    ----------
    H : (n, n) HamiltonianMatrix or array
    E : complex
        Energy, possibly off the real axis.
    V : (n,) or (n, m) array
        One right-hand side or several as columns.

    Returns
    -------
    X : array shaped like V

    Raises
    ------
    SingularResolvent
        When the reciprocal condition estimate of E·I - H falls below RCOND_MIN.
    """
    A = _square(H)
    n = A.shape[0]
    V = np.asarray(V, dtype=complex)
    if V.shape[0] != n:
        raise DimensionMismatch("Right-hand side has {} rows, matrix has {}".format(V.shape[0], n))
    if n == 0:
        return np.zeros_like(V)

    factors, rcond = _factor(E * np.eye(n) - A)
    if rcond < RCOND_MIN:
        raise SingularResolvent(E, rcond)
    return linalg.lu_solve(factors, V, check_finite=False)


def eig_hermitian(H: MatrixLike) -> Spectrum:
    M = H if isinstance(H, HamiltonianMatrix) else HamiltonianMatrix(_square(H))
    if not M.hermitian:
        raise NotHermitian("Matrix of shape {} is not Hermitian".format(M.shape))
    try:
        w, v = linalg.eigh(np.array(M.values))
    except linalg.LinAlgError as e:
        raise ConvergenceFailure("Hermitian eigensolver failed: {}".format(e)) from e
    return Spectrum(eigenvalues=w, eigenvectors=v, hermitian_input=True)


def eig_general(M: MatrixLike) -> Spectrum:
    """
    Eigenpairs of a general square matrix, sorted by (real, imag).

    Raises
    ------
    ConvergenceFailure
        If the QR iteration fails or an eigenpair misses the residual bound
        ||M v - lambda v|| <= 1e-9 ||M||_F.
    """
    A = _square(M)
    try:
        w, v = linalg.eig(A)
    except linalg.LinAlgError as e:
        raise ConvergenceFailure("General eigensolver failed: {}".format(e)) from e

    order = np.lexsort((w.imag, w.real))
    w = w[order]
    v = v[:, order]
    v = v / np.linalg.norm(v, axis=0)

    spectrum = Spectrum(eigenvalues=w, eigenvectors=v, hermitian_input=False)
    bound = EIG_RESIDUAL_TOL * np.linalg.norm(A, "fro")
    worst = np.max(spectrum.residuals(A), initial=0.0)
    if worst > bound:
        raise ConvergenceFailure("Eigenpair residual {:.3e} exceeds {:.3e}".format(worst, bound))
    return spectrum


def smallest_singular_value(M: MatrixLike) -> float:
    A = np.array(M, dtype=complex)
    if A.size == 0:
        return float("inf")
    return float(linalg.svdvals(A, check_finite=False)[-1])


# ============================================================================
#  comparisons
# ============================================================================
def match_eigenvalues(computed, expected) -> np.ndarray:
    """
    Pair two eigenvalue multisets by optimal assignment.

    Returns
    -------
    deviations : ndarray
        |computed - expected| for each matched pair.
    """
    a = np.asarray(computed, dtype=complex).ravel()
    b = np.asarray(expected, dtype=complex).ravel()
    if a.size != b.size:
        raise DimensionMismatch("Cannot pair {} eigenvalues with {}".format(a.size, b.size))
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return cost[rows, cols]


def align_phase(v, reference) -> np.ndarray:
    """Rescale `v` by a unit phase so that <reference, v> is real and non-negative."""
    v = np.asarray(v, dtype=complex)
    overlap = np.vdot(reference, v)
    if abs(overlap) == 0:
        return v
    return v * (abs(overlap) / overlap)


def subspace_distance(A, B) -> float:
    """Spectral-norm distance between the orthogonal projectors onto span(A) and span(B)."""
    QA = linalg.orth(np.atleast_2d(np.asarray(A, dtype=complex).T).T)
    QB = linalg.orth(np.atleast_2d(np.asarray(B, dtype=complex).T).T)
    return float(np.linalg.norm(QA @ QA.conj().T - QB @ QB.conj().T, 2))
