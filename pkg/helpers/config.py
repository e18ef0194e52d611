###############################################################################################
#
# Numerical tolerances used across graphfold. All energies are in units of the hopping J.
#
###############################################################################################

import os

from helpers.errors import ParseError

# H is flagged hermitian when max |H - H^dagger| is below this
HERMITIAN_TOL = 1e-12

# Reciprocal condition estimate of (E - H) below which the resolvent does not exist
RCOND_MIN = 1e-12

# Root amplitudes below ROOT_AMPLITUDE_TOL * ||f|| count as nodes
ROOT_AMPLITUDE_TOL = 1e-8

# Reduced-equation residual accepted as consistent
RESIDUAL_TOL = 1e-8

# Root search
ROOT_SEARCH_MAXITER = 100
POLE_WINDOW = 10

# Ring demo bound on eigenvalue pairing, imaginary parts and the +V eigenvector
RING_SPECTRUM_TOL = 1e-9

JSON_FLOAT_FORMAT = "%.12e"

TOL_ENV = "GRAPHFOLD_TOL"


def residual_tolerance() -> float:
    """
    Residual tolerance for consistency checks, overridable through GRAPHFOLD_TOL.

    Returns
    -------
    tol : float
    """
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return RESIDUAL_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ParseError("{} must be a positive float, got '{}'".format(TOL_ENV, raw), path=TOL_ENV)
    if not tol > 0:
        raise ParseError("{} must be a positive float, got '{}'".format(TOL_ENV, raw), path=TOL_ENV)
    return tol
