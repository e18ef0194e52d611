###############################################################################################
#
# Exceptions raised by graphfold. Every error is also an instance of the matching builtin
# (ValueError, IndexError, ArithmeticError) so callers can catch either.
#
###############################################################################################


class GraphfoldError(Exception):
    """Base class for all graphfold errors."""


# ============================================================================
#  graph data
# ============================================================================
class GraphError(GraphfoldError, ValueError):
    pass


class IndexOutOfRange(GraphError, IndexError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DimensionMismatch(GraphfoldError, ValueError):
    pass


class InvalidArgument(GraphfoldError, ValueError):
    """A parameter outside its admissible range (grid size, energy window, model parameters)."""


# ============================================================================
#  numerics
# ============================================================================
class NumericsError(GraphfoldError, ArithmeticError):
    pass


class SingularResolvent(NumericsError):
    """
    E·I - H is numerically singular, i.e. E sits on an eigenvalue of H.

    Attributes
    ----------
    energy : complex
        Energy at which the resolvent was requested.
    rcond : float
        Reciprocal condition estimate of E·I - H.
    root : int or None
        Root node of the offending branch, when raised for a branch.
    branch : int or None
        Position of the offending branch in its partition.
    """

    def __init__(self, energy, rcond, root=None, branch=None):
        self.energy = energy
        self.rcond = rcond
        self.root = root
        self.branch = branch
        msg = "Resolvent (E - H)^-1 does not exist at E = {} (rcond = {:.3e})".format(energy, rcond)
        if branch is not None:
            msg += " for branch {} rooted at node {}".format(branch, root)
        super().__init__(msg)

    def for_branch(self, branch, root):
        """Return a copy of this error tagged with the branch that raised it."""
        return SingularResolvent(self.energy, self.rcond, root=root, branch=branch)


class NotHermitian(NumericsError):
    pass


class ConvergenceFailure(NumericsError):
    pass


class ZeroRootAmplitude(NumericsError):
    pass


class PotentialUndefined(NumericsError):
    pass


# ============================================================================
#  input files
# ============================================================================
class ParseError(GraphfoldError, ValueError):
    """
    The graph file could not be decoded.

    Attributes
    ----------
    path : str
        Field path inside the document, e.g. ``hoppings[3].i``. Empty for syntax errors.
    line, column : int or None
        Position of a JSON syntax error.
    """

    def __init__(self, message, path="", line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = " (line {}, column {})".format(line, column)
        elif path:
            where = " (at {})".format(path)
        super().__init__(message + where)


class ValidationError(GraphfoldError, ValueError):
    """The partition in a graph file breaks the single-root structure."""

    def __init__(self, report):
        self.report = report
        lines = ["{}: {}".format(v.kind.value, v.message) for v in report.violations]
        super().__init__("Invalid partition:\n  " + "\n  ".join(lines))


class GridTooCoarseWarning(UserWarning):
    """Adjacent eigenvalues share a grid cell, so a root may have been missed."""
