"""Exception hierarchy shared by all modules."""


class ZeemanError(Exception):
    """Base class for every error raised by this package."""


class InvalidSpec(ZeemanError, ValueError):
    """A model description violates its invariants."""


class DimensionMismatch(ZeemanError, ValueError):
    pass


class ZeroCoupling(ZeemanError, ValueError):
    pass


class ConvergenceFailure(ZeemanError, ArithmeticError):
    pass


class DegenerateSpectrum(ZeemanError, ArithmeticError):
    """Two eigenvalues are closer than the gap tolerance."""


class SpectraOverlap(ZeemanError, ArithmeticError):
    """An eigenvalue of H coincides with one of H' within the gap tolerance."""


class ZeroField(ZeemanError, ArithmeticError):
    """The marker field is zero (or inferred as zero), so nothing can be recovered."""


class NodeMismatch(ZeemanError, ValueError):
    pass


class DisconnectedPhaseGraph(ZeemanError, ArithmeticError):
    pass


class InconsistentData(ZeemanError, ArithmeticError):
    pass


class ReconstructionBreakdown(ZeemanError, ArithmeticError):
    """The three-term recurrence produced a non-positive squared coupling.

    Attributes
    ----------
    index : int
        0-based index of the coupling that could not be computed.
    couplings, onsite : numpy.ndarray
        Partial estimate of full length. Entries from ``index`` onwards
        (couplings) and ``index + 1`` onwards (onsite) are zero.
    """

    def __init__(self, index, couplings, onsite):
        self.index = int(index)
        self.couplings = couplings
        self.onsite = onsite
        super().__init__(f"recurrence broke down at coupling {index}")
