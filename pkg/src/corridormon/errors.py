"""Exception types shared across the package.

Everything raised on purpose derives from :class:`CorridorError` so callers
can catch one base class at the stream level and keep going frame by frame.
"""


class CorridorError(Exception):
    """Base class for all errors raised by this package."""


# --- topology and measurement frames ---------------------------------------


class DuplicateId(CorridorError):
    """A bus or line identifier appears more than once."""


class DanglingEndpoint(CorridorError):
    """A line references a bus that is not part of the model."""


class NotACorridorLine(CorridorError):
    """A line is listed in a category inconsistent with its endpoints.

    Corridor lines must span one generation-side bus and one load-side bus;
    intra-area ties must stay on a single side.
    """


class MissingMeasurement(CorridorError):
    """A frame lacks a voltage or current required by the topology."""


class NonFiniteValue(CorridorError):
    """A measurement contains NaN or infinity."""


class NonMonotoneTimestamp(CorridorError):
    """Frame timestamps must strictly increase within a stream."""


# --- power flow -------------------------------------------------------------


class PowerFlowError(CorridorError):
    """Base class for solver failures."""


class NonConvergence(PowerFlowError):
    """Newton iteration did not reach the mismatch tolerance."""

    def __init__(self, message, iterations=None, mismatch=None):
        super().__init__(message)
        self.iterations = iterations
        self.mismatch = mismatch


class SingularJacobian(PowerFlowError):
    """The Jacobian factorisation hit a zero pivot."""


class BaseCaseInfeasible(PowerFlowError):
    """The unstressed starting point of a continuation does not solve."""


# --- reduction and margin ----------------------------------------------------


class DegenerateVoltageDifference(CorridorError):
    """Two endpoint voltages are too close to divide by their difference."""


class MissingAdmittance(CorridorError):
    """No admittance available for a corridor line."""


class ZeroCorridorAdmittance(CorridorError):
    """The corridor admittances sum to zero; weights are undefined."""


class ZeroCurrent(CorridorError):
    """The combined corridor current is zero; ratios on it are undefined."""


class ZeroLoadVoltage(CorridorError):
    """The combined load-side voltage is zero."""


class ZeroLoadImpedance(CorridorError):
    """The apparent load impedance is zero."""


# --- stream ingestion --------------------------------------------------------


class MalformedRow(CorridorError):
    """A CSV row could not be parsed against the bound header."""

    def __init__(self, message, line_number=None, column=None):
        super().__init__(message)
        self.line_number = line_number
        self.column = column
