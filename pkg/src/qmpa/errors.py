"""Exception hierarchy.

Every error carries a stable string ``code`` and a process ``exit_code`` so the
command line front end can map failures without inspecting messages.
"""


class QMPAError(Exception):
    code = "error"
    exit_code = 1


class ParseError(QMPAError):
    """Model or state document is malformed."""

    code = "parse"
    exit_code = 3


class ValidationError(QMPAError):
    """A model invariant (Kraus bound, hermitian H, positive G, ...) is violated."""

    code = "validation"
    exit_code = 4


class NotHermitian(ValidationError):
    code = "not_hermitian"


class NotStrictlyPositive(ValidationError):
    code = "not_strictly_positive"


class TStateError(QMPAError):
    code = "tstate"
    exit_code = 5


class NoFaithfulTState(TStateError):
    """The maximal-support invariant state is rank deficient."""

    code = "no_faithful_tstate"

    def __init__(self, message, rank=None, kernel=None):
        super().__init__(message)
        self.rank = rank
        self.kernel = kernel


class DefectNegative(TStateError):
    """``sigma - T(sigma)`` has a negative eigenvalue beyond tolerance."""

    code = "defect_negative"

    def __init__(self, message, eigenvalue=None, witness=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.witness = witness


class TStateSearchUnsupported(TStateError):
    code = "tstate_search_unsupported"


class SpectralError(QMPAError):
    code = "spectral"
    exit_code = 8


class DefectivePeripheralPart(SpectralError):
    """Geometric multiplicity of a peripheral eigenvalue is below its algebraic one."""

    code = "defective_peripheral"


class EigensolverFailure(SpectralError):
    code = "eigensolver"


class SingularGram(QMPAError):
    code = "singular_gram"
    exit_code = 6


class MismatchBeyondTolerance(QMPAError):
    code = "mismatch"
    exit_code = 6

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotAsymptotic(QMPAError):
    """A state that should lie in the asymptotic space does not."""

    code = "not_asymptotic"
    exit_code = 7


class NotForm2Representable(QMPAError):
    code = "not_form2_representable"
    exit_code = 7

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TStateNotStrictlyPositive(TStateError, NotStrictlyPositive):
    """A candidate T-state fails the strict positivity requirement."""

    code = "tstate_not_strictly_positive"
