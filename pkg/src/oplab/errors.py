"""Exception hierarchy shared by every oplab module."""


class OplabError(Exception):
    """Base class for all oplab errors."""


class ValidationError(OplabError, ValueError):
    """Input violates a type invariant."""


class InvalidOrliczFunction(ValidationError):
    pass


class NonFiniteFunction(ValidationError):
    pass


class DegenerateRange(ValidationError):
    pass


class CarrierMismatch(ValidationError):
    pass


class AbsoluteContinuityViolated(OplabError):
    def __init__(self, atom, message=None):
        self.atom = atom
        super().__init__(message or f"mu({atom!r}) = 0 but the pushforward charges it")


class NotEquivalent(OplabError):
    pass


class SingularTransformation(OplabError):
    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"T is singular: null atom {witness[1]!r} has non-null preimage {witness[0]!r}")


class TheoremViolation(OplabError):
    """Two independently computed answers that a theorem forces to agree did not."""


class MapEscapesDomain(ValidationError):
    pass


class SingularMatrix(ValidationError):
    pass


class PreconditionViolated(ValidationError):
    pass


class TooManyAtoms(ValidationError):
    pass


class RejectionExhausted(OplabError):
    pass
