"""Exception hierarchy shared by every optkit module."""


class OptkitError(Exception):
    """Base class for all optkit errors."""


class DimensionMismatch(OptkitError, ValueError):
    pass


class ZeroProbability(OptkitError):
    """Conditioning on an event that (numerically) never occurs."""


class NotCoexistent(OptkitError):
    pass


class NotPhysical(OptkitError):
    pass


class FrameDegenerate(OptkitError):
    pass


class UnsupportedComposite(OptkitError):
    pass


class UnsupportedModel(OptkitError):
    pass


class InvalidState(OptkitError, ValueError):
    pass


class InvalidChannel(OptkitError, ValueError):
    pass


class InvalidEffect(OptkitError, ValueError):
    pass


class InvalidPOVM(OptkitError):
    pass


class NotFaithful(OptkitError):
    pass


class NotSymmetric(OptkitError):
    pass


class AsymmetricState(OptkitError):
    pass


class NotNormalized(OptkitError, ValueError):
    pass


class PreparationFailed(OptkitError):
    pass


class NotPSD(OptkitError):
    pass


class WitnessInvalid(OptkitError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair
