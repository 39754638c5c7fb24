"""Exception types shared across modules."""


class SdchainError(ValueError):
    """Base class; subclasses ValueError so malformed input is easy to catch."""


class MalformedSimplexError(SdchainError):
    pass


class EmptyComplexError(SdchainError):
    pass


class UnknownSimplexError(SdchainError):
    pass


class ParameterError(SdchainError):
    pass


class SqueezeInfeasibleError(SdchainError):
    pass


class SqueezeBoundExceededError(SdchainError):
    def __init__(self, bound, epsilon):
        super().__init__(f"morphism bound {bound} is not below epsilon {epsilon}")
        self.bound = bound
        self.epsilon = epsilon


class SupportViolationError(SdchainError):
    def __init__(self, block, message="block violates variant triangularity"):
        super().__init__(f"{message}: {block}")
        self.block = block


class BaseMismatchError(SdchainError):
    pass


class UnsupportedVariantError(SdchainError):
    pass


class InvalidLocalContractionError(SdchainError):
    def __init__(self, simplex):
        super().__init__(f"local homotopy at {simplex} fails dP + Pd = 1")
        self.simplex = simplex


class ContractionFailedError(SdchainError):
    pass


class NotPoincareDualityError(SdchainError):
    pass
