class PhraseSmoothError(Exception):
    """Base error. `detail` is the one-line diagnostic shown to the user."""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class CorpusFormatError(PhraseSmoothError):
    pass


class ConfigurationError(PhraseSmoothError):
    pass


class LabelConflictError(PhraseSmoothError):
    pass


class EmptyInputError(PhraseSmoothError):
    pass


class EvaluationError(PhraseSmoothError):
    pass


class UnseenPairError(PhraseSmoothError):
    """Raised instead of returning probability 0 for a pair (or key) never counted."""
    pass


class InvalidFeatureError(PhraseSmoothError):
    pass
