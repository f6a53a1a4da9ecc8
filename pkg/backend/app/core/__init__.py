from app.core.config import settings, get_settings, Settings
from app.core.errors import (
    PhraseSmoothError,
    CorpusFormatError,
    ConfigurationError,
    LabelConflictError,
    EmptyInputError,
    EvaluationError,
    UnseenPairError,
    InvalidFeatureError
)

__all__ = [
    "settings",
    "get_settings",
    "Settings",
    "PhraseSmoothError",
    "CorpusFormatError",
    "ConfigurationError",
    "LabelConflictError",
    "EmptyInputError",
    "EvaluationError",
    "UnseenPairError",
    "InvalidFeatureError"
]
