from app.schemas.schemas import (
    FeatureGroup,
    DEFAULT_FEATURES,
    significance_marker,
    RunConfig,
    SentenceEval,
    OverlapReport,
    BootstrapResult
)

__all__ = [
    "FeatureGroup",
    "DEFAULT_FEATURES",
    "significance_marker",
    "RunConfig",
    "SentenceEval",
    "OverlapReport",
    "BootstrapResult"
]
