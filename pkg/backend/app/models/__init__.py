from app.models.models import (
    WordIds,
    Link,
    Alignment,
    PairKey,
    EMPTY_WORD,
    Direction,
    InitMethod,
    WeightScheme,
    LabelFallback,
    TokenKind,
    GeneralizedToken,
    GeneralizedIds,
    GeneralizedKey,
    Vocabulary,
    AlignedSentencePair,
    LabelMap,
    LabelMaps,
    PhrasePair,
    PhraseCountTable,
    GeneralizedCountTables,
    LexiconCounts,
    LexiconTables,
    SmoothedScores
)

__all__ = [
    "WordIds",
    "Link",
    "Alignment",
    "PairKey",
    "EMPTY_WORD",
    "Direction",
    "InitMethod",
    "WeightScheme",
    "LabelFallback",
    "TokenKind",
    "GeneralizedToken",
    "GeneralizedIds",
    "GeneralizedKey",
    "Vocabulary",
    "AlignedSentencePair",
    "LabelMap",
    "LabelMaps",
    "PhrasePair",
    "PhraseCountTable",
    "GeneralizedCountTables",
    "LexiconCounts",
    "LexiconTables",
    "SmoothedScores"
]
