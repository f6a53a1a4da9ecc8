"""
Phrase Table Emission
=====================
Writes decoder-ready phrase tables

    #features: p_std_s2t p_std_t2s ...
    src ||| tgt ||| f1 f2 ... ||| 0-0 1-1

and the flat `key = value` run manifests that make two runs comparable.
"""

import logging
import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

from app.core.errors import ConfigurationError, CorpusFormatError, InvalidFeatureError
from app.models import PairKey, PhraseCountTable, SmoothedScores, Vocabulary
from app.schemas import DEFAULT_FEATURES, FeatureGroup, RunConfig
from app.services.corpus_io import format_alignment, read_lines

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Column order of every emitted table; a selection only drops columns.
FEATURE_ORDER = [
    ("p_std_s2t", FeatureGroup.STD),
    ("p_std_t2s", FeatureGroup.STD),
    ("lex_s2t", FeatureGroup.LEX),
    ("lex_t2s", FeatureGroup.LEX),
    ("p_all_s2t", FeatureGroup.ALL),
    ("p_all_t2s", FeatureGroup.ALL),
    ("p_each_s2t", FeatureGroup.EACH),
    ("p_each_t2s", FeatureGroup.EACH),
    ("lex_all_s2t", FeatureGroup.LEX_ALL),
    ("lex_all_t2s", FeatureGroup.LEX_ALL),
]

# Rounding slack tolerated above 1.0 for averaged probabilities.
PROBABILITY_SLACK = 1e-12


def feature_columns(feature_selection: Optional[Iterable[FeatureGroup]] = None) -> List[str]:
    if feature_selection is None:
        feature_selection = DEFAULT_FEATURES
    selected = set(FeatureGroup(g) for g in feature_selection)
    return [name for name, group in FEATURE_ORDER if group in selected]


def format_probability(p: float) -> str:
    """6 significant digits; lowercase scientific notation below 1e-4."""
    return format(p, ".6g")


def _checked(value: Optional[float], column: str, key: PairKey) -> float:
    if value is None:
        raise InvalidFeatureError(f"feature {column} was not computed for pair {key}")
    if math.isnan(value) or value <= 0.0 or value > 1.0 + PROBABILITY_SLACK:
        raise InvalidFeatureError(f"feature {column} = {value} outside (0, 1] for pair {key}")
    return min(value, 1.0)


def emit_table(
    table: PhraseCountTable,
    scores: Dict[PairKey, SmoothedScores],
    path: PathLike,
    source_vocab: Vocabulary,
    target_vocab: Vocabulary,
    feature_selection: Optional[Sequence[FeatureGroup]] = None
) -> int:
    """Write one record per distinct pair in (src, tgt) UTF-8 byte order."""
    columns = feature_columns(feature_selection)
    if not columns:
        raise InvalidFeatureError("empty feature selection")
    records = []
    for pair in table.pairs():
        pair_scores = scores.get(pair.key)
        if pair_scores is None:
            raise InvalidFeatureError(f"no scores for pair {pair.key}")
        features = " ".join(
            format_probability(_checked(getattr(pair_scores, column), column, pair.key))
            for column in columns
        )
        src = " ".join(source_vocab.decode(pair.src))
        tgt = " ".join(target_vocab.decode(pair.tgt))
        line = f"{src} ||| {tgt} ||| {features} ||| {format_alignment(pair.align)}\n"
        records.append(((src.encode("utf-8"), tgt.encode("utf-8")), line))
    records.sort(key=lambda record: record[0])

    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"#features: {' '.join(columns)}\n")
        for _, line in records:
            f.write(line)

    logger.info(f"[EMIT] Wrote {len(records)} records with {len(columns)} features to {path}")
    return len(records)


# ========== Manifest ==========

LIST_FIELDS = {"features", "fractions"}
DICT_FIELDS = {"systems"}


def _manifest_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, dict):
        return ",".join(f"{k}={_manifest_value(v)}" for k, v in sorted(value.items()))
    if isinstance(value, (list, tuple)):
        return ",".join(_manifest_value(v) for v in value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def emit_manifest(config: RunConfig, path: PathLike) -> None:
    """Serialize every run parameter as sorted `key = value` lines."""
    fields = config.model_dump()
    fields["feature_order"] = feature_columns(config.features)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for key in sorted(fields):
            f.write(f"{key} = {_manifest_value(fields[key])}\n")
    logger.info(f"[EMIT] Wrote manifest {path}")


def load_manifest(path: PathLike) -> RunConfig:
    """Rebuild the RunConfig a manifest was written from."""
    fields = {}
    for line_number, line in enumerate(read_lines(path), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            # hand-edited files may drop the space after an empty value
            key, sep, value = line.partition(" =")
        if not sep:
            raise CorpusFormatError(f"{path}:{line_number}: expected 'key = value'")
        key = key.strip()
        if key == "feature_order":
            continue
        if key in LIST_FIELDS:
            fields[key] = value.split(",") if value else []
        elif key in DICT_FIELDS:
            fields[key] = dict(item.split("=", 1) for item in value.split(",")) if value else {}
        else:
            fields[key] = value if value else None

    try:
        return RunConfig(**{k: v for k, v in fields.items() if v is not None})
    except ValueError as exc:
        raise ConfigurationError(f"{path}: invalid manifest: {exc}") from exc
