from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Dict, List, Optional
from enum import Enum

from app.core.config import settings
from app.models import InitMethod, LabelFallback, WeightScheme


class FeatureGroup(str, Enum):
    STD = "std"
    LEX = "lex"
    ALL = "all"
    EACH = "each"
    LEX_ALL = "lex-all"


DEFAULT_FEATURES = [FeatureGroup.STD, FeatureGroup.LEX, FeatureGroup.ALL, FeatureGroup.EACH]


def significance_marker(win_fraction: float) -> str:
    """Marker used next to scores: double dagger at 95%, dagger at 90%."""
    if win_fraction >= 0.95:
        return "‡"
    if win_fraction >= 0.90:
        return "†"
    return ""


# ========== Run Configuration ==========

class RunConfig(BaseModel):
    """Every parameter of one subcommand run. Serialized verbatim into the manifest."""
    model_config = ConfigDict(extra="ignore")

    command: str

    # Corpus paths
    source: Optional[str] = None
    target: Optional[str] = None
    alignment: Optional[str] = None
    corpus: Optional[str] = None
    test: Optional[str] = None
    source_labels: Optional[str] = None
    target_labels: Optional[str] = None
    label_fallback: LabelFallback = LabelFallback.UNKNOWN_CLASS
    identity_labels: bool = False

    # Clustering
    num_classes: int = Field(default=settings.NUM_CLASSES, ge=1)
    num_classes_source: int = Field(default=settings.NUM_CLASSES, ge=1)
    num_classes_target: int = Field(default=settings.NUM_CLASSES, ge=1)
    iterations: int = Field(default=settings.CLUSTER_ITERATIONS, ge=0)
    init_method: InitMethod = InitMethod(settings.CLUSTER_INIT)
    seed: int = settings.CLUSTER_SEED
    dump_every: int = Field(default=0, ge=0)

    # Phrase table
    max_len: int = Field(default=settings.MAX_PHRASE_LENGTH, ge=1)
    features: List[FeatureGroup] = Field(default_factory=lambda: list(DEFAULT_FEATURES))
    weighting: WeightScheme = WeightScheme(settings.EACH_WEIGHTING)
    subsample: float = Field(default=1.0, gt=0.0, le=1.0)
    fractions: List[float] = Field(default_factory=list)

    # Analysis
    reference: Optional[str] = None
    baseline: Optional[str] = None
    systems: Dict[str, str] = Field(default_factory=dict)
    bootstrap_samples: int = Field(default=settings.BOOTSTRAP_SAMPLES, ge=1)
    bootstrap_seed: int = settings.BOOTSTRAP_SEED
    top_k: int = Field(default=settings.TOP_K, ge=1)

    workers: int = Field(default=settings.NUM_WORKERS, ge=1)
    output_dir: str = "."

    @field_validator("fractions")
    @classmethod
    def check_fractions(cls, fractions: List[float]) -> List[float]:
        for fraction in fractions:
            if not 0.0 < fraction <= 1.0:
                raise ValueError(f"fraction {fraction} outside (0, 1]")
        if any(b <= a for a, b in zip(fractions, fractions[1:])):
            raise ValueError("fractions must be strictly increasing")
        return fractions

    @field_validator("features")
    @classmethod
    def check_features(cls, features: List[FeatureGroup]) -> List[FeatureGroup]:
        if not features:
            raise ValueError("select at least one feature group")
        if len(set(features)) != len(features):
            raise ValueError("feature groups listed twice")
        return features

    @field_validator("systems")
    @classmethod
    def check_system_names(cls, systems: Dict[str, str]) -> Dict[str, str]:
        # the manifest stores systems as name=path,name=path
        for name, path in systems.items():
            if "," in name or "=" in name:
                raise ValueError(f"system name '{name}' may not contain ',' or '='")
            if "," in path:
                raise ValueError(f"hypothesis path '{path}' of system '{name}' may not contain ','")
        return systems

    @model_validator(mode="after")
    def check_systems(self):
        if self.command == "analyze" and not self.systems:
            raise ValueError("analyze needs at least one --system")
        return self


# ========== Analysis Reports ==========

class SentenceEval(BaseModel):
    index: int
    ter_baseline: float = Field(ge=0)
    ter_system: float = Field(ge=0)
    delta: float
    hyp_baseline: List[str]
    hyp_system: List[str]


class OverlapReport(BaseModel):
    system_a: str = ""
    system_b: str = ""
    k: int
    common_input_fraction: float = Field(ge=0, le=1)
    # None when the two lists share no input sentence
    same_translation_fraction: Optional[float] = Field(default=None, ge=0, le=1)


class BootstrapResult(BaseModel):
    samples: int
    seed: int
    bleu_a: float
    bleu_b: float
    ter_a: float
    ter_b: float
    bleu_win_fraction: float = Field(ge=0, le=1)
    ter_win_fraction: float = Field(ge=0, le=1)

    @property
    def bleu_marker(self) -> str:
        return significance_marker(self.bleu_win_fraction)

    @property
    def ter_marker(self) -> str:
        return significance_marker(self.ter_win_fraction)
