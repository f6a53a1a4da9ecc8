from pydantic_settings import BaseSettings
from functools import lru_cache


class Settings(BaseSettings):
    # Application
    APP_NAME: str = "PhraseSmooth"
    LOG_LEVEL: str = "INFO"

    # Extraction
    MAX_PHRASE_LENGTH: int = 7

    # Clustering
    NUM_CLASSES: int = 100
    CLUSTER_ITERATIONS: int = 30
    CLUSTER_INIT: str = "top-frequent"
    CLUSTER_SEED: int = 1234
    EXCHANGE_TOLERANCE: float = 1e-10

    # Smoothing
    EACH_WEIGHTING: str = "count"

    # Analysis
    BOOTSTRAP_SAMPLES: int = 1000
    BOOTSTRAP_SEED: int = 12345
    TOP_K: int = 200

    # Workers for shard-parallel extraction
    NUM_WORKERS: int = 1

    class Config:
        env_file = ".env"
        case_sensitive = True


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
