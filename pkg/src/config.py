import os

from pydantic import BaseModel, ConfigDict, Field

from dotenv import load_dotenv

load_dotenv(".env", override=True)


class Settings(BaseModel):
    """Runtime defaults, read once from the environment (and `.env`)."""

    model_config = ConfigDict(frozen=True)

    log_level: str = "INFO"
    workers: int = Field(default=1, ge=1)
    bootstrap_replicates: int = Field(default=1000, ge=2)
    confidence_level: float = Field(default=0.95, gt=0, lt=1)
    series_term_budget: int = Field(default=2000, ge=10)
    series_tolerance: float = Field(default=1e-10, gt=0)
    kde_bandwidth: float = Field(default=0.001, gt=0)
    histogram_bins: int = Field(default=150, ge=1)


def load_settings() -> Settings:
    env = {
        "log_level": os.getenv("LINNIK_LOG_LEVEL"),
        "workers": os.getenv("LINNIK_WORKERS"),
        "bootstrap_replicates": os.getenv("LINNIK_BOOTSTRAP_REPLICATES"),
        "confidence_level": os.getenv("LINNIK_CONFIDENCE_LEVEL"),
        "series_term_budget": os.getenv("LINNIK_SERIES_TERM_BUDGET"),
        "series_tolerance": os.getenv("LINNIK_SERIES_TOLERANCE"),
        "kde_bandwidth": os.getenv("LINNIK_KDE_BANDWIDTH"),
        "histogram_bins": os.getenv("LINNIK_HISTOGRAM_BINS"),
    }
    return Settings(**{key: value for key, value in env.items() if value})


settings = load_settings()
