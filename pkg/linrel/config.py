"""
Shared numerical defaults and the experiment configuration model
"""

from typing import List

from pydantic import BaseModel, Field, validator

DEFAULT_TOL = 1e-10
DEFAULT_SAMPLES = 10_000
DEFAULT_SEED = 42

MLFLOW_TRACKING_URI = "file:./mlruns"
EXPERIMENT_NAME = "linrel-acceptance"

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

SUITE_NAMES = (
    "cayley",
    "witt",
    "mod2",
    "connect",
    "certifiers",
    "gaps",
    "cgap",
    "structural",
)


class ExperimentConfig(BaseModel):
    """Parameters of one run of the acceptance suites"""
    suites: List[str] = Field(
        default=list(SUITE_NAMES),
        description="Suites to run, in any order; results are merged by name"
    )
    trials: int = Field(
        1000,
        ge=1,
        le=1_000_000,
        description="Random instances per suite (per base relation for mod2)"
    )
    seed: int = Field(DEFAULT_SEED, ge=0, description="Root seed; trial i uses (seed, i)")
    max_dim: int = Field(8, ge=1, le=12, description="Largest ambient dimension sampled")
    form_delta: float = Field(0.05, ge=0.0, description="Norm of the form perturbation")
    relation_delta: float = Field(0.05, ge=0.0, description="Gap radius of the relation perturbation")
    steps: int = Field(16, ge=2, description="Samples along constructed paths")
    samples: int = Field(DEFAULT_SAMPLES, ge=1, description="Monte-Carlo samples for interval estimates")
    tol: float = Field(DEFAULT_TOL, gt=0.0, lt=1.0)
    track: bool = Field(False, description="Log each suite as an MLflow run")
    tracking_uri: str = MLFLOW_TRACKING_URI
    experiment_name: str = EXPERIMENT_NAME

    @validator('suites')
    def validate_suites(cls, v):
        unknown = [name for name in v if name not in SUITE_NAMES]
        if unknown:
            raise ValueError(f"Unknown suites: {', '.join(unknown)}")
        if not v:
            raise ValueError("At least one suite is required")
        return v

    class Config:
        json_schema_extra = {
            "example": {
                "suites": ["cayley", "witt"],
                "trials": 1000,
                "seed": 42,
                "max_dim": 8,
                "form_delta": 0.05,
                "relation_delta": 0.05,
                "steps": 16,
                "samples": 10000,
                "tol": 1e-10,
                "track": False,
            }
        }
