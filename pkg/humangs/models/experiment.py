from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from humangs.config.settings import settings


class Algorithm(str, Enum):
    HUMANGS = "humangs"
    RANDOM = "random"
    GENERAL_FIRST = "general_first"


class ExperimentConfig(BaseModel):
    """One experiment: a graph source, an algorithm and its budget"""
    graph: Optional[str] = None
    gen: Optional[str] = None
    depth: Optional[int] = Field(default=None, ge=0)
    algorithm: Algorithm = Algorithm.HUMANGS
    k: int = Field(ge=1)
    phases: int = Field(default=settings.DEFAULT_PHASES, ge=1)
    trials: int = Field(default=settings.DEFAULT_TRIALS, ge=1)
    random_runs: int = Field(default=settings.DEFAULT_RANDOM_RUNS, ge=1)
    seed: int = Field(default=settings.DEFAULT_SEED, ge=0, lt=2 ** 64)

    @model_validator(mode="after")
    def _one_graph_source(self):
        if self.graph is not None and self.gen is not None:
            raise ValueError("graph and gen are mutually exclusive")
        return self


class PhaseTrace(BaseModel):
    trial: int
    phase: int
    questions: List[str] = Field(default_factory=list)
    candidate_size: int


class TrialRow(BaseModel):
    algorithm: Algorithm
    phase: int
    k: int
    trial: int
    candidate_size: float


class AggregateRow(BaseModel):
    algorithm: Algorithm
    phase: int
    k: int
    mean_candidate_size: float


class SweepRow(BaseModel):
    algorithm: Algorithm
    vary: str
    value: int
    mean_candidate_size: float


class PhaseSummary(BaseModel):
    """How quickly an algorithm isolates the target across trials"""
    algorithm: Algorithm
    k: int
    mean_phases: float
    mean_questions: float
    identified_fraction: float


class ExperimentResult(BaseModel):
    rows: List[TrialRow] = Field(default_factory=list)
    aggregates: List[AggregateRow] = Field(default_factory=list)
    summary: PhaseSummary
