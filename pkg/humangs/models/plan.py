from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class Variant(str, Enum):
    SINGLE = "single"
    MULTI = "multi"


class Mode(str, Enum):
    BOUNDED = "bounded"
    UNLIMITED = "unlimited"


class Plan(BaseModel):
    """A chosen question set with its worst-case candidate size"""
    variant: Variant
    mode: Mode = Mode.BOUNDED
    k: Optional[int] = None
    method: str
    slack: int = 0
    wcase: int
    questions: List[int] = Field(default_factory=list)


class PlanDocument(BaseModel):
    """On-disk form of a plan; questions are sorted node names"""
    variant: Variant
    mode: Mode
    k: Optional[int] = None
    method: str
    slack: int
    wcase: int
    questions: List[str]


class VerifyReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    passed: bool = Field(alias="pass")
    expected_wcase: int
    found_wcase: int
    witness_targets: List[str]


class Structure(str, Enum):
    """Solver selection: automatic, or a forced structure"""
    AUTO = "auto"
    DAG = "dag"
    DOWN_FOREST = "down-forest"
    UP_FOREST = "up-forest"
