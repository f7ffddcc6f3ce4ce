"""Experiment configuration (JSON file) models."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

ALGORITHMS = (
    "basic_coloring",
    "concat_coloring",
    "concat_mis",
    "dcolor_only",
    "dmis_only",
    "scolor_only",
    "smis_only",
)

AlgorithmName = Literal[
    "basic_coloring",
    "concat_coloring",
    "concat_mis",
    "dcolor_only",
    "dmis_only",
    "scolor_only",
    "smis_only",
]


def default_window(n: int) -> int:
    return math.ceil(10 * math.log(n)) + 2


def problem_of(algorithm: str) -> str:
    return "mis" if "mis" in algorithm else "coloring"


class BaseGraphSpec(BaseModel):
    kind: Literal["gnp", "complete", "edges", "empty"] = "gnp"
    p: float = 0.05
    edges: list[tuple[int, int]] = Field(default_factory=list)
    seed: Optional[int] = None


class AdversarySpec(BaseModel):
    kind: Literal["static", "churn", "replay", "locally_static", "wake_schedule_wrapper"] = "static"
    base: BaseGraphSpec = Field(default_factory=BaseGraphSpec)
    p_add: float = 0.0
    p_del: float = 0.0
    start_full: bool = True
    path: Optional[str] = None
    inner: Optional["AdversarySpec"] = None
    node: int = 0
    alpha: int = 2
    start: int = 1
    end: int = 1
    schedule: dict[int, int] = Field(default_factory=dict)
    rho: Literal[0, 2] = 2

    @model_validator(mode="after")
    def _check(self) -> "AdversarySpec":
        if self.kind in ("locally_static", "wake_schedule_wrapper") and self.inner is None:
            raise ValueError(f"{self.kind} needs an inner adversary")
        if self.kind == "replay" and not self.path:
            raise ValueError("replay needs a trace path")
        if not (0.0 <= self.p_add <= 1.0 and 0.0 <= self.p_del <= 1.0):
            raise ValueError("churn probabilities must lie in [0, 1]")
        return self


class RecordSpec(BaseModel):
    trace: bool = True
    metrics: bool = True
    monitors: bool = False


class ExperimentConfig(BaseModel):
    algorithm: AlgorithmName
    adversary: AdversarySpec = Field(default_factory=AdversarySpec)
    n: int = Field(gt=0)
    rounds: int = Field(ge=1)
    T1: Optional[int] = None
    T2: Optional[int] = None
    seeds: list[int] = Field(default_factory=lambda: [0])
    out_dir: str = "out"
    record: RecordSpec = Field(default_factory=RecordSpec)

    @model_validator(mode="after")
    def _windows(self) -> "ExperimentConfig":
        if self.T1 is None:
            self.T1 = default_window(self.n)
        if self.T2 is None:
            self.T2 = default_window(self.n)
        if self.T1 < 2 or self.T2 < 2:
            raise ValueError("T1 and T2 must be at least 2")
        return self

    @property
    def problem(self) -> str:
        return problem_of(self.algorithm)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.model_validate(json.loads(Path(path).read_text()))
