"""Declarative scenario documents (YAML) and their schema."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..bell import NoiseParams
from ..bounds import DeltaSchedule
from ..rates import C_FIBER, RepeaterScenario

COMMANDS = (
    "bounds-sweep",
    "yield-sweep",
    "nto1",
    "nmin",
    "concat",
    "rates",
    "compare-1998",
    "mc-validate",
    "resource-state",
)


class ConfigError(ValueError):
    """Unreadable or invalid scenario document."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DeltaSpec(_Strict):
    kind: Literal["power", "fixed", "n_to_1"] = "power"
    value: float = 0.25

    def schedule(self) -> DeltaSchedule:
        return DeltaSchedule(self.kind, self.value if self.kind != "n_to_1" else 0.0)


class IntRange(_Strict):
    """Inclusive ``start..stop`` with ``step``."""

    start: int = Field(ge=1)
    stop: int = Field(ge=1)
    step: int = Field(default=1, ge=1)

    def values(self) -> List[int]:
        return list(range(self.start, self.stop + 1, self.step))


class FloatRange(_Strict):
    start: float
    stop: float
    step: float = Field(gt=0)

    def values(self) -> List[float]:
        count = int(round((self.stop - self.start) / self.step)) + 1
        return [round(self.start + i * self.step, 12) for i in range(count)]


class ScenarioSection(_Strict):
    L_total_km: float = Field(default=10000.0, gt=0)
    N_links: int = Field(default=1000, ge=1)
    eta: float = Field(default=1.0, gt=0, le=1)
    tp: float = Field(default=0.0, ge=0)
    t0: Optional[float] = Field(default=None, ge=0)
    c_fiber: float = Field(default=C_FIBER, gt=0)
    n: int = Field(default=2000, ge=1)
    delta: DeltaSpec = DeltaSpec()
    epsilon: Optional[float] = Field(default=None, ge=0)
    p_ldn: float = Field(default=1.0, ge=0, le=1)
    F_in: float = Field(default=0.95, gt=0.25, le=1)
    channels: Literal["many", "single"] = "many"
    split_corrections: bool = False

    def noise(self) -> NoiseParams:
        return NoiseParams(self.p_ldn)

    def build(self, n: Optional[int] = None) -> RepeaterScenario:
        return RepeaterScenario.from_km(
            self.L_total_km,
            self.N_links,
            eta=self.eta,
            tp=self.tp,
            t0=self.t0,
            c_fiber=self.c_fiber,
            n=self.n if n is None else n,
            schedule=self.delta.schedule(),
            epsilon=self.epsilon,
            resource_noise=self.noise(),
            F_in=self.F_in,
            channels=self.channels,
            split_corrections=self.split_corrections,
        )


class SweepSection(_Strict):
    F: Union[List[float], FloatRange, None] = None
    n: Union[List[int], IntRange, None] = None
    N: List[int] = [1]
    delta: List[DeltaSpec] = []
    block_sizes: List[int] = []
    levels: int = Field(default=4, ge=1)
    link_exponents: List[int] = list(range(7, 14))

    def F_values(self) -> List[float]:
        if self.F is None:
            return []
        return self.F.values() if isinstance(self.F, FloatRange) else list(self.F)

    def n_values(self) -> List[int]:
        if self.n is None:
            return []
        return self.n.values() if isinstance(self.n, IntRange) else list(self.n)


class CircuitSection(_Strict):
    """Explicit ``rounds`` of ``[mask, target]`` or a random circuit."""

    n: int = Field(ge=1, le=32)
    rounds: Optional[List[Tuple[int, int]]] = None
    random_rounds: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None
    side: Literal["A", "B"] = "A"
    station: bool = False

    @model_validator(mode="after")
    def _one_source(self):
        if (self.rounds is None) == (self.random_rounds is None):
            raise ValueError("give exactly one of 'rounds' or 'random_rounds'")
        return self


class ScenarioConfig(_Strict):
    command: Optional[Literal[COMMANDS]] = None  # type: ignore[valid-type]
    seed: int = Field(default=0, ge=0, lt=2**64)
    trials: int = Field(default=1000, ge=1)
    format: Literal["csv", "json"] = "csv"
    scenario: ScenarioSection = ScenarioSection()
    sweep: SweepSection = SweepSection()
    target: Optional[float] = Field(default=None, gt=0, le=1)
    view: Literal["table", "working_sweep", "chain", "validate"] = "table"
    mode: Literal["auto", "exhaustive", "approximate"] = "auto"
    circuit: Optional[CircuitSection] = None

    def semantic_hash(self) -> str:
        """SHA-256 of the canonical document minus seed and output format."""
        doc = self.model_dump(mode="json", exclude={"seed", "format"})
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _field_messages(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "; ".join(lines)


def parse_config(doc) -> ScenarioConfig:
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    try:
        return ScenarioConfig.model_validate(doc)
    except ValidationError as e:
        raise ConfigError(_field_messages(e)) from None


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}") from None
    return parse_config(doc)
