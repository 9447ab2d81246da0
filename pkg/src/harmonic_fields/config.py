"""Run configuration schema.

Configs are JSON documents.  Numbers may be JSON numbers or strings; a string
such as ``"1/3"`` or an integer keeps the exact kernel, a JSON float selects
the float kernel.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Number = Union[int, float, str]
MODES = ("analyze", "classify", "find", "chart-verify", "sweep", "catalog")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_number(v):
    if isinstance(v, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(v, str):
        try:
            Fraction(v.strip())
        except ValueError:
            try:
                float(v)
            except ValueError as exc:
                raise ValueError(f"not a number: {v!r}") from exc
    return v


class UnimodularSpec(_Strict):
    type: Literal["unimodular"]
    alpha: Number
    beta: Number
    gamma: Number

    @field_validator("alpha", "beta", "gamma")
    @classmethod
    def _num(cls, v):
        return _check_number(v)


class FrameSpec(_Strict):
    type: Literal["frame"]
    c: list[list[list[Number]]]
    name: str = "frame"

    @field_validator("c")
    @classmethod
    def _shape(cls, v):
        if len(v) != 3 or any(len(r) != 3 for r in v) or any(len(x) != 3 for r in v for x in r):
            raise ValueError("c must be a 3x3x3 array")
        for r in v:
            for x in r:
                for y in x:
                    _check_number(y)
        return v


class CatalogSpec(_Strict):
    type: Literal["catalog"]
    name: str
    params: dict = Field(default_factory=dict)


class ChartSpec(_Strict):
    type: Literal["chart"]
    name: str
    params: dict = Field(default_factory=dict)


ModelSpec = Annotated[Union[UnimodularSpec, FrameSpec, CatalogSpec, ChartSpec], Field(discriminator="type")]


class Tolerances(_Strict):
    algebraic: float = Field(1e-10, gt=0)
    fd: float = Field(1e-5, gt=0)
    fd_step: float = Field(1e-3, gt=0)


class FinderSpec(_Strict):
    n_starts: int = Field(64, gt=0)
    max_iters: int = Field(500, gt=0)
    step: float = Field(0.1, gt=0)
    converge_tol: float = Field(1e-12, gt=0)
    dedupe_tol: float = Field(1e-6, gt=0)
    newton_polish: bool = True


class OutputSpec(_Strict):
    json_path: str | None = None
    markdown_path: str | None = None


class SweepSpec(_Strict):
    grid: list[list[Number]] | None = None
    random: int | None = Field(None, gt=0)
    seed: int = 0
    low: int = -5
    high: int = 5
    denominator: int = Field(4, gt=0)
    workers: int = Field(1, gt=0)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.grid is None) == (self.random is None):
            raise ValueError("sweep needs exactly one of 'grid' or 'random'")
        if self.grid is not None:
            for row in self.grid:
                if len(row) != 3:
                    raise ValueError("each grid row is (alpha, beta, gamma)")
                for x in row:
                    _check_number(x)
        if self.low >= self.high:
            raise ValueError("low must be below high")
        return self


FieldSpec = Union[Literal["e1", "e2", "e3"], list[Number]]


class RunConfig(_Strict):
    mode: Literal["analyze", "classify", "find", "chart-verify", "sweep", "catalog"]
    model: ModelSpec | None = None
    field: FieldSpec = "e3"
    tolerances: Tolerances = Field(default_factory=Tolerances)
    finder: FinderSpec = Field(default_factory=FinderSpec)
    output: OutputSpec = Field(default_factory=OutputSpec)
    sweep: SweepSpec | None = None

    @field_validator("field")
    @classmethod
    def _field(cls, v):
        if isinstance(v, list):
            if len(v) != 3:
                raise ValueError("a field vector needs 3 components")
            for x in v:
                _check_number(x)
            if all(float(Fraction(str(x).strip()) if isinstance(x, str) else x) == 0 for x in v):
                raise ValueError("field vector must be nonzero")
        return v

    @model_validator(mode="after")
    def _model_required(self):
        if self.mode in ("analyze", "classify", "find", "chart-verify") and self.model is None:
            raise ValueError(f"mode {self.mode!r} needs a model")
        if self.mode == "sweep" and self.sweep is None:
            raise ValueError("mode 'sweep' needs a sweep section")
        if self.mode == "chart-verify" and self.model.type not in ("chart", "catalog"):
            raise ValueError("chart-verify needs a chart or catalog model")
        return self


def load(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def parse(data: dict) -> RunConfig:
    return RunConfig.model_validate(data)
