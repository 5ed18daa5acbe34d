"""Pydantic request/response models for the verification service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class OperatorModel(BaseModel):
    dim: int = Field(ge=2)
    re: list[list[float]]
    im: list[list[float]]


class SuperoperatorModel(BaseModel):
    dim: int = Field(ge=2)
    dim_out: int | None = None
    matrix_re: list[list[float]]
    matrix_im: list[list[float]]
    antilinear: bool = False


class StateValidationResponse(BaseModel):
    valid: bool
    herm_residual: float
    negativity: float
    trace_residual: float


class DecomposeResponse(BaseModel):
    herm: OperatorModel
    skew: OperatorModel
    weights: list[float]
    states: list[OperatorModel]


class ClassifyRequest(BaseModel):
    superoperator: SuperoperatorModel
    samples: int = Field(default=200, ge=1)
    seed: int = 0


class ClassifyResponse(BaseModel):
    is_trace_preserving: bool
    is_positive_sampled: bool
    is_completely_positive: bool
    is_pureness_preserving_sampled: bool
    is_symmetry: bool
    is_collapse: bool
    margins: dict[str, float]
    witness: OperatorModel | None = None
    collapse_target: OperatorModel | None = None


class ProductEvalRequest(BaseModel):
    product: dict          # tagged union, see serialize.product_from_descriptor
    a: OperatorModel
    b: OperatorModel


class OperatorResponse(BaseModel):
    result: OperatorModel


class TripleProductRequest(BaseModel):
    context: dict          # serialized twirled context
    a: OperatorModel
    b: OperatorModel


class RunConfigModel(BaseModel):
    schema_version: int = Field(default=1, alias="schema")
    seed: int
    suites: list[str]
    contexts: list[dict] = []
    samples: dict = {}
    phase_space: dict = {}
    tolerances: dict = {}

    model_config = {"populate_by_name": True}

    def as_config(self) -> dict:
        return {
            "schema": self.schema_version,
            "seed": self.seed,
            "suites": self.suites,
            "contexts": self.contexts,
            "samples": self.samples,
            "phase_space": self.phase_space,
            "tolerances": self.tolerances,
        }


class RunResponse(BaseModel):
    summary: dict
    reports: dict[str, dict]
    timings: dict[str, float]


class DemoRequest(BaseModel):
    seed: int


class DemoResponse(BaseModel):
    tables: dict[str, str]


class HealthResponse(BaseModel):
    status: str
    version: str


class SuitesResponse(BaseModel):
    suites: list[str]
