"""FastAPI service wrapping the verification library.

Endpoints mirror the library's JSON schemas one-to-one, so the CLI (or any
HTTP client) can validate operators, classify maps, evaluate products, and
run the full suite registry remotely or in-process.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..channels import classify
from ..operators import decompose, state_residuals
from ..serialize import (classification_to_dict, operator_from_dict, operator_to_dict,
                         product_from_descriptor, superop_from_dict)
from ..suites import SUITES, ConfigError, demo_tables, run_config
from ..twirled import triple_product
from . import schemas

app = FastAPI(title="stochalg", version=__version__,
              description="Stochastic products on quantum states: "
                          "construction, evaluation and identity verification.")


def _operator_model(a) -> schemas.OperatorModel:
    return schemas.OperatorModel(**operator_to_dict(a))


@app.get("/health", response_model=schemas.HealthResponse)
def health():
    return {"status": "ok", "version": __version__}


@app.get("/suites", response_model=schemas.SuitesResponse)
def list_suites():
    return {"suites": sorted(SUITES)}


@app.post("/validate/state", response_model=schemas.StateValidationResponse)
def validate_state(body: schemas.OperatorModel):
    try:
        r = state_residuals(operator_from_dict(body.model_dump()))
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    valid = r["herm"] <= 1e-9 and r["neg"] <= 1e-9 and r["trace"] <= 1e-9
    return {"valid": valid, "herm_residual": r["herm"], "negativity": r["neg"],
            "trace_residual": r["trace"]}


@app.post("/operators/decompose", response_model=schemas.DecomposeResponse)
def decompose_operator(body: schemas.OperatorModel):
    try:
        dec = decompose(operator_from_dict(body.model_dump()))
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return {
        "herm": _operator_model(dec.herm),
        "skew": _operator_model(dec.skew),
        "weights": [float(w) for w in dec.weights],
        "states": [_operator_model(s) for s in dec.states],
    }


@app.post("/maps/classify", response_model=schemas.ClassifyResponse)
def classify_map(body: schemas.ClassifyRequest):
    try:
        phi = superop_from_dict(body.superoperator.model_dump())
        cls = classify(phi, samples=body.samples, seed=body.seed)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return classification_to_dict(cls)


@app.post("/products/evaluate", response_model=schemas.OperatorResponse)
def evaluate_product(body: schemas.ProductEvalRequest):
    try:
        product = product_from_descriptor(body.product)
        out = product(operator_from_dict(body.a.model_dump()),
                      operator_from_dict(body.b.model_dump()))
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return {"result": _operator_model(out)}


@app.post("/twirled/product", response_model=schemas.OperatorResponse)
def twirled_product(body: schemas.TripleProductRequest):
    from ..serialize import context_from_dict
    try:
        ctx = context_from_dict(body.context)
        out = triple_product(ctx, operator_from_dict(body.a.model_dump()),
                             operator_from_dict(body.b.model_dump()))
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return {"result": _operator_model(out)}


@app.post("/run", response_model=schemas.RunResponse)
def run(body: schemas.RunConfigModel):
    try:
        return run_config(body.as_config())
    except ValueError as exc:     # ConfigError and descriptor/shape errors
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/demo", response_model=schemas.DemoResponse)
def demo(body: schemas.DemoRequest):
    try:
        return {"tables": demo_tables({"seed": body.seed})}
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
