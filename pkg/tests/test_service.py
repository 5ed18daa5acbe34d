import numpy as np
import pytest
from fastapi.testclient import TestClient

from stochalg.sampling import rand_density, rand_unitary
from stochalg.serialize import operator_to_dict, superop_to_dict
from stochalg.channels import conjugation_channel
from stochalg.service.app import app
from stochalg.twirled import TwirledContext, triple_product
from stochalg.groups import weyl_heisenberg_rep


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health_and_suites(client):
    r = client.get("/health")
    assert r.status_code == 200 and r.json()["status"] == "ok"
    r = client.get("/suites")
    assert "twirled-core" in r.json()["suites"]


def test_validate_state(client, rng):
    rho = rand_density(3, rng)
    r = client.post("/validate/state", json=operator_to_dict(rho))
    assert r.status_code == 200
    body = r.json()
    assert body["valid"] and body["trace_residual"] <= 1e-12
    bad = operator_to_dict(np.diag([0.7, 0.7]).astype(complex))
    assert not client.post("/validate/state", json=bad).json()["valid"]


def test_decompose_endpoint(client):
    a = operator_to_dict(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
    r = client.post("/operators/decompose", json=a)
    assert r.status_code == 200
    body = r.json()
    np.testing.assert_allclose(body["weights"], [0.5] * 4, atol=1e-12)


def test_classify_endpoint(client, rng):
    phi = conjugation_channel(rand_unitary(2, rng))
    r = client.post("/maps/classify",
                    json={"superoperator": superop_to_dict(phi), "samples": 30,
                          "seed": 1})
    assert r.status_code == 200
    body = r.json()
    assert body["is_symmetry"] and body["is_trace_preserving"]
    assert "tp_residual" in body["margins"]


def test_product_evaluation_endpoint(client, rng):
    rho, sigma = rand_density(2, rng), rand_density(2, rng)
    ident = superop_to_dict(conjugation_channel(np.eye(2, dtype=complex)))
    r = client.post("/products/evaluate", json={
        "product": {"kind": "mixture", "alpha": 0.5, "phi": ident, "psi": ident},
        "a": operator_to_dict(rho), "b": operator_to_dict(sigma)})
    assert r.status_code == 200
    out = np.asarray(r.json()["result"]["re"]) + 1j * np.asarray(r.json()["result"]["im"])
    np.testing.assert_allclose(out, (rho + sigma) / 2, atol=1e-12)


def test_twirled_product_endpoint_matches_library(client, rng):
    fid = rand_density(2, rng)
    rho, sigma = rand_density(2, rng), rand_density(2, rng)
    ctx_json = {"rep": {"kind": "weyl", "dim": 2}, "fiducial": operator_to_dict(fid),
                "nu": {"kind": "dirac"}}
    r = client.post("/twirled/product", json={
        "context": ctx_json, "a": operator_to_dict(rho), "b": operator_to_dict(sigma)})
    assert r.status_code == 200
    out = np.asarray(r.json()["result"]["re"]) + 1j * np.asarray(r.json()["result"]["im"])
    ctx = TwirledContext(weyl_heisenberg_rep(2), fiducial=fid)
    np.testing.assert_allclose(out, triple_product(ctx, rho, sigma), atol=1e-12)


def test_run_endpoint(client):
    config = {
        "schema": 1, "seed": 99,
        "suites": ["orthogonality", "collapse"],
        "contexts": [{"rep": {"kind": "weyl", "dim": 2},
                      "fiducial": {"kind": "random_mixed"}, "nu": {"kind": "dirac"}}],
    }
    r = client.post("/run", json=config)
    assert r.status_code == 200
    body = r.json()
    assert body["summary"]["passed"]
    assert set(body["reports"]) == {"orthogonality", "collapse"}
    assert all(c["passed"] for c in body["reports"]["collapse"]["checks"])


def test_run_endpoint_rejects_bad_config(client):
    r = client.post("/run", json={"seed": 1, "suites": ["nope"]})
    assert r.status_code == 422
    assert "unknown suite" in r.json()["detail"]
    r = client.post("/run", json={"suites": ["collapse"]})
    assert r.status_code == 422   # pydantic: missing seed
    r = client.post("/run", json={"seed": 1, "suites": ["collapse"],
                                  "contexts": [{"rep": {"kind": "weyl"}}]})
    assert r.status_code == 422   # malformed context descriptor
    assert "context" in r.json()["detail"]


def test_demo_endpoint(client):
    r = client.post("/demo", json={"seed": 3})
    assert r.status_code == 200
    tables = r.json()["tables"]
    assert "associativity_vs_dim.csv" in tables
    assert tables["husimi_fock1_slice.csv"].startswith("q,husimi_fock1")
