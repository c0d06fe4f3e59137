"""Tests for API endpoints."""

import asyncio
import threading
import time

import pytest
from fastapi.testclient import TestClient
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from backend.app.main import app
from backend.app.api.v1 import analyze as analyze_api
from backend.app.services import obstruction_service as service_module
from backend.app.services.obstruction_service import ObstructionService, ServiceBusyError
from src.verdict import apply_rules

client = TestClient(app)

CAT_MAP = [[2, 1], [1, 1]]
TORUS = {"factors": [{"dim": 1, "count": 2}]}


def test_root_endpoint():
    """Test root endpoint."""
    response = client.get("/")
    assert response.status_code == 200
    data = response.json()
    assert "message" in data
    assert "version" in data


def test_health_endpoint():
    """Test health check endpoint."""
    response = client.get("/health")
    assert response.status_code == 200
    data = response.json()
    assert data["status"] == "healthy"
    assert data["service"] == "anosov-obstructions-api"


def test_api_health_endpoint():
    """Test API v1 health endpoint."""
    response = client.get("/api/v1/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_ring_betti():
    """Betti numbers of CP^2."""
    response = client.post(
        "/api/v1/rings/betti",
        json={"generators": [{"label": "a", "degree": 2, "nilpotency": 3}]},
    )
    assert response.status_code == 200
    data = response.json()
    assert data["betti"] == [1, 0, 1, 0, 1]
    assert data["euler_characteristic"] == 3


def test_ring_cup_sign():
    """Odd classes anticommute."""
    response = client.post("/api/v1/rings/cup", json={**TORUS, "a": "x2^1", "b": "x1^1"})
    assert response.status_code == 200
    assert response.json()["sign"] == -1


def test_ring_cup_unknown_label():
    response = client.post("/api/v1/rings/cup", json={**TORUS, "a": "z", "b": "x1^1"})
    assert response.status_code == 422
    data = response.json()
    assert data["error"] == "DomainError"
    assert "unknown generator" in data["message"]


def test_ring_needs_one_source():
    response = client.post("/api/v1/rings/betti", json={})
    assert response.status_code == 422
    assert response.json()["error"] == "Validation error"


def test_lefschetz_sequence():
    payload = {**TORUS, "generator_blocks": {"1": CAT_MAP}, "length": 3}
    response = client.post("/api/v1/lefschetz/", json=payload)
    assert response.status_code == 200
    data = response.json()
    assert data["values"] == [-1, -5, -16]
    assert data["compatibility"] is None


def test_lefschetz_growth():
    payload = {**TORUS, "generator_blocks": {"1": CAT_MAP}, "growth": True}
    response = client.post("/api/v1/lefschetz/", json=payload)
    assert response.status_code == 200
    assert response.json()["compatibility"]["consistency"] == "TRANSITIVE_POSSIBLE"


def test_lefschetz_length_limit():
    payload = {**TORUS, "generator_blocks": {"1": CAT_MAP}, "length": 100000}
    response = client.post("/api/v1/lefschetz/", json=payload)
    assert response.status_code == 400


def test_lefschetz_rejects_non_ring_map():
    """x1 -> 2 x1 is not invertible on H^1."""
    payload = {**TORUS, "images": {"x1^1": [2, 0], "x2^1": [0, 1]}}
    response = client.post("/api/v1/lefschetz/", json=payload)
    assert response.status_code == 409
    assert response.json()["error"] == "NotInvertibleError"


def test_form_tables():
    response = client.get("/api/v1/forms/tables")
    assert response.status_code == 200
    tables = response.json()
    assert [t["forms"] for t in tables] == [["Q1", "Q2"], ["Q3", "Q4"]]
    assert len(tables[0]["isometries"]) == 4


def test_form_analyze_definite():
    response = client.post("/api/v1/forms/analyze", json={"matrix": [[1, 0], [0, 1]]})
    assert response.status_code == 200
    data = response.json()
    assert data["conclusion"] == "NO_ANOSOV"
    assert data["rule"] == "definite-middle-form"


def test_form_analyze_not_unimodular():
    response = client.post("/api/v1/forms/analyze", json={"matrix": [[2, 0], [0, 1]]})
    assert response.status_code == 422
    assert "not unimodular" in response.json()["message"]


def test_form_analyze_entry_bound_limit():
    response = client.post(
        "/api/v1/forms/analyze",
        json={"matrix": [[0, 1], [1, 0]], "entry_bound": 50},
    )
    assert response.status_code == 400


def test_cross_check():
    response = client.post("/api/v1/oracle/cross-check", json={"matrix": CAT_MAP, "length": 3})
    assert response.status_code == 200
    rows = response.json()["rows"]
    assert [r["det_count"] for r in rows] == [1, 5, 16]
    assert [r["lefschetz"] for r in rows] == [-1, -5, -16]


def test_cross_check_non_hyperbolic():
    response = client.post("/api/v1/oracle/cross-check", json={"matrix": [[0, -1], [1, 0]]})
    assert response.status_code == 422
    assert response.json()["error"] == "PreconditionError"


def test_cross_check_matrix_size_limit():
    big = [[int(i == j) for j in range(20)] for i in range(20)]
    response = client.post("/api/v1/oracle/cross-check", json={"matrix": big})
    assert response.status_code == 400


def test_analyze_sphere_product():
    payload = {"kind": "sphere_product", "factors": [{"dim": 2, "count": 2}]}
    response = client.post("/api/v1/analyze", json=payload)
    assert response.status_code == 200
    data = response.json()
    assert data["betti_profile"] == [1, 0, 2, 0, 1]
    assert data["verdicts"][0]["rule"] == "all-even-spheres"


def test_analyze_invalid_spec():
    response = client.post("/api/v1/analyze", json={"kind": "sphere_product", "factors": []})
    assert response.status_code == 422
    data = response.json()
    assert data["error"] == "SpecFormatError"
    assert "field sphere_product.factors" in data["message"]


def test_analyze_outside_hypotheses():
    payload = {
        "kind": "fiber_over_sphere",
        "fiber": {"kind": "sphere_product", "factors": [{"dim": 1, "count": 2}]},
        "base_sphere_dim": 2,
    }
    response = client.post("/api/v1/analyze", json=payload)
    assert response.status_code == 422
    assert response.json()["error"] == "OutsideHypothesesError"


def test_sphere_product_blocks():
    payload = {"kind": "sphere_product", "factors": [{"dim": 3, "count": 2}]}
    response = client.post("/api/v1/sphere-products/blocks", json=payload)
    assert response.status_code == 200
    data = response.json()
    assert data["example_blocks"] is True
    assert data["table"].startswith("f*0 = Id_Z\n")


def test_sphere_product_blocks_wrong_kind():
    payload = {"kind": "form_manifold", "n": 1, "form": [[1]]}
    response = client.post("/api/v1/sphere-products/blocks", json=payload)
    assert response.status_code == 400


@pytest.mark.parametrize("path", ["/api/v1/unknown", "/api/v1/forms/missing"])
def test_unknown_route(path):
    response = client.get(path)
    assert response.status_code == 404
    assert response.json()["path"] == path


S2XS2 = {"kind": "sphere_product", "factors": [{"dim": 2, "count": 2}]}


def _wait_idle(service, attempts=200):
    for _ in range(attempts):
        if service.in_flight == 0:
            return True
        time.sleep(0.01)
    return False


def test_timed_out_job_holds_its_worker():
    """A job that outlives its request keeps its slot until the thread returns."""
    service = ObstructionService(timeout=0.05, max_workers=1)
    release = threading.Event()

    async def scenario():
        with pytest.raises(asyncio.TimeoutError):
            await service._run(release.wait, 5)
        assert service.in_flight == 1
        with pytest.raises(ServiceBusyError):
            await service._run(lambda: 1)
        release.set()
        assert _wait_idle(service)
        return await service._run(lambda: 2)

    try:
        assert asyncio.run(scenario()) == 2
        assert service.in_flight == 0
    finally:
        release.set()
        service.shutdown()


def test_analyze_timeout_and_busy_responses(monkeypatch):
    """504 on timeout, 503 while the timed-out job still runs, 200 once it finishes."""
    service = ObstructionService(timeout=0.05, max_workers=1)
    release = threading.Event()

    def slow_rules(spec):
        release.wait(5)
        return apply_rules(spec)

    monkeypatch.setattr(analyze_api, "obstruction_service", service)
    monkeypatch.setattr(service_module, "apply_rules", slow_rules)
    try:
        response = client.post("/api/v1/analyze", json=S2XS2)
        assert response.status_code == 504
        assert response.json()["error"] == "Computation timed out"

        busy = client.post("/api/v1/analyze", json=S2XS2)
        assert busy.status_code == 503
        assert busy.headers["retry-after"] == "5"

        release.set()
        assert _wait_idle(service)
        assert client.post("/api/v1/analyze", json=S2XS2).status_code == 200
    finally:
        release.set()
        service.shutdown()
