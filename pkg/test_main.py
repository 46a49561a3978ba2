"""
test_main.py — Unit tests for the HTTP backend (main.py)

Tests cover:
  - read_config_upload: extension, size, JSON and tolerance checks,
    form overrides applied on top of the uploaded config
  - solve_sync / curves_sync: JSON-ready payloads

Run with:  pytest test_main.py -v
"""

import json
from io import BytesIO

import anyio
import pytest
from fastapi import HTTPException, UploadFile

from conftest import UNIFORM_FIXED_POINT
from main import MAX_TOLERANCE, curves_sync, read_config_upload, solve_sync


# ── Helpers ────────────────────────────────────────────────────────────────

def upload(content, filename="run.json"):
    """Wrap raw bytes or a dict as an uploaded file."""
    if isinstance(content, dict):
        content = json.dumps(content).encode("utf-8")
    return UploadFile(file=BytesIO(content), filename=filename)


def uniform_single():
    return {"model": {"kind": "uniform"}, "senders": [{"p": 0.8}],
            "solver": {"scan_grid": 256, "curve_grid": 16}}


def read(file, seed=None, tolerance=None):
    return anyio.run(read_config_upload, file, seed, tolerance)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ("DISCLOSURE_SEED", "DISCLOSURE_THREADS", "DISCLOSURE_TOLERANCE", "DISCLOSURE_OUT"):
        monkeypatch.delenv(key, raising=False)


# ── read_config_upload ─────────────────────────────────────────────────────

class TestReadConfigUpload:

    def test_accepts_valid_config(self):
        config = read(upload(uniform_single()))
        assert config.game == "single"
        assert config.senders[0].p == pytest.approx(0.8)

    def test_form_overrides(self):
        config = read(upload(uniform_single()), seed=11, tolerance=1e-4)
        assert config.solver.seed == 11
        assert config.solver.tolerance == pytest.approx(1e-4)

    def test_rejects_wrong_extension(self):
        with pytest.raises(HTTPException) as exc:
            read(upload(uniform_single(), filename="run.yaml"))
        assert exc.value.status_code == 400
        assert ".json" in exc.value.detail

    def test_rejects_bad_json(self):
        with pytest.raises(HTTPException) as exc:
            read(upload(b"{\"model\": "))
        assert exc.value.status_code == 400
        assert "not valid JSON" in exc.value.detail

    def test_rejects_non_object(self):
        with pytest.raises(HTTPException) as exc:
            read(upload(b"[1, 2, 3]"))
        assert "JSON object" in exc.value.detail

    def test_rejects_tolerance_out_of_range(self):
        with pytest.raises(HTTPException) as exc:
            read(upload(uniform_single()), tolerance=MAX_TOLERANCE * 10)
        assert exc.value.status_code == 400
        assert "Tolerance" in exc.value.detail

    def test_validation_errors_are_400(self):
        bad = {"model": {"kind": "uniform"}, "game": "two", "senders": [{"p": 0.8}]}
        with pytest.raises(HTTPException) as exc:
            read(upload(bad))
        assert exc.value.status_code == 400
        assert "exactly 2" in exc.value.detail


# ── Payloads ───────────────────────────────────────────────────────────────

class TestPayloads:

    def test_solve_payload(self):
        result = solve_sync(read(upload(uniform_single())))
        assert result["success"] is True
        assert result["game"] == "single"
        assert result["equilibria"][0]["threshold"] == pytest.approx(UNIFORM_FIXED_POINT, abs=1e-8)
        assert result["posterior"]["mean"] == pytest.approx(0.5, abs=1e-10)
        assert "EQUILIBRIUM REPORT" in result["report"]
        json.dumps(result)

    def test_solve_payload_without_posterior(self):
        data = dict(uniform_single(), game="uncertain_bias")
        result = solve_sync(read(upload(data)))
        assert result["posterior"] is None

    def test_curves_payload(self):
        result = curves_sync(read(upload(uniform_single())))
        assert result["columns"] == ["s", "eta", "disclosure_payoff"]
        assert len(result["rows"]) == 16
