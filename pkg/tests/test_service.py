import json

import pytest
from fastapi.testclient import TestClient

from symaudit.service.app import app

client = TestClient(app)


def post(endpoint, body, expect=200):
    r = client.post(endpoint, json=body)
    assert r.status_code == expect, r.text
    return r


def payload(r):
    return json.loads(r.content)["payload"]


def test_health_and_schema():
    assert client.get("/health").json()["status"] == "ok"
    assert client.get("/schema-version").json()["schema_version"] == "1.0.0"


def test_envelope_fields():
    r = post("/check-cnd", {"group": "free:2", "ball_radius": 2})
    doc = json.loads(r.content)
    for key in ("schema_version", "tool_version", "subcommand", "config", "payload", "wall_time_s"):
        assert key in doc
    assert doc["wall_time_s"] is None
    assert doc["config"]["group"] == "free:2"
    assert "X-Elapsed-Seconds" in r.headers


def test_check_pd():
    r = post("/check-pd", {"group": "free:2", "symbol": "fejer:word", "n": 2, "ball_radius": 3})
    assert payload(r)["passed"] is True
    r = post("/check-pd", {"group": "free:2", "symbol": "radial:dirac:0", "t": 5.0, "ball_radius": 3})
    assert payload(r)["passed"] is True
    # below t0 the radial symbol leaves its domain
    post("/check-pd", {"group": "free:2", "symbol": "radial:dirac:0", "t": 1.0, "ball_radius": 2}, expect=400)
    # missing index
    post("/check-pd", {"group": "free:2", "symbol": "fejer:word", "ball_radius": 2}, expect=400)


def test_grammar_errors_are_400():
    r = client.post("/check-pd", json={"group": "nope:3", "symbol": "fejer:word", "n": 1})
    assert r.status_code == 400
    assert "nope" in r.text
    r = client.post("/validate-ring", json={"ring": "so3:4"})
    assert r.status_code == 400


def test_pydantic_validation_is_422():
    r = client.post("/fejer-experiment", json={"n": 16, "d": 1, "p": 2.0, "trials": 2})
    assert r.status_code == 422  # seed is required for stochastic paths


def test_check_cnd_and_schoenberg():
    assert payload(post("/check-cnd", {"group": "free:2", "ball_radius": 3}))["passed"] is True
    r = post("/schoenberg", {"group": "free:2", "ball_radius": 2, "t_grid": [0.5, 1.0, 2.0]})
    assert payload(r)["passed"] is True


def test_audit_symbol_a1_heat():
    r = post(
        "/audit-symbol",
        {"group": "free:2", "symbol": "heat", "condition": "A1", "alpha": 1.0,
         "ball_radius": 3, "n_lo": -4, "n_hi": 8, "beta_request": 1.0 + 1e-12},
    )
    p = payload(r)
    assert p["passed"] is True and p["best_constant"] <= 1.0 + 1e-12


def test_audit_symbol_a1_fejer_heis():
    r = post(
        "/audit-symbol",
        {"group": "heis3", "symbol": "fejer:word", "condition": "A1", "alpha": 2.0,
         "ball_radius": 6, "n_lo": 0, "n_hi": 2},
    )
    p = payload(r)
    assert p["passed"] is None and p["best_constant"] > 0
    assert p["witness"]["index"] in (0, 1, 2)


def test_audit_symbol_a2_and_difference():
    r = post(
        "/audit-symbol",
        {"symbol": "br:delta=2", "condition": "A2", "alpha": 1.0, "eta": 1,
         "k_max": 12, "t_min": 1.0, "t_max": 32.0},
    )
    assert payload(r)["derivative_source"] == "analytic"
    r = post(
        "/audit-symbol",
        {"group": "zd:1", "symbol": "fejer:cube", "condition": "difference",
         "alpha": 1.0, "ball_radius": 8, "n_lo": 1, "n_hi": 8},
    )
    assert payload(r)["best_constant"] > 0
    # requesting an unattainably small bound turns the audit into a failure
    r = post(
        "/audit-symbol",
        {"group": "zd:1", "symbol": "fejer:cube", "condition": "difference",
         "alpha": 1.0, "ball_radius": 8, "n_lo": 1, "n_hi": 8, "beta_request": 1e-9},
    )
    assert payload(r)["passed"] is False


def test_audit_symbol_condition_mismatch():
    post("/audit-symbol", {"group": "free:2", "symbol": "fejer:word", "condition": "A2"}, expect=400)


def test_build_length_selected_on_z():
    r = post(
        "/build-length",
        {"group": "zd:1", "mode": "selected", "horizon": 2000, "verify_window": 4,
         "count": 5, "relaxed": False, "domain_radius": 16, "j_max": 4},
    )
    p = payload(r)
    assert p["subsequence"] == [1, 2, 8, 64, 1024]
    assert p["passed"] is True and p["ratio"] < 16


def test_build_length_lacunary_heis():
    r = post("/build-length", {"group": "heis3", "mode": "lacunary", "j_max": 3, "domain_radius": 6})
    p = payload(r)
    assert p["relaxed"] is True and p["envelope_constant"] > 0
    assert p["c1"] > 0 and p["c2"] >= p["c1"]


def test_dirichlet_endpoint():
    r = post("/dirichlet", {"group": "zd:1", "n_lo": 0, "n_hi": 8, "domain_radius": 12})
    p = payload(r)
    assert p["passed"] is True
    assert p["extras"]["l2_row_sum_factor"] > 0


def test_fejer_experiment_deterministic():
    body = {"n": 32, "d": 1, "p": 2.0, "trials": 5, "seed": 99}
    r1, r2 = post("/fejer-experiment", body), post("/fejer-experiment", body)
    assert r1.content == r2.content
    r3 = post("/fejer-experiment", {**body, "seed": 100})
    assert r3.content != r1.content


def test_fusion_endpoints():
    r = post("/fusion-fejer", {"ring": "su2:16", "folner_upto": 6, "check_chain": True})
    p = payload(r)
    assert p["passed"] is True
    first = p["values"][0]
    assert first["phi"] == "1/1" or first["phi"] == "1"
    r = post("/fusion-fejer", {"ring": "groupdual:zmod:12", "folner_upto": 4, "check_chain": True})
    assert payload(r)["passed"] is True
    r = post("/validate-ring", {"ring": "su2:12"})
    assert payload(r)["passed"] is True


def test_scalar_checks():
    assert payload(post("/bochner-riesz", {"alpha": 1.0, "beta": 2.0, "s_points": 16}))["passed"] is True
    assert payload(post("/square-constant", {"alphas": [0.0, 1.0], "ks": [1, 8]}))["passed"] is True


def test_convexbody_and_sweep():
    r = post("/convexbody-audit", {"body": "cube:d=4", "budget": 20000, "seed": 7})
    p = payload(r)
    assert p["extras"]["gradient_constant"] > 0
    r = post(
        "/dimension-sweep",
        {"family": "lq", "q": 4, "dims": [2, 3], "v_max": 1, "budget": 20000, "seed": 7, "format": "csv"},
    )
    assert r.headers["content-type"].startswith("text/csv")
    header = r.text.splitlines()[0]
    for col in ("family", "q", "d", "gradient", "seed"):
        assert col in header
    r2 = post(
        "/dimension-sweep",
        {"family": "lq", "q": 4, "dims": [2, 3], "v_max": 1, "budget": 20000, "seed": 7, "format": "json"},
    )
    assert payload(r2)["max_over_min"]["gradient"] > 0


def test_byte_identical_reports():
    body = {"group": "free:2", "symbol": "fejer:word", "n": 2, "ball_radius": 3}
    assert post("/check-pd", body).content == post("/check-pd", body).content
