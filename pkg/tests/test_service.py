"""HTTP API: wire formats, tiles, error taxonomy, caching semantics."""

import json

import pytest
from fastapi.testclient import TestClient

from torusdyn.cache import content_hash
from torusdyn.service.app import TILE_SIZE, create_app

QMAP = {
    "family": "q_lambda",
    "alpha": {"named": "golden"},
    "coeffs": [{"kind": "fourier", "coeffs": [[0, 0.5, 0.0]]}],
}
SLICE = {
    "lambda0": {"kind": "fourier", "coeffs": [[0, 0.5, 0.0]]},
    "v1": {"kind": "fourier", "coeffs": [[0, 1.0, 0.0]]},
    "v2": {"kind": "fourier", "coeffs": [[0, 0.0, 1.0]]},
    "alpha": "golden",
    "rect": [-0.2, 0.2, -0.2, 0.2],
}


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    app = create_app(cache_root=tmp_path_factory.mktemp("svc-cache"))
    with TestClient(app) as c:
        yield c


def test_meta(client):
    r = client.get("/api/meta")
    assert r.status_code == 200
    body = r.json()
    assert body["name"] == "torusdyn"
    assert body["tile_size"] == TILE_SIZE
    assert "POST /api/classify" in body["endpoints"]
    assert "GET /api/param-tile" in body["endpoints"]
    assert "golden" in body["alpha_presets"]
    assert len(body["palette"]) == 4


def test_classify_member(client):
    r = client.post("/api/classify", json={"map": QMAP})
    assert r.status_code == 200
    body = r.json()
    assert body["in_H0star"] is True
    assert body["kappa_hat"] == [pytest.approx(0.5), pytest.approx(0.0)]
    assert body["winding"] == 0


def test_classify_malformed_json_is_400(client):
    r = client.post(
        "/api/classify", content=b"{not json", headers={"content-type": "application/json"}
    )
    assert r.status_code == 400
    assert r.json()["error"] == "bad-request"


def test_classify_unknown_field_is_400(client):
    r = client.post("/api/classify", json={"map": QMAP, "bogus": 1})
    assert r.status_code == 400


def test_classify_domain_error_is_422(client):
    bad = dict(QMAP, coeffs=[{"kind": "fourier", "coeffs": [[0, 0.0, 0.0]]}])
    r = client.post("/api/classify", json={"map": bad})
    assert r.status_code == 422
    assert r.json()["error"] == "VanishingLambda"


def test_classify_bad_descriptor_is_422(client):
    junk = {"family": "q_lambda", "alpha": {"named": "golden"}, "coeffs": [{"kind": "fourier"}]}
    r = client.post("/api/classify", json={"map": junk})
    assert r.status_code == 422
    assert r.json()["error"] == "BadDescriptor"


def test_julia_fiber_requires_registered_map(client):
    r = client.get("/api/julia-fiber", params={"map": "0" * 64, "width": 32, "height": 32})
    assert r.status_code == 404
    assert r.json()["error"] == "unknown-map"


def test_julia_fiber_after_classify(client):
    handle = content_hash(QMAP)
    client.post("/api/classify", json={"map": QMAP})
    r = client.get(
        "/api/julia-fiber",
        params={"map": handle, "width": 32, "height": 32, "budget": 40, "theta": 0.2},
    )
    assert r.status_code == 200
    assert r.headers["content-type"] == "image/png"
    assert r.content.startswith(b"\x89PNG")
    stats = json.loads(r.headers["X-Fiber-Stats"])
    assert 0.0 <= stats["bounded_fraction"] <= 1.0
    assert stats["theta"] == pytest.approx(0.2)
    assert r.headers["ETag"]


def test_julia_fiber_rejects_tiny_raster(client):
    handle = content_hash(QMAP)
    r = client.get("/api/julia-fiber", params={"map": handle, "width": 4, "height": 32})
    assert r.status_code == 400


def test_slice_registration_and_tiles(client):
    reg = client.post("/api/slice", json=SLICE)
    assert reg.status_code == 200
    handle = reg.json()["slice"]
    assert reg.json()["rect"] == SLICE["rect"]

    tile = client.get(
        "/api/param-tile",
        params={"slice": handle, "x": 0, "y": 0, "zoom": 0, "n_iter": 120, "n_theta": 64},
    )
    assert tile.status_code == 200
    assert tile.content.startswith(b"\x89PNG")
    stats = json.loads(tile.headers["X-Tile-Stats"])
    assert stats["rect"] == SLICE["rect"]  # zoom 0 covers the whole slice
    assert stats["counts"]["member"] == TILE_SIZE * TILE_SIZE

    again = client.get(
        "/api/param-tile",
        params={"slice": handle, "x": 0, "y": 0, "zoom": 0, "n_iter": 120, "n_theta": 64},
    )
    assert again.content == tile.content
    assert again.headers["ETag"] == tile.headers["ETag"]


def test_tile_row_zero_is_top(client):
    reg = client.post("/api/slice", json=SLICE)
    handle = reg.json()["slice"]
    top = client.get(
        "/api/param-tile",
        params={"slice": handle, "x": 0, "y": 0, "zoom": 1, "n_iter": 60, "n_theta": 64},
    )
    rect = json.loads(top.headers["X-Tile-Stats"])["rect"]
    # upper half of the t-range: [t_mid, t_max]
    assert rect[2] == pytest.approx(0.0)
    assert rect[3] == pytest.approx(0.2)


def test_tile_outside_grid_is_400(client):
    reg = client.post("/api/slice", json=SLICE)
    handle = reg.json()["slice"]
    r = client.get("/api/param-tile", params={"slice": handle, "x": 2, "y": 0, "zoom": 0})
    assert r.status_code == 400


def test_tile_unknown_slice_is_404(client):
    r = client.get("/api/param-tile", params={"slice": "f" * 64, "x": 0, "y": 0, "zoom": 0})
    assert r.status_code == 404
    assert r.json()["error"] == "unknown-slice"


def test_surgery_endpoint(client):
    r = client.post("/api/surgery", json={"map": QMAP, "kappa": [0.25, 0.0]})
    assert r.status_code == 200
    body = r.json()
    assert abs(complex(*body["measured_multiplier"]) - 0.25) < 1e-6
    assert body["a_k"] == [pytest.approx(1.5), pytest.approx(0.0, abs=1e-12)]


def test_busy_gate_returns_503(tmp_path):
    app = create_app(cache_root=tmp_path, max_inflight=0)
    with TestClient(app) as c:
        r = c.post("/api/classify", json={"map": QMAP})
        assert r.status_code == 503
        assert r.json()["error"] == "busy"


def test_registered_maps_persist_across_restarts(tmp_path):
    app = create_app(cache_root=tmp_path)
    with TestClient(app) as c:
        c.post("/api/classify", json={"map": QMAP})
    handle = content_hash(QMAP)
    app2 = create_app(cache_root=tmp_path)
    with TestClient(app2) as c2:
        r = c2.get("/api/julia-fiber", params={"map": handle, "width": 32, "height": 32})
        assert r.status_code == 200
