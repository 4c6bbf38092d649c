from __future__ import annotations

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from samlfd import best_reproduction, bundled_shape
from samlfd.cli import EXIT_OK, main
from samlfd.datasets import trajectory_to_dict
from samlfd.engine import canonical_session_json
from samlfd.metrics import METRIC_IDS
from samlfd.service import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(persist_dir=tmp_path / "sessions")
    with TestClient(app) as c:
        yield c


def make_session(client, **overrides) -> dict:
    payload = {"bundled": "s_curve", "metric": "frechet", "resolution": 5}
    payload.update(overrides)
    response = client.post("/sessions", json=payload)
    assert response.status_code == 201, response.text
    return response.json()


class TestDiscoveryEndpoints:
    def test_metrics_listing(self, client):
        body = client.get("/metrics").json()
        assert set(body["metrics"]) == set(METRIC_IDS)

    def test_representations_listing(self, client):
        body = client.get("/representations").json()
        assert body["representations"] == ["ja", "lte", "dmp"]


class TestSessionLifecycle:
    def test_create_returns_id_and_map(self, client):
        body = make_session(client)
        assert body["status"] == "ready"
        session = body["session"]
        assert session["schema"] == "samlfd-session/1"
        assert len(session["best_label"]) == 25
        assert set(session["scores"]) == {"ja", "lte", "dmp"}

    def test_inline_demo_object(self, client, corpus):
        # preprocess=False keeps the submitted samples; the corpus shapes
        # already went through the default pipeline.
        demo_dict = trajectory_to_dict(corpus["loop"], name="loop")
        body = make_session(client, bundled=None, demo=demo_dict, preprocess=False)
        assert body["session"]["demo"]["samples"] == demo_dict["samples"]

    def test_inline_demo_preprocessed_by_default(self, client, rng):
        t = np.linspace(0.0, 1.0, 60)
        raw = np.stack([t, np.cos(3 * t)], axis=1) + rng.normal(scale=0.01, size=(60, 2))
        from samlfd import Trajectory

        demo_dict = trajectory_to_dict(Trajectory(raw), name="raw")
        body = make_session(client, bundled=None, demo=demo_dict)
        assert len(body["session"]["demo"]["samples"]) == 100

    def test_get_session_roundtrip(self, client):
        created = make_session(client)
        fetched = client.get(f"/sessions/{created['id']}")
        assert fetched.status_code == 200
        assert fetched.json()["session"] == created["session"]

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/deadbeef").status_code == 404
        assert client.post("/sessions/deadbeef/reproduce", json={"point": [0, 0]}).status_code == 404

    def test_validation_errors_400(self, client):
        assert client.post("/sessions", json={"bundled": "unknown_shape"}).status_code == 400
        assert client.post("/sessions", json={}).status_code == 400
        assert client.post("/sessions", json={"bundled": "line", "metric": "nope"}).status_code == 400
        assert client.post("/sessions", json={"bundled": "line", "resolution": 1}).status_code == 400

    def test_persist_writes_session_file(self, client, tmp_path):
        body = make_session(client)
        stored = tmp_path / "sessions" / f"{body['id']}.json"
        assert stored.exists()
        assert json.loads(stored.read_text()) == body["session"]

    def test_cors_headers_present(self, client):
        response = client.get("/metrics", headers={"Origin": "http://localhost:5173"})
        assert response.headers.get("access-control-allow-origin") == "*"


class TestRegionEndpoint:
    def test_region_matches_session_best(self, client):
        body = make_session(client)
        region = client.get(f"/sessions/{body['id']}/region").json()
        assert region["labels"] == body["session"]["best_label"]
        assert region["scores"] == body["session"]["best_score"]

    def test_robust_query_parameter(self, client):
        body = make_session(client)
        region = client.get(f"/sessions/{body['id']}/region", params={"robust": 0.75}).json()
        mask = region["robust"]["mask"]
        scores = np.array(region["scores"])
        assert [s >= 0.75 for s in scores] == mask


class TestReproduceEndpoint:
    def test_matches_direct_engine_call(self, client):
        body = make_session(client, metric="hausdorff")
        demo = bundled_shape("s_curve")
        point = [float(demo.initial[0] + 0.2), float(demo.initial[1] - 0.1)]
        via_http = client.post(f"/sessions/{body['id']}/reproduce", json={"point": point}).json()
        direct = best_reproduction(demo, point, "initial", ("ja", "lte", "dmp"), "hausdorff")
        assert via_http["representation"] == direct.representation
        assert via_http["raw_distance"] == pytest.approx(direct.raw_distance, rel=1e-12)
        assert np.allclose(via_http["trajectory"]["samples"], direct.trajectory.samples)

    def test_reproduction_starts_at_requested_point(self, client):
        body = make_session(client, metric="sse")
        response = client.post(f"/sessions/{body['id']}/reproduce", json={"point": [0.3, 0.3]})
        samples = np.array(response.json()["trajectory"]["samples"])
        assert np.allclose(samples[0], [0.3, 0.3], atol=1e-9)


class TestCliHttpParity:
    def test_byte_identical_session_documents(self, client, tmp_path):
        cli_out = tmp_path / "cli_session.json"
        code = main([
            "region", "--bundled", "s_curve", "--resolution", "5",
            "--metric", "frechet", "--out", str(cli_out),
        ])
        assert code == EXIT_OK
        http_session = make_session(client)["session"]
        assert cli_out.read_text() == canonical_session_json(http_session)

    def test_raw_file_demo_parity(self, client, tmp_path, rng):
        # Both paths preprocess a raw demonstration identically.
        from samlfd import Trajectory
        from samlfd.datasets import save_trajectory

        t = np.linspace(0.0, 1.0, 150)
        raw = Trajectory(np.stack([t, 0.4 * np.sin(2 * t)], axis=1))
        demo_path = tmp_path / "raw.json"
        save_trajectory(raw, demo_path, name="raw")

        cli_out = tmp_path / "cli_session.json"
        code = main([
            "region", "--demo", str(demo_path), "--resolution", "3",
            "--metric", "sse", "--out", str(cli_out),
        ])
        assert code == EXIT_OK
        http_session = make_session(
            client,
            bundled=None,
            demo=trajectory_to_dict(raw, name="raw"),
            metric="sse",
            resolution=3,
            name="raw",
        )["session"]
        assert cli_out.read_text() == canonical_session_json(http_session)
