"""HTTP surface: endpoints, error code mapping, event streaming."""

import base64
import inspect
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from kolflow import errors
from kolflow.backends.stub_server import StubModelServer
from kolflow.core import Raster
from kolflow.gateway.app import ERROR_MAP, GatewayConfig, create_app
from tests.conftest import random_raster


@pytest.fixture
def client(tmp_path):
    config = GatewayConfig(store_root=tmp_path / "store",
                           runs_root=tmp_path / "runs", with_mocks=True)
    app = create_app(config)
    with TestClient(app) as client:
        yield client


def upload(client, raster_or_text, type_tag):
    if isinstance(raster_or_text, Raster):
        payload = raster_or_text.encode_png()
    else:
        payload = raster_or_text.encode("utf-8")
    response = client.post("/artifacts", json={
        "type": type_tag, "b64": base64.b64encode(payload).decode(),
    })
    assert response.status_code == 201, response.text
    return response.json()["ref"]


@pytest.fixture
def uploaded_inputs(client):
    rng = np.random.default_rng(21)
    return {
        "identity": upload(client, random_raster(rng, 32, 32), "PersonImage"),
        "garment": upload(client, random_raster(rng, 8, 8), "GarmentRef"),
        "makeup_ref": upload(client, random_raster(rng, 8, 8), "MakeupRef"),
        "object_ref": upload(client, random_raster(rng, 8, 8), "ObjectRef"),
        "background_spec": upload(client, "city night", "BackgroundSpec"),
    }


def synthesize_full(client, uploaded_inputs):
    body = {
        "capabilities": ["tryon", "makeup", "background", "object_interaction"],
        "inputs": uploaded_inputs,
    }
    response = client.post("/pipelines/synthesize", json=body)
    assert response.status_code == 200, response.text
    return response.json()


class TestServices:
    def test_six_builtin_descriptors(self, client):
        services = client.get("/services").json()
        assert len(services) == 6
        assert [s["service_id"] for s in services] == sorted(
            s["service_id"] for s in services)

    def test_capability_filter(self, client):
        services = client.get("/services", params={"capability": "makeup"}).json()
        assert [s["service_id"] for s in services] == ["makeup"]

    def test_unregister(self, client):
        response = client.delete("/services/makeup")
        assert response.status_code == 200
        assert len(client.get("/services").json()) == 5
        again = client.delete("/services/makeup")
        assert again.status_code == 404
        assert again.json()["error"]["code"] == "UNKNOWN_SERVICE"

    def test_register_local_duplicate(self, client):
        descriptor = client.get("/services").json()[0]
        response = client.post("/services", json=descriptor)
        assert response.status_code == 409
        assert response.json()["error"]["code"] == "DUPLICATE_SERVICE"

    def test_register_remote_service(self, client):
        with StubModelServer("mock_makeup") as server:
            response = client.post("/services", json={
                "service_id": "remote_makeup",
                "capability": "makeup",
                "backend": {"kind": "remote", "base_url": server.base_url,
                            "timeout_ms": 5000},
            })
            assert response.status_code == 201, response.text
            doc = response.json()
            assert {p["port"] for p in doc["inputs"]} == {"person", "makeup_ref"}
        assert any(s["service_id"] == "remote_makeup"
                   for s in client.get("/services").json())

    def test_register_remote_unreachable(self, client):
        response = client.post("/services", json={
            "service_id": "ghost",
            "capability": "makeup",
            "backend": {"kind": "remote", "base_url": "http://127.0.0.1:9",
                        "timeout_ms": 300},
        })
        assert response.status_code == 502
        assert response.json()["error"]["code"] == "BACKEND_UNREACHABLE"

    def test_register_remote_signature_mismatch(self, client):
        with StubModelServer("mock_makeup") as server:
            response = client.post("/services", json={
                "service_id": "mislabeled",
                "capability": "tryon",
                "backend": {"kind": "remote", "base_url": server.base_url,
                            "timeout_ms": 5000},
            })
        assert response.status_code == 409
        assert response.json()["error"]["code"] == "SIGNATURE_MISMATCH"


class TestSynthesize:
    def test_full_chain(self, client, uploaded_inputs):
        doc = synthesize_full(client, uploaded_inputs)
        assert [n["id"] for n in doc["nodes"]] == [
            "tryon", "makeup", "background", "object_interaction"]
        assert "spec_hash" in doc

    def test_identical_requests_byte_identical(self, client, uploaded_inputs):
        body = {"capabilities": ["tryon", "makeup"], "inputs": uploaded_inputs}
        first = client.post("/pipelines/synthesize", json=body)
        second = client.post("/pipelines/synthesize", json=body)
        assert first.content == second.content

    def test_unsatisfiable(self, client, uploaded_inputs):
        client.delete("/services/makeup")
        response = client.post("/pipelines/synthesize", json={
            "capabilities": ["makeup"], "inputs": uploaded_inputs})
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "UNSATISFIABLE_QUERY"

    def test_malformed_body(self, client):
        response = client.post("/pipelines/synthesize",
                               content=b"{not json",
                               headers={"content-type": "application/json"})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "BAD_DOCUMENT"

    def test_bad_query(self, client):
        response = client.post("/pipelines/synthesize",
                               json={"capabilities": "tryon"})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "BAD_QUERY"

    def test_inline_base64_inputs(self, client):
        rng = np.random.default_rng(55)
        body = {
            "capabilities": ["background"],
            "inputs": {
                "identity": {
                    "type": "PersonImage",
                    "b64": base64.b64encode(
                        random_raster(rng, 16, 16).encode_png()).decode(),
                },
                "background_spec": {
                    "type": "BackgroundSpec",
                    "b64": base64.b64encode(b"harbor at dusk").decode(),
                },
            },
        }
        response = client.post("/pipelines/synthesize", json=body)
        assert response.status_code == 200, response.text
        doc = response.json()
        # inline uploads landed in the store and bound as refs
        for ref in doc["inputs"].values():
            assert client.get("/services").status_code == 200
            assert "/" in ref and ref.split(".")[-1] in ("png", "txt")
        run_id = client.post("/runs", json={"pipeline": doc}).json()["run_id"]
        client.get(f"/runs/{run_id}/events").read()
        assert client.get(f"/runs/{run_id}").json()["status"] == "succeeded"


class TestValidate:
    def test_valid_spec(self, client, uploaded_inputs):
        doc = synthesize_full(client, uploaded_inputs)
        response = client.post("/pipelines/validate", json={"pipeline": doc})
        assert response.json() == {"valid": True, "violations": []}

    def test_violations_reported(self, client, uploaded_inputs):
        doc = synthesize_full(client, uploaded_inputs)
        doc["nodes"] = list(reversed(doc["nodes"]))
        del doc["spec_hash"]
        response = client.post("/pipelines/validate", json={"pipeline": doc})
        body = response.json()
        assert response.status_code == 200
        assert not body["valid"]
        codes = {v["code"] for v in body["violations"]}
        assert "NOT_TOPOLOGICAL" in codes or "ORDER_RULE_VIOLATED" in codes


class TestRuns:
    def test_run_event_order_and_artifacts(self, client, uploaded_inputs):
        doc = synthesize_full(client, uploaded_inputs)
        response = client.post("/runs", json={
            "pipeline": doc, "options": {"max_parallel": 1}})
        assert response.status_code == 202
        run_id = response.json()["run_id"]

        kinds, nodes = [], []
        with client.stream("GET", f"/runs/{run_id}/events") as stream:
            for line in stream.iter_lines():
                if line.startswith("data: "):
                    event = json.loads(line[6:])
                    kinds.append(event["event"])
                    if "node" in event:
                        nodes.append((event["event"], event["node"]))
        assert kinds[0] == "run_started"
        assert kinds[-1] == "run_finished"
        expected_order = [n["id"] for n in doc["nodes"]]
        starts = [n for k, n in nodes if k == "node_started"]
        assert starts == expected_order
        finishes = [n for k, n in nodes if k == "node_finished"]
        assert finishes == expected_order

        record = client.get(f"/runs/{run_id}").json()
        assert record["status"] == "succeeded"

        artifact = client.get(f"/runs/{run_id}/artifacts/makeup/out")
        assert artifact.status_code == 200
        assert artifact.headers["content-type"] == "image/png"

    def test_artifact_of_missing_node_404(self, client, uploaded_inputs):
        doc = synthesize_full(client, uploaded_inputs)
        run_id = client.post("/runs", json={"pipeline": doc}).json()["run_id"]
        client.get(f"/runs/{run_id}/events").read()  # drain to completion
        response = client.get(f"/runs/{run_id}/artifacts/ghost/out")
        assert response.status_code == 404
        assert response.json()["error"]["code"] == "UNKNOWN_ARTIFACT"

    def test_invalid_spec_rejected_with_violations(self, client,
                                                   uploaded_inputs):
        doc = synthesize_full(client, uploaded_inputs)
        doc["inputs"] = {}
        del doc["spec_hash"]
        response = client.post("/runs", json={"pipeline": doc})
        assert response.status_code == 422
        body = response.json()["error"]
        assert body["code"] == "VALIDATION_FAILED"
        assert any(v["code"] == "UNBOUND_PORT"
                   for v in body["details"]["violations"])

    def test_unknown_run(self, client):
        response = client.get("/runs/nonexistent")
        assert response.status_code == 404
        assert response.json()["error"]["code"] == "UNKNOWN_RUN"

    def test_cancel_after_completion_conflict(self, client, uploaded_inputs):
        doc = synthesize_full(client, uploaded_inputs)
        run_id = client.post("/runs", json={"pipeline": doc}).json()["run_id"]
        client.get(f"/runs/{run_id}/events").read()
        response = client.post(f"/runs/{run_id}/cancel")
        assert response.status_code == 409
        assert response.json()["error"]["code"] == "ALREADY_TERMINAL"


class TestServe:
    def test_empty_registry_without_mocks(self, tmp_path):
        config = GatewayConfig(store_root=tmp_path / "s",
                               runs_root=tmp_path / "r", with_mocks=False)
        with TestClient(create_app(config)) as bare:
            assert bare.get("/services").json() == []

    def test_bind_failure_on_occupied_port(self, tmp_path):
        import socket

        from kolflow.gateway.app import serve

        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.bind(("127.0.0.1", 0))
        sock.listen(1)
        port = sock.getsockname()[1]
        try:
            config = GatewayConfig(store_root=tmp_path / "s",
                                   runs_root=tmp_path / "r",
                                   bind_address=f"127.0.0.1:{port}")
            with pytest.raises(errors.BindFailure):
                serve(config)
        finally:
            sock.close()

    def test_bad_bind_address(self, tmp_path):
        from kolflow.gateway.app import serve

        config = GatewayConfig(store_root=tmp_path / "s",
                               runs_root=tmp_path / "r",
                               bind_address="no-port-here")
        with pytest.raises(errors.BadConfig):
            serve(config)


class TestErrorCodeStability:
    def test_every_engine_error_maps_to_exactly_one_code(self):
        classes = [
            obj for obj in vars(errors).values()
            if inspect.isclass(obj)
            and issubclass(obj, errors.KolflowError)
            and obj is not errors.KolflowError
        ]
        assert classes
        for cls in classes:
            assert cls in ERROR_MAP, f"{cls.__name__} has no HTTP mapping"
            assert isinstance(cls.code, str) and cls.code

    def test_codes_are_unique_per_class(self):
        codes = {}
        for cls in ERROR_MAP:
            assert cls.code not in codes, \
                f"{cls.__name__} shares code {cls.code} with {codes[cls.code]}"
            codes[cls.code] = cls.__name__
