"""Remote adapter + stub model server: local/remote transparency and faults."""

import numpy as np
import pytest

from kolflow import capabilities as caps
from kolflow.backends import invoke_local
from kolflow.backends.remote import (
    check_health,
    fetch_descriptor,
    invoke_remote,
    verify_signature,
)
from kolflow.backends.stub_server import StubModelServer
from kolflow.core import Artifact, ArtifactType
from kolflow.errors import (
    BackendUnreachable,
    ProtocolError,
    RemoteFault,
    SignatureMismatch,
    Timeout,
)
from kolflow.registry import BackendBinding
from tests.conftest import random_landmarks, random_raster

MOCK_INPUTS = {
    "mock_tryon": {"person": ("PersonImage", "raster", (8, 8)),
                   "garment": ("GarmentRef", "raster", (4, 4))},
    "mock_makeup": {"person": ("PersonImage", "raster", (8, 8)),
                    "makeup_ref": ("MakeupRef", "raster", (4, 4))},
    "mock_background": {"person": ("PersonImage", "raster", (8, 8)),
                        "spec": ("BackgroundSpec", "text", None)},
    "mock_object": {"person": ("PersonImage", "raster", (8, 8)),
                    "object_ref": ("ObjectRef", "raster", (4, 4))},
}


def build_inputs(rng, algorithm_id):
    inputs = {}
    for port, (tag, kind, size) in MOCK_INPUTS[algorithm_id].items():
        artifact_type = ArtifactType(tag)
        if kind == "raster":
            value = random_raster(rng, *size)
        else:
            value = f"prompt-{rng.integers(0, 10_000)}"
        inputs[port] = Artifact.from_value(value, artifact_type)
    return inputs


@pytest.mark.parametrize("algorithm_id", sorted(MOCK_INPUTS))
def test_remote_matches_local(algorithm_id):
    rng = np.random.default_rng(hash(algorithm_id) % 2**31)
    with StubModelServer(algorithm_id) as server:
        binding = BackendBinding.remote(server.base_url, timeout_ms=5000)
        for _ in range(3):
            inputs = build_inputs(rng, algorithm_id)
            local = invoke_local(algorithm_id, inputs, {})
            remote = invoke_remote(binding, "unused", inputs, {})
            assert set(local) == set(remote)
            for port in local:
                assert local[port].content_hash == remote[port].content_hash


def test_remote_alignment_chain_matches_local():
    rng = np.random.default_rng(99)
    person = Artifact.from_value(random_raster(rng, 32, 32),
                                 ArtifactType.PERSON_IMAGE)
    landmarks = Artifact.from_value(random_landmarks(rng, scale=20, offset=5),
                                    ArtifactType.LANDMARK_SET)
    inputs = {"person": person, "landmarks": landmarks}
    local = invoke_local("face_extract_align", inputs, {})
    with StubModelServer("face_extract_align") as server:
        binding = BackendBinding.remote(server.base_url, timeout_ms=10_000)
        remote = invoke_remote(binding, caps.FACE_EXTRACT_ALIGN, inputs, {})
    for port in ("out", "session"):
        assert local[port].content_hash == remote[port].content_hash


class TestFaults:
    def test_remote_fault_passthrough(self):
        rng = np.random.default_rng(0)
        with StubModelServer("mock_makeup", fault="remote_error") as server:
            binding = BackendBinding.remote(server.base_url, timeout_ms=5000)
            with pytest.raises(RemoteFault) as exc:
                invoke_remote(binding, caps.MAKEUP,
                              build_inputs(rng, "mock_makeup"), {})
            assert exc.value.fault_code == "OOM"

    def test_garbage_response_is_protocol_error(self):
        rng = np.random.default_rng(1)
        with StubModelServer("mock_makeup", fault="garbage") as server:
            binding = BackendBinding.remote(server.base_url, timeout_ms=5000)
            with pytest.raises(ProtocolError):
                invoke_remote(binding, caps.MAKEUP,
                              build_inputs(rng, "mock_makeup"), {})

    def test_timeout(self):
        rng = np.random.default_rng(2)
        with StubModelServer("mock_makeup", delay_s=2.0) as server:
            binding = BackendBinding.remote(server.base_url, timeout_ms=200)
            with pytest.raises(Timeout):
                invoke_remote(binding, caps.MAKEUP,
                              build_inputs(rng, "mock_makeup"), {})

    def test_unreachable(self):
        rng = np.random.default_rng(3)
        binding = BackendBinding.remote("http://127.0.0.1:9", timeout_ms=300)
        with pytest.raises(BackendUnreachable):
            invoke_remote(binding, caps.MAKEUP,
                          build_inputs(rng, "mock_makeup"), {})


class TestDescriptor:
    def test_fetch_and_verify(self):
        with StubModelServer("mock_makeup") as server:
            binding = BackendBinding.remote(server.base_url, timeout_ms=5000)
            advertised = fetch_descriptor(binding)
            assert advertised["algorithm_id"] == "mock_makeup"
            assert advertised["capability"] == caps.MAKEUP
            assert advertised["deterministic"] is True
            verify_signature(advertised, caps.MAKEUP,
                             caps.CAPABILITY_INPUTS[caps.MAKEUP],
                             caps.CAPABILITY_OUTPUTS[caps.MAKEUP])
            assert check_health(binding)

    def test_signature_mismatch_detected(self):
        with StubModelServer("mock_makeup") as server:
            binding = BackendBinding.remote(server.base_url, timeout_ms=5000)
            advertised = fetch_descriptor(binding)
            with pytest.raises(SignatureMismatch):
                verify_signature(advertised, caps.TRYON,
                                 caps.CAPABILITY_INPUTS[caps.TRYON],
                                 caps.CAPABILITY_OUTPUTS[caps.TRYON])

    def test_zero_output_signature_rejected(self):
        with StubModelServer("mock_makeup") as server:
            binding = BackendBinding.remote(server.base_url, timeout_ms=5000)
            advertised = fetch_descriptor(binding)
            advertised["outputs"] = []
            with pytest.raises(SignatureMismatch):
                verify_signature(advertised, caps.MAKEUP,
                                 caps.CAPABILITY_INPUTS[caps.MAKEUP],
                                 caps.CAPABILITY_OUTPUTS[caps.MAKEUP])

    def test_unreachable_host(self):
        binding = BackendBinding.remote("http://127.0.0.1:9", timeout_ms=300)
        with pytest.raises(BackendUnreachable):
            fetch_descriptor(binding)
