"""HTTP adapter for remote model servers.

Wire protocol (all bodies UTF-8 JSON, payloads base64 of canonical bytes):

- ``GET  /v1/descriptor`` -> algorithm descriptor + port signature
- ``POST /v1/invoke``     -> {status: "ok", outputs} | {status: "error", code, message}
- ``GET  /v1/health``     -> {status: "ok"}

Transport failures map to BackendUnreachable/Timeout; malformed responses to
ProtocolError; server-reported failures to RemoteFault.
"""

from __future__ import annotations

import base64
from typing import Mapping

import requests

from kolflow.capabilities import PortSpec
from kolflow.core.artifacts import Artifact, ArtifactType
from kolflow.errors import (
    BackendUnreachable,
    MalformedPayload,
    ProtocolError,
    RemoteFault,
    SignatureMismatch,
    Timeout,
)
from kolflow.registry import BackendBinding


def _request(method: str, url: str, timeout_ms: int, json_body=None) -> dict:
    try:
        response = requests.request(method, url, json=json_body,
                                    timeout=timeout_ms / 1000.0)
    except (requests.ConnectionError, requests.exceptions.InvalidURL) as exc:
        raise BackendUnreachable(f"cannot reach {url}: {exc}")
    except requests.Timeout:
        raise Timeout(f"{url} exceeded {timeout_ms} ms")
    try:
        doc = response.json()
    except ValueError:
        raise ProtocolError(
            f"{url} returned non-JSON body (status {response.status_code})"
        )
    if response.status_code != 200:
        raise ProtocolError(
            f"{url} returned status {response.status_code}: {doc}"
        )
    if not isinstance(doc, dict):
        raise ProtocolError(f"{url} returned a non-object body")
    return doc


def encode_wire_inputs(inputs: Mapping[str, Artifact]) -> dict:
    return {
        name: {
            "type": artifact.artifact_type.value,
            "payload_b64": base64.b64encode(artifact.payload).decode("ascii"),
        }
        for name, artifact in inputs.items()
    }


def decode_wire_outputs(doc: dict) -> dict[str, Artifact]:
    outputs = doc.get("outputs")
    if not isinstance(outputs, dict):
        raise ProtocolError("response missing 'outputs' object")
    artifacts: dict[str, Artifact] = {}
    for name, entry in outputs.items():
        if not isinstance(entry, dict):
            raise ProtocolError(f"output {name!r} is not an object")
        try:
            artifact_type = ArtifactType.parse(entry["type"])
            payload = base64.b64decode(entry["payload_b64"])
        except (KeyError, TypeError, ValueError, MalformedPayload) as exc:
            raise ProtocolError(f"output {name!r} is malformed: {exc}")
        try:
            artifacts[name] = Artifact(artifact_type, payload)
        except MalformedPayload as exc:
            raise ProtocolError(
                f"output {name!r} does not decode as {artifact_type.value}: {exc}"
            )
    return artifacts


def invoke_remote(
    binding: BackendBinding,
    capability: str,
    inputs: Mapping[str, Artifact],
    params: Mapping[str, object] | None = None,
) -> dict[str, Artifact]:
    """POST an invocation to a model server and decode its outputs."""
    body = {
        "capability": capability,
        "params": dict(params or {}),
        "inputs": encode_wire_inputs(inputs),
    }
    doc = _request("POST", f"{binding.base_url}/v1/invoke",
                   binding.timeout_ms or 10_000, json_body=body)
    status = doc.get("status")
    if status == "error":
        raise RemoteFault(str(doc.get("code", "UNKNOWN")),
                          str(doc.get("message", "remote fault")))
    if status != "ok":
        raise ProtocolError(f"response carries unknown status {status!r}")
    return decode_wire_outputs(doc)


def fetch_descriptor(binding: BackendBinding) -> dict:
    """Fetch and structurally validate a server's advertised descriptor."""
    doc = _request("GET", f"{binding.base_url}/v1/descriptor",
                   binding.timeout_ms or 10_000)
    for key in ("algorithm_id", "capability", "inputs", "outputs"):
        if key not in doc:
            raise ProtocolError(f"descriptor missing {key!r}")
    if not doc.get("outputs"):
        raise SignatureMismatch("advertised descriptor has zero output ports")
    return doc


def check_health(binding: BackendBinding) -> bool:
    doc = _request("GET", f"{binding.base_url}/v1/health",
                   binding.timeout_ms or 10_000)
    return doc.get("status") == "ok"


def wire_ports_to_specs(entries, with_required: bool) -> tuple[PortSpec, ...]:
    ports = []
    for entry in entries:
        try:
            ports.append(PortSpec(
                name=entry["port"],
                artifact_type=ArtifactType.parse(entry["type"]),
                required=bool(entry.get("required", True)) if with_required else True,
            ))
        except (KeyError, TypeError, MalformedPayload) as exc:
            raise ProtocolError(f"malformed advertised port {entry!r}: {exc}")
    return tuple(ports)


def verify_signature(
    advertised: dict,
    capability: str,
    inputs: tuple[PortSpec, ...],
    outputs: tuple[PortSpec, ...],
) -> None:
    """Compare a server's advertised signature with the locally registered one."""
    if advertised.get("capability") != capability:
        raise SignatureMismatch(
            f"server advertises capability {advertised.get('capability')!r}, "
            f"registration says {capability!r}"
        )
    adv_inputs = wire_ports_to_specs(advertised.get("inputs", []), with_required=True)
    adv_outputs = wire_ports_to_specs(advertised.get("outputs", []), with_required=False)
    if adv_inputs != inputs or adv_outputs != outputs:
        raise SignatureMismatch(
            "advertised port signature differs from the registered descriptor"
        )
