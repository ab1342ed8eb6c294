"""HTTP gateway.

Thin shell over the engine: every endpoint delegates to registry / flow /
executor operations and maps engine errors onto a closed set of API error
codes. Run progress is delivered as a server-sent event stream; slow
consumers can always fall back to polling run status.
"""

from __future__ import annotations

import base64
import contextlib
import json
import socket
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import uvicorn
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response, StreamingResponse

from kolflow import capabilities as caps
from kolflow import errors
from kolflow.backends.remote import fetch_descriptor, verify_signature, wire_ports_to_specs
from kolflow.core.artifacts import Artifact, ArtifactType, EXTENSIONS
from kolflow.core.store import ArtifactRef, ArtifactStore
from kolflow.executor import ExecuteOptions, Executor, RUNNING
from kolflow.flow import (
    CapabilityQuery,
    ProvidedInput,
    spec_from_doc,
    spec_to_doc,
    synthesize_pipeline,
    validate_pipeline,
)
from kolflow.registry import (
    Registry,
    descriptor_from_doc,
    descriptor_to_doc,
    register_builtin_services,
)

# Closed API error code set: every engine error class maps to exactly one
# (status, code) pair; unknown engine codes must never leak.
ERROR_MAP: dict[type, int] = {
    errors.BadQuery: 400,
    errors.BadDocument: 400,
    errors.MalformedPayload: 400,
    errors.BadParams: 400,
    errors.BadConfig: 400,
    errors.MalformedInput: 400,
    errors.UnknownAlgorithm: 400,
    errors.TypeMismatch: 400,
    errors.InvalidDescriptor: 400,
    errors.NotFound: 404,
    errors.UnknownService: 404,
    errors.UnknownPort: 404,
    errors.UnknownCapability: 404,
    errors.UnknownRun: 404,
    errors.UnknownArtifact: 404,
    errors.DuplicateServiceId: 409,
    errors.AmbiguousService: 409,
    errors.AmbiguousExternalInput: 409,
    errors.CyclicConstraints: 409,
    errors.CycleDetected: 409,
    errors.ConflictingRule: 409,
    errors.AlreadyTerminal: 409,
    errors.SignatureMismatch: 409,
    errors.UnsatisfiableQuery: 422,
    errors.UnboundPort: 422,
    errors.ValidationFailed: 422,
    errors.DegenerateLandmarks: 422,
    errors.NonFiniteInput: 422,
    errors.NonInvertibleTransform: 422,
    errors.SizeMismatch: 422,
    errors.IoFailure: 500,
    errors.HashMismatch: 500,
    errors.HashCollisionMismatch: 500,
    errors.BackendError: 502,
    errors.BackendUnreachable: 502,
    errors.ProtocolError: 502,
    errors.RemoteFault: 502,
    errors.OutputTypeMismatch: 502,
    errors.BindFailure: 503,
    errors.StoreUnavailable: 503,
    errors.Timeout: 504,
}

CONTENT_TYPES = {
    "png": "image/png",
    "txt": "text/plain; charset=utf-8",
    "landmarks.json": "application/json",
    "align.json": "application/json",
}


@dataclass
class GatewayConfig:
    store_root: Path
    runs_root: Path
    registry_snapshot: Optional[Path] = None
    with_mocks: bool = False
    max_parallel: int = 1
    bind_address: str = "127.0.0.1:8700"


@dataclass
class EngineState:
    registry: Registry
    store: ArtifactStore
    executor: Executor
    config: GatewayConfig
    run_options: dict[str, ExecuteOptions] = field(default_factory=dict)


def build_engine(config: GatewayConfig) -> EngineState:
    config.store_root.mkdir(parents=True, exist_ok=True)
    config.runs_root.mkdir(parents=True, exist_ok=True)
    if config.registry_snapshot is not None:
        registry = Registry.load_snapshot(config.registry_snapshot)
    else:
        registry = Registry()
    if config.with_mocks:
        register_builtin_services(registry)
    store = ArtifactStore(config.store_root)
    executor = Executor(store, config.runs_root)
    return EngineState(registry=registry, store=store, executor=executor,
                       config=config)


def error_response(exc: errors.KolflowError) -> JSONResponse:
    status = ERROR_MAP.get(type(exc), 500)
    body = {"error": {"code": exc.code, "message": exc.message}}
    details = dict(exc.details)
    if isinstance(exc, errors.ValidationFailed) and exc.violations:
        details["violations"] = exc.violations
    if details:
        body["error"]["details"] = _json_safe(details)
    return JSONResponse(status_code=status, content=body)


def _json_safe(value):
    try:
        json.dumps(value)
        return value
    except TypeError:
        return json.loads(json.dumps(value, default=str))


def _canonical_response(doc: dict, status_code: int = 200) -> Response:
    # byte-identical rendering for identical documents
    body = json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")
    return Response(content=body, status_code=status_code,
                    media_type="application/json")


async def _read_json(request: Request) -> dict:
    try:
        doc = json.loads(await request.body())
    except json.JSONDecodeError as exc:
        raise errors.BadDocument(f"request body is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise errors.BadDocument("request body must be a JSON object")
    return doc


def _resolve_provided_inputs(engine: EngineState, inputs_doc: dict) -> tuple[ProvidedInput, ...]:
    provided = []
    for role, value in sorted(inputs_doc.items()):
        explicit_type: Optional[ArtifactType] = None
        if isinstance(value, str):
            ref = value
        elif isinstance(value, dict) and "ref" in value:
            ref = value["ref"]
            if "type" in value:
                explicit_type = ArtifactType.parse(value["type"])
        elif isinstance(value, dict) and "b64" in value:
            if "type" not in value:
                raise errors.BadQuery(f"inline input {role!r} needs a 'type'")
            explicit_type = ArtifactType.parse(value["type"])
            try:
                payload = base64.b64decode(value["b64"])
            except (TypeError, ValueError) as exc:
                raise errors.BadQuery(f"inline input {role!r} is not base64: {exc}")
            artifact = Artifact(explicit_type, payload)
            ref = str(engine.store.store(artifact))
        else:
            raise errors.BadQuery(f"input {role!r} must be a ref string, "
                                  "{'ref': ...}, or {'b64': ..., 'type': ...}")
        if not ArtifactRef.looks_like_ref(ref):
            raise errors.BadQuery(f"input {role!r} does not hold a valid ref: {ref!r}")
        provided.append(ProvidedInput.for_role(role, ref, explicit_type))
    return tuple(provided)


def parse_query_doc(engine: EngineState, doc: dict) -> CapabilityQuery:
    capabilities = doc.get("capabilities")
    if not isinstance(capabilities, list) or not all(
        isinstance(c, str) for c in capabilities
    ):
        raise errors.BadQuery("'capabilities' must be a list of capability tags")
    inputs_doc = doc.get("inputs", {})
    if not isinstance(inputs_doc, dict):
        raise errors.BadQuery("'inputs' must be an object")
    overrides = doc.get("services", {})
    if not isinstance(overrides, dict):
        raise errors.BadQuery("'services' must map capabilities to service ids")
    return CapabilityQuery(
        capabilities=frozenset(capabilities),
        align_faces=bool(doc.get("align_faces", False)),
        provided_inputs=_resolve_provided_inputs(engine, inputs_doc),
        service_overrides=dict(overrides),
    )


def register_service_doc(engine: EngineState, doc: dict) -> dict:
    descriptor = descriptor_from_doc(doc)
    if descriptor.backend.kind == "remote":
        advertised = fetch_descriptor(descriptor.backend)
        if descriptor.inputs or descriptor.outputs:
            verify_signature(advertised, descriptor.capability,
                             descriptor.inputs, descriptor.outputs)
        else:
            # registrant supplied no ports: adopt the advertised signature
            descriptor = replace(
                descriptor,
                inputs=wire_ports_to_specs(advertised["inputs"], with_required=True),
                outputs=wire_ports_to_specs(advertised["outputs"], with_required=False),
            )
        if advertised.get("capability") != descriptor.capability:
            raise errors.SignatureMismatch(
                f"server advertises capability {advertised.get('capability')!r}, "
                f"registration says {descriptor.capability!r}"
            )
    engine.registry.register(descriptor)
    return descriptor_to_doc(descriptor)


def create_app(config: GatewayConfig,
               engine: Optional[EngineState] = None) -> FastAPI:
    state = engine if engine is not None else build_engine(config)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        state.executor.shutdown()

    app = FastAPI(title="kolflow gateway", docs_url=None, redoc_url=None,
                  lifespan=lifespan)
    app.state.engine = state

    @app.exception_handler(errors.KolflowError)
    async def _engine_error(request: Request, exc: errors.KolflowError):
        return error_response(exc)

    # -- services ------------------------------------------------------------

    @app.get("/services")
    async def list_services(capability: Optional[str] = None):
        docs = [descriptor_to_doc(d) for d in state.registry.list(capability)]
        return _canonical_response(docs)

    @app.post("/services", status_code=201)
    async def register_service(request: Request):
        doc = await _read_json(request)
        return _canonical_response(register_service_doc(state, doc), 201)

    @app.delete("/services/{service_id}")
    async def unregister_service(service_id: str):
        removed = state.registry.unregister(service_id)
        return _canonical_response(descriptor_to_doc(removed))

    # -- pipelines --------------------------------------------------------------

    @app.post("/pipelines/synthesize")
    async def synthesize(request: Request):
        doc = await _read_json(request)
        query = parse_query_doc(state, doc)
        spec = synthesize_pipeline(query, state.registry)
        return _canonical_response(spec_to_doc(spec))

    @app.post("/pipelines/validate")
    async def validate(request: Request):
        doc = await _read_json(request)
        spec = spec_from_doc(doc.get("pipeline", doc))
        violations = validate_pipeline(spec, state.registry)
        return _canonical_response({
            "valid": not violations,
            "violations": [v.to_doc() for v in violations],
        })

    # -- artifacts -------------------------------------------------------------

    @app.post("/artifacts", status_code=201)
    async def upload_artifact(request: Request):
        doc = await _read_json(request)
        if "type" not in doc or "b64" not in doc:
            raise errors.BadDocument("artifact upload needs 'type' and 'b64'")
        artifact_type = ArtifactType.parse(doc["type"])
        try:
            payload = base64.b64decode(doc["b64"])
        except (TypeError, ValueError) as exc:
            raise errors.BadDocument(f"payload is not base64: {exc}")
        artifact = Artifact(artifact_type, payload)
        ref = state.store.store(artifact)
        return _canonical_response(
            {"ref": str(ref), "content_hash": artifact.hash_hex}, 201
        )

    # -- runs ------------------------------------------------------------------

    @app.post("/runs", status_code=202)
    async def start_run(request: Request):
        doc = await _read_json(request)
        spec = spec_from_doc(doc.get("pipeline", doc))
        options_doc = doc.get("options", {})
        options = ExecuteOptions(
            max_parallel=int(options_doc.get("max_parallel",
                                             state.config.max_parallel)),
            fail_fast=bool(options_doc.get("fail_fast", False)),
            memoize=bool(options_doc.get("memoize", False)),
        )
        run_id = state.executor.start_run(spec, state.registry, options)
        return _canonical_response(
            {"run_id": run_id, "spec_hash": spec.spec_hash}, 202
        )

    @app.get("/runs/{run_id}")
    async def run_status(run_id: str):
        record = state.executor.run_status(run_id)
        return _canonical_response(record.to_doc())

    @app.post("/runs/{run_id}/cancel")
    async def cancel_run(run_id: str):
        record = state.executor.cancel_run(run_id)
        return _canonical_response(record.to_doc())

    @app.get("/runs/{run_id}/events")
    async def run_events(run_id: str, after: int = 0):
        state.executor.run_status(run_id)  # 404 before the stream starts

        def stream():
            cursor = after
            while True:
                events, terminal = state.executor.events_after(
                    run_id, cursor, timeout=0.5
                )
                for event in events:
                    cursor = event.seq
                    payload = json.dumps(event.to_doc(), sort_keys=True)
                    yield f"event: {event.kind}\ndata: {payload}\n\n"
                if terminal and not events:
                    return

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/runs/{run_id}/artifacts/{node_id}/{port}")
    async def run_artifact(run_id: str, node_id: str, port: str):
        record = state.executor.run_status(run_id)
        node = record.node_states.get(node_id)
        if node is None or port not in node.artifact_refs:
            raise errors.UnknownArtifact(
                f"run {run_id} has no artifact {node_id}/{port}",
            )
        ref = ArtifactRef.parse(node.artifact_refs[port])
        path = state.store.path_for(ref)
        if not path.exists():
            raise errors.UnknownArtifact(f"artifact {ref} is missing from the store")
        return Response(content=path.read_bytes(),
                        media_type=CONTENT_TYPES[ref.extension])

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    return app


def _parse_bind(bind_address: str) -> tuple[str, int]:
    host, _, port = bind_address.rpartition(":")
    if not host or not port.isdigit():
        raise errors.BadConfig(f"bind address {bind_address!r} must be host:port")
    return host, int(port)


def serve(config: GatewayConfig) -> None:
    """Run the gateway until interrupted. Raises BindFailure on occupied ports."""
    host, port = _parse_bind(config.bind_address)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise errors.BindFailure(f"cannot bind {config.bind_address}: {exc}")
    finally:
        with contextlib.suppress(OSError):
            probe.close()

    app = create_app(config)
    uvicorn.run(app, host=host, port=port, log_level="warning")
