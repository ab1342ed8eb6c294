"""Command-line interface.

Subcommands: serve, list-services, register, synthesize, validate, run,
status. Exit codes: 0 success, 1 operational error (machine code on stderr),
2 usage error. ``--output json`` switches every subcommand to one
machine-readable document on stdout.

Environment: KOLFLOW_STORE (artifact store root), KOLFLOW_BIND (serve
address). The CLI drives the engine in-process; everything it can do is also
reachable through the HTTP gateway.
"""

from __future__ import annotations

import argparse
import base64
import json
import os
import sys
from pathlib import Path

from kolflow import errors
from kolflow.core.artifacts import Artifact, ArtifactType, EXTENSIONS
from kolflow.core.store import ArtifactRef, ArtifactStore
from kolflow.executor import ExecuteOptions, Executor, load_run_record
from kolflow.flow import (
    CapabilityQuery,
    PipelineSpec,
    ProvidedInput,
    spec_from_doc,
    spec_to_doc,
    synthesize_pipeline,
    validate_pipeline,
)
from kolflow.gateway.app import (
    GatewayConfig,
    build_engine,
    register_service_doc,
    serve,
)
from kolflow.registry import Registry, descriptor_to_doc, register_builtin_services


def _default_store(args) -> Path:
    root = args.store or os.environ.get("KOLFLOW_STORE") or ".kolflow/store"
    return Path(root)


def _build_registry(args, allow_missing_snapshot: bool = False) -> Registry:
    snapshot = getattr(args, "snapshot", None)
    if snapshot and (Path(snapshot).exists() or not allow_missing_snapshot):
        registry = Registry.load_snapshot(snapshot)
    else:
        registry = Registry()
    if getattr(args, "with_mocks", False):
        register_builtin_services(registry)
    return registry


def _emit(args, doc: dict, text: str | None = None) -> None:
    if args.output == "json":
        print(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    elif text is not None:
        print(text)
    else:
        print(json.dumps(doc, indent=2, sort_keys=True))


def _load_doc(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise errors.BadDocument(f"cannot read document {path}: {exc}")
    if not isinstance(doc, dict):
        raise errors.BadDocument(f"{path} must hold a JSON object")
    return doc


def _resolve_path_inputs(spec_doc: dict, store: ArtifactStore,
                         registry: Registry) -> dict:
    """Replace local file paths in the inputs map with store refs."""
    spec = spec_from_doc(spec_doc)
    descriptors = {n.node_id: registry.get(n.service_id) for n in spec.nodes}
    inputs = dict(spec.source_bindings)
    changed = False
    for key, value in list(inputs.items()):
        if ArtifactRef.looks_like_ref(value):
            continue
        node_id, _, port_name = key.partition(".")
        if node_id not in descriptors:
            raise errors.BadDocument(f"input {key!r} references unknown node")
        port = descriptors[node_id].input_port(port_name)
        path = Path(value)
        if not path.exists():
            raise errors.BadDocument(f"input file {value!r} does not exist")
        artifact = Artifact(port.artifact_type, path.read_bytes())
        inputs[key] = str(store.store(artifact))
        changed = True
    if not changed:
        return spec_doc
    return spec_to_doc(PipelineSpec(nodes=spec.nodes, edges=spec.edges,
                                    source_bindings=inputs))


def _parse_inputs(pairs: list[str], store: ArtifactStore) -> dict:
    """Parse repeated --input role=ref_or_path flags into a query inputs map."""
    from kolflow.capabilities import ROLE_TYPES

    out: dict[str, str] = {}
    for pair in pairs:
        role, sep, value = pair.partition("=")
        if not sep:
            raise errors.BadQuery(f"--input expects role=value, got {pair!r}")
        if ArtifactRef.looks_like_ref(value):
            out[role] = value
            continue
        path = Path(value)
        if not path.exists():
            raise errors.BadQuery(f"input file {value!r} does not exist")
        artifact_type = ROLE_TYPES.get(role)
        if artifact_type is None:
            raise errors.BadQuery(f"unknown input role {role!r}")
        artifact = Artifact(artifact_type, path.read_bytes())
        out[role] = str(store.store(artifact))
    return out


# -- subcommands ------------------------------------------------------------------

def _cmd_serve(args) -> int:
    bind = args.bind or os.environ.get("KOLFLOW_BIND") or "127.0.0.1:8700"
    config = GatewayConfig(
        store_root=_default_store(args),
        runs_root=Path(args.runs_root),
        registry_snapshot=Path(args.snapshot) if args.snapshot else None,
        with_mocks=args.with_mocks,
        max_parallel=args.max_parallel,
        bind_address=bind,
    )
    serve(config)
    return 0


def _cmd_list_services(args) -> int:
    registry = _build_registry(args)
    docs = [descriptor_to_doc(d) for d in registry.list(args.capability)]
    lines = "\n".join(
        f"{d['service_id']}  capability={d['capability']} backend={d['backend']['kind']}"
        for d in docs
    )
    _emit(args, {"services": docs}, lines or "(no services registered)")
    return 0


def _cmd_register(args) -> int:
    registry = _build_registry(args, allow_missing_snapshot=True)
    config = GatewayConfig(store_root=_default_store(args),
                           runs_root=Path(args.runs_root))
    engine = build_engine(config)
    engine.registry = registry
    doc = register_service_doc(engine, _load_doc(args.file))
    if args.snapshot:
        registry.save_snapshot(args.snapshot)
    _emit(args, doc, f"registered {doc['service_id']}")
    return 0


def _cmd_synthesize(args) -> int:
    registry = _build_registry(args)
    store_root = _default_store(args)
    store_root.mkdir(parents=True, exist_ok=True)
    store = ArtifactStore(store_root)
    inputs = _parse_inputs(args.input or [], store)
    query = CapabilityQuery(
        capabilities=frozenset(args.caps.split(",")),
        align_faces=args.align_faces,
        provided_inputs=tuple(ProvidedInput.for_role(role, ref)
                              for role, ref in sorted(inputs.items())),
    )
    spec = synthesize_pipeline(query, registry)
    doc = spec_to_doc(spec)
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True))
    _emit(args, doc)
    return 0


def _cmd_validate(args) -> int:
    registry = _build_registry(args)
    spec = spec_from_doc(_load_doc(args.file))
    violations = validate_pipeline(spec, registry)
    doc = {"valid": not violations, "violations": [v.to_doc() for v in violations]}
    if violations:
        summary = "; ".join(f"{v.code}: {v.message}" for v in violations)
        print(f"{violations[0].code}: pipeline invalid ({summary})", file=sys.stderr)
        if args.output == "json":
            print(json.dumps(doc, sort_keys=True, separators=(",", ":")))
        return 1
    _emit(args, doc, "pipeline valid")
    return 0


def _cmd_run(args) -> int:
    registry = _build_registry(args)
    store_root = _default_store(args)
    store_root.mkdir(parents=True, exist_ok=True)
    store = ArtifactStore(store_root)
    spec_doc = _resolve_path_inputs(_load_doc(args.file), store, registry)
    spec = spec_from_doc(spec_doc)
    executor = Executor(store, Path(args.runs_root))
    record = executor.execute(
        spec, registry,
        ExecuteOptions(max_parallel=args.max_parallel, fail_fast=args.fail_fast,
                       memoize=args.memoize),
    )
    doc = record.to_doc()
    _emit(args, doc, _format_record(doc))
    if record.status != "succeeded":
        print(f"RUN_{record.status.upper()}: run {record.run_id} {record.status}",
              file=sys.stderr)
        return 1
    return 0


def _cmd_status(args) -> int:
    doc = load_run_record(args.runs_root, args.run_id)
    _emit(args, doc, _format_record(doc))
    return 0


def _format_record(doc: dict) -> str:
    lines = [f"run {doc['run_id']}: {doc['status']}"]
    for node_id in doc.get("node_order", []):
        node = doc["nodes"][node_id]
        extra = ""
        if node.get("artifact_refs"):
            extra = "  " + ", ".join(
                f"{port}={ref}" for port, ref in sorted(node["artifact_refs"].items())
            )
        if node.get("error"):
            extra = f"  error={node.get('error_code')}: {node['error']}"
        lines.append(f"  {node_id}: {node['status']}{extra}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kolflow",
                                     description="pipeline orchestration engine")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, runs=True):
        p.add_argument("--output", choices=["text", "json"], default="text")
        p.add_argument("--store", help="artifact store root "
                                       "(default $KOLFLOW_STORE or .kolflow/store)")
        p.add_argument("--snapshot", "-s", help="registry snapshot file")
        p.add_argument("--with-mocks", action="store_true",
                       help="register the built-in mock services")
        if runs:
            p.add_argument("--runs-root", default=".kolflow/runs")

    p = sub.add_parser("serve", help="run the HTTP gateway")
    common(p)
    p.add_argument("--bind", help="host:port (default $KOLFLOW_BIND or 127.0.0.1:8700)")
    p.add_argument("--max-parallel", type=int, default=1)
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("list-services", help="list registered services")
    common(p, runs=False)
    p.add_argument("--capability")
    p.set_defaults(fn=_cmd_list_services)

    p = sub.add_parser("register", help="register a service from a descriptor file")
    common(p)
    p.add_argument("-f", "--file", required=True)
    p.set_defaults(fn=_cmd_register)

    p = sub.add_parser("synthesize", help="synthesize a pipeline from capabilities")
    common(p, runs=False)
    p.add_argument("--caps", required=True,
                   help="comma-separated capability tags")
    p.add_argument("--align-faces", action="store_true")
    p.add_argument("--input", action="append",
                   help="role=ref_or_path (repeatable)")
    p.add_argument("-o", "--out", help="write the pipeline document here")
    p.set_defaults(fn=_cmd_synthesize)

    p = sub.add_parser("validate", help="validate a pipeline document")
    common(p, runs=False)
    p.add_argument("-f", "--file", required=True)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("run", help="execute a pipeline document")
    common(p)
    p.add_argument("-f", "--file", required=True)
    p.add_argument("--max-parallel", type=int, default=1)
    p.add_argument("--fail-fast", action="store_true")
    p.add_argument("--memoize", action="store_true")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("status", help="show a persisted run record")
    common(p)
    p.add_argument("--run-id", required=True)
    p.set_defaults(fn=_cmd_status)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except errors.KolflowError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
