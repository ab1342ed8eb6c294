"""Pipeline executor.

Runs a validated spec over local/remote backends: loads bound inputs, invokes
each node, persists every output before the node is marked succeeded, and
tracks per-node state in a RunRecord. Scheduling launches up to max_parallel
ready nodes; a node is ready only when all its data-edge predecessors have
succeeded. State transitions are serialized behind one lock per run and every
transition appends an event, so event streams observe causal order.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import uuid
from concurrent.futures import FIRST_COMPLETED, Future, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from kolflow.backends.local import invoke_local
from kolflow.backends.remote import invoke_remote
from kolflow.core.artifacts import Artifact
from kolflow.core.store import ArtifactRef, ArtifactStore
from kolflow.errors import (
    AlreadyTerminal,
    KolflowError,
    MalformedInput,
    OutputTypeMismatch,
    StoreUnavailable,
    UnknownRun,
    ValidationFailed,
)
from kolflow.flow import PipelineSpec, validate_pipeline
from kolflow.registry import Registry, ServiceDescriptor

PENDING = "pending"
RUNNING = "running"
SUCCEEDED = "succeeded"
FAILED = "failed"
SKIPPED = "skipped"
CANCELLED = "cancelled"


@dataclass
class NodeState:
    status: str = PENDING
    artifact_refs: dict[str, str] = field(default_factory=dict)
    error: Optional[str] = None
    error_code: Optional[str] = None
    skip_reason: Optional[str] = None
    duration_ms: Optional[int] = None
    started_at: Optional[int] = None
    finished_at: Optional[int] = None
    start_seq: Optional[int] = None
    finish_seq: Optional[int] = None
    memoized: bool = False

    def to_doc(self) -> dict:
        doc: dict = {"status": self.status}
        if self.artifact_refs:
            doc["artifact_refs"] = dict(self.artifact_refs)
        for key in ("error", "error_code", "skip_reason", "duration_ms",
                    "started_at", "finished_at", "start_seq", "finish_seq"):
            value = getattr(self, key)
            if value is not None:
                doc[key] = value
        if self.memoized:
            doc["memoized"] = True
        return doc


@dataclass
class RunRecord:
    run_id: str
    spec_hash: str
    status: str
    node_order: list[str]
    node_states: dict[str, NodeState]
    started_at: Optional[int] = None
    finished_at: Optional[int] = None

    def to_doc(self) -> dict:
        return {
            "run_id": self.run_id,
            "spec_hash": self.spec_hash,
            "status": self.status,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "node_order": list(self.node_order),
            "nodes": {nid: st.to_doc() for nid, st in self.node_states.items()},
        }


@dataclass(frozen=True)
class RunEvent:
    seq: int
    kind: str
    data: dict

    def to_doc(self) -> dict:
        return {"seq": self.seq, "event": self.kind, **self.data}


@dataclass(frozen=True)
class ExecuteOptions:
    max_parallel: int = 1
    fail_fast: bool = False
    memoize: bool = False

    def __post_init__(self):
        if self.max_parallel < 1:
            raise ValidationFailed("max_parallel must be >= 1")


class _Run:
    """Mutable run state; all field access goes through ``lock``."""

    def __init__(self, run_id: str, spec: PipelineSpec, registry: Registry,
                 options: ExecuteOptions, run_dir: Path):
        self.run_id = run_id
        self.spec = spec
        self.registry = registry
        self.options = options
        self.run_dir = run_dir
        self.lock = threading.Condition()
        self.status = RUNNING
        self.node_states: dict[str, NodeState] = {
            n.node_id: NodeState() for n in spec.nodes
        }
        self.started_at = _now_ms()
        self.finished_at: Optional[int] = None
        self.events: list[RunEvent] = []
        self.seq = 0
        self.cancel_requested = False
        self.halt_new_launches = False
        self.artifacts: dict[tuple[str, str], Artifact] = {}  # (node, port) -> output
        self.predecessors: dict[str, set[str]] = {n.node_id: set() for n in spec.nodes}
        self.successors: dict[str, set[str]] = {n.node_id: set() for n in spec.nodes}
        for e in spec.edges:
            self.predecessors[e.to_node].add(e.from_node)
            self.successors[e.from_node].add(e.to_node)

    def next_seq(self) -> int:
        self.seq += 1
        return self.seq

    def emit(self, kind: str, **data) -> None:
        self.events.append(RunEvent(seq=self.next_seq(), kind=kind, data=data))
        self.lock.notify_all()

    def snapshot(self) -> RunRecord:
        states = {
            nid: NodeState(**{k: (dict(v) if isinstance(v, dict) else v)
                              for k, v in vars(st).items()})
            for nid, st in self.node_states.items()
        }
        return RunRecord(
            run_id=self.run_id,
            spec_hash=self.spec.spec_hash,
            status=self.status,
            node_order=[n.node_id for n in self.spec.nodes],
            node_states=states,
            started_at=self.started_at,
            finished_at=self.finished_at,
        )


def _now_ms() -> int:
    return int(time.time() * 1000)


def invoke_node(
    node_id: str,
    descriptor: ServiceDescriptor,
    bound_inputs: Mapping[str, Artifact],
    params: Optional[Mapping[str, object]] = None,
) -> dict[str, Artifact]:
    """Invoke one node's backend and type-check its outputs.

    Wrong-typed, missing, or undeclared outputs are backend faults
    (OutputTypeMismatch). Output artifacts are stamped with the producer node.
    """
    for port in descriptor.inputs:
        if port.required and port.name not in bound_inputs:
            raise MalformedInput(
                f"node {node_id} missing required input {port.name!r}"
            )
    for name, artifact in bound_inputs.items():
        port = descriptor.input_port(name)
        if artifact.artifact_type is not port.artifact_type:
            raise MalformedInput(
                f"node {node_id} input {name!r} expects "
                f"{port.artifact_type.value}, got {artifact.artifact_type.value}"
            )

    if descriptor.backend.kind == "local":
        outputs = invoke_local(descriptor.backend.algorithm_id, bound_inputs,
                               params or {})
    else:
        outputs = invoke_remote(descriptor.backend, descriptor.capability,
                                bound_inputs, params or {})

    declared = {p.name: p.artifact_type for p in descriptor.outputs}
    for name, artifact in outputs.items():
        if name not in declared:
            raise OutputTypeMismatch(
                f"backend of {node_id} returned undeclared port {name!r}"
            )
        if artifact.artifact_type is not declared[name]:
            raise OutputTypeMismatch(
                f"backend of {node_id} returned {artifact.artifact_type.value} "
                f"on port {name!r} where {declared[name].value} is declared"
            )
    missing = set(declared) - set(outputs)
    if missing:
        raise OutputTypeMismatch(
            f"backend of {node_id} omitted declared ports {sorted(missing)}"
        )
    return {name: art.with_producer(node_id) for name, art in outputs.items()}


class Executor:
    """Executes pipeline specs against an artifact store and a runs directory."""

    def __init__(self, store: ArtifactStore, runs_root: str | Path):
        self.store = store
        self.runs_root = Path(runs_root)
        self._runs: dict[str, _Run] = {}
        self._threads: dict[str, threading.Thread] = {}
        self._memo: dict[str, dict[str, str]] = {}
        self._memo_lock = threading.Lock()
        self._service_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # -- lifecycle ---------------------------------------------------------------

    def start_run(self, spec: PipelineSpec, registry: Registry,
                  options: ExecuteOptions = ExecuteOptions()) -> str:
        run = self._prepare(spec, registry, options)
        thread = threading.Thread(target=self._drive, args=(run,), daemon=True)
        self._threads[run.run_id] = thread
        thread.start()
        return run.run_id

    def execute(self, spec: PipelineSpec, registry: Registry,
                options: ExecuteOptions = ExecuteOptions()) -> RunRecord:
        run = self._prepare(spec, registry, options)
        self._drive(run)
        return run.snapshot()

    def _prepare(self, spec: PipelineSpec, registry: Registry,
                 options: ExecuteOptions) -> _Run:
        violations = validate_pipeline(spec, registry)
        if violations:
            raise ValidationFailed(
                f"spec fails validation with {len(violations)} violation(s)",
                violations=[v.to_doc() for v in violations],
            )
        if not self.store.root.is_dir() or not os.access(self.store.root, os.W_OK):
            raise StoreUnavailable(f"store root {self.store.root} is not writable")

        run_id = uuid.uuid4().hex[:16]
        run_dir = self.runs_root / run_id
        try:
            (run_dir / "nodes").mkdir(parents=True, exist_ok=False)
        except OSError as exc:
            raise StoreUnavailable(f"cannot create run directory: {exc}")

        run = _Run(run_id, spec, registry, options, run_dir)
        with self._registry_lock:
            self._runs[run_id] = run
        with run.lock:
            run.emit("run_started", run_id=run_id, spec_hash=spec.spec_hash)
            self._persist(run)
        return run

    # -- queries --------------------------------------------------------------------

    def _get(self, run_id: str) -> _Run:
        try:
            return self._runs[run_id]
        except KeyError:
            raise UnknownRun(f"no run {run_id!r}")

    def run_status(self, run_id: str) -> RunRecord:
        run = self._get(run_id)
        with run.lock:
            return run.snapshot()

    def shutdown(self, timeout: Optional[float] = 30.0) -> None:
        """Wait for in-flight runs to finish their bookkeeping."""
        for thread in list(self._threads.values()):
            thread.join(timeout)

    def wait(self, run_id: str, timeout: Optional[float] = None) -> RunRecord:
        run = self._get(run_id)
        thread = self._threads.get(run_id)
        if thread is not None:
            thread.join(timeout)
        with run.lock:
            return run.snapshot()

    def events_after(self, run_id: str, after_seq: int = 0,
                     timeout: Optional[float] = None) -> tuple[list[RunEvent], bool]:
        """New events past ``after_seq``; blocks up to ``timeout`` for more.

        Returns (events, terminal)."""
        run = self._get(run_id)
        deadline = None if timeout is None else time.monotonic() + timeout
        with run.lock:
            while True:
                fresh = [e for e in run.events if e.seq > after_seq]
                terminal = run.status != RUNNING
                if fresh or terminal:
                    return fresh, terminal
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    return [], False
                run.lock.wait(remaining)

    def cancel_run(self, run_id: str) -> RunRecord:
        run = self._get(run_id)
        with run.lock:
            if run.status != RUNNING:
                raise AlreadyTerminal(
                    f"run {run_id} already {run.status}", status=run.status
                )
            run.cancel_requested = True
            run.lock.notify_all()
        thread = self._threads.get(run_id)
        if thread is not None:
            thread.join()
        else:
            # synchronous execution: the driving thread observes the flag
            with run.lock:
                while run.status == RUNNING:
                    run.lock.wait()
        with run.lock:
            return run.snapshot()

    # -- scheduling ---------------------------------------------------------------------

    def _drive(self, run: _Run) -> None:
        descriptors = {n.node_id: run.registry.get(n.service_id)
                       for n in run.spec.nodes}
        order = [n.node_id for n in run.spec.nodes]
        pool = ThreadPoolExecutor(max_workers=run.options.max_parallel)
        in_flight: dict[Future, str] = {}
        try:
            while True:
                with run.lock:
                    for node_id in self._ready_nodes(run, order):
                        if len(in_flight) >= run.options.max_parallel:
                            break
                        state = run.node_states[node_id]
                        state.status = RUNNING
                        state.started_at = _now_ms()
                        state.start_seq = run.next_seq()
                        run.emit("node_started", node=node_id)
                        self._persist(run)
                        future = pool.submit(self._run_node, run, node_id,
                                             descriptors[node_id])
                        in_flight[future] = node_id
                if not in_flight:
                    break
                done, _ = wait(in_flight, return_when=FIRST_COMPLETED)
                for future in done:
                    node_id = in_flight.pop(future)
                    self._finish_node(run, node_id, future)
            self._finalize(run)
        finally:
            pool.shutdown(wait=True)

    def _ready_nodes(self, run: _Run, order: list[str]) -> list[str]:
        if run.cancel_requested or run.halt_new_launches:
            return []
        ready = []
        for node_id in order:
            state = run.node_states[node_id]
            if state.status != PENDING:
                continue
            if all(run.node_states[p].status == SUCCEEDED
                   for p in run.predecessors[node_id]):
                ready.append(node_id)
        return ready

    def _run_node(self, run: _Run, node_id: str,
                  descriptor: ServiceDescriptor) -> dict[str, str]:
        """Worker: load inputs, invoke, persist outputs. Returns port->ref."""
        inputs: dict[str, Artifact] = {}
        for key, ref in run.spec.source_bindings.items():
            owner, _, port_name = key.partition(".")
            if owner != node_id:
                continue
            port = descriptor.input_port(port_name)
            inputs[port_name] = self.store.load(ref, port.artifact_type)
        with run.lock:
            for edge in run.spec.edges:
                if edge.to_node == node_id:
                    inputs[edge.to_port] = run.artifacts[(edge.from_node,
                                                          edge.from_port)]

        memo_key = None
        if run.options.memoize:
            memo_key = self._memo_key(descriptor, inputs)
            refs = self._memo_lookup(memo_key, descriptor)
            if refs is not None:
                with run.lock:
                    run.node_states[node_id].memoized = True
                    for port_name, ref in refs.items():
                        port = descriptor.output_port(port_name)
                        run.artifacts[(node_id, port_name)] = self.store.load(
                            ref, port.artifact_type
                        )
                return refs

        service_lock = None
        if descriptor.backend.exclusive:
            service_lock = self._service_locks.setdefault(
                descriptor.service_id, threading.Lock()
            )
        if service_lock is not None:
            with service_lock:
                outputs = invoke_node(node_id, descriptor, inputs)
        else:
            outputs = invoke_node(node_id, descriptor, inputs)

        refs: dict[str, str] = {}
        for port_name, artifact in outputs.items():
            ref = self.store.store(artifact)
            refs[port_name] = str(ref)
            node_dir = run.run_dir / "nodes" / node_id
            node_dir.mkdir(parents=True, exist_ok=True)
            (node_dir / f"{port_name}.{artifact.extension}").write_bytes(
                artifact.payload
            )
        with run.lock:
            for port_name, artifact in outputs.items():
                run.artifacts[(node_id, port_name)] = artifact
        if memo_key is not None:
            with self._memo_lock:
                self._memo[memo_key] = dict(refs)
        return refs

    def _finish_node(self, run: _Run, node_id: str, future: Future) -> None:
        with run.lock:
            state = run.node_states[node_id]
            state.finished_at = _now_ms()
            state.finish_seq = run.next_seq()
            state.duration_ms = max(0, state.finished_at - (state.started_at or 0))
            try:
                refs = future.result()
                state.status = SUCCEEDED
                state.artifact_refs = refs
                run.emit("node_finished", node=node_id, status=SUCCEEDED,
                         artifact_refs=refs)
            except Exception as exc:
                state.status = FAILED
                state.error = str(exc)
                state.error_code = exc.code if isinstance(exc, KolflowError) \
                    else "INTERNAL"
                run.emit("node_finished", node=node_id, status=FAILED,
                         error=state.error, error_code=state.error_code)
                self._skip_downstream(run, node_id)
                if run.options.fail_fast:
                    run.halt_new_launches = True
            self._persist(run)

    def _skip_downstream(self, run: _Run, failed_node: str) -> None:
        stack = list(run.successors[failed_node])
        while stack:
            node_id = stack.pop()
            state = run.node_states[node_id]
            if state.status != PENDING:
                continue
            state.status = SKIPPED
            state.skip_reason = "upstream_failure"
            state.finish_seq = run.next_seq()
            run.emit("node_finished", node=node_id, status=SKIPPED,
                     skip_reason="upstream_failure")
            stack.extend(run.successors[node_id])

    def _finalize(self, run: _Run) -> None:
        with run.lock:
            cancelled = False
            for node_id, state in run.node_states.items():
                if state.status == PENDING:
                    state.status = SKIPPED
                    state.skip_reason = ("cancelled" if run.cancel_requested
                                         else "aborted")
                    state.finish_seq = run.next_seq()
                    run.emit("node_finished", node=node_id, status=SKIPPED,
                             skip_reason=state.skip_reason)
                    cancelled = cancelled or run.cancel_requested
            states = [s.status for s in run.node_states.values()]
            if all(s == SUCCEEDED for s in states):
                run.status = SUCCEEDED
            elif run.cancel_requested:
                run.status = CANCELLED
            elif any(s == FAILED for s in states):
                run.status = FAILED
            else:
                run.status = FAILED
            run.finished_at = _now_ms()
            run.emit("run_finished", status=run.status)
            self._persist(run)

    # -- memoization -----------------------------------------------------------------------

    def _memo_key(self, descriptor: ServiceDescriptor,
                  inputs: Mapping[str, Artifact]) -> str:
        doc = {
            "service": descriptor.service_id,
            "version": descriptor.version,
            "inputs": {name: art.hash_hex for name, art in sorted(inputs.items())},
        }
        return hashlib.sha256(
            json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest()

    def _memo_lookup(self, key: str,
                     descriptor: ServiceDescriptor) -> Optional[dict[str, str]]:
        with self._memo_lock:
            refs = self._memo.get(key)
        if refs is None:
            return None
        for ref in refs.values():
            if not self.store.exists(ArtifactRef.parse(ref)):
                return None
        return dict(refs)

    # -- persistence --------------------------------------------------------------------------

    def _persist(self, run: _Run) -> None:
        record = run.snapshot().to_doc()
        path = run.run_dir / "record.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(record, indent=2, sort_keys=True))
        os.replace(tmp, path)


def load_run_record(runs_root: str | Path, run_id: str) -> dict:
    """Read a persisted run record (cross-process view for the CLI)."""
    path = Path(runs_root) / run_id / "record.json"
    if not path.exists():
        raise UnknownRun(f"no run {run_id!r} under {runs_root}")
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UnknownRun(f"cannot read run record: {exc}")
