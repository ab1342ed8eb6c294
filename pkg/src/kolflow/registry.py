"""Service registry: descriptors, backend bindings, dependency and
compatibility matrices.

Registry state is a pure value (descriptors + dependency rules); reads return
immutable copies and mutations are serialized behind one lock. Compatibility
of an edge is decidable from registry state alone: artifact types must match
exactly and the capability pair must not be forbidden.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional

from kolflow import capabilities as caps
from kolflow.backends import local as local_backends
from kolflow.capabilities import CAPABILITIES, PortSpec
from kolflow.core.artifacts import ArtifactType
from kolflow.errors import (
    BadDocument,
    ConflictingRule,
    DuplicateServiceId,
    InvalidDescriptor,
    UnknownAlgorithm,
    UnknownCapability,
    UnknownPort,
    UnknownService,
)

SERVICE_ID_RE = re.compile(r"^[a-z0-9_-]+$")

RULE_BEFORE = "before"
RULE_ALLOWED = "allowed"
RULE_FORBIDDEN = "forbidden"
RULES = (RULE_BEFORE, RULE_ALLOWED, RULE_FORBIDDEN)


@dataclass(frozen=True)
class BackendBinding:
    """Local (in-process algorithm) or remote (model server) backend."""

    kind: str  # "local" | "remote"
    algorithm_id: Optional[str] = None
    base_url: Optional[str] = None
    timeout_ms: Optional[int] = None
    exclusive: bool = False

    def __post_init__(self):
        if self.kind == "local":
            if not self.algorithm_id or self.base_url or self.timeout_ms:
                raise InvalidDescriptor("local binding takes exactly an algorithm_id")
        elif self.kind == "remote":
            if not self.base_url or self.algorithm_id:
                raise InvalidDescriptor("remote binding takes a base_url, no algorithm_id")
            if not isinstance(self.timeout_ms, int) or self.timeout_ms <= 0:
                raise InvalidDescriptor("remote binding needs a positive integer timeout_ms")
        else:
            raise InvalidDescriptor(f"unknown backend kind {self.kind!r}")

    @classmethod
    def local(cls, algorithm_id: str, exclusive: bool = False) -> "BackendBinding":
        return cls(kind="local", algorithm_id=algorithm_id, exclusive=exclusive)

    @classmethod
    def remote(cls, base_url: str, timeout_ms: int = 10_000,
               exclusive: bool = False) -> "BackendBinding":
        return cls(kind="remote", base_url=base_url, timeout_ms=timeout_ms,
                   exclusive=exclusive)


@dataclass(frozen=True)
class ServiceDescriptor:
    service_id: str
    capability: str
    inputs: tuple[PortSpec, ...]
    outputs: tuple[PortSpec, ...]
    backend: BackendBinding
    version: str = "1"

    def validate(self) -> None:
        if not SERVICE_ID_RE.match(self.service_id):
            raise InvalidDescriptor(
                f"service_id {self.service_id!r} must match [a-z0-9_-]+"
            )
        if self.capability not in CAPABILITIES:
            raise InvalidDescriptor(f"unknown capability {self.capability!r}")
        if len(self.outputs) == 0:
            raise InvalidDescriptor("descriptor needs at least one output port")
        names = [p.name for p in self.inputs] + [p.name for p in self.outputs]
        if len(names) != len(set(names)):
            raise InvalidDescriptor("port names must be unique within a descriptor")

    def input_port(self, name: str) -> PortSpec:
        for p in self.inputs:
            if p.name == name:
                return p
        raise UnknownPort(f"service {self.service_id} has no input port {name!r}")

    def output_port(self, name: str) -> PortSpec:
        for p in self.outputs:
            if p.name == name:
                return p
        raise UnknownPort(f"service {self.service_id} has no output port {name!r}")


@dataclass(frozen=True)
class EdgeCheck:
    compatible: bool
    reason: Optional[str] = None  # "TypeMismatch" | "ForbiddenPair"
    detail: str = ""


def _transitive_closure(pairs: Iterable[tuple[str, str]]) -> set[tuple[str, str]]:
    closure = set(pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(closure):
            for c, d in list(closure):
                if b == c and (a, d) not in closure:
                    closure.add((a, d))
                    changed = True
    return closure


def default_dependency_rules() -> dict[tuple[str, str], str]:
    """Transitive closure of the built-in ordering chain; acyclic by construction."""
    closure = _transitive_closure(caps.DEFAULT_BEFORE_RULES)
    for a, b in closure:
        if (b, a) in closure:
            raise ConflictingRule(f"default rules order {a} and {b} both ways")
    return {pair: RULE_BEFORE for pair in sorted(closure)}


class Registry:
    """In-memory service registry with optional JSON snapshots."""

    def __init__(self, rules: Optional[dict[tuple[str, str], str]] = None):
        self._lock = threading.RLock()
        self._services: dict[str, ServiceDescriptor] = {}
        self._rules: dict[tuple[str, str], str] = (
            dict(rules) if rules is not None else default_dependency_rules()
        )

    # -- services ------------------------------------------------------------

    def register(self, descriptor: ServiceDescriptor) -> str:
        descriptor.validate()
        if descriptor.backend.kind == "local":
            if descriptor.backend.algorithm_id not in local_backends.known_algorithms():
                raise UnknownAlgorithm(
                    f"local backend names unknown algorithm "
                    f"{descriptor.backend.algorithm_id!r}"
                )
        with self._lock:
            if descriptor.service_id in self._services:
                raise DuplicateServiceId(
                    f"service {descriptor.service_id!r} already registered"
                )
            self._services[descriptor.service_id] = descriptor
        return descriptor.service_id

    def unregister(self, service_id: str) -> ServiceDescriptor:
        with self._lock:
            try:
                return self._services.pop(service_id)
            except KeyError:
                raise UnknownService(f"no service {service_id!r}")

    def get(self, service_id: str) -> ServiceDescriptor:
        with self._lock:
            try:
                return self._services[service_id]
            except KeyError:
                raise UnknownService(f"no service {service_id!r}")

    def list(self, capability: Optional[str] = None) -> list[ServiceDescriptor]:
        with self._lock:
            services = sorted(self._services.values(), key=lambda d: d.service_id)
        if capability is not None:
            services = [d for d in services if d.capability == capability]
        return services

    # -- dependency rules -------------------------------------------------------

    def rule(self, a: str, b: str) -> str:
        with self._lock:
            return self._rules.get((a, b), RULE_ALLOWED)

    def set_dependency_rule(self, pair: tuple[str, str], rule: str) -> dict:
        a, b = pair
        for cap in (a, b):
            if cap not in CAPABILITIES:
                raise UnknownCapability(f"unknown capability {cap!r}")
        if rule not in RULES:
            raise ConflictingRule(f"unknown rule {rule!r}")
        with self._lock:
            if rule == RULE_BEFORE and self._rules.get((b, a)) == RULE_BEFORE:
                raise ConflictingRule(
                    f"({a}, {b})=before conflicts with existing ({b}, {a})=before"
                )
            if rule == RULE_ALLOWED:
                self._rules.pop((a, b), None)
            else:
                self._rules[(a, b)] = rule
            return dict(self._rules)

    def dependency_rules(self) -> dict[tuple[str, str], str]:
        with self._lock:
            return dict(self._rules)

    # -- compatibility ------------------------------------------------------------

    def check_edge(
        self,
        from_endpoint: tuple[str, str],
        to_endpoint: tuple[str, str],
    ) -> EdgeCheck:
        """Decide whether (service, out_port) may feed (service, in_port)."""
        from_service, out_port = from_endpoint
        to_service, in_port = to_endpoint
        src = self.get(from_service)
        dst = self.get(to_service)
        out_spec = src.output_port(out_port)
        in_spec = dst.input_port(in_port)

        if out_spec.artifact_type is not in_spec.artifact_type:
            return EdgeCheck(
                compatible=False,
                reason="TypeMismatch",
                detail=(
                    f"{from_service}.{out_port} emits {out_spec.artifact_type.value}, "
                    f"{to_service}.{in_port} expects {in_spec.artifact_type.value}"
                ),
            )
        if self.rule(src.capability, dst.capability) == RULE_FORBIDDEN:
            return EdgeCheck(
                compatible=False,
                reason="ForbiddenPair",
                detail=f"pair ({src.capability}, {dst.capability}) is forbidden",
            )
        return EdgeCheck(compatible=True)

    # -- snapshots ----------------------------------------------------------------

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "services": [descriptor_to_doc(d) for d in self.list()],
                "dependency_rules": [
                    {"pair": [a, b], "rule": rule}
                    for (a, b), rule in sorted(self._rules.items())
                ],
            }

    def canonical_state(self) -> str:
        return json.dumps(self.snapshot(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_snapshot(cls, doc: dict) -> "Registry":
        rules: dict[tuple[str, str], str] = {}
        for entry in doc.get("dependency_rules", []):
            try:
                a, b = entry["pair"]
                rule = entry["rule"]
            except (KeyError, TypeError, ValueError):
                raise BadDocument("malformed dependency rule entry")
            if rule not in RULES:
                raise BadDocument(f"unknown rule {rule!r}")
            rules[(a, b)] = rule
        registry = cls(rules=rules)
        for svc_doc in doc.get("services", []):
            registry.register(descriptor_from_doc(svc_doc))
        return registry

    def save_snapshot(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.snapshot(), indent=2, sort_keys=True))

    @classmethod
    def load_snapshot(cls, path: str | Path) -> "Registry":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise BadDocument(f"cannot read registry snapshot {path}: {exc}")
        return cls.from_snapshot(doc)


# -- descriptor documents ------------------------------------------------------------

def port_to_doc(port: PortSpec, with_required: bool) -> dict:
    doc = {"port": port.name, "type": port.artifact_type.value}
    if with_required:
        doc["required"] = port.required
    return doc


def descriptor_to_doc(descriptor: ServiceDescriptor) -> dict:
    backend: dict[str, object] = {"kind": descriptor.backend.kind}
    if descriptor.backend.kind == "local":
        backend["algorithm_id"] = descriptor.backend.algorithm_id
    else:
        backend["base_url"] = descriptor.backend.base_url
        backend["timeout_ms"] = descriptor.backend.timeout_ms
    if descriptor.backend.exclusive:
        backend["exclusive"] = True
    return {
        "service_id": descriptor.service_id,
        "capability": descriptor.capability,
        "version": descriptor.version,
        "inputs": [port_to_doc(p, with_required=True) for p in descriptor.inputs],
        "outputs": [port_to_doc(p, with_required=False) for p in descriptor.outputs],
        "backend": backend,
    }


def _ports_from_doc(entries, with_required: bool) -> tuple[PortSpec, ...]:
    ports = []
    for entry in entries:
        try:
            ports.append(PortSpec(
                name=entry["port"],
                artifact_type=ArtifactType.parse(entry["type"]),
                required=bool(entry.get("required", True)) if with_required else True,
            ))
        except (KeyError, TypeError):
            raise BadDocument(f"malformed port entry {entry!r}")
    return tuple(ports)


def descriptor_from_doc(doc: dict) -> ServiceDescriptor:
    try:
        backend_doc = doc["backend"]
        kind = backend_doc["kind"]
        if kind == "local":
            backend = BackendBinding.local(
                backend_doc["algorithm_id"],
                exclusive=bool(backend_doc.get("exclusive", False)),
            )
        else:
            backend = BackendBinding.remote(
                backend_doc["base_url"],
                timeout_ms=int(backend_doc.get("timeout_ms", 10_000)),
                exclusive=bool(backend_doc.get("exclusive", False)),
            )
        return ServiceDescriptor(
            service_id=doc["service_id"],
            capability=doc["capability"],
            inputs=_ports_from_doc(doc.get("inputs", []), with_required=True),
            outputs=_ports_from_doc(doc.get("outputs", []), with_required=False),
            backend=backend,
            version=str(doc.get("version", "1")),
        )
    except (KeyError, TypeError) as exc:
        raise BadDocument(f"malformed service descriptor: {exc}")


def builtin_descriptor(capability: str, service_id: Optional[str] = None,
                       algorithm_id: Optional[str] = None) -> ServiceDescriptor:
    """Descriptor for a built-in mock service of the given capability."""
    algo_by_cap = {
        caps.TRYON: "mock_tryon",
        caps.MAKEUP: "mock_makeup",
        caps.BACKGROUND: "mock_background",
        caps.OBJECT_INTERACTION: "mock_object",
        caps.FACE_EXTRACT_ALIGN: "face_extract_align",
        caps.FACE_REINTEGRATE: "face_reintegrate",
    }
    if capability not in algo_by_cap:
        raise UnknownCapability(f"unknown capability {capability!r}")
    return ServiceDescriptor(
        service_id=service_id or capability,
        capability=capability,
        inputs=caps.CAPABILITY_INPUTS[capability],
        outputs=caps.CAPABILITY_OUTPUTS[capability],
        backend=BackendBinding.local(algo_by_cap[capability]),
    )


def register_builtin_services(registry: Registry) -> list[str]:
    """Register one mock-backed service per capability."""
    ids = []
    for capability in sorted(CAPABILITIES):
        ids.append(registry.register(builtin_descriptor(capability)))
    return ids
