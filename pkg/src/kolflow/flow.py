"""Flow generator: capability queries to validated pipeline specs.

Synthesis picks one service per requested capability, orders nodes by the
dependency matrix ("before" rules become ordering edges, ties broken by
lexicographic node id), then auto-binds every input port: nearest upstream
output of the same artifact type wins, falling back to the externally
provided inputs. The result is deterministic: equal (query, registry state)
yields byte-identical canonical documents and equal spec hashes.
"""

from __future__ import annotations

import hashlib
import heapq
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from kolflow import capabilities as caps
from kolflow.core.artifacts import ArtifactType, EXTENSIONS
from kolflow.core.store import ArtifactRef
from kolflow.errors import (
    AmbiguousExternalInput,
    AmbiguousService,
    BadDocument,
    BadQuery,
    CycleDetected,
    CyclicConstraints,
    UnboundPort,
    UnknownService,
    UnsatisfiableQuery,
)
from kolflow.registry import Registry, RULE_BEFORE, ServiceDescriptor


@dataclass(frozen=True)
class ProvidedInput:
    """Externally supplied artifact for a query, typed by its role."""

    role: str
    ref: str
    artifact_type: ArtifactType

    @classmethod
    def for_role(cls, role: str, ref: str,
                 artifact_type: Optional[ArtifactType] = None) -> "ProvidedInput":
        if artifact_type is None:
            artifact_type = caps.ROLE_TYPES.get(role)
            if artifact_type is None:
                raise BadQuery(
                    f"role {role!r} is not a known role; pass an explicit artifact type"
                )
        return cls(role=role, ref=ref, artifact_type=artifact_type)


@dataclass(frozen=True)
class CapabilityQuery:
    capabilities: frozenset[str]
    align_faces: bool = False
    provided_inputs: tuple[ProvidedInput, ...] = ()
    service_overrides: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.capabilities:
            raise BadQuery("query must request at least one capability")
        unknown = self.capabilities - caps.CAPABILITIES
        if unknown:
            raise BadQuery(f"unknown capabilities: {sorted(unknown)}")
        roles = [p.role for p in self.provided_inputs]
        if len(roles) != len(set(roles)):
            raise BadQuery("provided input roles must be unique")


@dataclass(frozen=True)
class Node:
    node_id: str
    service_id: str


@dataclass(frozen=True)
class Edge:
    from_node: str
    from_port: str
    to_node: str
    to_port: str


@dataclass(frozen=True)
class PipelineSpec:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    source_bindings: Mapping[str, str]  # "node.port" -> artifact ref
    spec_hash: str = ""

    def __post_init__(self):
        computed = compute_spec_hash(self)
        if self.spec_hash == "":
            object.__setattr__(self, "spec_hash", computed)
        elif self.spec_hash != computed:
            raise BadDocument(
                f"spec_hash {self.spec_hash} does not match canonical document "
                f"hash {computed}"
            )

    def node_ids(self) -> list[str]:
        return [n.node_id for n in self.nodes]


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    node: Optional[str] = None
    edge: Optional[tuple[str, str, str, str]] = None

    def to_doc(self) -> dict:
        doc: dict = {"code": self.code, "message": self.message}
        if self.node is not None:
            doc["node"] = self.node
        if self.edge is not None:
            doc["edge"] = {
                "from": self.edge[0], "from_port": self.edge[1],
                "to": self.edge[2], "to_port": self.edge[3],
            }
        return doc


# -- canonical documents ---------------------------------------------------------

def spec_to_doc(spec: PipelineSpec, with_hash: bool = True) -> dict:
    doc = _canonical_doc(spec.nodes, spec.edges, spec.source_bindings)
    if with_hash:
        doc["spec_hash"] = spec.spec_hash
    return doc


def _canonical_doc(nodes: Sequence[Node], edges: Sequence[Edge],
                   source_bindings: Mapping[str, str]) -> dict:
    return {
        "nodes": [{"id": n.node_id, "service": n.service_id} for n in nodes],
        "edges": [
            {"from": e.from_node, "from_port": e.from_port,
             "to": e.to_node, "to_port": e.to_port}
            for e in sorted(edges, key=lambda e: (e.to_node, e.to_port,
                                                  e.from_node, e.from_port))
        ],
        "inputs": {key: source_bindings[key] for key in sorted(source_bindings)},
    }


def canonical_spec_bytes(spec: PipelineSpec) -> bytes:
    doc = _canonical_doc(spec.nodes, spec.edges, spec.source_bindings)
    return json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


def compute_spec_hash(spec: PipelineSpec) -> str:
    return hashlib.sha256(canonical_spec_bytes(spec)).hexdigest()


def spec_from_doc(doc: dict) -> PipelineSpec:
    if not isinstance(doc, dict):
        raise BadDocument("pipeline document must be an object")
    try:
        nodes = tuple(Node(node_id=n["id"], service_id=n["service"])
                      for n in doc.get("nodes", []))
        edges = tuple(Edge(from_node=e["from"], from_port=e["from_port"],
                           to_node=e["to"], to_port=e["to_port"])
                      for e in doc.get("edges", []))
        inputs = doc.get("inputs", {})
        if not isinstance(inputs, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in inputs.items()
        ):
            raise BadDocument("inputs must map port paths to ref strings")
        spec_hash = doc.get("spec_hash", "")
        if not isinstance(spec_hash, str):
            raise BadDocument("spec_hash must be a string")
        return PipelineSpec(nodes=nodes, edges=edges,
                            source_bindings=dict(inputs), spec_hash=spec_hash)
    except (KeyError, TypeError) as exc:
        raise BadDocument(f"malformed pipeline document: {exc}")


# -- topological ordering -----------------------------------------------------------

def topological_order(nodes: Iterable[str],
                      edges: Iterable[tuple[str, str]]) -> list[str]:
    """Kahn's algorithm; among ready nodes the lexicographically smallest id
    is emitted first. Raises CycleDetected naming one cycle's node ids."""
    node_list = list(nodes)
    node_set = set(node_list)
    successors: dict[str, set[str]] = {n: set() for n in node_list}
    indegree: dict[str, int] = {n: 0 for n in node_list}
    for a, b in edges:
        if a not in node_set or b not in node_set:
            raise BadDocument(f"edge ({a}, {b}) references unknown node")
        if b not in successors[a]:
            successors[a].add(b)
            indegree[b] += 1

    ready = [n for n in node_list if indegree[n] == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for succ in successors[node]:
            indegree[succ] -= 1
            if indegree[succ] == 0:
                heapq.heappush(ready, succ)

    if len(order) != len(node_list):
        remaining = node_set - set(order)
        cycle = _extract_cycle(remaining, successors)
        raise CycleDetected(
            f"dependency cycle among nodes: {', '.join(cycle)}", cycle=cycle
        )
    return order


def _extract_cycle(remaining: set[str], successors: dict[str, set[str]]) -> list[str]:
    """Walk successors within the unresolvable node set until one repeats."""
    start = sorted(remaining)[0]
    seen: dict[str, int] = {}
    path: list[str] = []
    node = start
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = sorted(s for s in successors[node] if s in remaining)[0]
    return path[seen[node]:]


# -- auto-binding ---------------------------------------------------------------------

def bind_io(
    ordered_nodes: Sequence[Node],
    registry: Registry,
    provided_inputs: Sequence[ProvidedInput],
) -> tuple[list[Edge], dict[str, str]]:
    """Bind each input port to the nearest upstream same-typed output, else to
    a provided external input."""
    descriptors = [registry.get(n.service_id) for n in ordered_nodes]
    edges: list[Edge] = []
    source_bindings: dict[str, str] = {}

    for i, (node, descriptor) in enumerate(zip(ordered_nodes, descriptors)):
        for port in descriptor.inputs:
            producer = _nearest_upstream(ordered_nodes, descriptors, i,
                                         port.artifact_type)
            if producer is not None:
                from_node, from_port = producer
                edges.append(Edge(from_node=from_node, from_port=from_port,
                                  to_node=node.node_id, to_port=port.name))
                continue
            candidates = [p for p in provided_inputs
                          if p.artifact_type is port.artifact_type]
            if len(candidates) > 1:
                raise AmbiguousExternalInput(
                    f"{len(candidates)} provided inputs share type "
                    f"{port.artifact_type.value} needed by "
                    f"{node.node_id}.{port.name}: "
                    f"{sorted(p.role for p in candidates)}"
                )
            if candidates:
                source_bindings[f"{node.node_id}.{port.name}"] = candidates[0].ref
            elif port.required:
                raise UnboundPort(
                    f"no producer or provided input for required port "
                    f"{node.node_id}.{port.name} ({port.artifact_type.value})",
                    node=node.node_id, port=port.name,
                )
    return edges, source_bindings


def _nearest_upstream(
    ordered_nodes: Sequence[Node],
    descriptors: Sequence[ServiceDescriptor],
    consumer_index: int,
    artifact_type: ArtifactType,
) -> Optional[tuple[str, str]]:
    for j in range(consumer_index - 1, -1, -1):
        for out in descriptors[j].outputs:
            if out.artifact_type is artifact_type:
                return ordered_nodes[j].node_id, out.name
    return None


# -- synthesis ---------------------------------------------------------------------------

def synthesize_pipeline(query: CapabilityQuery, registry: Registry) -> PipelineSpec:
    wanted = set(query.capabilities)
    if query.align_faces:
        wanted |= {caps.FACE_EXTRACT_ALIGN, caps.FACE_REINTEGRATE}

    selected: list[ServiceDescriptor] = []
    for capability in sorted(wanted):
        services = registry.list(capability=capability)
        override = query.service_overrides.get(capability)
        if override is not None:
            matches = [s for s in services if s.service_id == override]
            if not matches:
                raise UnsatisfiableQuery(
                    f"no registered service {override!r} for capability {capability}"
                )
            selected.append(matches[0])
        elif not services:
            raise UnsatisfiableQuery(
                f"no registered service provides capability {capability!r}",
                capability=capability,
            )
        elif len(services) > 1:
            raise AmbiguousService(
                f"{len(services)} services provide {capability!r} and the query "
                f"names none: {[s.service_id for s in services]}"
            )
        else:
            selected.append(services[0])

    nodes = {d.service_id: Node(node_id=d.service_id, service_id=d.service_id)
             for d in selected}
    by_capability = {d.capability: d.service_id for d in selected}

    rule_edges = [
        (by_capability[a], by_capability[b])
        for (a, b), rule in registry.dependency_rules().items()
        if rule == RULE_BEFORE and a in by_capability and b in by_capability
    ]
    try:
        order = topological_order(sorted(nodes), rule_edges)
    except CycleDetected as exc:
        raise CyclicConstraints(
            f"dependency rules admit no order: {exc.message}"
        )

    ordered_nodes = [nodes[node_id] for node_id in order]
    try:
        edges, source_bindings = bind_io(ordered_nodes, registry,
                                         query.provided_inputs)
    except UnboundPort as exc:
        raise UnsatisfiableQuery(
            f"missing required external input: {exc.message}", **exc.details
        )
    return PipelineSpec(nodes=tuple(ordered_nodes), edges=tuple(edges),
                        source_bindings=source_bindings)


# -- validation -------------------------------------------------------------------------

def validate_pipeline(spec: PipelineSpec, registry: Registry) -> list[Violation]:
    """Check a spec against registry state; returns all violations (empty is Ok)."""
    violations: list[Violation] = []

    if not spec.nodes:
        return [Violation(code="EMPTY_PIPELINE", message="pipeline has no nodes")]

    node_ids = spec.node_ids()
    if len(node_ids) != len(set(node_ids)):
        violations.append(Violation(code="DUPLICATE_NODE_ID",
                                    message="node ids must be unique"))
        return violations

    descriptors: dict[str, ServiceDescriptor] = {}
    for node in spec.nodes:
        try:
            descriptors[node.node_id] = registry.get(node.service_id)
        except UnknownService:
            violations.append(Violation(
                code="UNKNOWN_SERVICE",
                message=f"node {node.node_id} references unregistered service "
                        f"{node.service_id!r}",
                node=node.node_id,
            ))
    if violations:
        return violations

    index = {node_id: i for i, node_id in enumerate(node_ids)}
    bound: dict[str, list[str]] = {}

    for edge in spec.edges:
        key = (edge.from_node, edge.from_port, edge.to_node, edge.to_port)
        if edge.from_node not in index or edge.to_node not in index:
            violations.append(Violation(
                code="UNKNOWN_NODE",
                message=f"edge references unknown node", edge=key,
            ))
            continue
        src = descriptors[edge.from_node]
        dst = descriptors[edge.to_node]
        try:
            src.output_port(edge.from_port)
            dst.input_port(edge.to_port)
        except Exception:
            violations.append(Violation(
                code="UNKNOWN_PORT",
                message=f"edge references unknown port "
                        f"{edge.from_node}.{edge.from_port} -> "
                        f"{edge.to_node}.{edge.to_port}",
                edge=key,
            ))
            continue
        check = registry.check_edge((src.service_id, edge.from_port),
                                    (dst.service_id, edge.to_port))
        if not check.compatible:
            code = "TYPE_MISMATCH" if check.reason == "TypeMismatch" else "FORBIDDEN_PAIR"
            violations.append(Violation(code=code, message=check.detail, edge=key))
        bound.setdefault(f"{edge.to_node}.{edge.to_port}", []).append("edge")

    safe_edges = [(e.from_node, e.to_node) for e in spec.edges
                  if e.from_node in index and e.to_node in index]
    try:
        topological_order(node_ids, safe_edges)
    except CycleDetected as exc:
        violations.append(Violation(
            code="CYCLE_DETECTED",
            message=f"edge set contains a cycle: {', '.join(exc.cycle)}",
        ))
        return violations

    for edge in spec.edges:
        if edge.from_node not in index or edge.to_node not in index:
            continue
        if index[edge.from_node] >= index[edge.to_node]:
            violations.append(Violation(
                code="NOT_TOPOLOGICAL",
                message=f"node order puts {edge.to_node} before its producer "
                        f"{edge.from_node}",
                edge=(edge.from_node, edge.from_port, edge.to_node, edge.to_port),
            ))

    for key, ref in spec.source_bindings.items():
        node_id, _, port_name = key.partition(".")
        if node_id not in index:
            violations.append(Violation(
                code="UNKNOWN_NODE",
                message=f"input binding {key!r} references unknown node",
            ))
            continue
        try:
            port = descriptors[node_id].input_port(port_name)
        except Exception:
            violations.append(Violation(
                code="UNKNOWN_PORT",
                message=f"input binding {key!r} references unknown port",
                node=node_id,
            ))
            continue
        if ArtifactRef.looks_like_ref(ref):
            expected_ext = EXTENSIONS[port.artifact_type]
            if ArtifactRef.parse(ref).extension != expected_ext:
                violations.append(Violation(
                    code="TYPE_MISMATCH",
                    message=f"input binding {key!r} holds a "
                            f"{ArtifactRef.parse(ref).extension} payload where "
                            f"{port.artifact_type.value} is expected",
                    node=node_id,
                ))
        bound.setdefault(key, []).append("input")

    for node in spec.nodes:
        for port in descriptors[node.node_id].inputs:
            key = f"{node.node_id}.{port.name}"
            sources = bound.get(key, [])
            if len(sources) > 1:
                violations.append(Violation(
                    code="DOUBLE_BOUND",
                    message=f"port {key} is bound {len(sources)} times",
                    node=node.node_id,
                ))
            elif port.required and not sources:
                violations.append(Violation(
                    code="UNBOUND_PORT",
                    message=f"required port {key} is unbound",
                    node=node.node_id,
                ))

    capabilities_in_order = [descriptors[n].capability for n in node_ids]
    rules = registry.dependency_rules()
    for i, cap_a in enumerate(capabilities_in_order):
        for j in range(i + 1, len(capabilities_in_order)):
            cap_b = capabilities_in_order[j]
            # node j comes after node i, so a (cap_b before cap_a) rule is violated
            if rules.get((cap_b, cap_a)) == RULE_BEFORE:
                violations.append(Violation(
                    code="ORDER_RULE_VIOLATED",
                    message=f"rule ({cap_b} before {cap_a}) violated by node order "
                            f"({node_ids[i]} precedes {node_ids[j]})",
                    node=node_ids[j],
                ))
    return violations
