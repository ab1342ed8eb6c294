"""Service registration, dependency rules, and edge compatibility."""

import pytest

from kolflow import capabilities as caps
from kolflow.capabilities import PortSpec
from kolflow.core import ArtifactType
from kolflow.errors import (
    ConflictingRule,
    DuplicateServiceId,
    InvalidDescriptor,
    UnknownAlgorithm,
    UnknownCapability,
    UnknownPort,
    UnknownService,
)
from kolflow.flow import topological_order
from kolflow.registry import (
    BackendBinding,
    Registry,
    ServiceDescriptor,
    builtin_descriptor,
    default_dependency_rules,
    register_builtin_services,
)


def descriptor(service_id="svc", capability=caps.MAKEUP, **overrides):
    kwargs = dict(
        service_id=service_id,
        capability=capability,
        inputs=caps.CAPABILITY_INPUTS[capability],
        outputs=caps.CAPABILITY_OUTPUTS[capability],
        backend=BackendBinding.local("mock_makeup"),
    )
    kwargs.update(overrides)
    return ServiceDescriptor(**kwargs)


class TestRegistration:
    def test_register_the_four_generative_services(self, empty_registry):
        for capability in (caps.TRYON, caps.MAKEUP, caps.BACKGROUND,
                           caps.OBJECT_INTERACTION):
            empty_registry.register(builtin_descriptor(capability))
        listed = empty_registry.list()
        assert [d.service_id for d in listed] == [
            "background", "makeup", "object_interaction", "tryon",
        ]

    def test_duplicate_id_rejected(self, empty_registry):
        empty_registry.register(descriptor())
        with pytest.raises(DuplicateServiceId):
            empty_registry.register(descriptor())

    def test_zero_outputs_rejected(self, empty_registry):
        with pytest.raises(InvalidDescriptor):
            empty_registry.register(descriptor(outputs=()))

    def test_bad_service_id_rejected(self, empty_registry):
        with pytest.raises(InvalidDescriptor):
            empty_registry.register(descriptor(service_id="Not Valid!"))

    def test_duplicate_port_names_rejected(self, empty_registry):
        with pytest.raises(InvalidDescriptor):
            empty_registry.register(descriptor(
                outputs=(PortSpec("out", ArtifactType.PERSON_IMAGE),
                         PortSpec("out", ArtifactType.PERSON_IMAGE)),
            ))

    def test_unknown_local_algorithm_rejected(self, empty_registry):
        with pytest.raises(UnknownAlgorithm):
            empty_registry.register(descriptor(
                backend=BackendBinding.local("no_such_algorithm"),
            ))

    def test_backend_binding_exactly_one_variant(self):
        with pytest.raises(InvalidDescriptor):
            BackendBinding(kind="local", algorithm_id="mock_makeup",
                           base_url="http://x")
        with pytest.raises(InvalidDescriptor):
            BackendBinding(kind="remote", base_url="http://x", timeout_ms=0)
        with pytest.raises(InvalidDescriptor):
            BackendBinding(kind="weird")

    def test_unregister_round_trip(self, empty_registry):
        empty_registry.register(descriptor())
        removed = empty_registry.unregister("svc")
        assert removed.service_id == "svc"
        assert empty_registry.list() == []

    def test_unregister_unknown(self, empty_registry):
        with pytest.raises(UnknownService):
            empty_registry.unregister("ghost")

    def test_registration_order_has_no_effect(self):
        a = Registry()
        b = Registry()
        d1 = descriptor("a_tryon", caps.TRYON,
                        backend=BackendBinding.local("mock_tryon"),
                        inputs=caps.CAPABILITY_INPUTS[caps.TRYON],
                        outputs=caps.CAPABILITY_OUTPUTS[caps.TRYON])
        d2 = descriptor("b_tryon", caps.TRYON,
                        backend=BackendBinding.local("mock_tryon"),
                        inputs=caps.CAPABILITY_INPUTS[caps.TRYON],
                        outputs=caps.CAPABILITY_OUTPUTS[caps.TRYON])
        a.register(d1), a.register(d2)
        b.register(d2), b.register(d1)
        assert a.canonical_state() == b.canonical_state()
        assert [d.service_id for d in a.list()] == ["a_tryon", "b_tryon"]


class TestListing:
    def test_empty_registry(self, empty_registry):
        assert empty_registry.list() == []

    def test_filter_by_capability(self, registry):
        makeups = registry.list(capability=caps.MAKEUP)
        assert [d.service_id for d in makeups] == ["makeup"]

    def test_lexicographic_order(self, empty_registry):
        for sid in ("b_tryon", "a_tryon"):
            empty_registry.register(descriptor(
                sid, caps.TRYON, backend=BackendBinding.local("mock_tryon"),
                inputs=caps.CAPABILITY_INPUTS[caps.TRYON],
                outputs=caps.CAPABILITY_OUTPUTS[caps.TRYON]))
        assert [d.service_id for d in empty_registry.list()] \
            == ["a_tryon", "b_tryon"]


class TestDependencyRules:
    def test_two_cycle_rejected(self, empty_registry):
        empty_registry.set_dependency_rule((caps.TRYON, caps.MAKEUP), "before")
        with pytest.raises(ConflictingRule):
            empty_registry.set_dependency_rule((caps.MAKEUP, caps.TRYON), "before")

    def test_unknown_capability(self, empty_registry):
        with pytest.raises(UnknownCapability):
            empty_registry.set_dependency_rule(("tryon", "hovercraft"), "before")

    def test_missing_entries_default_to_allowed(self, empty_registry):
        assert empty_registry.rule(caps.OBJECT_INTERACTION, caps.TRYON) == "allowed"

    def test_default_matrix_is_a_strict_partial_order(self):
        rules = default_dependency_rules()
        befores = [pair for pair, rule in rules.items() if rule == "before"]
        # irreflexive + antisymmetric
        for a, b in befores:
            assert a != b
            assert (b, a) not in rules
        # transitive
        before_set = set(befores)
        for a, b in befores:
            for c, d in befores:
                if b == c:
                    assert (a, d) in before_set
        # acyclic over all capabilities
        order = topological_order(sorted(caps.CAPABILITIES), befores)
        assert len(order) == len(caps.CAPABILITIES)

    def test_default_chain_present(self):
        rules = default_dependency_rules()
        for pair in ((caps.TRYON, caps.MAKEUP), (caps.MAKEUP, caps.BACKGROUND),
                     (caps.BACKGROUND, caps.OBJECT_INTERACTION),
                     (caps.FACE_EXTRACT_ALIGN, caps.MAKEUP),
                     (caps.MAKEUP, caps.FACE_REINTEGRATE),
                     (caps.FACE_REINTEGRATE, caps.BACKGROUND)):
            assert rules.get(pair) == "before"


class TestCheckEdge:
    def test_compatible_person_chain(self, registry):
        check = registry.check_edge(("tryon", "out"), ("makeup", "person"))
        assert check.compatible

    def test_type_mismatch(self, registry):
        check = registry.check_edge(("tryon", "out"), ("makeup", "makeup_ref"))
        assert not check.compatible
        assert check.reason == "TypeMismatch"

    def test_forbidden_pair(self, registry):
        registry.set_dependency_rule((caps.TRYON, caps.BACKGROUND), "forbidden")
        check = registry.check_edge(("tryon", "out"), ("background", "person"))
        assert not check.compatible
        assert check.reason == "ForbiddenPair"

    def test_unknown_service_and_port(self, registry):
        with pytest.raises(UnknownService):
            registry.check_edge(("ghost", "out"), ("makeup", "person"))
        with pytest.raises(UnknownPort):
            registry.check_edge(("tryon", "nope"), ("makeup", "person"))

    def test_pure_function_of_state(self, registry):
        before = registry.check_edge(("tryon", "out"), ("makeup", "person"))
        registry.set_dependency_rule((caps.TRYON, caps.MAKEUP), "forbidden")
        after = registry.check_edge(("tryon", "out"), ("makeup", "person"))
        registry.set_dependency_rule((caps.TRYON, caps.MAKEUP), "before")
        restored = registry.check_edge(("tryon", "out"), ("makeup", "person"))
        assert before.compatible and not after.compatible and restored.compatible


class TestSnapshots:
    def test_round_trip(self, registry, tmp_path):
        registry.set_dependency_rule((caps.TRYON, caps.BACKGROUND), "forbidden")
        path = tmp_path / "snapshot.json"
        registry.save_snapshot(path)
        again = Registry.load_snapshot(path)
        assert again.canonical_state() == registry.canonical_state()

    def test_register_unregister_restores_state(self, registry):
        before = registry.canonical_state()
        registry.register(descriptor("extra_makeup"))
        assert registry.canonical_state() != before
        registry.unregister("extra_makeup")
        assert registry.canonical_state() == before
