import pytest

from conftest import model_text
from fsc import model as m
from fsc.errors import ResolveError
from fsc.lang.parser import parse
from fsc.lang.resolver import resolve


def resolve_text(text, **kw):
    return resolve(parse(text), **kw)


class TestCoffeeFeatureInstances:
    def test_static_model_counts(self):
        spec = resolve_text(model_text("coffee_features_static.fsc"))
        aut_names = [a.name for a in spec.automata]
        # 11 feature automata plus Validity
        assert aut_names == ["FM", "FS", "FO", "FR", "FB", "FX", "FE", "FD",
                             "FP", "FC", "FT", "Validity"]
        constraint_algs = [n for n in spec.alg_definitions if n.startswith("r")]
        assert len(constraint_algs) == 12
        assert "cost_sum" in spec.alg_definitions
        assert "sys_valid" in spec.alg_definitions

    def test_expansion_is_hygienic(self):
        spec = resolve_text(model_text("ball_attributed.fsc"))
        names = [v.name for v in spec.variables]
        assert names == ["RedBall.present", "YellowBall.present"]
        red = spec.alg_definitions["RedBall.color"]
        yellow = spec.alg_definitions["YellowBall.color"]
        assert red != yellow  # each instance owns its argument expression
        assert isinstance(red, m.RIf)
        assert red.then == m.RLit(0, ("enum", "colordomain"))  # red
        assert yellow.then == m.RLit(1, ("enum", "colordomain"))  # yellow

    def test_dynamic_instances_have_own_events(self):
        spec = resolve_text(model_text("coffee_features_dynamic_strict.fsc"))
        event_names = [e.name for e in spec.events]
        assert "FM.come" in event_names and "FT.go" in event_names
        assert len([n for n in event_names if n.endswith((".come", ".go"))]) == 22
        assert all(not e.controllable for e in spec.events)


class TestErrors:
    def test_unknown_name(self):
        with pytest.raises(ResolveError, match="unknown"):
            resolve_text("alg bool bad = F9.present;")

    def test_arity_mismatch(self):
        with pytest.raises(ResolveError, match="argument"):
            resolve_text("plant def D(alg int x):\n disc bool present in any;\n"
                         " location: initial; marked;\nend\nA: D(1, 2);")

    def test_type_mismatch(self):
        with pytest.raises(ResolveError, match="boolean"):
            resolve_text("plant automaton A:\n controllable e;\n disc int x = 0;\n"
                         " location: initial; marked;\n  edge e when x + 1;\nend")

    def test_cyclic_algebraic(self):
        with pytest.raises(ResolveError, match="cyclic"):
            resolve_text("alg bool a = b;\nalg bool b = a;\n"
                         "plant automaton A:\n location: initial; marked;\nend")

    def test_duplicate_location(self):
        with pytest.raises(ResolveError, match="duplicate location"):
            resolve_text("plant automaton A:\n location L:\n  initial; marked;\n"
                         " location L:\n  marked;\nend")

    def test_local_write_enforced(self):
        with pytest.raises(ResolveError, match="writable only where declared"):
            resolve_text("plant automaton A:\n controllable e;\n disc bool x = true;\n"
                         " location: initial; marked;\nend\n"
                         "plant automaton B:\n controllable f;\n location: initial; marked;\n"
                         "  edge f do x := false;\nend")

    def test_at_least_one_location(self):
        with pytest.raises(ResolveError, match="at least one location"):
            resolve_text("plant automaton A:\n controllable e;\nend")

    def test_unknown_event_in_condition(self):
        with pytest.raises(ResolveError, match="no event"):
            resolve_text("plant automaton A:\n controllable e;\n location: initial; marked;\n"
                         "  edge e;\nend\nrequirement A.f needs true;")

    def test_ranged_alg_rejected(self):
        with pytest.raises(ResolveError, match="unsupported construct"):
            resolve_text("alg int[0..3] x = 1;\nplant automaton A:\n location: initial; marked;\nend")


class TestDefaultIntRange:
    def test_bare_int_defaults_with_warning(self):
        spec = resolve_text(model_text("machine_example.fsc"))
        var = spec.variables[spec.variable_index("ExampleAutomaton.c")]
        assert var.domain == m.IntDomain(0, 255)
        assert any("defaulted" in w for w in spec.warnings)

    def test_configurable_range(self):
        spec = resolve_text(model_text("machine_example.fsc"), int_range=(0, 7))
        var = spec.variables[spec.variable_index("ExampleAutomaton.c")]
        assert var.domain == m.IntDomain(0, 7)


class TestStructure:
    def test_monitor_and_conditions(self, coffee_full):
        coin = coffee_full.automata[coffee_full.automaton_index("CoinPresence")]
        assert coin.monitor
        insert = coffee_full.event_index("Coin.insert")
        assert insert in coin.alphabet
        coffee_ev = coffee_full.event_index("Coffee.coffee")
        assert len(coffee_full.event_conditions[coffee_ev]) == 2

    def test_requirement_kinds(self, coffee_full):
        kinds = {a.name: a.kind for a in coffee_full.automata}
        assert kinds["RingAfterBeverageCompletion"] == "requirement"
        assert kinds["CoinPresence"] == "plant"
        assert len(coffee_full.requirement_invariants) == 3
        assert len(coffee_full.plant_invariants) == 1

    def test_worst_case_size(self):
        spec = resolve_text(model_text("coffee_components.fsc"))
        assert spec.worst_case_size() == 18

    def test_supervisor_alphabet_must_cover_edges(self):
        with pytest.raises(ResolveError, match="alphabet"):
            resolve_text("plant automaton P:\n controllable a, b;\n location: initial; marked;\n"
                         "  edge a;\n  edge b;\nend\n"
                         "supervisor automaton sup:\n alphabet P.a;\n location: initial; marked;\n"
                         "  edge P.a;\n  edge P.b;\nend")
