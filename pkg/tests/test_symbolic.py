import pytest

from conftest import model_text
from fsc import symbolic as sym
from fsc.lang.parser import parse
from fsc.lang.resolver import resolve
from fsc.semantics import CompiledModel, explore


def encode_models(*names, order="affinity"):
    return sym.encode(resolve(parse(model_text(*names))), order=order)


def stateset(model, root, universe="current"):
    return sym.SymbolicStateSet(model, root, universe)


class TestEncoding:
    def test_counter_bit_widths(self):
        # 2 locations -> 1 bit; default int range 0..255 -> 8 bits
        model = encode_models("machine_example.fsc")
        assert model.pairs == 1 + 8
        loc = model.loc_group[0]
        assert loc.width == 1
        var = model.var_group[model.spec.variable_index("ExampleAutomaton.c")]
        assert var.width == 8

    def test_enum_of_four_literals_two_bits(self):
        model = encode_models("ball_attributed.fsc")
        # the ball features carry only the presence bool; build a 4-value enum var
        text = ("enum colordomain = red, yellow, blue, NA;\n"
                "plant automaton A:\n controllable e;\n"
                " disc colordomain c = red;\n location: initial; marked;\n"
                "  edge e do c := blue;\nend")
        model = sym.encode(resolve(parse(text)))
        var = model.var_group[0]
        assert var.width == 2

    def test_coffee_validity_count_over_presence_bits(self):
        model = encode_models("coffee_features_static.fsc")
        assert sym.sat_count(stateset(model, model.initial)) == 16

    def test_domain_validity_excludes_padding(self):
        text = ("plant automaton A:\n controllable e;\n disc int[0..2] x = 0;\n"
                " location: initial; marked;\n  edge e when x < 2 do x := x + 1;\nend")
        model = sym.encode(resolve(parse(text)))
        cid = model.store.register_cube(model.cur_levels)
        assert model.store.sat_count(model.domain_valid, cid) == 3  # not 4


class TestVectorOps:
    def test_rename_is_involution(self):
        model = encode_models("coffee_features_static.fsc")
        a = stateset(model, model.initial)
        assert sym.rename(sym.rename(a)) == a

    def test_exists_all_vars_of_nonempty(self):
        model = encode_models("coffee_features_static.fsc")
        a = stateset(model, model.initial)
        assert sym.quantify_exists(model.cur_levels, a).root == model.store.TRUE

    def test_apply_and_not(self):
        model = encode_models("coffee_features_static.fsc")
        a = stateset(model, model.initial)
        assert sym.bdd_apply("and", a, sym.bdd_not(a)).root == model.store.FALSE

    def test_universe_mismatch_rejected(self):
        model = encode_models("coffee_features_static.fsc")
        a = stateset(model, model.initial)
        b = sym.rename(a)
        with pytest.raises(ValueError, match="universe"):
            sym.bdd_apply("or", a, b)

    def test_store_mismatch_rejected(self):
        m1 = encode_models("coffee_features_static.fsc")
        m2 = encode_models("coffee_features_static.fsc")
        with pytest.raises(ValueError, match="stores"):
            sym.bdd_apply("or", stateset(m1, m1.initial), stateset(m2, m2.initial))


class TestReachability:
    def test_relaxed_model_fixpoint_1364(self):
        model = encode_models("coffee_features_relaxed_fxfo.fsc")
        r = sym.reachable(model)
        assert model.store.sat_count(r, model.store.register_cube(model.cur_levels)) == 1364

    def test_bcs_feature_model_reachable_and_initial(self):
        model = encode_models("bcs_features_dynamic.fsc")
        stats = sym.reachable_stats(model)
        assert stats["initial"] == 11616
        assert stats["states"] == 134217728  # every presence combination

    def test_initial_equals_marked_equals_legal_when_unconstrained(self):
        text = ("plant automaton A:\n controllable e;\n disc bool x in any;\n"
                " location: initial; marked;\n  edge e do x := not x;\nend")
        model = sym.encode(resolve(parse(text)))
        r = sym.reachable(model)
        c = sym.coreachable(model, model.marked, r)
        assert r == c == model.legal == model.initial == model.marked

    def test_components_transition_count_matches_explicit(self):
        model = encode_models("coffee_components.fsc")
        stats = sym.reachable_stats(model)
        assert stats["states"] == 18
        assert stats["transitions"] == 207

    def test_agreement_with_explicit_on_models(self):
        for name in ("machine_example.fsc", "coffee_features_dynamic_strict.fsc",
                     "coffee_features_relaxed_fxfo.fsc"):
            spec = resolve(parse(model_text(name)))
            ts = explore(spec)
            model = sym.encode(spec)
            stats = sym.reachable_stats(model)
            assert stats["states"] == ts.state_count, name
            assert stats["transitions"] == ts.transition_count, name
            assert stats["initial"] == len(ts.initial), name
            assert stats["marked"] == len(ts.marked), name
            assert stats["per_event"] == ts.per_event_counts(), name

    def test_decl_and_affinity_orders_agree(self):
        a = encode_models("coffee_features_dynamic_strict.fsc", order="decl")
        b = encode_models("coffee_features_dynamic_strict.fsc", order="affinity")
        cid_a = a.store.register_cube(a.cur_levels)
        cid_b = b.store.register_cube(b.cur_levels)
        assert a.store.sat_count(sym.reachable(a), cid_a) == \
            b.store.sat_count(sym.reachable(b), cid_b)

    def test_explicit_state_embedding(self):
        spec = resolve(parse(model_text("coffee_features_dynamic_strict.fsc")))
        cm = CompiledModel(spec)
        model = sym.encode(spec)
        ts = explore(spec, compiled=cm)
        bdd_states = model.states_bdd(cm, ts.states)
        r = sym.reachable(model)
        assert bdd_states == r


class TestCounts:
    def test_sat_count_exactness(self):
        model = encode_models("bcs_features_dynamic.fsc")
        top = stateset(model, model.store.TRUE)
        assert sym.sat_count(top, model.cur_levels) == 2 ** model.pairs
        empty = stateset(model, model.store.FALSE)
        assert sym.sat_count(empty) == 0


class TestErrors:
    OVERFLOW = """
plant automaton A:
  controllable tick;
  disc int[0..2] x = 2;
  location:
    initial; marked;
    edge tick do x := x + 1;
end
"""

    def test_overflow_raises_in_both_engines(self):
        from fsc.errors import StepError
        from fsc.semantics import explore

        spec = resolve(parse(self.OVERFLOW))
        with pytest.raises(StepError, match="A.x"):
            explore(spec)
        model = sym.encode(spec)
        with pytest.raises(StepError, match="A.x"):
            sym.reachable(model)

    def test_guarded_increment_is_fine_in_both_engines(self):
        from fsc.semantics import explore

        text = self.OVERFLOW.replace("edge tick do", "edge tick when x < 2 do")
        spec = resolve(parse(text))
        ts = explore(spec)
        model = sym.encode(spec)
        assert sym.reachable_stats(model)["states"] == ts.state_count == 1

    def test_partition_bit_budget(self):
        from fsc.errors import ResolveError

        text = ("plant automaton A:\n controllable e;\n"
                " disc int[0..200] x = 0;\n disc int[0..200] y = 0;\n"
                " location: initial; marked;\n"
                "  edge e when x * y < 7;\nend")
        spec = resolve(parse(text))
        with pytest.raises(ResolveError, match="bit budget"):
            sym.encode(spec)

