import pytest

from conftest import model_text
from fsc.errors import BudgetError, StepError
from fsc.lang.parser import parse, parse_expression
from fsc.lang.resolver import resolve
from fsc.semantics import CompiledModel, explore, initial_states


def compiled(text):
    return CompiledModel(resolve(parse(text)))


def resolve_models(*names):
    return resolve(parse(model_text(*names)))


class TestEval:
    def test_location_variable(self):
        cm = compiled(model_text("machine_example.fsc"))
        (idle,) = cm.initial_states()
        spec = cm.spec
        at_idle = spec.automata[0].locations.index("Idle")
        from fsc.model import RLoc

        assert cm.eval_expr(RLoc(0, at_idle), idle) is True
        assert cm.eval_expr(RLoc(0, 1 - at_idle), idle) is False

    def test_cost_sum_all_present(self):
        # 5+5+10+5+5+7+5+3 summed by hand
        spec = resolve_models("coffee_features_static.fsc")
        cm = CompiledModel(spec)
        all_present = tuple(True for _ in range(cm.nslots))
        assert cm.eval_expr(spec.alg_definitions["cost_sum"], all_present) == 45

    def test_sys_valid_at_valid_configuration(self):
        spec = resolve_models("coffee_features_static.fsc")
        cm = CompiledModel(spec)
        for state in cm.initial_states():
            assert cm.eval_expr(spec.alg_definitions["sys_valid"], state) is True
            assert cm.eval_expr(spec.alg_definitions["cost_valid"], state) is True


class TestStep:
    def test_counter_increment(self):
        cm = compiled(model_text("machine_example.fsc"))
        spec = cm.spec
        busy = spec.automata[0].locations.index("Busy")
        process = spec.event_index("ExampleAutomaton.process")
        state = (busy, 4)
        (choice,) = cm.enabled(state, process)
        assert cm.step(state, process, choice) == (busy, 5)

    def test_counter_guard_blocks(self):
        cm = compiled(model_text("machine_example.fsc"))
        spec = cm.spec
        busy = spec.automata[0].locations.index("Busy")
        process = spec.event_index("ExampleAutomaton.process")
        assert cm.enabled((busy, 5), process) == []

    def test_self_loop_identity(self):
        cm = compiled("plant automaton A:\n controllable e;\n location L:\n"
                      "  initial; marked;\n  edge e;\nend")
        ev = cm.spec.event_index("A.e")
        (choice,) = cm.enabled((), ev)
        assert cm.step((), ev, choice) == ()

    def test_out_of_range_update_names_variable_and_edge(self):
        cm = compiled("plant automaton A:\n controllable e;\n disc int[0..2] x = 2;\n"
                      " location L:\n  initial; marked;\n  edge e do x := x + 1;\nend")
        ev = cm.spec.event_index("A.e")
        (choice,) = cm.enabled((2,), ev)
        with pytest.raises(StepError, match="A.x.*edge A.L"):
            cm.step((2,), ev, choice)

    def test_reset_edge_joins_feature_departure(self):
        # a component transitions to its reset location on the feature's go event
        text = model_text("coffee_features_dynamic_strict.fsc") + """
plant automaton Tea:
  controllable tea, done, pour_tea;
  location NoChoice:
    initial; marked;
    edge tea goto Tea;
    edge FT.go;
  location Tea:
    marked;
    edge done goto NoChoice;
    edge pour_tea;
    edge FT.go goto NoChoice;
end
"""
        cm = compiled(text)
        spec = cm.spec
        tea_aut = spec.automaton_index("Tea")
        tea_loc = spec.automata[tea_aut].locations.index("Tea")
        ft_present = spec.variable_index("FT.present")
        go = spec.event_index("FT.go")
        start = next(s for s in cm.initial_states()
                     if s[cm.var_slot[ft_present]])
        tea_ev = spec.event_index("Tea.tea")
        (choice,) = cm.enabled(start, tea_ev)
        mid = cm.step(start, tea_ev, choice)
        assert mid[cm.aut_slot[tea_aut]] == tea_loc
        (choice,) = cm.enabled(mid, go)
        end = cm.step(mid, go, choice)
        assert end[cm.aut_slot[tea_aut]] == spec.automata[tea_aut].locations.index("NoChoice")
        assert end[cm.var_slot[ft_present]] is False


class TestMonitors:
    COIN = """
plant automaton Coin:
  controllable insert;
  location:
    initial; marked;
    edge insert;
end
plant automaton Cancel:
  controllable cancel;
  location:
    initial; marked;
    edge cancel;
end
plant automaton Machine:
  controllable take_cup;
  location:
    initial; marked;
    edge take_cup;
end
plant automaton CoinPresence:
  monitor;
  location NoCoinPresent:
    initial; marked;
    edge Coin.insert goto CoinPresent;
  location CoinPresent:
    edge Cancel.cancel goto NoCoinPresent;
    edge Machine.take_cup goto NoCoinPresent;
end
"""

    def test_monitor_stays_put_without_blocking(self):
        cm = compiled(self.COIN)
        spec = cm.spec
        cp = spec.automaton_index("CoinPresence")
        insert = spec.event_index("Coin.insert")
        present = spec.automata[cp].locations.index("CoinPresent")
        state = (present,)
        (choice,) = cm.enabled(state, insert)
        assert cm.step(state, insert, choice) == state  # self-loops via STAY

    def test_monitor_tracks_when_edge_matches(self):
        cm = compiled(self.COIN)
        spec = cm.spec
        insert = spec.event_index("Coin.insert")
        state = (spec.automata[spec.automaton_index("CoinPresence")]
                 .locations.index("NoCoinPresent"),)
        (choice,) = cm.enabled(state, insert)
        assert cm.step(state, insert, choice)[0] == \
            spec.automata[spec.automaton_index("CoinPresence")].locations.index("CoinPresent")

    def test_monitor_never_changes_enabled_events(self):
        # composing the monitor in leaves the enabled event set of every
        # reachable state exactly as without it (only its tracking slot moves)
        with_monitor = resolve(parse(self.COIN))
        plain_text = self.COIN.split("plant automaton CoinPresence:")[0]
        without = resolve(parse(plain_text))
        cm_with = CompiledModel(with_monitor)
        cm_without = CompiledModel(without)
        ts = explore(with_monitor, compiled=cm_with)
        plain_state = ()  # the three single-location plants carry no slots
        plain_events = {
            without.events[ei].name
            for ei in range(len(without.events))
            if cm_without.enabled(plain_state, ei)
        }
        for state in ts.states:
            enabled_here = {
                with_monitor.events[ei].name
                for ei in range(len(with_monitor.events))
                if cm_with.enabled(state, ei)
            }
            assert enabled_here == plain_events


class TestInitialStates:
    def test_coffee_static_16(self):
        assert len(initial_states(resolve_models("coffee_features_static.fsc"))) == 16

    def test_coffee_static_nocost_20(self):
        assert len(initial_states(resolve_models("coffee_features_static_nocost.fsc"))) == 20

    def test_machine_single_initial(self):
        spec = resolve_models("machine_example.fsc")
        states = initial_states(spec)
        idle = spec.automata[0].locations.index("Idle")
        assert states == [(idle, 0)]

    def test_budget_guard(self):
        spec = resolve_models("bcs_features_dynamic.fsc")
        with pytest.raises(BudgetError, match="symbolic"):
            initial_states(spec, budget=1_000_000)


class TestExplore:
    def test_components_18_states_207_transitions(self):
        ts = explore(resolve_models("coffee_components.fsc"))
        assert ts.state_count == 18
        assert ts.transition_count == 207

    def test_strict_dynamic_16_states_components_7_9(self):
        ts = explore(resolve_models("coffee_features_dynamic_strict.fsc"))
        assert ts.state_count == 16
        assert ts.transition_count == 42
        assert ts.component_sizes() == [9, 7]
        assert len(ts.initial) == 16
        assert len(ts.marked) == 16

    def test_strict_dynamic_per_event_structure(self):
        # counted by hand off the drawn reconfiguration graph: ringtone and
        # change toggle six ways each, tea seven, cappuccino only twice (it
        # needs the ringtone and a budget that only the euro side affords)
        ts = explore(resolve_models("coffee_features_dynamic_strict.fsc"))
        expected = {
            "FR.come": 6, "FR.go": 6,
            "FX.come": 6, "FX.go": 6,
            "FT.come": 7, "FT.go": 7,
            "FP.come": 2, "FP.go": 2,
        }
        assert ts.per_event_counts() == expected

    def test_relaxed_fxfo_1364_states(self):
        ts = explore(resolve_models("coffee_features_relaxed_fxfo.fsc"))
        assert ts.state_count == 1364
        assert len(ts.initial) == 16
        come_go = sum(n for name, n in ts.per_event_counts().items()
                      if name.endswith(".come") or name.endswith(".go"))
        assert come_go == 13440
        assert ts.transition_count == 13440  # nothing but reconfiguration here

    def test_every_state_satisfies_plant_invariants(self):
        spec = resolve_models("coffee_features_relaxed_fxfo.fsc")
        cm = CompiledModel(spec)
        ts = explore(spec, compiled=cm)
        assert all(cm.satisfies_invariants(s) for s in ts.states)

    def test_marked_iff_all_marked(self):
        text = """
plant automaton A:
  controllable go, back;
  location L1:
    initial; marked;
    edge go goto L2;
  location L2:
    edge back goto L1;
end
plant automaton B:
  controllable tick;
  location:
    initial; marked;
    edge tick;
end
"""
        ts = explore(resolve(parse(text)))
        assert ts.state_count == 2
        assert len(ts.marked) == 1

    def test_replay(self):
        spec = resolve_models("coffee_features_dynamic_strict.fsc")
        cm = CompiledModel(spec)
        ts = explore(spec, compiled=cm)
        for s, e, t in ts.transitions:
            successors = {cm.step(ts.states[s], e, c) for c in cm.enabled(ts.states[s], e)}
            assert ts.states[t] in successors

    def test_budget_exceeded(self):
        with pytest.raises(BudgetError, match="symbolic"):
            explore(resolve_models("coffee_features_relaxed_fxfo.fsc"), budget=100)
