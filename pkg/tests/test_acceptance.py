"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL
line (run with -s or -rA to see the lines for passing criteria as well)."""

import resource
import sys
import time
from pathlib import Path

import pytest

import golden
from _generate import generate_model
from conftest import MODELS, model_text
from fsc import features as fk
from fsc import symbolic as sym
from fsc.lang.parser import parse
from fsc.lang.resolver import resolve
from fsc.semantics import explore
from fsc.synth import maximality_probe, normalize, synthesize, verify_controlled


def criterion(label):
    """Print one stable pass/fail line per criterion, then re-raise."""

    class _Ctx:
        def __enter__(self):
            self.t0 = time.monotonic()
            return self

        @property
        def elapsed(self):
            return time.monotonic() - self.t0

        def __exit__(self, exc_type, exc, tb):
            verdict = "PASS" if exc_type is None else "FAIL"
            print(f"acceptance {label}: {verdict} ({self.elapsed:.2f}s)",
                  file=sys.stderr)
            return False

    return _Ctx()


def load(*names):
    return resolve(parse(model_text(*names)))


def test_criterion_1_configuration_counting():
    with criterion("1 configuration counting") as ctx:
        t0 = time.monotonic()
        fm_nocost = _coffee_fm(with_cost=False)
        assert fk.count_valid_configurations(fm_nocost) == 20
        assert time.monotonic() - t0 < 1.0
        t0 = time.monotonic()
        fm_cost = _coffee_fm(with_cost=True)
        assert fk.count_valid_configurations(fm_cost) == 16
        assert time.monotonic() - t0 < 1.0
        t0 = time.monotonic()
        model = sym.encode(load("bcs_features_dynamic.fsc"))
        assert model.store.sat_count(model.initial, model.cur_cube) == 11616
        assert time.monotonic() - t0 < 1.0


def _coffee_fm(with_cost):
    text = model_text("coffee_fm_block.fsc")
    if not with_cost:
        text = text.replace("  constraint sum(cost) <= 30;\n", "")
    fm, _, _ = fk.interpret_block(parse(text).declarations[0])
    return fm


def test_criterion_2_uncontrolled_composition():
    with criterion("2 uncontrolled composition") as ctx:
        ts = explore(load("coffee_components.fsc"))
        assert ts.state_count == 18
        assert ts.transition_count == 207
        assert ctx.elapsed < 1.0


def test_criterion_3_strict_dynamic_feature_model():
    with criterion("3 strict dynamic feature model"):
        ts = explore(load("coffee_features_dynamic_strict.fsc"))
        assert ts.state_count == 16
        assert sorted(ts.component_sizes()) == [7, 9]


def test_criterion_4_relaxed_dynamic_feature_model():
    with criterion("4 relaxed dynamic + coin invariant"):
        ts = explore(load("coffee_features_relaxed_fxfo.fsc"))
        assert ts.state_count == 1364
        assert len(ts.initial) == 16
        come_go = sum(count for name, count in ts.per_event_counts().items()
                      if name.endswith((".come", ".go")))
        assert come_go == 13440


def test_criterion_5_coffee_synthesis():
    with criterion("5 coffee synthesis + guards") as ctx:
        spec = load("coffee_full.fsc")
        sup, report = synthesize(normalize(spec), engine="symbolic")
        assert report.controlled_states == golden.CONTROLLED_STATES
        assert report.controlled_transitions == golden.CONTROLLED_TRANSITIONS
        assert ctx.elapsed < 10.0, f"{ctx.elapsed:.1f}s"
        verdict = golden.guard_equivalence_report(spec, sup)
        assert len(verdict) == 15  # every reference guard, Cancel.cancel elided
        failing = [name for name, ok in verdict.items() if not ok]
        assert not failing, failing
        assert sup.guard_text("Cancel.cancel") == golden.CANCEL_GUARD_GROUND_TRUTH


def test_criterion_6_bcs_feature_model_reachability():
    with criterion("6a BCS dynamic feature model reachable count"):
        model = sym.encode(load("bcs_features_dynamic.fsc"))
        stats = sym.reachable_stats(model)
        assert stats["states"] == 134217728
        assert stats["initial"] == 11616


def test_criterion_6_bcs_scale_budget():
    # the budget clause: a >=1e20-state synthesis must fit in 60 s and 2 GB;
    # exercised on the factorizable benchmark whose counts have an
    # independent explicit oracle (see test_scale.py)
    with criterion("6b symbolic synthesis at 1e20 scale within budget") as ctx:
        from test_scale import N_STATIONS, station

        text = "\n".join(station(k) for k in range(N_STATIONS))
        spec = resolve(parse(text))
        one = resolve(parse(station(0)))
        sup1, rep1 = synthesize(normalize(one), engine="explicit")
        result = sym.symbolic_synthesize(sym.encode(spec))
        assert result.controlled_states == rep1.controlled_states ** N_STATIONS
        assert result.controlled_states > 10**20
        assert ctx.elapsed < 60.0
        peak_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
        assert peak_mb < 2048


BCS_TABLE = {
    # two-significant-digit state counts for the full Body Comfort System
    "worst_case": 7.7e20,
    "uncontrolled_static": 3.2e14,
    "uncontrolled_dynamic": 6.2e20,
    "controlled_static": 7.6e13,
    "controlled_dynamic": 1.1e20,
}


def _two_sig(value: int) -> float:
    from math import floor, log10

    if value == 0:
        return 0.0
    digits = floor(log10(abs(value)))
    return round(value / 10 ** (digits - 1)) * 10 ** (digits - 1)


def test_criterion_6_bcs_full_table():
    with criterion("6c BCS full-model table (2 significant digits)"):
        static_path = MODELS / "bcs_full_static.fsc"
        dynamic_path = MODELS / "bcs_full_dynamic.fsc"
        if not (static_path.exists() and dynamic_path.exists()):
            pytest.fail(
                "the full BCS behavioral model (31 component plants, 18 link "
                "automata, 55 requirements) is not part of the available "
                "sources; only its feature model and the alarm fragment are. "
                "Reconstructing 31 automata to hit five aggregate counts at "
                "two significant digits would be fabrication, so this "
                "criterion stays red; see the decisions ledger. Provide "
                "models/bcs_full_{static,dynamic}.fsc to run it.")
        static_spec = resolve(parse(static_path.read_text()))
        dynamic_spec = resolve(parse(dynamic_path.read_text()))
        assert _two_sig(static_spec.worst_case_size()) == BCS_TABLE["worst_case"]
        for spec, unc_key, ctl_key in (
                (static_spec, "uncontrolled_static", "controlled_static"),
                (dynamic_spec, "uncontrolled_dynamic", "controlled_dynamic")):
            t0 = time.monotonic()
            model = sym.encode(spec)
            stats = sym.reachable_stats(model)
            assert _two_sig(stats["states"]) == BCS_TABLE[unc_key]
            result = sym.symbolic_synthesize(model)
            assert _two_sig(result.controlled_states) == BCS_TABLE[ctl_key]
            assert time.monotonic() - t0 < 60.0


def test_criterion_7_property_suite():
    with criterion("7 randomized property corpus"):
        import random

        from test_features import brute_force_eval, random_feature_model

        checked = 0
        for seed in range(110):
            spec = resolve(parse(generate_model(seed)))
            ts = explore(spec)
            assert ts.state_count <= 100_000
            # (a) engine agreement on reachable counts
            stats = sym.reachable_stats(sym.encode(spec))
            assert stats["states"] == ts.state_count
            assert stats["transitions"] == ts.transition_count
            problem = normalize(spec)
            sup, report = synthesize(problem, engine="explicit")
            sup_s, report_s = synthesize(problem, engine="symbolic")
            assert report.controlled_states == report_s.controlled_states
            if not report.empty:
                # (b) the checker passes on every synthesized supervisor
                assert verify_controlled(spec, sup).ok, seed
                # (c) nothing re-addable
                assert maximality_probe(spec, sup, seed=seed).readdable == [], seed
            checked += 1
        assert checked >= 100

        # (d) constraint formula semantics equal brute force on random models
        import itertools

        for seed in range(25):
            rng = random.Random(seed)
            fm = random_feature_model(rng, rng.randint(2, 12))
            count = fk.count_valid_configurations(fm)  # cross-checks internally
            formulas = [fk.constraint_formula(c) for c in fm.constraints]
            names = fm.feature_names()
            brute = sum(
                1 for bits in itertools.product((False, True), repeat=len(names))
                if all(brute_force_eval(f, dict(zip(names, bits))) for f in formulas))
            assert count == brute

        # (e) effort metrics: captured, monotone, reproducible across runs
        for seed in (5, 23):
            spec = resolve(parse(generate_model(seed)))
            runs = []
            for _ in range(2):
                result = sym.symbolic_synthesize(sym.encode(spec))
                metrics = result.metrics
                assert metrics.operations >= metrics.cache_misses
                assert metrics.peak_nodes > 0
                runs.append((metrics.peak_nodes, metrics.operations,
                             metrics.cache_misses, metrics.iterations))
            assert runs[0] == runs[1]
