"""Decision-diagram engine checks against truth-table oracles."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsc.bdd import BDD


def truth_table(store, node, nlevels):
    return tuple(store.eval(node, bits) for bits in itertools.product((0, 1), repeat=nlevels))


def random_node(store, rng, nlevels, depth=4):
    if depth == 0 or rng.random() < 0.2:
        return rng.choice([0, 1] + [store.var(i) for i in range(nlevels)])
    op = rng.choice(["and", "or", "xor", "not"])
    a = random_node(store, rng, nlevels, depth - 1)
    if op == "not":
        return store.neg(a)
    b = random_node(store, rng, nlevels, depth - 1)
    return {"and": store.apply_and, "or": store.apply_or, "xor": store.apply_xor}[op](a, b)


class TestAlgebra:
    def test_contradiction_is_empty(self):
        store = BDD(4)
        x = store.var(0)
        assert store.apply_and(x, store.neg(x)) == store.FALSE

    def test_or_identity(self):
        store = BDD(4)
        a = store.apply_and(store.var(0), store.var(2))
        assert store.apply_or(a, store.FALSE) == a

    def test_diff_is_and_not(self):
        store = BDD(6)
        rng = random.Random(7)
        for _ in range(50):
            a = random_node(store, rng, 6)
            b = random_node(store, rng, 6)
            assert store.apply_diff(a, b) == store.apply_and(a, store.neg(b))

    def test_ite_matches_formula(self):
        store = BDD(6)
        rng = random.Random(8)
        for _ in range(50):
            f, g, h = (random_node(store, rng, 6) for _ in range(3))
            expected = store.apply_or(store.apply_and(f, g),
                                      store.apply_and(store.neg(f), h))
            assert store.ite(f, g, h) == expected


class TestCanonicity:
    def test_equivalent_iff_same_node(self):
        # random pairs compared against truth tables on a small universe
        nlevels = 8
        store = BDD(nlevels)
        rng = random.Random(42)
        for _ in range(300):
            a = random_node(store, rng, nlevels)
            b = random_node(store, rng, nlevels)
            same_semantics = truth_table(store, a, nlevels) == truth_table(store, b, nlevels)
            assert (a == b) == same_semantics

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
    def test_apply_matches_tables(self, ta, tb):
        # interpret the integers as 16-row truth tables over 4 levels
        nlevels = 4
        store = BDD(nlevels)
        rows = list(itertools.product((0, 1), repeat=nlevels))

        def build(table):
            node = store.FALSE
            for i, bits in enumerate(rows):
                if (table >> i) & 1:
                    node = store.apply_or(node, store.cube({lv: bool(b) for lv, b in enumerate(bits)}))
            return node

        a, b = build(ta), build(tb)
        assert truth_table(store, store.apply_and(a, b), nlevels) == \
            tuple((ta >> i) & (tb >> i) & 1 for i in range(16))
        assert truth_table(store, store.apply_xor(a, b), nlevels) == \
            tuple(((ta >> i) ^ (tb >> i)) & 1 for i in range(16))


class TestQuantifyRename:
    def test_exists_all_vars_of_nonempty_is_true(self):
        store = BDD(6)
        rng = random.Random(3)
        cid = store.register_cube(range(6))
        for _ in range(30):
            a = random_node(store, rng, 6)
            if a != store.FALSE:
                assert store.exists(a, cid) == store.TRUE

    def test_exists_matches_cofactor_or(self):
        store = BDD(6)
        rng = random.Random(4)
        for level in range(6):
            cid = store.register_cube((level,))
            for _ in range(20):
                a = random_node(store, rng, 6)
                table = truth_table(store, a, 6)
                ex = truth_table(store, store.exists(a, cid), 6)
                for i, bits in enumerate(itertools.product((0, 1), repeat=6)):
                    b0 = list(bits)
                    b0[level] = 0
                    b1 = list(bits)
                    b1[level] = 1
                    i0 = int("".join(map(str, b0)), 2)
                    i1 = int("".join(map(str, b1)), 2)
                    assert ex[i] == (table[i0] or table[i1])

    def test_and_exists_equals_exists_of_and(self):
        store = BDD(8)
        rng = random.Random(5)
        cid = store.register_cube((1, 3, 5))
        for _ in range(60):
            a = random_node(store, rng, 8)
            b = random_node(store, rng, 8)
            assert store.and_exists(a, b, cid) == store.exists(store.apply_and(a, b), cid)

    def test_swap_is_involution(self):
        store = BDD(8)
        rng = random.Random(6)
        for _ in range(60):
            a = random_node(store, rng, 8)
            assert store.swap_pairs(store.swap_pairs(a)) == a

    def test_swap_semantics(self):
        store = BDD(4)
        rng = random.Random(9)
        for _ in range(40):
            a = random_node(store, rng, 4)
            swapped = store.swap_pairs(a)
            for bits in itertools.product((0, 1), repeat=4):
                flipped = (bits[1], bits[0], bits[3], bits[2])
                assert store.eval(swapped, bits) == store.eval(a, flipped)


class TestCounting:
    def test_constant_true_over_27(self):
        store = BDD(27)
        cid = store.register_cube(range(27))
        assert store.sat_count(store.TRUE, cid) == 134217728  # 2**27

    def test_empty_set(self):
        store = BDD(27)
        cid = store.register_cube(range(27))
        assert store.sat_count(store.FALSE, cid) == 0

    def test_counts_match_truth_tables(self):
        store = BDD(7)
        rng = random.Random(10)
        cid = store.register_cube(range(7))
        for _ in range(60):
            a = random_node(store, rng, 7)
            assert store.sat_count(a, cid) == sum(truth_table(store, a, 7))

    def test_count_scales_free_levels(self):
        store = BDD(10)
        x = store.var(4)
        cid = store.register_cube(range(10))
        assert store.sat_count(x, cid) == 2**9

    def test_arbitrary_precision(self):
        store = BDD(140)
        cid = store.register_cube(range(140))
        assert store.sat_count(store.TRUE, cid) == 2**140


class TestIsopRestrict:
    def test_isop_covers_between_bounds(self):
        store = BDD(6)
        rng = random.Random(11)
        for _ in range(80):
            f = random_node(store, rng, 6)
            care = random_node(store, rng, 6)
            lower = store.apply_and(f, care)
            upper = store.apply_or(f, store.neg(care))
            cover, cubes = store.isop(lower, upper)
            assert store.apply_diff(lower, cover) == store.FALSE
            assert store.apply_diff(cover, upper) == store.FALSE
            rebuilt = store.FALSE
            for cube in cubes:
                rebuilt = store.apply_or(rebuilt, store.cube(dict(cube)))
            assert rebuilt == cover

    def test_restrict_agrees_on_care(self):
        store = BDD(6)
        rng = random.Random(12)
        for _ in range(80):
            f = random_node(store, rng, 6)
            care = random_node(store, rng, 6)
            g = store.restrict(f, care)
            assert store.apply_and(store.apply_xor(f, g), care) == store.FALSE


class TestStore:
    def test_dump_load_roundtrip(self):
        store = BDD(6)
        rng = random.Random(13)
        roots = [random_node(store, rng, 6) for _ in range(5)]
        text = store.dump(roots)
        other = BDD(6)
        loaded = other.load(text)
        for old, new in zip(roots, loaded):
            assert truth_table(store, old, 6) == truth_table(other, new, 6)

    def test_collect_remaps_roots(self):
        store = BDD(8)
        rng = random.Random(14)
        keep = [random_node(store, rng, 8) for _ in range(3)]
        tables = [truth_table(store, n, 8) for n in keep]
        for _ in range(50):
            random_node(store, rng, 8)  # garbage
        before = store.node_count()
        remap = store.collect(keep)
        assert store.node_count() <= before
        for node, table in zip(keep, tables):
            assert truth_table(store, remap[node], 8) == table
        # canonicity still holds after the sweep
        x = store.apply_and(remap[keep[0]], store.TRUE)
        assert x == remap[keep[0]]

    def test_metrics_monotone(self):
        store = BDD(8)
        rng = random.Random(15)
        last_ops = last_peak = 0
        for _ in range(20):
            random_node(store, rng, 8)
            assert store.ops >= last_ops
            assert store.peak_nodes >= last_peak
            last_ops, last_peak = store.ops, store.peak_nodes

    def test_mk_never_builds_redundant_node(self):
        store = BDD(4)
        x = store.var(2)
        assert store.mk(1, x, x) == x
