"""Symbolic encoding of resolved models and the BDD-based fixpoint engine.

Every location pointer and discrete variable is bit-blasted (ceil(log2)
bits), with current and next bits interleaved. Per-event transition relations
conjoin the participating automata's edge relations with identity frames for
everything untouched; plant invariants and domain validity restrict both ends
of every relation.

Integer-valued expressions are compiled to (condition, value) partitions, so
arithmetic over bounded variables never enumerates the joint state space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from fsc import model as m
from fsc.bdd import BDD
from fsc.errors import ResolveError, StepError
from fsc.lang import syntax as ast

_PARTITION_CAP = 1 << 14


@dataclass
class EffortMetrics:
    peak_nodes: int = 0
    operations: int = 0
    cache_misses: int = 0
    iterations: int = 0

    def snapshot(self, store: BDD):
        self.peak_nodes = store.peak_nodes
        self.operations = store.ops
        self.cache_misses = store.cache_misses


@dataclass(frozen=True)
class SymbolicStateSet:
    """A predicate over the encoded state variables of one model."""

    model: "SymbolicModel"
    root: int
    universe: str = "current"  # 'current' | 'next' | 'pair'

    def _check(self, other: "SymbolicStateSet"):
        if other.model is not self.model:
            raise ValueError("state sets belong to different stores")
        if other.universe != self.universe:
            raise ValueError(f"universe mismatch: {self.universe} vs {other.universe}")


def bdd_apply(op: str, a: SymbolicStateSet, b: SymbolicStateSet) -> SymbolicStateSet:
    a._check(b)
    store = a.model.store
    fn = {"and": store.apply_and, "or": store.apply_or,
          "xor": store.apply_xor, "diff": store.apply_diff}[op]
    return SymbolicStateSet(a.model, fn(a.root, b.root), a.universe)


def bdd_not(a: SymbolicStateSet) -> SymbolicStateSet:
    return SymbolicStateSet(a.model, a.model.store.neg(a.root), a.universe)


def bdd_ite(f: SymbolicStateSet, g: SymbolicStateSet, h: SymbolicStateSet) -> SymbolicStateSet:
    f._check(g)
    f._check(h)
    return SymbolicStateSet(f.model, f.model.store.ite(f.root, g.root, h.root), f.universe)


def quantify_exists(levels, a: SymbolicStateSet) -> SymbolicStateSet:
    store = a.model.store
    cid = store.register_cube(tuple(levels))
    return SymbolicStateSet(a.model, store.exists(a.root, cid), a.universe)


def rename(a: SymbolicStateSet) -> SymbolicStateSet:
    """Swap the current and next ranks (an involution)."""
    if a.universe == "pair":
        raise ValueError("renaming a relation over both ranks is ambiguous")
    flipped = "next" if a.universe == "current" else "current"
    return SymbolicStateSet(a.model, a.model.store.swap_pairs(a.root), flipped)


def sat_count(a: SymbolicStateSet, levels=None) -> int:
    model = a.model
    if levels is None:
        levels = model.cur_levels if a.universe == "current" else model.next_levels
    cid = model.store.register_cube(tuple(levels))
    return model.store.sat_count(a.root, cid)


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

@dataclass(eq=False)  # identity semantics; groups are per-model singletons
class _Group:
    """One encoded state component: a location pointer or a variable."""

    kind: str  # 'loc' | 'var'
    index: int  # automaton or variable index
    pair_start: int
    width: int
    size: int  # number of legal values


@dataclass
class SymEvent:
    index: int
    name: str
    controllable: bool
    relation: int
    plant_enabled: int
    restriction_enabled: int  # requirement/supervisor participants
    conditions: int
    overflow: int
    overflow_what: str = ""


class SymbolicModel:
    def __init__(self, spec: m.ResolvedSpec, order: str = "affinity"):
        self.spec = spec
        self.store = BDD()
        self.order = list(range(len(spec.automata))) if order == "decl" \
            else _affinity_order(spec)
        self.groups: list[_Group] = []
        self.loc_group: list[_Group | None] = [None] * len(spec.automata)
        self.var_group: dict[int, _Group] = {}
        pair = 0
        for ai in self.order:
            aut = spec.automata[ai]
            nlocs = len(aut.locations)
            if nlocs > 1:
                width = max(1, math.ceil(math.log2(nlocs)))
                group = _Group("loc", ai, pair, width, nlocs)
                self.loc_group[ai] = group
                self.groups.append(group)
                pair += width
            for vi in aut.own_vars:
                dom = spec.variables[vi].domain
                width = max(1, math.ceil(math.log2(dom.size)))
                group = _Group("var", vi, pair, width, dom.size)
                self.var_group[vi] = group
                self.groups.append(group)
                pair += width
        self.pairs = pair
        self.store.add_levels(2 * pair)
        self.cur_levels = tuple(2 * p for p in range(pair))
        self.next_levels = tuple(2 * p + 1 for p in range(pair))
        self.cur_cube = self.store.register_cube(self.cur_levels)
        self.next_cube = self.store.register_cube(self.next_levels)
        self.relation_cube = self.store.register_cube(self.cur_levels + self.next_levels)
        self.level_group = {}
        for g in self.groups:
            for i in range(g.width):
                self.level_group[2 * (g.pair_start + i)] = (g, i)

        self.domain_valid = self._domain_validity(0)
        self.identities = [self._identity(ai) for ai in range(len(spec.automata))]
        self.legal = self.domain_valid
        for inv in spec.plant_invariants:
            self.legal = self.store.apply_and(self.legal, self._bool(inv, 0))
        self.legal_next = self.store.swap_pairs(self.legal)
        self.initial = self._initial()
        self.marked = self._marked()
        self.req_invariant = self.store.TRUE
        for inv in spec.requirement_invariants:
            self.req_invariant = self.store.apply_and(self.req_invariant, self._bool(inv, 0))
        self.events = [self._event(ei) for ei in range(len(spec.events))]
        self.bad = self._bad()

    # -- bit helpers -----------------------------------------------------------

    def _levels(self, group: _Group, rank: int):
        return [2 * (group.pair_start + i) + rank for i in range(group.width)]

    def _eq(self, group: _Group, offset: int, rank: int) -> int:
        literals = {lvl: bool((offset >> i) & 1)
                    for i, lvl in enumerate(self._levels(group, rank))}
        return self.store.cube(literals)

    def _lt(self, group: _Group, bound: int, rank: int) -> int:
        """offset < bound over the group's bits of the given rank."""
        if bound >= 1 << group.width:
            return self.store.TRUE
        levels = self._levels(group, rank)
        node = self.store.FALSE  # strictly-below accumulator, LSB upward
        for i, lvl in enumerate(levels):
            bit = (bound >> i) & 1
            v = self.store.var(lvl)
            nv = self.store.neg(v)
            if bit:
                node = self.store.apply_or(nv, self.store.apply_and(v, node))
            else:
                node = self.store.apply_and(nv, node)
        return node

    def _identity(self, ai: int) -> int:
        node = self.store.TRUE
        groups = [g for g in self.groups
                  if (g.kind == "loc" and g.index == ai)
                  or (g.kind == "var" and g.index in self.spec.automata[ai].own_vars)]
        for g in groups:
            for i in range(g.width):
                cur = self.store.var(2 * (g.pair_start + i))
                nxt = self.store.var(2 * (g.pair_start + i) + 1)
                node = self.store.apply_and(node, self.store.neg(self.store.apply_xor(cur, nxt)))
        return node

    def _domain_validity(self, rank: int) -> int:
        node = self.store.TRUE
        for g in self.groups:
            if g.size < (1 << g.width):
                node = self.store.apply_and(node, self._lt(g, g.size, rank))
        return node

    def _var_offset(self, vi: int, value) -> int:
        dom = self.spec.variables[vi].domain
        if isinstance(dom, m.BoolDomain):
            return int(value)
        if isinstance(dom, m.IntDomain):
            return value - dom.lower
        return value  # enum literal index

    def var_eq(self, vi: int, value, rank: int = 0) -> int:
        return self._eq(self.var_group[vi], self._var_offset(vi, value), rank)

    def loc_eq(self, ai: int, loc: int, rank: int = 0) -> int:
        group = self.loc_group[ai]
        if group is None:
            return self.store.TRUE
        return self._eq(group, loc, rank)

    # -- expressions -------------------------------------------------------------

    def _expr(self, e: m.RExpr, rank: int):
        """bool expressions become a node; int expressions a partition list."""
        store = self.store
        if isinstance(e, m.RLit):
            if e.ty == "bool":
                return store.TRUE if e.value else store.FALSE
            return [(store.TRUE, e.value)]
        if isinstance(e, m.RVar):
            dom = self.spec.variables[e.var].domain
            if isinstance(dom, m.BoolDomain):
                g = self.var_group[e.var]
                return store.var(self._levels(g, rank)[0])
            return [(self.var_eq(e.var, v, rank), v) for v in dom.values()]
        if isinstance(e, m.RLoc):
            return self.loc_eq(e.aut, e.loc, rank)
        if isinstance(e, m.RUn):
            inner = self._expr(e.operand, rank)
            if e.op == "not":
                return store.neg(inner)
            return [(c, -v) for c, v in inner]
        if isinstance(e, m.RIf):
            cond = self._expr(e.cond, rank)
            a = self._expr(e.then, rank)
            b = self._expr(e.orelse, rank)
            if isinstance(a, int):
                return store.ite(cond, a, b)
            ncond = store.neg(cond)
            return self._merge(
                [(store.apply_and(cond, c), v) for c, v in a]
                + [(store.apply_and(ncond, c), v) for c, v in b])
        assert isinstance(e, m.RBin)
        op = e.op
        if op in ("and", "or", "=>", "<=>") or (
                op in ("=", "!=") and e.left.ty == "bool"):
            a = self._expr(e.left, rank)
            b = self._expr(e.right, rank)
            if op == "and":
                return store.apply_and(a, b)
            if op == "or":
                return store.apply_or(a, b)
            if op == "=>":
                return store.apply_or(store.neg(a), b)
            if op in ("<=>", "="):
                return store.neg(store.apply_xor(a, b))
            return store.apply_xor(a, b)
        a = self._expr(e.left, rank)
        b = self._expr(e.right, rank)
        if op in ("+", "-", "*"):
            if len(a) * len(b) > _PARTITION_CAP:
                raise ResolveError(
                    "domain too large for configured bit budget "
                    f"({len(a)}x{len(b)} value partitions)")
            fn = {"+": lambda x, y: x + y, "-": lambda x, y: x - y,
                  "*": lambda x, y: x * y}[op]
            return self._merge([(store.apply_and(ca, cb), fn(va, vb))
                                for ca, va in a for cb, vb in b])
        cmp = {"=": lambda x, y: x == y, "!=": lambda x, y: x != y,
               "<": lambda x, y: x < y, "<=": lambda x, y: x <= y,
               ">": lambda x, y: x > y, ">=": lambda x, y: x >= y}[op]
        node = store.FALSE
        for ca, va in a:
            for cb, vb in b:
                if cmp(va, vb):
                    node = store.apply_or(node, store.apply_and(ca, cb))
        return node

    def _merge(self, parts):
        by_value: dict[int, int] = {}
        for cond, value in parts:
            if cond != self.store.FALSE:
                by_value[value] = self.store.apply_or(by_value.get(value, self.store.FALSE), cond)
        return [(cond, value) for value, cond in sorted(by_value.items())]

    def _bool(self, e: m.RExpr, rank: int) -> int:
        node = self._expr(e, rank)
        assert isinstance(node, int), "expected a boolean expression"
        return node

    # -- structural predicates ------------------------------------------------------

    def _initial(self) -> int:
        store = self.store
        node = store.TRUE
        for ai, aut in enumerate(self.spec.automata):
            if aut.kind == "supervisor" and not aut.initials:
                continue
            options = store.FALSE
            for li, pred in aut.initials:
                option = self.loc_eq(ai, li)
                if pred is not None:
                    option = store.apply_and(option, self._bool(pred, 0))
                options = store.apply_or(options, option)
            node = store.apply_and(node, options)
        for vi, var in enumerate(self.spec.variables):
            if var.init is None:
                continue  # in any: every legal value
            options = store.FALSE
            for value in var.init:
                options = store.apply_or(options, self.var_eq(vi, value))
            node = store.apply_and(node, options)
        return store.apply_and(node, self.legal)

    def _marked(self) -> int:
        store = self.store
        node = store.TRUE
        for ai, aut in enumerate(self.spec.automata):
            options = store.FALSE
            for li in aut.marked:
                options = store.apply_or(options, self.loc_eq(ai, li))
            node = store.apply_and(node, options)
        return store.apply_and(node, self.legal)

    # -- events ------------------------------------------------------------------------

    def _edge_relation(self, ai: int, edge: m.REdge):
        store = self.store
        rel = self.loc_eq(ai, edge.source, 0)
        if edge.guard is not None:
            rel = store.apply_and(rel, self._bool(edge.guard, 0))
        enabled = rel
        rel = store.apply_and(rel, self.loc_eq(ai, edge.target, 1))
        overflow = store.FALSE
        written = set()
        for vi, expr in edge.updates:
            written.add(vi)
            dom = self.spec.variables[vi].domain
            value = self._expr(expr, 0)
            if isinstance(value, int):  # boolean expression
                value = [(value, True), (store.neg(value), False)]
            assign = store.FALSE
            for cond, v in value:
                ok = (isinstance(dom, m.BoolDomain) and isinstance(v, bool)) or \
                     (not isinstance(dom, m.BoolDomain) and dom.contains(v))
                if ok:
                    assign = store.apply_or(assign,
                                            store.apply_and(cond, self.var_eq(vi, v, 1)))
                else:
                    overflow = store.apply_or(overflow, cond)
            rel = store.apply_and(rel, assign)
        for vi in self.spec.automata[ai].own_vars:
            if vi not in written:
                g = self.var_group[vi]
                for i in range(g.width):
                    cur = store.var(2 * (g.pair_start + i))
                    nxt = store.var(2 * (g.pair_start + i) + 1)
                    rel = store.apply_and(rel, store.neg(store.apply_xor(cur, nxt)))
        return rel, enabled, store.apply_and(enabled, overflow)

    def _event(self, ei: int) -> SymEvent:
        store = self.store
        spec = self.spec
        rel = store.TRUE
        plant_enabled = store.TRUE
        restriction_enabled = store.TRUE
        overflow = store.FALSE
        overflow_what = ""
        participants = 0
        for ai, aut in enumerate(spec.automata):
            if ei not in aut.alphabet:
                rel = store.apply_and(rel, self.identities[ai])
                continue
            participants += 1
            part_rel = store.FALSE
            part_enabled = store.FALSE
            for edge in aut.edges:
                if edge.event != ei:
                    continue
                erel, een, eover = self._edge_relation(ai, edge)
                part_rel = store.apply_or(part_rel, erel)
                part_enabled = store.apply_or(part_enabled, een)
                if eover != store.FALSE and not overflow_what:
                    overflow_what = f"'{spec.variables[edge.updates[0][0]].name}' on {edge.label}"
                overflow = store.apply_or(overflow, eover)
            if aut.monitor:
                stay = store.apply_and(store.neg(part_enabled), self.identities[ai])
                part_rel = store.apply_or(part_rel, stay)
            else:
                if aut.kind == "plant":
                    plant_enabled = store.apply_and(plant_enabled, part_enabled)
                else:
                    restriction_enabled = store.apply_and(restriction_enabled, part_enabled)
            rel = store.apply_and(rel, part_rel)
        if participants == 0:
            # declared but never used: the event cannot occur
            return SymEvent(ei, spec.events[ei].name, spec.events[ei].controllable,
                            store.FALSE, store.FALSE, store.TRUE, store.TRUE,
                            store.FALSE)
        conditions = store.TRUE
        for cond in spec.event_conditions.get(ei, ()):
            conditions = store.apply_and(conditions, self._bool(cond, 0))
        ev = spec.events[ei]
        # conditions restrict the transitions of every event; for uncontrollable
        # ones the separate bad-state rule additionally flags the source states
        rel = store.apply_and(rel, conditions)
        rel = store.apply_and(rel, self.legal)
        rel = store.apply_and(rel, self.legal_next)
        joint = store.apply_and(plant_enabled, restriction_enabled)
        if ev.controllable:
            joint = store.apply_and(joint, conditions)
        overflow = store.apply_and(overflow, joint)
        return SymEvent(ei, ev.name, ev.controllable, rel, plant_enabled,
                        restriction_enabled, conditions, overflow, overflow_what)

    def _bad(self) -> int:
        """States synthesis must avoid: a requirement invariant fails, or an
        uncontrollable event is plant-enabled but requirement-disabled."""
        store = self.store
        node = store.apply_and(self.legal, store.neg(self.req_invariant))
        for ev in self.events:
            if ev.controllable:
                continue
            blocked = store.apply_or(store.neg(ev.restriction_enabled),
                                     store.neg(ev.conditions))
            node = store.apply_or(node, store.apply_and(
                self.legal, store.apply_and(ev.plant_enabled, blocked)))
        return node

    # -- images -----------------------------------------------------------------------------

    def image(self, ev: SymEvent, states: int) -> int:
        nxt = self.store.and_exists(ev.relation, states, self.cur_cube)
        return self.store.swap_pairs(nxt)

    def preimage(self, ev: SymEvent, states: int) -> int:
        return self.store.and_exists(ev.relation, self.store.swap_pairs(states),
                                     self.next_cube)

    def state_cube(self, compiled, state: tuple) -> int:
        """Encode one explicit state (from a CompiledModel over the same spec)."""
        node = self.store.TRUE
        for ai in range(len(self.spec.automata)):
            slot = compiled.aut_slot[ai]
            if slot is not None:
                node = self.store.apply_and(node, self.loc_eq(ai, state[slot]))
        for vi, vslot in compiled.var_slot.items():
            node = self.store.apply_and(node, self.var_eq(vi, state[vslot]))
        return node

    def states_bdd(self, compiled, states) -> int:
        node = self.store.FALSE
        for s in states:
            node = self.store.apply_or(node, self.state_cube(compiled, s))
        return node

    def check_overflow(self, reachable: int):
        for ev in self.events:
            if ev.overflow != self.store.FALSE:
                hit = self.store.apply_and(reachable, ev.overflow)
                if hit != self.store.FALSE:
                    raise StepError(
                        f"update drives {ev.overflow_what or ev.name} out of its domain")


def _affinity_order(spec: m.ResolvedSpec) -> list[int]:
    """Declaration order, except feature-like automata (single location, one
    boolean variable) move to just before the first automaton that reads them."""
    n = len(spec.automata)
    reads: list[set[int]] = [set() for _ in range(n)]
    for ai, aut in enumerate(spec.automata):
        exprs = [e.guard for e in aut.edges if e.guard is not None]
        exprs += [pred for _, pred in aut.initials if pred is not None]
        exprs += [expr for e in aut.edges for _, expr in e.updates]
        for expr in exprs:
            for vi in m.expr_vars(expr):
                reads[ai].add(spec.variables[vi].owner)
            for (oa, _) in m.expr_locrefs(expr):
                reads[ai].add(oa)
    feature_like = {
        ai for ai, aut in enumerate(spec.automata)
        if len(aut.locations) == 1 and len(aut.own_vars) == 1
        and isinstance(spec.variables[aut.own_vars[0]].domain, m.BoolDomain)
    }
    order = list(range(n))
    for fi in sorted(feature_like):
        readers = [ai for ai in range(n) if ai != fi and fi in reads[ai]]
        if not readers:
            continue
        first = min(readers, key=order.index)
        if order.index(first) > order.index(fi):
            order.remove(fi)
            order.insert(order.index(first), fi)
    return order


def encode(spec: m.ResolvedSpec, order: str = "affinity") -> SymbolicModel:
    return SymbolicModel(spec, order)


# ---------------------------------------------------------------------------
# Fixpoints
# ---------------------------------------------------------------------------

def reachable(model: SymbolicModel, metrics: EffortMetrics | None = None) -> int:
    """Least fixpoint of the per-event images from the initial set.

    Events are chained within a pass (each image applies to the set grown so
    far), which converges in few passes on loosely coupled systems without
    changing the fixpoint."""
    store = model.store
    r = model.initial
    changed = True
    while changed:
        changed = False
        for ev in model.events:
            new = store.apply_diff(model.image(ev, r), r)
            if new != store.FALSE:
                r = store.apply_or(r, new)
                changed = True
        if metrics is not None:
            metrics.iterations += 1
    model.check_overflow(r)
    if metrics is not None:
        metrics.snapshot(store)
    return r


def coreachable(model: SymbolicModel, targets: int, within: int,
                metrics: EffortMetrics | None = None) -> int:
    store = model.store
    c = store.apply_and(targets, within)
    changed = True
    while changed:
        changed = False
        for ev in model.events:
            new = store.apply_diff(store.apply_and(model.preimage(ev, c), within), c)
            if new != store.FALSE:
                c = store.apply_or(c, new)
                changed = True
        if metrics is not None:
            metrics.iterations += 1
    return c


def predicate_dump(model: SymbolicModel, result: "SymbolicSynthesisResult") -> str:
    """Machine-readable dump of the synthesis predicates.

    Comment lines map levels to encoded bits and name the roots; the node
    lines are ``id level low high`` (0/1 are the terminals), loadable into any
    store via BDD.load for cross-engine diffing.
    """
    lines = ["# fsc predicate dump"]
    for group in model.groups:
        if group.kind == "loc":
            name = model.spec.automata[group.index].name + ".<location>"
        else:
            name = model.spec.variables[group.index].name
        for i in range(group.width):
            base = 2 * (group.pair_start + i)
            lines.append(f"# level {base} {name} bit {i}")
            lines.append(f"# level {base + 1} {name} bit {i} next")
    roots = [result.good, result.reachable, result.controlled_reachable]
    names = ["good", "reachable", "controlled"]
    for ev in model.events:
        if ev.controllable:
            roots.append(result.allowed[ev.index])
            names.append(f"allowed {ev.name}")
    for name, root in zip(names, roots):
        lines.append(f"# root {root} {name}")
    return "\n".join(lines) + "\n" + model.store.dump(roots)


def reachable_stats(model: SymbolicModel) -> dict:
    """Counts for the uncontrolled (but requirement-composed) system."""
    store = model.store
    metrics = EffortMetrics()
    r = reachable(model, metrics)
    per_event: dict[str, int] = {}
    total = 0
    for ev in model.events:
        count = store.sat_count(store.apply_and(ev.relation, r), model.relation_cube)
        if count:
            per_event[ev.name] = count
            total += count
    metrics.snapshot(store)
    return {
        "states": store.sat_count(r, model.cur_cube),
        "transitions": total,
        "initial": store.sat_count(model.initial, model.cur_cube),
        "marked": store.sat_count(store.apply_and(model.marked, r), model.cur_cube),
        "per_event": per_event,
        "metrics": metrics,
    }


@dataclass
class SymbolicSynthesisResult:
    good: int  # over current rank, restricted to reachable states
    reachable: int
    controlled_reachable: int
    allowed: dict[int, int]  # controllable event -> pre-state predicate
    controlled_states: int
    controlled_transitions: int
    per_event_transitions: dict[str, int]
    empty: bool
    metrics: EffortMetrics
    iterations: int
    good_sizes: list[int] = field(default_factory=list)


def _coreachable_keepable(model: SymbolicModel, g: int, r: int,
                          metrics: EffortMetrics | None) -> int:
    """Coreachability within ``g`` over transitions a supervisor can keep: a
    controllable step counts only from states where every nondeterministic
    successor of the event stays in ``g``."""
    store = model.store
    outside = store.apply_diff(r, g)
    keep = {}
    for ev in model.events:
        if ev.controllable:
            keep[ev.index] = store.neg(model.preimage(ev, outside))
    c = store.apply_and(model.marked, g)
    changed = True
    while changed:
        changed = False
        for ev in model.events:
            pre = model.preimage(ev, c)
            if ev.controllable:
                pre = store.apply_and(pre, keep[ev.index])
            new = store.apply_diff(store.apply_and(pre, g), c)
            if new != store.FALSE:
                c = store.apply_or(c, new)
                changed = True
        if metrics is not None:
            metrics.iterations += 1
    return c


def symbolic_synthesize(model: SymbolicModel,
                        gc_threshold: int = 2_000_000) -> SymbolicSynthesisResult:
    """Greatest fixpoint of coreachability and uncontrollable-safety trimming,
    then guards, the controlled reachable set, and exact counts."""
    store = model.store
    metrics = EffortMetrics()
    r = reachable(model, metrics)
    g = store.apply_diff(r, model.bad)
    unctrl = [ev for ev in model.events if not ev.controllable]
    iterations = 0
    good_sizes: list[int] = []
    while True:
        iterations += 1
        g1 = _coreachable_keepable(model, g, r, metrics)
        outside = store.apply_diff(r, g1)
        escape = store.FALSE
        for ev in unctrl:
            escape = store.apply_or(escape, model.preimage(ev, outside))
        g2 = store.apply_diff(g1, escape)
        good_sizes.append(store.sat_count(g2, model.cur_cube))
        if g2 == g:
            break
        g = g2
        if store.node_count() > gc_threshold:
            g, r = _collect(model, [g, r])
    metrics.iterations += iterations
    allowed: dict[int, int] = {}
    controlled_relations = []
    for ev in model.events:
        if ev.controllable:
            bad_pre = model.preimage(ev, store.apply_diff(r, g))
            ok = store.apply_and(g, store.neg(bad_pre))
            allowed[ev.index] = ok
            controlled_relations.append((ev, store.apply_and(ev.relation, ok)))
        else:
            controlled_relations.append((ev, store.apply_and(ev.relation, g)))
    init = store.apply_and(model.initial, g)
    empty = init == store.FALSE
    rc = init
    changed = True
    while changed:
        changed = False
        for ev, rel in controlled_relations:
            nxt = store.swap_pairs(store.and_exists(rel, rc, model.cur_cube))
            new = store.apply_diff(nxt, rc)
            if new != store.FALSE:
                rc = store.apply_or(rc, new)
                changed = True
        metrics.iterations += 1
    per_event: dict[str, int] = {}
    total = 0
    for ev, rel in controlled_relations:
        count = store.sat_count(store.apply_and(rel, rc), model.relation_cube)
        if count:
            per_event[ev.name] = count
            total += count
    metrics.snapshot(store)
    return SymbolicSynthesisResult(
        good=g, reachable=r, controlled_reachable=rc, allowed=allowed,
        controlled_states=store.sat_count(rc, model.cur_cube),
        controlled_transitions=total, per_event_transitions=per_event,
        empty=empty, metrics=metrics, iterations=iterations, good_sizes=good_sizes)


def _collect(model: SymbolicModel, extra: list[int]) -> list[int]:
    """Epoch sweep between fixpoint iterations; remaps the model in place and
    returns the remapped extra roots."""
    store = model.store
    roots = [model.legal, model.legal_next, model.initial, model.marked,
             model.bad, model.domain_valid, model.req_invariant]
    roots += model.identities
    for ev in model.events:
        roots += [ev.relation, ev.plant_enabled, ev.restriction_enabled,
                  ev.conditions, ev.overflow]
    roots += extra
    remap = store.collect(roots)
    model.legal = remap[model.legal]
    model.legal_next = remap[model.legal_next]
    model.initial = remap[model.initial]
    model.marked = remap[model.marked]
    model.bad = remap[model.bad]
    model.domain_valid = remap[model.domain_valid]
    model.req_invariant = remap[model.req_invariant]
    model.identities = [remap[i] for i in model.identities]
    for ev in model.events:
        ev.relation = remap[ev.relation]
        ev.plant_enabled = remap[ev.plant_enabled]
        ev.restriction_enabled = remap[ev.restriction_enabled]
        ev.conditions = remap[ev.conditions]
        ev.overflow = remap[ev.overflow]
    return [remap[x] for x in extra]


# ---------------------------------------------------------------------------
# Guard expressions from predicates
# ---------------------------------------------------------------------------

def guard_expression(model: SymbolicModel, allowed: int, care: int) -> ast.Expr:
    """An irredundant sum-of-products equivalent to ``allowed`` wherever
    ``care`` holds, printed over location references and variable comparisons."""
    store = model.store
    care = store.apply_and(care, model.domain_valid)
    if store.apply_diff(care, allowed) == store.FALSE:
        return ast.Lit(True)
    if store.apply_and(care, allowed) == store.FALSE:
        return ast.Lit(False)
    lower = store.apply_and(allowed, care)
    upper = store.apply_or(allowed, store.neg(care))
    _, cubes = store.isop(lower, upper)
    terms = []
    for cube in cubes:
        values = _cube_values(model, dict(cube))
        if values is not None:
            terms.append(values)
    terms = _merge_terms(terms)
    if any(not term for term in terms):
        return ast.Lit(True)
    if not terms:
        return ast.Lit(False)
    exprs = []
    for term in terms:
        atoms = [_group_atom(model.spec, group, sorted(values))
                 for group, values in term.items()]
        exprs.append(_and_all(atoms))
    expr = exprs[0]
    for t in exprs[1:]:
        expr = ast.Binary("or", expr, t)
    return expr


def _merge_terms(terms):
    """Union value sets of terms that agree on every other variable; bit-level
    cubes of one variable otherwise splinter into several comparisons."""
    terms = [dict(t) for t in terms]
    merged = True
    while merged:
        merged = False
        out = []
        used = [False] * len(terms)
        for i, a in enumerate(terms):
            if used[i]:
                continue
            for j in range(i + 1, len(terms)):
                if used[j]:
                    continue
                b = terms[j]
                diff = [g for g in set(a) | set(b)
                        if a.get(g) != b.get(g)]
                if len(diff) == 1 and diff[0] in a and diff[0] in b:
                    group = diff[0]
                    a[group] = a[group] | b[group]
                    if len(a[group]) == group.size:
                        del a[group]
                    used[j] = True
                    merged = True
            out.append(a)
        terms = out
    # drop terms covered by a more general one (ties keep the earlier term)
    result = []
    for i, a in enumerate(terms):
        subsumed = False
        for j, b in enumerate(terms):
            if i == j:
                continue
            if all(g in a and a[g] <= b[g] for g in b) and (a != b or j < i):
                subsumed = True
                break
        if not subsumed:
            result.append(a)
    return result


def _and_all(atoms):
    expr = atoms[0]
    for a in atoms[1:]:
        expr = ast.Binary("and", expr, a)
    return expr


def _cube_values(model: SymbolicModel, literals: dict[int, bool]):
    """Cube -> {group: consistent value set}; None for illegal-only cubes."""
    by_group: dict[int, tuple[_Group, dict[int, bool]]] = {}
    for level, polarity in literals.items():
        assert level % 2 == 0, "guards are current-state predicates"
        group, bit = model.level_group[level]
        by_group.setdefault(id(group), (group, {}))[1][bit] = polarity
    term: dict[_Group, frozenset[int]] = {}
    for group, bits in by_group.values():
        values = frozenset(
            v for v in range(group.size)
            if all(bool((v >> bit) & 1) == pol for bit, pol in bits.items()))
        if len(values) == group.size:
            continue
        if not values:
            return None  # cube only hits illegal encodings
        term[group] = values
    return term


def _group_atom(spec: m.ResolvedSpec, group: _Group, values: list[int]) -> ast.Expr:
    if group.kind == "loc":
        aut = spec.automata[group.index]
        refs = [ast.Name((aut.name, aut.locations[v])) for v in values]
        if len(values) == 1:
            return refs[0]
        if len(values) == group.size - 1:
            missing = next(v for v in range(group.size) if v not in values)
            return ast.Unary("not", ast.Name((aut.name, aut.locations[missing])))
        expr = refs[0]
        for ref in refs[1:]:
            expr = ast.Binary("or", expr, ref)
        return expr
    var = spec.variables[group.index]
    name = ast.Name(tuple(var.name.split(".")))
    dom = var.domain
    if isinstance(dom, m.BoolDomain):
        return name if values == [1] else ast.Unary("not", name)
    if isinstance(dom, m.EnumDomain):
        lits = [ast.Binary("=", name, ast.Name((dom.literals[v],))) for v in values]
        if len(values) == dom.size - 1:
            missing = next(v for v in range(dom.size) if v not in values)
            return ast.Binary("!=", name, ast.Name((dom.literals[missing],)))
        expr = lits[0]
        for lit in lits[1:]:
            expr = ast.Binary("or", expr, lit)
        return expr
    actual = sorted(dom.lower + v for v in values)
    if len(actual) == 1:
        return ast.Binary("=", name, ast.Lit(actual[0]))
    if len(actual) == dom.size - 1:
        missing = next(v for v in dom.values() if v not in actual)
        return ast.Binary("!=", name, ast.Lit(missing))
    if actual == list(range(actual[0], actual[-1] + 1)):
        if actual[0] == dom.lower:
            return ast.Binary("<=", name, ast.Lit(actual[-1]))
        if actual[-1] == dom.upper:
            return ast.Binary(">=", name, ast.Lit(actual[0]))
        return ast.Binary("and", ast.Binary(">=", name, ast.Lit(actual[0])),
                          ast.Binary("<=", name, ast.Lit(actual[-1])))
    expr = ast.Binary("=", name, ast.Lit(actual[0]))
    for v in actual[1:]:
        expr = ast.Binary("or", expr, ast.Binary("=", name, ast.Lit(v)))
    return expr
