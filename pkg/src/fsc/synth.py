"""Supervisory controller synthesis.

The control problem composes plant automata with requirement automata and
event conditions. Requirements restrict controllable events outright; a state
where some plant-enabled uncontrollable event is requirement-disabled is bad
(the supervisor must keep the system away from it, since it cannot block the
event itself). The synthesized good-state set is the greatest fixpoint that
is coreachable to marked states and closed under uncontrollable transitions;
it is the unique maximally permissive safe, nonblocking, controllable result.

Guards: a controllable event stays enabled at a good state iff every joint
successor lies in the good set. Printed guards are minimized against the
reachable controlled states (everything else is don't-care), so they come out
in the compact shape a reviewer expects.
"""

from __future__ import annotations

import random
from array import array
from dataclasses import dataclass, field

from fsc import model as m
from fsc import symbolic as sym
from fsc.errors import BudgetError, ResolveError
from fsc.lang import syntax as ast
from fsc.lang.printer import format_expr
from fsc.semantics import DEFAULT_BUDGET, STAY, CompiledModel


@dataclass
class ControlProblem:
    spec: m.ResolvedSpec
    compiled: CompiledModel
    plant_automata: list[int]
    requirement_automata: list[int]
    invariants: list[m.RExpr]  # requirement state invariants
    guard_conditions: dict[int, list[m.RExpr]]  # conditions on controllable events
    unctrl_conditions: dict[int, list[m.RExpr]]  # conditions feeding the bad-state rule


def normalize(spec: m.ResolvedSpec) -> ControlProblem:
    """Classify requirements into guard conjuncts, bad-state contributions and
    synchronized requirement automata."""
    compiled = CompiledModel(spec)
    plant, req = [], []
    for ai, aut in enumerate(spec.automata):
        if aut.kind == "plant":
            plant.append(ai)
        else:
            req.append(ai)
        if aut.kind == "requirement":
            _static_determinism_check(spec, aut)
    guard_conditions: dict[int, list[m.RExpr]] = {}
    unctrl_conditions: dict[int, list[m.RExpr]] = {}
    for ei, conds in spec.event_conditions.items():
        if spec.events[ei].controllable:
            guard_conditions[ei] = list(conds)
        else:
            unctrl_conditions[ei] = list(conds)
    return ControlProblem(spec, compiled, plant, req,
                          list(spec.requirement_invariants),
                          guard_conditions, unctrl_conditions)


def _static_determinism_check(spec: m.ResolvedSpec, aut: m.RAutomaton):
    unguarded: set[tuple[int, int]] = set()
    for edge in aut.edges:
        if edge.guard is None:
            key = (edge.source, edge.event)
            if key in unguarded:
                raise ResolveError(
                    f"nondeterministic requirement automaton '{aut.name}': two "
                    f"unguarded edges for {spec.events[edge.event].name}")
            unguarded.add(key)


# ---------------------------------------------------------------------------
# Explicit arena
# ---------------------------------------------------------------------------

@dataclass
class Arena:
    states: list[tuple]
    index: dict[tuple, int]
    initial: list[int]
    inv_bad: bytearray  # violates a requirement state invariant
    unctrl_bad: bytearray  # plant-enabled uncontrollable event requirement-disabled
    marked: bytearray
    src: array
    ev: array
    tgt: array
    # per controllable event: states where plant, requirement automata and
    # event conditions all enable it (the synthesis arena enabledness)
    enabled_ctrl: dict[int, set[int]]
    # ... and where plant and requirement automata enable it, conditions aside
    # (the don't-care basis for printing guards: conditions are folded into
    # the printed guard, requirement-automaton disablement is not)
    care_ctrl: dict[int, set[int]]

    def bad(self, si: int) -> bool:
        return bool(self.inv_bad[si] or self.unctrl_bad[si])


def build_arena(problem: ControlProblem, budget: int = DEFAULT_BUDGET) -> Arena:
    cm = problem.compiled
    spec = problem.spec
    events = spec.events
    monitor = [aut.monitor for aut in spec.automata]
    kind = [aut.kind for aut in spec.automata]
    inv_fns = [cm.compile_expr(e) for e in problem.invariants]
    guard_conds = {ei: [cm.compile_expr(c) for c in conds]
                   for ei, conds in problem.guard_conditions.items()}
    unctrl_conds = {ei: [cm.compile_expr(c) for c in conds]
                    for ei, conds in problem.unctrl_conditions.items()}

    initial = cm.initial_states(budget)
    index: dict[tuple, int] = {}
    states: list[tuple] = []
    for s in initial:
        if s not in index:
            index[s] = len(states)
            states.append(s)
    inv_bad = bytearray(len(states))
    unctrl_bad = bytearray(len(states))
    src, evs, tgt = array("q"), array("q"), array("q")
    enabled_ctrl: dict[int, set[int]] = {ei: set() for ei, e in enumerate(events)
                                         if e.controllable}
    care_ctrl: dict[int, set[int]] = {ei: set() for ei, e in enumerate(events)
                                      if e.controllable}
    pos = 0
    while pos < len(states):
        si = pos
        pos += 1
        state = states[si]
        if any(not fn(state) for fn in inv_fns):
            inv_bad[si] = 1
        for ei in cm.event_order:
            table = cm.events[ei]
            if not table.participants:  # declared but never used
                continue
            plant_ok = True
            restr_ok = True
            per_participant = []
            for part in table.participants:
                edges = cm._enabled_edges(part, state)
                if not edges:
                    if monitor[part.aut]:
                        per_participant.append((STAY,))
                        continue
                    if kind[part.aut] == "plant":
                        plant_ok = False
                        break
                    restr_ok = False
                    per_participant.append(())
                    continue
                if len(edges) > 1 and kind[part.aut] == "requirement":
                    raise ResolveError(
                        f"nondeterministic requirement automaton "
                        f"'{spec.automata[part.aut].name}' at {cm.state_text(state)}")
                per_participant.append(tuple(edges))
            if not plant_ok:
                continue
            if table.controllable:
                if not restr_ok:
                    continue
                care_ctrl[ei].add(si)
                if not all(fn(state) for fn in guard_conds.get(ei, ())):
                    continue
                enabled_ctrl[ei].add(si)
            else:
                conds_ok = all(fn(state) for fn in unctrl_conds.get(ei, ()))
                if not restr_ok or not conds_ok:
                    unctrl_bad[si] = 1  # plant-enabled but requirement-disabled
                    continue
            choices = [()]
            for options in per_participant:
                choices = [c + (o,) for c in choices for o in options]
            for choice in choices:
                target = cm.step(state, ei, choice)
                ti = index.get(target)
                if ti is None:
                    if not cm.satisfies_invariants(target):
                        continue
                    ti = len(states)
                    if ti >= budget:
                        raise BudgetError(
                            f"more than {budget} states: state space too large, "
                            "use symbolic engine")
                    index[target] = ti
                    states.append(target)
                    inv_bad.append(0)
                    unctrl_bad.append(0)
                src.append(si)
                evs.append(ei)
                tgt.append(ti)
    marked = bytearray(1 if cm.is_marked(s) else 0 for s in states)
    return Arena(states, index, [index[s] for s in initial], inv_bad, unctrl_bad,
                 marked, src, evs, tgt, enabled_ctrl, care_ctrl)


def _supremal_fixpoint(arena: Arena, controllable: list[bool]):
    """Greatest set of non-bad states, coreachable to marked within the set
    through transitions the supervisor can actually keep, with no
    uncontrollable transition leaving it. Returns (good, iterations, sizes).

    A controllable transition only supports coreachability while every
    nondeterministic sibling of its (state, event) group stays inside the set;
    otherwise the supervisor has to disable the event there.
    """
    n = len(arena.states)
    good = bytearray(0 if arena.bad(i) else 1 for i in range(n))
    ne = len(arena.src)
    # reverse adjacency by target: counting sort
    counts = [0] * (n + 1)
    for t in arena.tgt:
        counts[t + 1] += 1
    for i in range(n):
        counts[i + 1] += counts[i]
    rev_edge = array("q", bytes(8 * ne))
    fill = counts[:]
    for e in range(ne):
        t = arena.tgt[e]
        rev_edge[fill[t]] = e
        fill[t] += 1
    unctrl_edges = array("q", [e for e in range(ne) if not controllable[arena.ev[e]]])
    # controllable edges grouped by (source, event) for all-siblings-good tests
    group_of = array("q", bytes(8 * ne))
    group_targets: list[list[int]] = []
    group_index: dict[tuple[int, int], int] = {}
    for e in range(ne):
        if not controllable[arena.ev[e]]:
            group_of[e] = -1
            continue
        key = (arena.src[e], arena.ev[e])
        g = group_index.get(key)
        if g is None:
            g = len(group_targets)
            group_index[key] = g
            group_targets.append([])
        group_targets[g].append(arena.tgt[e])
        group_of[e] = g
    iterations = 0
    sizes: list[int] = []
    src, tgt = arena.src, arena.tgt
    while True:
        iterations += 1
        group_ok = bytearray(
            1 if all(good[t] for t in targets) else 0 for targets in group_targets)
        # coreachable to a marked state within good, over keepable transitions
        core = bytearray(n)
        stack = [i for i in range(n) if good[i] and arena.marked[i]]
        for i in stack:
            core[i] = 1
        while stack:
            t = stack.pop()
            for k in range(counts[t], counts[t + 1]):
                e = rev_edge[k]
                s = src[e]
                if good[s] and not core[s]:
                    g = group_of[e]
                    if g >= 0 and not group_ok[g]:
                        continue
                    core[s] = 1
                    stack.append(s)
        changed = False
        for i in range(n):
            if good[i] and not core[i]:
                good[i] = 0
                changed = True
        # uncontrollable closure: trim states that may escape
        trimmed = True
        while trimmed:
            trimmed = False
            for e in unctrl_edges:
                s = src[e]
                if good[s] and not good[tgt[e]]:
                    good[s] = 0
                    trimmed = True
                    changed = True
        sizes.append(int(sum(good)))
        if not changed:
            break
    return good, iterations, sizes


# ---------------------------------------------------------------------------
# Supervisor artifact
# ---------------------------------------------------------------------------

@dataclass
class Supervisor:
    alphabet: list[str]  # controllable events, the ones guards may restrict
    guards_ast: dict[str, ast.Expr]
    guards: dict[int, m.RExpr]  # same guards, resolved for evaluation
    good_expr: ast.Expr
    # synthesis may also rule out initial states; the supervisor carries the
    # surviving-initialization predicate
    initial_ast: ast.Expr = ast.Lit(True)
    initial: m.RExpr = m.TRUE

    def guard_text(self, event_name: str) -> str:
        return format_expr(self.guards_ast.get(event_name, ast.Lit(True)))

    def initial_text(self) -> str:
        return format_expr(self.initial_ast)


@dataclass
class SynthesisReport:
    engine: str
    controlled_states: int
    controlled_transitions: int
    iterations: int
    empty: bool
    per_event_transitions: dict[str, int] = field(default_factory=dict)
    guard_stats: dict[str, dict] = field(default_factory=dict)
    metrics: sym.EffortMetrics | None = None
    good_sizes: list[int] = field(default_factory=list)


def _resolve_guard(spec: m.ResolvedSpec, expr: ast.Expr) -> m.RExpr:
    """Resolve a guard printed by guard_expression back into evaluable form."""
    if isinstance(expr, ast.Lit):
        return m.RLit(expr.value, "bool" if isinstance(expr.value, bool) else "int")
    if isinstance(expr, ast.Unary):
        inner = _resolve_guard(spec, expr.operand)
        return m.RUn(expr.op, inner, inner.ty)
    if isinstance(expr, ast.Binary):
        left = _resolve_guard(spec, expr.left)
        right = _resolve_guard(spec, expr.right)
        ty = "bool" if expr.op not in ("+", "-", "*") else "int"
        return m.RBin(expr.op, left, right, ty)
    if isinstance(expr, ast.IfExpr):
        cond = _resolve_guard(spec, expr.cond)
        then = _resolve_guard(spec, expr.then)
        other = _resolve_guard(spec, expr.orelse)
        return m.RIf(cond, then, other, then.ty)
    if isinstance(expr, ast.Name):
        parts = expr.parts
        if len(parts) == 2:
            try:
                ai = spec.automaton_index(parts[0])
            except KeyError:
                ai = None
            if ai is not None:
                aut = spec.automata[ai]
                if parts[1] in aut.locations:
                    return m.RLoc(ai, aut.locations.index(parts[1]))
            vi = spec.variable_index(str(expr))
            dom = spec.variables[vi].domain
            ty = ("bool" if isinstance(dom, m.BoolDomain)
                  else "int" if isinstance(dom, m.IntDomain) else ("enum", dom.name))
            return m.RVar(vi, ty)
        for enum in spec.enums.values():
            if parts[0] in enum.literals:
                return m.RLit(enum.literals.index(parts[0]), ("enum", enum.name))
    raise ResolveError(f"cannot resolve guard term '{format_expr(expr)}'")


def supervisor_text(sup: Supervisor, name: str = "sup") -> str:
    lines = [f"supervisor automaton {name}:"]
    if sup.alphabet:
        lines.append("  alphabet " + ", ".join(sup.alphabet) + ";")
    lines.append("  location:")
    if sup.initial_ast == ast.Lit(True):
        lines.append("    initial;")
    else:
        lines.append(f"    initial {sup.initial_text()};")
    lines.append("    marked;")
    for event in sup.alphabet:
        lines.append(f"    edge {event} when {sup.guard_text(event)};")
    lines.append("end")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Synthesis entry points
# ---------------------------------------------------------------------------

def synthesize(problem: ControlProblem, engine: str = "explicit",
               budget: int = DEFAULT_BUDGET, order: str = "affinity"):
    """Compute the maximally permissive supervisor; returns (Supervisor, report)."""
    if engine == "symbolic":
        return _synthesize_symbolic(problem, order)
    if engine != "explicit":
        raise ValueError(f"unknown engine '{engine}'")
    return _synthesize_explicit(problem, budget, order)


def _synthesize_explicit(problem: ControlProblem, budget: int, order: str):
    spec = problem.spec
    cm = problem.compiled
    controllable = [e.controllable for e in spec.events]
    arena = build_arena(problem, budget)
    good, iterations, good_sizes = _supremal_fixpoint(arena, controllable)

    n = len(arena.states)
    ne = len(arena.src)
    succ_by_se: dict[tuple[int, int], list[int]] = {}
    out_edges: dict[int, list[int]] = {}
    for e in range(ne):
        succ_by_se.setdefault((arena.src[e], arena.ev[e]), []).append(arena.tgt[e])
        out_edges.setdefault(arena.src[e], []).append(e)

    allowed: dict[int, set[int]] = {}
    for ei, enabled in arena.enabled_ctrl.items():
        ok = set()
        for si in enabled:
            if good[si] and all(good[t] for t in succ_by_se.get((si, ei), ())):
                ok.add(si)
        allowed[ei] = ok

    init_good = [si for si in arena.initial if good[si]]
    empty = not init_good
    reach = bytearray(n)
    stack = list(dict.fromkeys(init_good))
    for si in stack:
        reach[si] = 1
    while stack:
        si = stack.pop()
        for e in out_edges.get(si, ()):
            ei = arena.ev[e]
            if controllable[ei] and si not in allowed[ei]:
                continue
            ti = arena.tgt[e]
            if not reach[ti]:
                reach[ti] = 1
                stack.append(ti)
    per_event: dict[str, int] = {}
    transitions = 0
    seen_triples = set()
    for e in range(ne):
        si = arena.src[e]
        if not reach[si]:
            continue
        ei = arena.ev[e]
        if controllable[ei] and si not in allowed[ei]:
            continue
        triple = (si, ei, arena.tgt[e])
        if triple in seen_triples:
            continue
        seen_triples.add(triple)
        name = spec.events[ei].name
        per_event[name] = per_event.get(name, 0) + 1
        transitions += 1

    sup, guard_stats = _build_guards_explicit(problem, arena, good, reach,
                                              succ_by_se, order)
    report = SynthesisReport(
        engine="explicit",
        controlled_states=int(sum(reach)),
        controlled_transitions=transitions,
        iterations=iterations,
        empty=empty,
        per_event_transitions=per_event,
        guard_stats=guard_stats,
        good_sizes=good_sizes,
    )
    return sup, report


def _build_guards_explicit(problem, arena, good, reach, succ_by_se, order):
    """Print per-event guards: the event condition conjuncts plus the
    synthesized good-state closure, minimized against the reachable controlled
    states where plant and requirement automata enable the event."""
    spec = problem.spec
    cm = problem.compiled
    cond_fns = {ei: [cm.compile_expr(c) for c in conds]
                for ei, conds in problem.guard_conditions.items()}
    model = sym.encode(spec, order=order)
    reach_bdd = model.states_bdd(cm, (arena.states[i] for i in range(len(arena.states))
                                      if reach[i]))
    good_bdd = model.states_bdd(cm, (arena.states[i] for i in range(len(arena.states))
                                     if good[i]))
    guards_ast: dict[str, ast.Expr] = {}
    guards: dict[int, m.RExpr] = {}
    stats: dict[str, dict] = {}
    alphabet = []
    for ei, ev in enumerate(spec.events):
        if not ev.controllable:
            continue
        alphabet.append(ev.name)
        care_states = [i for i in arena.care_ctrl.get(ei, ()) if reach[i]]
        fns = cond_fns.get(ei, ())
        emit_allowed = [
            i for i in care_states
            if all(fn(arena.states[i]) for fn in fns)
            and all(good[t] for t in succ_by_se.get((i, ei), ()))
        ]
        allowed_bdd = model.states_bdd(cm, (arena.states[i] for i in emit_allowed))
        care = model.states_bdd(cm, (arena.states[i] for i in care_states))
        expr = sym.guard_expression(model, allowed_bdd, care)
        guards_ast[ev.name] = expr
        guards[ei] = _resolve_guard(spec, expr)
        stats[ev.name] = {
            "allowed_states": len(emit_allowed),
            "care_states": len(care_states),
            "cubes": _cube_count(expr),
        }
    good_expr = sym.guard_expression(model, good_bdd, reach_bdd)
    init_care = model.states_bdd(cm, (arena.states[i] for i in set(arena.initial)))
    initial_ast = sym.guard_expression(model, good_bdd, init_care)
    sup = Supervisor(alphabet, guards_ast, guards, good_expr,
                     initial_ast, _resolve_guard(spec, initial_ast))
    return sup, stats


def _cube_count(expr: ast.Expr) -> int:
    if isinstance(expr, ast.Lit):
        return 0 if expr.value is False else 1
    count = 1
    node = expr
    while isinstance(node, ast.Binary) and node.op == "or":
        count += 1
        node = node.left
    return count


def _synthesize_symbolic(problem: ControlProblem, order: str):
    spec = problem.spec
    model = sym.encode(spec, order=order)
    result = sym.symbolic_synthesize(model)
    store = model.store
    guards_ast: dict[str, ast.Expr] = {}
    guards: dict[int, m.RExpr] = {}
    stats: dict[str, dict] = {}
    alphabet = []
    for ev in model.events:
        if not ev.controllable:
            continue
        alphabet.append(ev.name)
        care = store.apply_and(result.controlled_reachable,
                               store.apply_and(ev.plant_enabled, ev.restriction_enabled))
        emit = store.apply_and(ev.conditions, result.allowed[ev.index])
        expr = sym.guard_expression(model, emit, care)
        guards_ast[ev.name] = expr
        guards[ev.index] = _resolve_guard(spec, expr)
        stats[ev.name] = {
            "allowed_nodes": store.size(result.allowed[ev.index]),
            "cubes": _cube_count(expr),
        }
    good_expr = sym.guard_expression(model, result.good, result.controlled_reachable)
    initial_ast = sym.guard_expression(model, result.good, model.initial)
    sup = Supervisor(alphabet, guards_ast, guards, good_expr,
                     initial_ast, _resolve_guard(spec, initial_ast))
    report = SynthesisReport(
        engine="symbolic",
        controlled_states=result.controlled_states,
        controlled_transitions=result.controlled_transitions,
        iterations=result.iterations,
        empty=result.empty,
        per_event_transitions=result.per_event_transitions,
        guard_stats=stats,
        metrics=result.metrics,
        good_sizes=result.good_sizes,
    )
    return sup, report


# ---------------------------------------------------------------------------
# Verification of a controlled system
# ---------------------------------------------------------------------------

@dataclass
class Trace:
    events: list[str]
    state_text: str

    def __str__(self) -> str:
        path = " -> ".join(self.events) if self.events else "<initial>"
        return f"{path} reaches [{self.state_text}]"


@dataclass
class VerifyReport:
    safe: bool
    nonblocking: bool
    controllable: bool
    states: int
    transitions: int
    counterexamples: dict[str, Trace] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.safe and self.nonblocking and self.controllable


def supervisor_from_spec(spec: m.ResolvedSpec) -> Supervisor | None:
    """Extract guards from a supervisor automaton already in the model."""
    for aut in spec.automata:
        if aut.kind != "supervisor":
            continue
        guards: dict[int, m.RExpr] = {}
        guards_ast: dict[str, ast.Expr] = {}
        alphabet = []
        for ei in sorted(aut.alphabet, key=lambda i: spec.events[i].name):
            name = spec.events[ei].name
            alphabet.append(name)
            disjuncts = [e.guard if e.guard is not None else m.TRUE
                         for e in aut.edges if e.event == ei]
            guard = disjuncts[0]
            for d in disjuncts[1:]:
                guard = m.RBin("or", guard, d, "bool")
            guards[ei] = guard
            guards_ast[name] = spec.expr_to_ast(guard)
        initial = m.TRUE
        for _, pred in aut.initials:
            if pred is not None:
                initial = pred if initial is m.TRUE else m.RBin("and", initial, pred, "bool")
        return Supervisor(alphabet, guards_ast, guards, ast.Lit(True),
                          spec.expr_to_ast(initial), initial)
    return None


def _controlled_explore(problem: ControlProblem, sup: Supervisor | None,
                        budget: int):
    """Arena restricted by the supervisor guards; returns exploration tables."""
    cm = problem.compiled
    spec = problem.spec
    guard_fns = {}
    if sup is not None:
        for ei, guard in sup.guards.items():
            guard_fns[ei] = cm.compile_expr(guard)
    arena = build_arena(problem, budget)
    init_fn = None
    if sup is not None and sup.initial is not m.TRUE:
        init_fn = cm.compile_expr(sup.initial)
    reach = bytearray(len(arena.states))
    parents: dict[int, tuple[int, int]] = {}
    stack = []
    for si in arena.initial:
        if init_fn is not None and not init_fn(arena.states[si]):
            continue
        if not reach[si]:
            reach[si] = 1
            stack.append(si)
    out_edges: dict[int, list[int]] = {}
    for e in range(len(arena.src)):
        out_edges.setdefault(arena.src[e], []).append(e)
    controllable = [e.controllable for e in spec.events]
    transitions = 0
    kept_edges = []
    while stack:
        si = stack.pop()
        state = arena.states[si]
        for e in out_edges.get(si, ()):
            ei = arena.ev[e]
            if controllable[ei] and ei in guard_fns and not guard_fns[ei](state):
                continue
            kept_edges.append(e)
            ti = arena.tgt[e]
            if not reach[ti]:
                reach[ti] = 1
                parents[ti] = (si, ei)
                stack.append(ti)
    return arena, reach, parents, kept_edges, out_edges


def _trace_to(arena, parents, cm, si) -> Trace:
    events = []
    cur = si
    while cur in parents:
        prev, ei = parents[cur]
        events.append(ei)
        cur = prev
    events.reverse()
    return Trace([cm.spec.events[ei].name for ei in events], cm.state_text(arena.states[si]))


def verify_controlled(spec: m.ResolvedSpec, sup: Supervisor | None = None,
                      budget: int = DEFAULT_BUDGET) -> VerifyReport:
    """Independent checks on the explicit controlled state space: safety,
    nonblocking, controllability; failures carry counterexample traces."""
    problem = normalize(spec)
    if sup is None:
        sup = supervisor_from_spec(spec)
    cm = problem.compiled
    arena, reach, parents, kept_edges, out_edges = _controlled_explore(problem, sup, budget)
    report = VerifyReport(True, True, True, states=int(sum(reach)),
                          transitions=len({(arena.src[e], arena.ev[e], arena.tgt[e])
                                           for e in kept_edges if reach[arena.src[e]]}))
    # safety: every reachable state satisfies the requirement invariants
    for si in range(len(arena.states)):
        if reach[si] and arena.inv_bad[si]:
            report.safe = False
            report.counterexamples["safety"] = _trace_to(arena, parents, cm, si)
            break
    # controllability: every plant-enabled uncontrollable event stays enabled,
    # whether a requirement or the supervisor would be the one blocking it
    for si in range(len(arena.states)):
        if reach[si] and arena.unctrl_bad[si]:
            report.controllable = False
            report.counterexamples["controllability"] = _trace_to(arena, parents, cm, si)
            break
    if sup is not None and report.controllable:
        for ei, guard in sup.guards.items():
            if not spec.events[ei].controllable:
                fn = cm.compile_expr(guard)
                for si in range(len(arena.states)):
                    if reach[si] and not fn(arena.states[si]):
                        report.controllable = False
                        report.counterexamples["controllability"] = \
                            _trace_to(arena, parents, cm, si)
                        break
    # nonblocking: every reachable state can still reach a marked state
    n = len(arena.states)
    rev: dict[int, list[int]] = {}
    for e in kept_edges:
        if reach[arena.src[e]]:
            rev.setdefault(arena.tgt[e], []).append(arena.src[e])
    core = bytearray(n)
    stack = [i for i in range(n) if reach[i] and arena.marked[i]]
    for i in stack:
        core[i] = 1
    while stack:
        t = stack.pop()
        for s in rev.get(t, ()):
            if not core[s]:
                core[s] = 1
                stack.append(s)
    for si in range(n):
        if reach[si] and not core[si]:
            report.nonblocking = False
            report.counterexamples["nonblocking"] = _trace_to(arena, parents, cm, si)
            break
    return report


# ---------------------------------------------------------------------------
# Maximality probe
# ---------------------------------------------------------------------------

@dataclass
class MaximalityReport:
    probed: int
    removed_total: int
    readdable: list[tuple[str, str]]  # (state text, event) pairs that survive re-adding
    exhausted_budget: bool

    @property
    def ok(self) -> bool:
        return not self.readdable


def maximality_probe(spec: m.ResolvedSpec, sup: Supervisor,
                     sample_budget: int = 100000, seed: int = 0,
                     budget: int = DEFAULT_BUDGET) -> MaximalityReport:
    """Re-add each supervisor-removed controllable transition alone and check
    that safety, nonblocking or controllability breaks; anything that survives
    is a maximality bug."""
    problem = normalize(spec)
    cm = problem.compiled
    arena, reach, parents, kept_edges, out_edges = _controlled_explore(problem, sup, budget)
    controllable = [e.controllable for e in spec.events]
    guard_fns = {ei: cm.compile_expr(g) for ei, g in sup.guards.items()}
    removed: list[tuple[int, int, list[int]]] = []  # (state, event, targets)
    by_se: dict[tuple[int, int], list[int]] = {}
    for e in range(len(arena.src)):
        by_se.setdefault((arena.src[e], arena.ev[e]), []).append(arena.tgt[e])
    for (si, ei), targets in by_se.items():
        if not reach[si] or not controllable[ei]:
            continue
        fn = guard_fns.get(ei)
        if fn is not None and not fn(arena.states[si]):
            removed.append((si, ei, targets))
    rng = random.Random(seed)
    exhausted = len(removed) > sample_budget
    probes = removed if not exhausted else rng.sample(removed, sample_budget)

    # verdict per extension region: does the controlled system extended from
    # this target still satisfy all three properties?
    region_ok: dict[int, bool] = {}

    def extension_ok(start: int) -> bool:
        cached = region_ok.get(start)
        if cached is not None:
            return cached
        # forward closure from the re-added target under supervised dynamics
        new_states = []
        seen = set()
        stack = [start]
        ok = True
        while stack:
            si = stack.pop()
            if si in seen or reach[si]:
                continue
            seen.add(si)
            if arena.bad(si):
                ok = False  # safety or controllability breaks in the extension
                break
            new_states.append(si)
            state = arena.states[si]
            for e in out_edges.get(si, ()):
                ei = arena.ev[e]
                if controllable[ei]:
                    fn = guard_fns.get(ei)
                    if fn is not None and not fn(state):
                        continue
                stack.append(arena.tgt[e])
        if ok and new_states:
            # nonblocking: every new state must reach marked or the old region
            good_sink = set()
            pending = list(new_states)
            new_set = set(new_states)
            rev: dict[int, list[int]] = {}
            for si in new_states:
                state = arena.states[si]
                for e in out_edges.get(si, ()):
                    ei = arena.ev[e]
                    if controllable[ei]:
                        fn = guard_fns.get(ei)
                        if fn is not None and not fn(state):
                            continue
                    ti = arena.tgt[e]
                    if ti in new_set:
                        rev.setdefault(ti, []).append(si)
                    elif reach[ti]:
                        good_sink.add(si)
                if arena.marked[si]:
                    good_sink.add(si)
            core = set(good_sink)
            stack2 = list(good_sink)
            while stack2:
                t = stack2.pop()
                for s in rev.get(t, ()):
                    if s not in core:
                        core.add(s)
                        stack2.append(s)
            if new_set - core:
                ok = False  # some extension state blocks
        region_ok[start] = ok
        return ok

    readdable = []
    for si, ei, targets in probes:
        if all(extension_ok(t) for t in targets):
            readdable.append((cm.state_text(arena.states[si]), spec.events[ei].name))
    return MaximalityReport(len(probes), len(removed), readdable, exhausted)
