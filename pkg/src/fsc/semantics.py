"""Executable semantics for resolved models.

A state is a tuple: one slot per multi-location automaton (its location index)
and one slot per discrete variable, in declaration order. Guards, updates and
predicates are compiled to Python lambdas over that tuple, which keeps
explicit exploration fast enough for interactive use.

Synchronous composition: an event occurs iff every non-monitor automaton with
the event in its alphabet has an enabled edge; monitor automata follow an
enabled edge when one exists and stay put otherwise, never blocking. Updates
read the pre-state only. States violating a plant invariant are never created.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from fsc import model as m
from fsc.errors import BudgetError, EvalError, StepError

DEFAULT_BUDGET = 5_000_000

STAY = None  # a monitor's "no matching edge" choice


@dataclass
class CompiledEdge:
    aut: int
    event: int
    source: int
    target: int
    guard: object  # callable(state) -> bool, or None for true
    updates: tuple  # ((slot, fn, domain, var_name), ...)
    label: str


@dataclass
class Participant:
    aut: int
    monitor: bool
    edges_by_loc: dict[int, list[CompiledEdge]]


@dataclass
class EventTable:
    index: int
    name: str
    controllable: bool
    participants: list[Participant]
    conditions: tuple  # compiled event-condition conjuncts


class CompiledModel:
    """Resolved spec with compiled guards and per-event participant tables."""

    def __init__(self, spec: m.ResolvedSpec):
        self.spec = spec
        self.aut_slot: list[int | None] = []
        self.var_slot: dict[int, int] = {}
        self.slot_names: list[str] = []
        slot = 0
        for ai, aut in enumerate(spec.automata):
            if len(aut.locations) > 1:
                self.aut_slot.append(slot)
                self.slot_names.append(aut.name)
                slot += 1
            else:
                self.aut_slot.append(None)
            for vi in aut.own_vars:
                self.var_slot[vi] = slot
                self.slot_names.append(spec.variables[vi].name)
                slot += 1
        self.nslots = slot
        self._expr_cache: dict[m.RExpr, object] = {}
        self.plant_invariants = [self.compile_expr(e) for e in spec.plant_invariants]
        self.events = [self._event_table(ei) for ei in range(len(spec.events))]
        self.event_order = sorted(range(len(spec.events)),
                                  key=lambda ei: spec.events[ei].name)
        self._marked_locs = [aut.marked for aut in spec.automata]

    # -- expression compilation ------------------------------------------------

    def _gen(self, e: m.RExpr) -> str:
        if isinstance(e, m.RLit):
            return repr(e.value)
        if isinstance(e, m.RVar):
            return f"s[{self.var_slot[e.var]}]"
        if isinstance(e, m.RLoc):
            slot = self.aut_slot[e.aut]
            if slot is None:
                return "True"
            return f"(s[{slot}] == {e.loc})"
        if isinstance(e, m.RUn):
            inner = self._gen(e.operand)
            return f"(not {inner})" if e.op == "not" else f"(-{inner})"
        if isinstance(e, m.RIf):
            return f"({self._gen(e.then)} if {self._gen(e.cond)} else {self._gen(e.orelse)})"
        assert isinstance(e, m.RBin)
        a, b = self._gen(e.left), self._gen(e.right)
        op = e.op
        if op == "and":
            return f"({a} and {b})"
        if op == "or":
            return f"({a} or {b})"
        if op == "=>":
            return f"((not {a}) or {b})"
        if op in ("<=>", "="):
            return f"({a} == {b})"
        if op == "!=":
            return f"({a} != {b})"
        return f"({a} {op} {b})"

    def compile_expr(self, e: m.RExpr):
        fn = self._expr_cache.get(e)
        if fn is None:
            fn = eval(compile(f"lambda s: {self._gen(e)}", "<expr>", "eval"))
            self._expr_cache[e] = fn
        return fn

    def eval_expr(self, e: m.RExpr, state: tuple):
        """Value of an expression at a state; algebraic variables were inlined
        at resolution, location references read the location slots."""
        try:
            return self.compile_expr(e)(state)
        except Exception as exc:  # pragma: no cover - defensive
            raise EvalError(f"evaluation failed: {exc}") from exc

    # -- event tables -------------------------------------------------------------

    def _event_table(self, ei: int) -> EventTable:
        spec = self.spec
        participants = []
        for ai, aut in enumerate(spec.automata):
            if ei not in aut.alphabet:
                continue
            edges_by_loc: dict[int, list[CompiledEdge]] = {}
            for edge in aut.edges:
                if edge.event != ei:
                    continue
                guard = None if edge.guard is None else self.compile_expr(edge.guard)
                updates = tuple(
                    (self.var_slot[vi], self.compile_expr(expr),
                     spec.variables[vi].domain, spec.variables[vi].name)
                    for vi, expr in edge.updates)
                compiled = CompiledEdge(ai, ei, edge.source, edge.target, guard,
                                        updates, edge.label)
                edges_by_loc.setdefault(edge.source, []).append(compiled)
            participants.append(Participant(ai, aut.monitor, edges_by_loc))
        conditions = tuple(self.compile_expr(c)
                           for c in spec.event_conditions.get(ei, ()))
        ev = spec.events[ei]
        return EventTable(ei, ev.name, ev.controllable, participants, conditions)

    # -- single automaton enabledness ------------------------------------------------

    def _enabled_edges(self, part: Participant, state: tuple) -> list[CompiledEdge]:
        slot = self.aut_slot[part.aut]
        loc = state[slot] if slot is not None else 0
        out = []
        for edge in part.edges_by_loc.get(loc, ()):
            if edge.guard is None or edge.guard(state):
                out.append(edge)
        return out

    def enabled(self, state: tuple, ei: int, with_conditions: bool = True):
        """All joint choices for the event, one edge (or STAY) per participant.

        Empty result means the event is disabled. Monitors contribute STAY
        when none of their edges match, so they never block.
        """
        table = self.events[ei]
        if with_conditions:
            for cond in table.conditions:
                if not cond(state):
                    return []
        per_participant = []
        for part in table.participants:
            edges = self._enabled_edges(part, state)
            if not edges:
                if part.monitor:
                    per_participant.append((STAY,))
                    continue
                return []
            per_participant.append(tuple(edges))
        if not per_participant:
            return []
        return list(itertools.product(*per_participant))

    def step(self, state: tuple, ei: int, choice) -> tuple:
        """Apply one joint choice; updates read the pre-state simultaneously."""
        new = list(state)
        written: set[int] = set()
        for edge in choice:
            if edge is STAY:
                continue
            slot = self.aut_slot[edge.aut]
            if slot is not None:
                new[slot] = edge.target
            for vslot, fn, domain, var_name in edge.updates:
                value = fn(state)
                if not domain.contains(value):
                    raise StepError(
                        f"update drives '{var_name}' to {value!r}, outside {domain} "
                        f"(edge {edge.label})")
                assert vslot not in written, "conflicting writes in a joint update"
                written.add(vslot)
                new[vslot] = value
        return tuple(new)

    # -- marked / invariants -----------------------------------------------------------

    def is_marked(self, state: tuple) -> bool:
        for ai, marked in enumerate(self._marked_locs):
            slot = self.aut_slot[ai]
            loc = state[slot] if slot is not None else 0
            if loc not in marked:
                return False
        return True

    def satisfies_invariants(self, state: tuple) -> bool:
        return all(inv(state) for inv in self.plant_invariants)

    # -- initial states ------------------------------------------------------------------

    def initial_states(self, budget: int = DEFAULT_BUDGET) -> list[tuple]:
        spec = self.spec
        options: list[tuple] = [()] * self.nslots
        predicates = []  # (aut slot or None, location, compiled predicate)
        expansion = 1
        for ai, aut in enumerate(spec.automata):
            slot = self.aut_slot[ai]
            locs = [li for li, _ in aut.initials]
            if slot is not None:
                if not locs:
                    return []
                options[slot] = tuple(locs)
                expansion *= len(locs)
            for li, pred in aut.initials:
                if pred is not None:
                    predicates.append((slot, li, self.compile_expr(pred)))
        for vi, vslot in self.var_slot.items():
            values = spec.variables[vi].initial_values()
            options[vslot] = tuple(values)
            expansion *= len(values)
        if expansion > budget:
            raise BudgetError(
                f"initial expansion of {expansion} states exceeds budget {budget}: "
                "state space too large, use symbolic engine")
        out = []
        for state in itertools.product(*options):
            ok = True
            for slot, li, pred in predicates:
                if slot is not None and state[slot] != li:
                    continue
                if not pred(state):
                    ok = False
                    break
            if ok and self.satisfies_invariants(state):
                out.append(state)
        return out

    # -- pretty state ------------------------------------------------------------------------

    def state_text(self, state: tuple) -> str:
        parts = []
        for ai, aut in enumerate(self.spec.automata):
            slot = self.aut_slot[ai]
            if slot is not None:
                parts.append(f"{aut.name}={aut.location_name(state[slot])}")
        for vi, vslot in self.var_slot.items():
            var = self.spec.variables[vi]
            value = state[vslot]
            if isinstance(var.domain, m.EnumDomain):
                value = var.domain.literals[value]
            parts.append(f"{var.name}={value}")
        return ", ".join(parts)


# ---------------------------------------------------------------------------
# Transition systems
# ---------------------------------------------------------------------------

@dataclass
class TransitionSystem:
    states: list[tuple]
    transitions: list[tuple[int, int, int]]  # (source, event, target)
    initial: list[int]
    marked: list[int]
    event_names: list[str]
    event_controllable: list[bool]
    state_texts: list[str] = field(default_factory=list)

    @property
    def state_count(self) -> int:
        return len(self.states)

    @property
    def transition_count(self) -> int:
        return len(self.transitions)

    def per_event_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for _, ei, _ in self.transitions:
            name = self.event_names[ei]
            counts[name] = counts.get(name, 0) + 1
        return counts

    def component_sizes(self) -> list[int]:
        """Sizes of weakly-connected components, descending."""
        parent = list(range(len(self.states)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for s, _, t in self.transitions:
            rs, rt = find(s), find(t)
            if rs != rt:
                parent[rs] = rt
        sizes: dict[int, int] = {}
        for s in range(len(self.states)):
            root = find(s)
            sizes[root] = sizes.get(root, 0) + 1
        return sorted(sizes.values(), reverse=True)

    def stats(self) -> dict:
        return {
            "states": self.state_count,
            "transitions": self.transition_count,
            "initial": len(self.initial),
            "marked": len(self.marked),
            "components": self.component_sizes(),
            "per_event": self.per_event_counts(),
        }


def explore(spec: m.ResolvedSpec, budget: int = DEFAULT_BUDGET,
            compiled: CompiledModel | None = None) -> TransitionSystem:
    """Breadth-first closure of the composition from its initial states.

    Requirement automata and event conditions participate as restrictions
    (the composed semantics); synthesis builds its own arena where
    uncontrollable disablement is treated as a bad state instead.
    """
    cm = compiled or CompiledModel(spec)
    initial = cm.initial_states(budget)
    index: dict[tuple, int] = {}
    states: list[tuple] = []
    for s in initial:
        if s not in index:
            index[s] = len(states)
            states.append(s)
    transitions: list[tuple[int, int, int]] = []
    frontier = list(range(len(states)))
    while frontier:
        next_frontier: list[int] = []
        for si in frontier:
            state = states[si]
            for ei in cm.event_order:
                for choice in cm.enabled(state, ei):
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
                        next_frontier.append(ti)
                    transitions.append((si, ei, ti))
        frontier = next_frontier
    marked = [i for i, s in enumerate(states) if cm.is_marked(s)]
    return TransitionSystem(
        states=states,
        transitions=sorted(set(transitions)),
        initial=[index[s] for s in initial],
        marked=marked,
        event_names=[e.name for e in spec.events],
        event_controllable=[e.controllable for e in spec.events],
        state_texts=[cm.state_text(s) for s in states],
    )


def initial_states(spec: m.ResolvedSpec, budget: int = DEFAULT_BUDGET) -> list[tuple]:
    return CompiledModel(spec).initial_states(budget)


def eval_expr(spec: m.ResolvedSpec, expr: m.RExpr, state: tuple):
    return CompiledModel(spec).eval_expr(expr, state)
