"""Flat, checked model produced by name resolution.

Everything downstream (exploration, synthesis, symbolic encoding) works on
these structures: a list of automata over a global table of events and
discrete variables, with algebraic variables already inlined into every
expression. Resolved expressions carry their static type: ``'bool'``,
``'int'`` or ``('enum', name)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoolDomain:
    def values(self):
        return (False, True)

    @property
    def size(self) -> int:
        return 2

    def contains(self, v) -> bool:
        return isinstance(v, bool)

    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class IntDomain:
    lower: int
    upper: int

    def values(self):
        return range(self.lower, self.upper + 1)

    @property
    def size(self) -> int:
        return self.upper - self.lower + 1

    def contains(self, v) -> bool:
        return isinstance(v, int) and not isinstance(v, bool) and self.lower <= v <= self.upper

    def __str__(self) -> str:
        return f"int[{self.lower}..{self.upper}]"


@dataclass(frozen=True)
class EnumDomain:
    name: str
    literals: tuple[str, ...]

    def values(self):
        return range(len(self.literals))

    @property
    def size(self) -> int:
        return len(self.literals)

    def contains(self, v) -> bool:
        return isinstance(v, int) and not isinstance(v, bool) and 0 <= v < len(self.literals)

    def __str__(self) -> str:
        return self.name


Domain = Union[BoolDomain, IntDomain, EnumDomain]


# ---------------------------------------------------------------------------
# Resolved expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RLit:
    value: Union[bool, int]
    ty: object


@dataclass(frozen=True)
class RVar:
    var: int
    ty: object


@dataclass(frozen=True)
class RLoc:
    """Location variable A.L: true iff automaton ``aut`` occupies ``loc``."""

    aut: int
    loc: int
    ty: object = "bool"


@dataclass(frozen=True)
class RUn:
    op: str
    operand: RExpr
    ty: object


@dataclass(frozen=True)
class RBin:
    op: str
    left: RExpr
    right: RExpr
    ty: object


@dataclass(frozen=True)
class RIf:
    cond: RExpr
    then: RExpr
    orelse: RExpr
    ty: object


RExpr = Union[RLit, RVar, RLoc, RUn, RBin, RIf]

TRUE = RLit(True, "bool")
FALSE = RLit(False, "bool")


def expr_vars(e: RExpr, acc: set[int] | None = None) -> set[int]:
    """Discrete variables mentioned by an expression."""
    if acc is None:
        acc = set()
    if isinstance(e, RVar):
        acc.add(e.var)
    elif isinstance(e, RUn):
        expr_vars(e.operand, acc)
    elif isinstance(e, RBin):
        expr_vars(e.left, acc)
        expr_vars(e.right, acc)
    elif isinstance(e, RIf):
        expr_vars(e.cond, acc)
        expr_vars(e.then, acc)
        expr_vars(e.orelse, acc)
    return acc


def expr_locrefs(e: RExpr, acc: set[tuple[int, int]] | None = None) -> set[tuple[int, int]]:
    if acc is None:
        acc = set()
    if isinstance(e, RLoc):
        acc.add((e.aut, e.loc))
    elif isinstance(e, RUn):
        expr_locrefs(e.operand, acc)
    elif isinstance(e, RBin):
        expr_locrefs(e.left, acc)
        expr_locrefs(e.right, acc)
    elif isinstance(e, RIf):
        expr_locrefs(e.cond, acc)
        expr_locrefs(e.then, acc)
        expr_locrefs(e.orelse, acc)
    return acc


# ---------------------------------------------------------------------------
# Model structure
# ---------------------------------------------------------------------------

@dataclass
class RVariable:
    name: str  # qualified, e.g. "F1.present"
    owner: int  # automaton index
    domain: Domain
    init: tuple | None  # tuple of initial values; None means the full domain ("in any")

    def initial_values(self):
        return self.init if self.init is not None else tuple(self.domain.values())


@dataclass
class REvent:
    name: str  # qualified, e.g. "FM.come" or "swap12"
    controllable: bool


@dataclass
class REdge:
    event: int
    source: int
    target: int
    guard: RExpr | None
    updates: tuple[tuple[int, RExpr], ...]
    label: str = ""  # for diagnostics: "Automaton.loc --event-->"


@dataclass
class RAutomaton:
    name: str
    kind: str  # 'plant' | 'requirement' | 'supervisor'
    monitor: bool
    locations: tuple[str, ...]
    initials: tuple[tuple[int, RExpr | None], ...]  # (location, predicate or None)
    marked: frozenset[int]
    edges: list[REdge]
    alphabet: frozenset[int]
    own_vars: tuple[int, ...]

    def location_name(self, idx: int) -> str:
        name = self.locations[idx]
        return name if name != "*" else f"<loc{idx}>"


@dataclass
class ResolvedSpec:
    automata: list[RAutomaton]
    events: list[REvent]
    variables: list[RVariable]
    enums: dict[str, EnumDomain]
    plant_invariants: list[RExpr]
    requirement_invariants: list[RExpr]
    event_conditions: dict[int, list[RExpr]]  # event index -> conjuncts
    alg_definitions: dict[str, RExpr] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def event_index(self, name: str) -> int:
        for i, ev in enumerate(self.events):
            if ev.name == name:
                return i
        raise KeyError(name)

    def automaton_index(self, name: str) -> int:
        for i, aut in enumerate(self.automata):
            if aut.name == name:
                return i
        raise KeyError(name)

    def variable_index(self, name: str) -> int:
        for i, var in enumerate(self.variables):
            if var.name == name:
                return i
        raise KeyError(name)

    def expr_to_ast(self, e: RExpr):
        """Resolved expression back to printable syntax (guards, diagnostics)."""
        from fsc.lang import syntax as ast

        if isinstance(e, RLit):
            if isinstance(e.ty, tuple):  # enum literal
                return ast.Name((self.enums[e.ty[1]].literals[e.value],))
            return ast.Lit(e.value)
        if isinstance(e, RVar):
            return ast.Name(tuple(self.variables[e.var].name.split(".")))
        if isinstance(e, RLoc):
            aut = self.automata[e.aut]
            return ast.Name((aut.name, aut.locations[e.loc]))
        if isinstance(e, RUn):
            return ast.Unary(e.op, self.expr_to_ast(e.operand))
        if isinstance(e, RBin):
            return ast.Binary(e.op, self.expr_to_ast(e.left), self.expr_to_ast(e.right))
        if isinstance(e, RIf):
            return ast.IfExpr(self.expr_to_ast(e.cond), self.expr_to_ast(e.then),
                              self.expr_to_ast(e.orelse))
        raise TypeError(f"not a resolved expression: {e!r}")

    def worst_case_size(self) -> int:
        """Product of per-automaton state counts (locations x own var domains)."""
        total = 1
        for i, aut in enumerate(self.automata):
            size = len(aut.locations)
            for v in aut.own_vars:
                size *= self.variables[v].domain.size
            total *= size
        return total
