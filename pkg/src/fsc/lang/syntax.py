"""AST for the .fsc specification language.

Nodes are immutable dataclasses; spans never participate in equality so a
pretty-printed and reparsed tree compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from fsc.errors import Span

NOSPAN = Span(0, 0)


def _span_field():
    return field(compare=False, default=NOSPAN, repr=False)


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: Union[bool, int]
    span: Span = _span_field()


@dataclass(frozen=True)
class Name:
    """Possibly dotted reference: ``present``, ``F1.present``, ``A.L``."""

    parts: tuple[str, ...]
    span: Span = _span_field()

    def __str__(self) -> str:
        return ".".join(self.parts)


@dataclass(frozen=True)
class Unary:
    op: str  # 'not' | '-'
    operand: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Binary:
    op: str  # and or => <=> = != < <= > >= + - *
    left: Expr
    right: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class IfExpr:
    cond: Expr
    then: Expr
    orelse: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Call:
    """Aggregate call, e.g. ``sum(cost)``; only valid in feature-model blocks."""

    func: str
    args: tuple[Expr, ...]
    span: Span = _span_field()


Expr = Union[Lit, Name, Unary, Binary, IfExpr, Call]


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoolType:
    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class IntType:
    lower: int | None = None  # None/None means bare `int`
    upper: int | None = None

    def __str__(self) -> str:
        if self.lower is None:
            return "int"
        return f"int[{self.lower}..{self.upper}]"


@dataclass(frozen=True)
class NamedType:
    name: str  # an enum

    def __str__(self) -> str:
        return self.name


TypeExpr = Union[BoolType, IntType, NamedType]


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnumDecl:
    name: str
    literals: tuple[str, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class EventDecl:
    names: tuple[str, ...]
    controllable: bool
    span: Span = _span_field()


@dataclass(frozen=True)
class AlgVarDecl:
    name: str
    type: TypeExpr
    expr: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class DiscVarDecl:
    name: str
    type: TypeExpr
    init: Expr | None  # None with any_init=True means `in any`
    any_init: bool = False
    span: Span = _span_field()


@dataclass(frozen=True)
class EdgeDecl:
    events: tuple[Name, ...]
    guard: Expr | None
    updates: tuple[tuple[str, Expr], ...]
    target: str | None  # None: self-loop
    span: Span = _span_field()


@dataclass(frozen=True)
class LocationDecl:
    name: str | None  # None: the anonymous location
    initial: bool
    initial_pred: Expr | None
    marked: bool
    edges: tuple[EdgeDecl, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class AutomatonBody:
    monitor: bool
    alphabet: tuple[Name, ...] | None
    events: tuple[EventDecl, ...]
    disc_vars: tuple[DiscVarDecl, ...]
    alg_vars: tuple[AlgVarDecl, ...]
    locations: tuple[LocationDecl, ...]


@dataclass(frozen=True)
class AutomatonDecl:
    kind: str  # 'plant' | 'requirement' | 'supervisor'
    name: str
    body: AutomatonBody
    span: Span = _span_field()


@dataclass(frozen=True)
class ParamDecl:
    name: str
    type: TypeExpr
    span: Span = _span_field()


@dataclass(frozen=True)
class AutomatonDefDecl:
    kind: str
    name: str
    params: tuple[ParamDecl, ...]
    body: AutomatonBody
    span: Span = _span_field()


@dataclass(frozen=True)
class InstanceDecl:
    name: str
    def_name: str
    args: tuple[Expr, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class PlantInvariantDecl:
    expr: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class RequirementInvariantDecl:
    expr: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class EventConditionDecl:
    """``requirement <event> needs <condition>;``"""

    event: Name
    condition: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class FmStmt:
    """One statement of a ``featuremodel`` block, still uninterpreted."""

    kind: str
    names: tuple[str, ...] = ()
    expr: Expr | None = None
    value: int | None = None
    span: Span = _span_field()


@dataclass(frozen=True)
class FeatureModelDecl:
    name: str
    statements: tuple[FmStmt, ...]
    span: Span = _span_field()


Declaration = Union[
    EnumDecl, EventDecl, AlgVarDecl, AutomatonDecl, AutomatonDefDecl,
    InstanceDecl, PlantInvariantDecl, RequirementInvariantDecl,
    EventConditionDecl, FeatureModelDecl,
]


@dataclass(frozen=True)
class SourceSpec:
    declarations: tuple[Declaration, ...]
