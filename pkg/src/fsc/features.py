"""Feature models: constraint formulas, configuration counting, and the
lowering of a feature model into automata + validity text.

The lowering produces ordinary declarations (one presence automaton per
feature, one algebraic boolean per constraint, a conjunction ``sys_valid``,
per-attribute sums with their validity booleans, and a ``Validity`` automaton
whose single location is initially constrained), so the compiled output can be
printed and diffed as plain .fsc text.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from fsc.bdd import BDD
from fsc.errors import ResolveError
from fsc.lang import syntax as ast

CONSTRAINT_KINDS = ("root", "mandatory", "optional", "alternative", "or",
                    "requires", "excludes")


@dataclass(frozen=True)
class Attribute:
    name: str
    value: int


@dataclass(frozen=True)
class Feature:
    name: str
    attributes: tuple[Attribute, ...] = ()

    def attribute(self, name: str) -> Attribute | None:
        for a in self.attributes:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class FeatureConstraint:
    """kind-specific participants: root (f,); mandatory/optional (parent, child);
    requires/excludes (f1, f2); alternative/or (parent, child1..childN)."""

    kind: str
    features: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in CONSTRAINT_KINDS:
            raise ResolveError(f"unknown constraint kind '{self.kind}'")
        arity_ok = (len(self.features) == 1 if self.kind == "root"
                    else len(self.features) >= 2 if self.kind in ("alternative", "or")
                    else len(self.features) == 2)
        if not arity_ok:
            raise ResolveError(f"'{self.kind}' constraint with {len(self.features)} feature(s)")


@dataclass(frozen=True)
class SwapGroup:
    event: str
    members: tuple[str, ...]

    def __post_init__(self):
        if len(self.members) < 2:
            raise ResolveError(f"swap group '{self.event}' needs at least 2 features")


@dataclass(frozen=True)
class ReconfigMode:
    kind: str = "static"  # 'static' | 'dynamic'
    controllable: bool = False  # of come/go events
    overrides: tuple[tuple[str, bool], ...] = ()  # per-feature controllability
    swaps: tuple[SwapGroup, ...] = ()

    def __post_init__(self):
        if self.kind not in ("static", "dynamic"):
            raise ResolveError(f"unknown reconfiguration mode '{self.kind}'")
        seen: set[tuple[str, str]] = set()
        for group in self.swaps:
            for member in group.members:
                if (group.event, member) in seen:
                    raise ResolveError(
                        f"feature '{member}' appears twice in swap group '{group.event}'")
                seen.add((group.event, member))

    def come_go_controllable(self, feature: str) -> bool:
        for name, ctrl in self.overrides:
            if name == feature:
                return ctrl
        return self.controllable


STATIC = ReconfigMode("static")
DYNAMIC_UNCONTROLLABLE = ReconfigMode("dynamic", controllable=False)


@dataclass(frozen=True)
class Strictness:
    kind: str = "strict"  # 'strict' | 'relaxed'
    extra_invariants: tuple[ast.Expr, ...] = ()

    def __post_init__(self):
        if self.kind not in ("strict", "relaxed"):
            raise ResolveError(f"unknown strictness '{self.kind}'")


STRICT = Strictness("strict")


@dataclass
class FeatureModel:
    name: str
    features: list[Feature]
    constraints: list[FeatureConstraint]
    attribute_constraints: list[ast.Expr] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def feature_names(self) -> list[str]:
        return [f.name for f in self.features]

    def validate(self):
        names = self.feature_names()
        if len(set(names)) != len(names):
            raise ResolveError("duplicate feature name")
        known = set(names)
        for f in self.features:
            attrs = [a.name for a in f.attributes]
            if len(set(attrs)) != len(attrs):
                raise ResolveError(f"feature '{f.name}' repeats an attribute name")
        roots = [c for c in self.constraints if c.kind == "root"]
        if len(roots) != 1:
            raise ResolveError(f"a feature model needs exactly one root, found {len(roots)}")
        for c in self.constraints:
            for f in c.features:
                if f not in known:
                    raise ResolveError(f"constraint mentions unknown feature '{f}'")
        # the tree statements give every non-root feature exactly one parent
        parent: dict[str, str] = {}
        for c in self.constraints:
            if c.kind in ("mandatory", "optional"):
                pairs = [(c.features[1], c.features[0])]
            elif c.kind in ("alternative", "or"):
                pairs = [(child, c.features[0]) for child in c.features[1:]]
            else:
                continue
            for child, par in pairs:
                if child in parent:
                    raise ResolveError(f"feature '{child}' has two parents")
                parent[child] = par
        root = roots[0].features[0]
        for name in names:
            seen = set()
            node = name
            while node != root:
                if node in seen:
                    raise ResolveError(f"feature tree has a cycle through '{node}'")
                seen.add(node)
                if node not in parent:
                    raise ResolveError(f"feature '{node}' is not connected to the root")
                node = parent[node]


# ---------------------------------------------------------------------------
# Constraint formulas
# ---------------------------------------------------------------------------

def _present(feature: str) -> ast.Expr:
    return ast.Name((feature, "present"))


def _conj(terms: list[ast.Expr]) -> ast.Expr:
    expr = terms[0]
    for t in terms[1:]:
        expr = ast.Binary("and", expr, t)
    return expr


def _disj(terms: list[ast.Expr]) -> ast.Expr:
    expr = terms[0]
    for t in terms[1:]:
        expr = ast.Binary("or", expr, t)
    return expr


def constraint_formula(c: FeatureConstraint) -> ast.Expr:
    """The boolean formula over ``<F>.present`` variables for one constraint."""
    f = [_present(name) for name in c.features]
    if c.kind == "root":
        return ast.Binary("<=>", f[0], ast.Lit(True))
    if c.kind == "mandatory":
        return ast.Binary("<=>", f[0], f[1])
    if c.kind == "optional":
        return ast.Binary("=>", f[1], f[0])  # child => parent
    if c.kind == "requires":
        return ast.Binary("=>", f[0], f[1])
    if c.kind == "excludes":
        return ast.Unary("not", ast.Binary("and", f[0], f[1]))
    if c.kind == "or":
        return ast.Binary("<=>", f[0], _disj(f[1:]))
    # alternative: for every child i, Fi <=> (/\_{j != i} not Fj) /\ parent
    parent, children = c.features[0], c.features[1:]
    conjuncts = []
    for i, child in enumerate(children):
        others = [ast.Unary("not", _present(o)) for j, o in enumerate(children) if j != i]
        rhs = _conj(others + [_present(parent)])
        conjuncts.append(ast.Binary("<=>", _present(child), rhs))
    return _conj(conjuncts)


# ---------------------------------------------------------------------------
# Configuration counting
# ---------------------------------------------------------------------------

def _formula_to_bdd(store: BDD, level: dict[str, int], expr: ast.Expr) -> int:
    """Presence formulas and attribute constraints over feature levels.

    Integer-valued subterms become (condition, value) partitions, so a sum
    aggregate threshold compiles without enumerating configurations.
    """

    def walk(e):
        if isinstance(e, ast.Lit):
            if isinstance(e.value, bool):
                return store.TRUE if e.value else store.FALSE
            return [(store.TRUE, e.value)]
        if isinstance(e, ast.Name):
            if len(e.parts) == 2 and e.parts[1] == "present" and e.parts[0] in level:
                return store.var(level[e.parts[0]])
            if len(e.parts) == 1 and e.parts[0] in level:
                return store.var(level[e.parts[0]])
            raise ResolveError(f"unknown feature reference '{e}'")
        if isinstance(e, ast.Call):
            raise ResolveError("aggregates must be lowered before counting")
        if isinstance(e, ast.Unary):
            value = walk(e.operand)
            if e.op == "not":
                return store.neg(value)
            return [(c, -v) for c, v in value]
        if isinstance(e, ast.IfExpr):
            cond = walk(e.cond)
            a, b = walk(e.then), walk(e.orelse)
            if isinstance(a, int):
                return store.ite(cond, a, b)
            return _merge([(store.apply_and(cond, c), v) for c, v in a]
                          + [(store.apply_and(store.neg(cond), c), v) for c, v in b])
        assert isinstance(e, ast.Binary)
        op = e.op
        if op in ("and", "or", "=>", "<=>"):
            a, b = walk(e.left), walk(e.right)
            if op == "and":
                return store.apply_and(a, b)
            if op == "or":
                return store.apply_or(a, b)
            if op == "=>":
                return store.apply_or(store.neg(a), b)
            return store.neg(store.apply_xor(a, b))
        a, b = walk(e.left), walk(e.right)
        if op in ("+", "-", "*"):
            fn = {"+": lambda x, y: x + y, "-": lambda x, y: x - y,
                  "*": lambda x, y: x * y}[op]
            return _merge([(store.apply_and(ca, cb), fn(va, vb))
                           for ca, va in a for cb, vb in b if store.apply_and(ca, cb) != 0])
        if isinstance(a, int) and isinstance(b, int):  # boolean equality
            test = {"=": lambda: store.neg(store.apply_xor(a, b)),
                    "!=": lambda: store.apply_xor(a, b)}.get(op)
            if test is None:
                raise ResolveError(f"'{op}' needs integer operands")
            return test()
        cmp = {"=": lambda x, y: x == y, "!=": lambda x, y: x != y,
               "<": lambda x, y: x < y, "<=": lambda x, y: x <= y,
               ">": lambda x, y: x > y, ">=": lambda x, y: x >= y}[op]
        result = store.FALSE
        for ca, va in a:
            for cb, vb in b:
                if cmp(va, vb):
                    result = store.apply_or(result, store.apply_and(ca, cb))
        return result

    def _merge(parts):
        by_value: dict[int, int] = {}
        for cond, value in parts:
            if cond != store.FALSE:
                by_value[value] = store.apply_or(by_value.get(value, store.FALSE), cond)
        return [(cond, value) for value, cond in sorted(by_value.items())]

    result = walk(expr)
    if not isinstance(result, int):
        raise ResolveError("attribute constraint must be boolean")
    return result


def _sum_partitions(store: BDD, level: dict[str, int], fm: FeatureModel, attr: str):
    """DP over features: (condition, partial sum) partitions of sum(attr)."""
    parts = [(store.TRUE, 0)]
    for feature in fm.features:
        a = feature.attribute(attr)
        if a is None:
            continue
        pvar = store.var(level[feature.name])
        by_value: dict[int, int] = {}
        for cond, total in parts:
            hi = store.apply_and(cond, pvar)
            lo = store.apply_and(cond, store.neg(pvar))
            if hi != store.FALSE:
                key = total + a.value
                by_value[key] = store.apply_or(by_value.get(key, store.FALSE), hi)
            if lo != store.FALSE:
                by_value[total] = store.apply_or(by_value.get(total, store.FALSE), lo)
        parts = [(cond, value) for value, cond in sorted(by_value.items())]
    return parts


def _lower_aggregates(fm: FeatureModel, expr: ast.Expr, sums) -> ast.Expr:
    """Replace sum(attr) calls by placeholders resolved against ``sums``."""
    if isinstance(expr, ast.Call):
        if expr.func != "sum":
            raise ResolveError(f"unsupported aggregate '{expr.func}'")
        if len(expr.args) != 1 or not isinstance(expr.args[0], ast.Name) \
                or len(expr.args[0].parts) != 1:
            raise ResolveError("sum takes a single attribute name")
        attr = expr.args[0].parts[0]
        if not any(f.attribute(attr) for f in fm.features):
            raise ResolveError(f"no feature carries attribute '{attr}'")
        sums.add(attr)
        return ast.Name((f"{attr}_sum",))
    if isinstance(expr, ast.Unary):
        return ast.Unary(expr.op, _lower_aggregates(fm, expr.operand, sums))
    if isinstance(expr, ast.Binary):
        return ast.Binary(expr.op, _lower_aggregates(fm, expr.left, sums),
                          _lower_aggregates(fm, expr.right, sums))
    if isinstance(expr, ast.IfExpr):
        return ast.IfExpr(_lower_aggregates(fm, expr.cond, sums),
                          _lower_aggregates(fm, expr.then, sums),
                          _lower_aggregates(fm, expr.orelse, sums))
    return expr


def _constraints_bdd(store: BDD, fm: FeatureModel, include_attributes=True) -> int:
    level = {f.name: i for i, f in enumerate(fm.features)}
    result = store.TRUE
    for c in fm.constraints:
        result = store.apply_and(result, _formula_to_bdd(store, level, constraint_formula(c)))
    if include_attributes:
        for expr in fm.attribute_constraints:
            result = store.apply_and(result, _attr_constraint_bdd(store, level, fm, expr))
    return result


def _attr_constraint_bdd(store: BDD, level, fm: FeatureModel, expr: ast.Expr) -> int:
    def walk(e):
        if isinstance(e, ast.Call):
            if e.func != "sum":
                raise ResolveError(f"unsupported aggregate '{e.func}'")
            attr = e.args[0].parts[0]
            return _sum_partitions(store, level, fm, attr)
        if isinstance(e, ast.Unary):
            return ast.Unary(e.op, walk(e.operand))
        if isinstance(e, ast.Binary):
            left, right = walk(e.left), walk(e.right)
            if isinstance(left, list) or isinstance(right, list):
                return _partition_binary(store, e.op, left, right)
            return ast.Binary(e.op, left, right)
        return e

    lowered = walk(expr)
    if isinstance(lowered, int):
        return lowered
    return _formula_to_bdd(store, level, lowered)


def _partition_binary(store: BDD, op: str, left, right) -> int:
    def as_parts(x):
        if isinstance(x, list):
            return x
        if isinstance(x, ast.Lit) and not isinstance(x.value, bool):
            return [(store.TRUE, x.value)]
        raise ResolveError("attribute constraints compare sums with integer literals")

    a, b = as_parts(left), as_parts(right)
    cmp = {"=": lambda x, y: x == y, "!=": lambda x, y: x != y,
           "<": lambda x, y: x < y, "<=": lambda x, y: x <= y,
           ">": lambda x, y: x > y, ">=": lambda x, y: x >= y}[op]
    result = store.FALSE
    for ca, va in a:
        for cb, vb in b:
            if cmp(va, vb):
                result = store.apply_or(result, store.apply_and(ca, cb))
    return result


def count_valid_configurations(fm: FeatureModel, crosscheck: bool = True) -> int:
    """Number of presence assignments satisfying every constraint.

    Decision-diagram model counting; for models of at most 20 features the
    count is cross-checked by brute-force enumeration.
    """
    n = len(fm.features)
    store = BDD(n)
    valid = _constraints_bdd(store, fm)
    count = store.sat_count(valid, store.register_cube(range(n)))
    if crosscheck and n <= 20:
        brute = sum(
            1 for bits in itertools.product((False, True), repeat=n)
            if store.eval(valid, bits))
        assert brute == count, "decision-diagram count disagrees with enumeration"
    return count


def dead_features(fm: FeatureModel) -> list[str]:
    """Features that are absent in every valid configuration."""
    n = len(fm.features)
    store = BDD(n)
    valid = _constraints_bdd(store, fm)
    cid = store.register_cube(range(n))
    out = []
    for i, f in enumerate(fm.features):
        if store.sat_count(store.apply_and(valid, store.var(i)), cid) == 0:
            out.append(f.name)
    return out


# ---------------------------------------------------------------------------
# Lowering to automata
# ---------------------------------------------------------------------------

def _feature_body(attrs: tuple[Attribute, ...], dynamic: bool, controllable: bool,
                  swap_events: tuple[str, ...], values: dict[str, ast.Expr] | None = None):
    """Automaton body shared by definitions and directly-emitted features.

    ``values`` maps attribute name to its value expression (a parameter name
    inside a definition, a literal in a direct automaton)."""
    events = ()
    if dynamic:
        events = (ast.EventDecl(("come", "go"), controllable),)
    disc = (ast.DiscVarDecl("present", ast.BoolType(), None, True),)
    alg = tuple(
        ast.AlgVarDecl(a.name, ast.IntType(),
                       ast.IfExpr(ast.Name(("present",)),
                                  values[a.name] if values else ast.Lit(a.value),
                                  ast.Lit(0)))
        for a in attrs)
    edges = []
    if dynamic:
        edges.append(ast.EdgeDecl(
            (ast.Name(("come",)),), ast.Unary("not", ast.Name(("present",))),
            (("present", ast.Lit(True)),), None))
        edges.append(ast.EdgeDecl(
            (ast.Name(("go",)),), ast.Name(("present",)),
            (("present", ast.Lit(False)),), None))
    for event in swap_events:
        edges.append(ast.EdgeDecl(
            (ast.Name((event,)),), None,
            (("present", ast.Unary("not", ast.Name(("present",)))),), None))
    location = ast.LocationDecl(None, True, None, True, tuple(edges))
    return ast.AutomatonBody(False, None, events, disc, alg, (location,))


def compile_feature(feature: Feature, mode: ReconfigMode = STATIC) -> ast.AutomatonDecl:
    """One feature as a stand-alone presence automaton (expanded form)."""
    dynamic = mode.kind == "dynamic"
    swap_events = tuple(g.event for g in mode.swaps if feature.name in g.members)
    body = _feature_body(feature.attributes, dynamic,
                         mode.come_go_controllable(feature.name), swap_events)
    return ast.AutomatonDecl("plant", feature.name, body)


def compile_swap(event: str, members: tuple[str, ...]) -> list[ast.EdgeDecl]:
    """The self-loop every member gains: synchronizing on the shared event
    toggles every member's presence in one atomic transition."""
    group = SwapGroup(event, tuple(members))  # validates arity
    edge = ast.EdgeDecl((ast.Name((group.event,)),), None,
                        (("present", ast.Unary("not", ast.Name(("present",)))),), None)
    return [edge for _ in group.members]


def compile_feature_model(fm: FeatureModel, mode: ReconfigMode = STATIC,
                          strictness: Strictness = STRICT) -> ast.SourceSpec:
    """Lower the model to declarations: definitions + instances, constraint
    booleans r1..rN, sys_valid, attribute sums/validity, the Validity
    automaton, strictness invariants, and swap event declarations."""
    decls: list[ast.Declaration] = []
    dynamic = mode.kind == "dynamic"
    swap_members = {name for g in mode.swaps for name in g.members}

    # one definition per (attribute signature, controllability) actually used
    defs: dict[tuple, str] = {}
    for feature in fm.features:
        if feature.name in swap_members:
            continue  # swap members carry instance-specific edges; emitted directly
        ctrl = mode.come_go_controllable(feature.name)
        sig = (tuple((a.name) for a in feature.attributes), ctrl if dynamic else None)
        if sig in defs:
            continue
        base = "FEATURE_ATTRIBUTED" if sig[0] else "FEATURE"
        name = base
        suffix = 2
        while any(name == existing for existing in defs.values()):
            name = f"{base}{suffix}"
            suffix += 1
        defs[sig] = name
        params = tuple(ast.ParamDecl("x" if len(sig[0]) == 1 else f"x{i}", ast.IntType())
                       for i, _ in enumerate(sig[0]))
        values = {attr: ast.Name((p.name,)) for attr, p in zip(sig[0], params)}
        body = _feature_body(tuple(Attribute(a, 0) for a in sig[0]), dynamic,
                             bool(sig[1]), (), values)
        decls.append(ast.AutomatonDefDecl("plant", name, params, body))

    for group in mode.swaps:
        decls.append(ast.EventDecl((group.event,), mode.controllable))

    for feature in fm.features:
        if feature.name in swap_members:
            decls.append(compile_feature(feature, mode))
            continue
        ctrl = mode.come_go_controllable(feature.name)
        sig = (tuple(a.name for a in feature.attributes), ctrl if dynamic else None)
        args = tuple(ast.Lit(a.value) for a in feature.attributes)
        decls.append(ast.InstanceDecl(feature.name, defs[sig], args))

    names = []
    for i, c in enumerate(fm.constraints, start=1):
        names.append(f"r{i}")
        decls.append(ast.AlgVarDecl(f"r{i}", ast.BoolType(), constraint_formula(c)))
    decls.append(ast.AlgVarDecl("sys_valid", ast.BoolType(),
                                _conj([ast.Name((n,)) for n in names])))

    sums: set[str] = set()
    attr_valid_names: list[str] = []
    lowered_constraints = [_lower_aggregates(fm, e, sums) for e in fm.attribute_constraints]
    for attr in sorted(sums):
        terms = [ast.Name((f.name, attr)) for f in fm.features if f.attribute(attr)]
        decls.append(ast.AlgVarDecl(f"{attr}_sum", ast.IntType(), _sum_expr(terms)))
    for i, expr in enumerate(lowered_constraints):
        name = _valid_name(expr, i, attr_valid_names)
        attr_valid_names.append(name)
        decls.append(ast.AlgVarDecl(name, ast.BoolType(), expr))

    validity_terms = [ast.Name(("sys_valid",))] + [ast.Name((n,)) for n in attr_valid_names]
    decls.append(ast.AutomatonDecl(
        "plant", "Validity",
        ast.AutomatonBody(False, None, (), (), (),
                          (ast.LocationDecl(None, True, _conj(validity_terms), True, ()),))))

    if dynamic or mode.swaps:
        if strictness.kind == "strict":
            decls.append(ast.PlantInvariantDecl(_conj(validity_terms)))
        else:
            # reconfiguration may pass through invalid feature combinations,
            # but attribute budgets and any extra invariants stay enforced
            for name in attr_valid_names:
                decls.append(ast.PlantInvariantDecl(ast.Name((name,))))
            for expr in strictness.extra_invariants:
                decls.append(ast.PlantInvariantDecl(_presence_expr(fm, expr)))
    return ast.SourceSpec(tuple(decls))


def _sum_expr(terms: list[ast.Expr]) -> ast.Expr:
    expr = terms[0]
    for t in terms[1:]:
        expr = ast.Binary("+", expr, t)
    return expr


def _valid_name(expr: ast.Expr, index: int, taken: list[str]) -> str:
    sums = set()

    def find(e):
        if isinstance(e, ast.Name) and len(e.parts) == 1 and e.parts[0].endswith("_sum"):
            sums.add(e.parts[0][:-4])
        for child in getattr(e, "__dict__", {}).values():
            if isinstance(child, (ast.Name, ast.Unary, ast.Binary, ast.IfExpr, ast.Call)):
                find(child)
            elif isinstance(child, tuple):
                for c in child:
                    if isinstance(c, (ast.Name, ast.Unary, ast.Binary, ast.IfExpr, ast.Call)):
                        find(c)

    find(expr)
    if len(sums) == 1:
        name = f"{next(iter(sums))}_valid"
        if name not in taken:
            return name
    return f"constraint_valid{index + 1}"


def _presence_expr(fm: FeatureModel, expr: ast.Expr) -> ast.Expr:
    """Allow bare feature names in block invariants: F -> F.present."""
    names = set(fm.feature_names())
    if isinstance(expr, ast.Name):
        if len(expr.parts) == 1 and expr.parts[0] in names:
            return ast.Name((expr.parts[0], "present"))
        return expr
    if isinstance(expr, ast.Unary):
        return ast.Unary(expr.op, _presence_expr(fm, expr.operand))
    if isinstance(expr, ast.Binary):
        return ast.Binary(expr.op, _presence_expr(fm, expr.left),
                          _presence_expr(fm, expr.right))
    if isinstance(expr, ast.IfExpr):
        return ast.IfExpr(_presence_expr(fm, expr.cond), _presence_expr(fm, expr.then),
                          _presence_expr(fm, expr.orelse))
    return expr


def lower_to_text(fm: FeatureModel, mode: ReconfigMode = STATIC,
                  strictness: Strictness = STRICT) -> str:
    from fsc.lang.printer import format_spec

    return format_spec(compile_feature_model(fm, mode, strictness))


# ---------------------------------------------------------------------------
# featuremodel block interpretation
# ---------------------------------------------------------------------------

def interpret_block(decl: ast.FeatureModelDecl):
    """Turn a parsed ``featuremodel`` block into (FeatureModel, mode, strictness)."""
    order: list[str] = []
    attrs: dict[str, list[Attribute]] = {}
    constraints: list[FeatureConstraint] = []
    attribute_constraints: list[ast.Expr] = []
    extra_invariants: list[ast.Expr] = []
    mode_kind = "static"
    strict_kind = "strict"
    controllable = False
    overrides: list[tuple[str, bool]] = []
    swaps: list[SwapGroup] = []

    def feature(name: str):
        if name not in order:
            order.append(name)
            attrs[name] = []

    tree_kinds = {"root", "mandatory", "optional", "alternative", "or"}
    for stmt in decl.statements:  # the tree statements define the feature set
        if stmt.kind in tree_kinds:
            for name in stmt.names:
                feature(name)
    for stmt in decl.statements:
        if stmt.kind in tree_kinds:
            constraints.append(FeatureConstraint(stmt.kind, stmt.names))
        elif stmt.kind in ("requires", "excludes"):
            for name in stmt.names:
                if name not in order:
                    raise ResolveError(f"unknown feature '{name}'", stmt.span)
            constraints.append(FeatureConstraint(stmt.kind, stmt.names))
        elif stmt.kind == "attribute":
            name, attr = stmt.names
            if name not in order:
                raise ResolveError(f"unknown feature '{name}'", stmt.span)
            attrs[name].append(Attribute(attr, stmt.value))
        elif stmt.kind == "constraint":
            attribute_constraints.append(stmt.expr)
        elif stmt.kind == "invariant":
            extra_invariants.append(stmt.expr)
        elif stmt.kind == "mode":
            mode_kind = stmt.names[0]
        elif stmt.kind == "strictness":
            strict_kind = stmt.names[0]
        elif stmt.kind == "reconfig":
            if stmt.names:
                overrides.extend((n, bool(stmt.value)) for n in stmt.names)
            else:
                controllable = bool(stmt.value)
        elif stmt.kind == "swap":
            event, *members = stmt.names
            for name in members:
                if name not in order:
                    raise ResolveError(f"unknown feature '{name}'", stmt.span)
            swaps.append(SwapGroup(event, tuple(members)))
        else:
            raise ResolveError(f"unknown feature-model statement '{stmt.kind}'", stmt.span)

    fm = FeatureModel(
        decl.name,
        [Feature(n, tuple(attrs[n])) for n in order],
        constraints,
        attribute_constraints,
    )
    mode = ReconfigMode(mode_kind, controllable, tuple(overrides), tuple(swaps))
    strictness = Strictness(strict_kind, tuple(extra_invariants))
    return fm, mode, strictness
