"""Name resolution: expand instantiations, check names and types, inline
algebraic variables, and produce the flat ResolvedSpec."""

from __future__ import annotations

from dataclasses import dataclass, replace

from fsc.errors import ResolveError, Span
from fsc.lang import syntax as ast
from fsc import model as m

DEFAULT_INT_RANGE = (0, 255)


def _subst(expr: ast.Expr, mapping: dict[str, ast.Expr]) -> ast.Expr:
    """Replace single-part names by argument expressions (definition parameters)."""
    if isinstance(expr, ast.Name):
        if len(expr.parts) == 1 and expr.parts[0] in mapping:
            return mapping[expr.parts[0]]
        return expr
    if isinstance(expr, ast.Unary):
        return replace(expr, operand=_subst(expr.operand, mapping))
    if isinstance(expr, ast.Binary):
        return replace(expr, left=_subst(expr.left, mapping), right=_subst(expr.right, mapping))
    if isinstance(expr, ast.IfExpr):
        return replace(expr, cond=_subst(expr.cond, mapping), then=_subst(expr.then, mapping),
                       orelse=_subst(expr.orelse, mapping))
    if isinstance(expr, ast.Call):
        return replace(expr, args=tuple(_subst(a, mapping) for a in expr.args))
    return expr


def _subst_body(body: ast.AutomatonBody, mapping: dict[str, ast.Expr]) -> ast.AutomatonBody:
    def sub(e):
        return None if e is None else _subst(e, mapping)

    locations = []
    for loc in body.locations:
        edges = tuple(
            replace(edge, guard=sub(edge.guard),
                    updates=tuple((n, _subst(e, mapping)) for n, e in edge.updates))
            for edge in loc.edges)
        locations.append(replace(loc, initial_pred=sub(loc.initial_pred), edges=edges))
    disc = tuple(replace(d, init=sub(d.init)) for d in body.disc_vars)
    alg = tuple(replace(a, expr=_subst(a.expr, mapping)) for a in body.alg_vars)
    return ast.AutomatonBody(body.monitor, body.alphabet, body.events, disc, alg, tuple(locations))


@dataclass
class _AutInfo:
    decl: ast.AutomatonDecl
    index: int
    locations: dict[str, int]
    disc: dict[str, int]  # local name -> global variable index
    alg: dict[str, ast.AlgVarDecl]
    events: dict[str, int]  # local name -> global event index


class _Resolver:
    def __init__(self, spec: ast.SourceSpec, int_range=DEFAULT_INT_RANGE):
        self.spec = spec
        self.int_range = int_range
        self.warnings: list[str] = []
        self.enums: dict[str, m.EnumDomain] = {}
        self.literals: dict[str, tuple[str, int]] = {}  # literal -> (enum, index)
        self.global_events: dict[str, int] = {}
        self.global_alg: dict[str, ast.AlgVarDecl] = {}
        self.events: list[m.REvent] = []
        self.variables: list[m.RVariable] = []
        self.automata: dict[str, _AutInfo] = {}
        self.alg_cache: dict[str, m.RExpr] = {}
        self.alg_stack: list[str] = []
        self.plant_invariants: list[m.RExpr] = []
        self.requirement_invariants: list[m.RExpr] = []
        self.event_conditions: dict[int, list[m.RExpr]] = {}

    # -- error helper ---------------------------------------------------------

    def fail(self, message: str, span: Span | None = None):
        raise ResolveError(message, span)

    # -- main -------------------------------------------------------------------

    def run(self) -> m.ResolvedSpec:
        decls = self._expand_feature_models(list(self.spec.declarations))

        enum_decls = [d for d in decls if isinstance(d, ast.EnumDecl)]
        for d in enum_decls:
            if d.name in self.enums:
                self.fail(f"duplicate enum '{d.name}'", d.span)
            dom = m.EnumDomain(d.name, d.literals)
            self.enums[d.name] = dom
            for i, lit in enumerate(d.literals):
                if lit in self.literals:
                    self.fail(f"enum literal '{lit}' declared twice", d.span)
                self.literals[lit] = (d.name, i)

        decls = self._expand_instances(decls)

        for d in decls:
            if isinstance(d, ast.EventDecl):
                for name in d.names:
                    if name in self.global_events:
                        self.fail(f"duplicate event '{name}'", d.span)
                    self.global_events[name] = self._new_event(name, d.controllable)
            elif isinstance(d, ast.AlgVarDecl):
                if d.name in self.global_alg:
                    self.fail(f"duplicate algebraic variable '{d.name}'", d.span)
                if isinstance(d.type, ast.IntType) and d.type.lower is not None:
                    self.fail("unsupported construct: ranged algebraic variable", d.span)
                self.global_alg[d.name] = d

        aut_decls = [d for d in decls if isinstance(d, ast.AutomatonDecl)]
        for d in aut_decls:
            self._register_automaton(d)

        automata = [self._resolve_automaton(self.automata[d.name]) for d in aut_decls]

        # algebraic definitions are checked even when nothing references them
        for name, decl in self.global_alg.items():
            self._inline_alg(name, decl, None)
        for info in self.automata.values():
            for name, decl in info.alg.items():
                self._inline_alg(f"{info.decl.name}.{name}", decl, info)

        for d in decls:
            if isinstance(d, ast.PlantInvariantDecl):
                self.plant_invariants.append(self._resolve_bool(d.expr, None))
            elif isinstance(d, ast.RequirementInvariantDecl):
                self.requirement_invariants.append(self._resolve_bool(d.expr, None))
            elif isinstance(d, ast.EventConditionDecl):
                ev = self._resolve_event_ref(d.event, None)
                cond = self._resolve_bool(d.condition, None)
                self.event_conditions.setdefault(ev, []).append(cond)

        used = set()
        for aut in automata:
            used |= aut.alphabet
        for ei, ev in enumerate(self.events):
            if ei not in used:
                self.warnings.append(f"event '{ev.name}' is declared but never used")

        alg_definitions = dict(self.alg_cache)
        return m.ResolvedSpec(
            automata=automata,
            events=self.events,
            variables=self.variables,
            enums=self.enums,
            plant_invariants=self.plant_invariants,
            requirement_invariants=self.requirement_invariants,
            event_conditions=self.event_conditions,
            alg_definitions=alg_definitions,
            warnings=self.warnings,
        )

    # -- expansion ---------------------------------------------------------------

    def _expand_feature_models(self, decls):
        from fsc import features  # deferred; features builds AST fragments

        out = []
        for d in decls:
            if isinstance(d, ast.FeatureModelDecl):
                fm, mode, strictness = features.interpret_block(d)
                out.extend(features.compile_feature_model(fm, mode, strictness).declarations)
            else:
                out.append(d)
        return out

    def _expand_instances(self, decls):
        defs: dict[str, ast.AutomatonDefDecl] = {}
        out = []
        for d in decls:
            if isinstance(d, ast.AutomatonDefDecl):
                if d.name in defs:
                    self.fail(f"duplicate definition '{d.name}'", d.span)
                defs[d.name] = d
            else:
                out.append(d)
        expanded = []
        for d in out:
            if not isinstance(d, ast.InstanceDecl):
                expanded.append(d)
                continue
            dfn = defs.get(d.def_name)
            if dfn is None:
                self.fail(f"unknown definition '{d.def_name}'", d.span)
            if len(d.args) != len(dfn.params):
                self.fail(
                    f"'{d.def_name}' takes {len(dfn.params)} argument(s), got {len(d.args)}",
                    d.span)
            for param, arg in zip(dfn.params, d.args):
                ty = self._type_of_global_expr(arg)
                want = self._domain_label(param.type)
                if ty != want:
                    self.fail(
                        f"argument for '{param.name}' of '{d.def_name}' must be {want}, got {ty}",
                        d.span)
            mapping = {p.name: a for p, a in zip(dfn.params, d.args)}
            local_names = ({dv.name for dv in dfn.body.disc_vars}
                           | {av.name for av in dfn.body.alg_vars})
            shadowed = local_names & set(mapping)
            if shadowed:
                self.fail(f"definition '{dfn.name}' redeclares parameter "
                          f"'{sorted(shadowed)[0]}'", dfn.span)
            body = _subst_body(dfn.body, mapping)
            expanded.append(ast.AutomatonDecl(dfn.kind, d.name, body, d.span))
        return expanded

    def _domain_label(self, ty: ast.TypeExpr):
        if isinstance(ty, ast.BoolType):
            return "bool"
        if isinstance(ty, ast.IntType):
            return "int"
        return ("enum", ty.name)

    def _type_of_global_expr(self, expr: ast.Expr):
        return self._resolve_expr(expr, None).ty

    # -- registration -------------------------------------------------------------

    def _new_event(self, name: str, controllable: bool) -> int:
        self.events.append(m.REvent(name, controllable))
        return len(self.events) - 1

    def _new_variable(self, name, owner, domain, init) -> int:
        self.variables.append(m.RVariable(name, owner, domain, init))
        return len(self.variables) - 1

    def _domain_of(self, ty: ast.TypeExpr, span: Span, what: str) -> m.Domain:
        if isinstance(ty, ast.BoolType):
            return m.BoolDomain()
        if isinstance(ty, ast.IntType):
            if ty.lower is None:
                lo, hi = self.int_range
                self.warnings.append(
                    f"{span}: bare 'int' for {what} defaulted to int[{lo}..{hi}]")
                return m.IntDomain(lo, hi)
            if ty.lower > ty.upper:
                self.fail(f"empty integer range {ty}", span)
            return m.IntDomain(ty.lower, ty.upper)
        dom = self.enums.get(ty.name)
        if dom is None:
            self.fail(f"unknown type '{ty.name}'", span)
        return dom

    def _register_automaton(self, decl: ast.AutomatonDecl):
        if decl.name in self.automata:
            self.fail(f"duplicate automaton '{decl.name}'", decl.span)
        if decl.name in self.global_alg or decl.name in self.global_events:
            self.fail(f"'{decl.name}' already declared", decl.span)
        index = len(self.automata)
        info = _AutInfo(decl, index, {}, {}, {}, {})
        body = decl.body
        if not body.locations:
            self.fail(f"automaton '{decl.name}' needs at least one location", decl.span)
        for li, loc in enumerate(body.locations):
            key = loc.name if loc.name is not None else "*"
            if key in info.locations:
                self.fail(f"duplicate location '{loc.name}' in '{decl.name}'", loc.span)
            if key == "*" and len(body.locations) > 1:
                self.fail(f"automaton '{decl.name}' mixes anonymous and named locations",
                          loc.span)
            info.locations[key] = li
        for ev in body.events:
            for name in ev.names:
                if name in info.events:
                    self.fail(f"duplicate event '{name}' in '{decl.name}'", ev.span)
                info.events[name] = self._new_event(f"{decl.name}.{name}", ev.controllable)
        for dv in body.disc_vars:
            if dv.name in info.disc or dv.name in info.alg:
                self.fail(f"duplicate variable '{dv.name}' in '{decl.name}'", dv.span)
            dom = self._domain_of(dv.type, dv.span, f"{decl.name}.{dv.name}")
            info.disc[dv.name] = self._new_variable(f"{decl.name}.{dv.name}", index, dom, None)
        for av in body.alg_vars:
            if av.name in info.disc or av.name in info.alg:
                self.fail(f"duplicate variable '{av.name}' in '{decl.name}'", av.span)
            if isinstance(av.type, ast.IntType) and av.type.lower is not None:
                self.fail("unsupported construct: ranged algebraic variable", av.span)
            info.alg[av.name] = av
        self.automata[decl.name] = info

    # -- automaton resolution -------------------------------------------------------

    def _resolve_automaton(self, info: _AutInfo) -> m.RAutomaton:
        decl = info.decl
        body = decl.body
        # discrete variable initial values
        for dv in body.disc_vars:
            vi = info.disc[dv.name]
            var = self.variables[vi]
            if dv.any_init:
                var.init = None
            else:
                value = self._const_value(dv.init, info, var.domain, dv)
                var.init = (value,)
        locations = tuple(loc.name if loc.name is not None else "*" for loc in body.locations)
        initials = []
        marked = set()
        edges: list[m.REdge] = []
        alphabet: set[int] = set()
        for li, loc in enumerate(body.locations):
            if loc.initial:
                pred = None
                if loc.initial_pred is not None:
                    pred = self._resolve_bool(loc.initial_pred, info)
                initials.append((li, pred))
            if loc.marked:
                marked.add(li)
            for edge in loc.edges:
                guard = None if edge.guard is None else self._resolve_bool(edge.guard, info)
                updates = []
                for name, expr in edge.updates:
                    if name not in info.disc:
                        if any(name in other.disc for other in self.automata.values()):
                            self.fail(
                                f"'{decl.name}' may not write '{name}' "
                                "(variables are writable only where declared)", edge.span)
                        self.fail(f"unknown variable '{name}' in update", edge.span)
                    vi = info.disc[name]
                    value = self._resolve_expr(expr, info)
                    self._check_assignable(self.variables[vi], value, edge)
                    updates.append((vi, value))
                if edge.target is None:
                    target = li
                elif edge.target in info.locations:
                    target = info.locations[edge.target]
                else:
                    self.fail(f"unknown location '{edge.target}' in '{decl.name}'", edge.span)
                for ev_name in edge.events:
                    ev = self._resolve_event_ref(ev_name, info)
                    alphabet.add(ev)
                    label = (f"{decl.name}.{locations[li]} --{self.events[ev].name}--> "
                             f"{locations[target]}")
                    edges.append(m.REdge(ev, li, target, guard, tuple(updates), label))
        if not initials and decl.kind != "supervisor":
            self.warnings.append(f"automaton '{decl.name}' has no initial location")
        if body.alphabet is not None:
            explicit = set()
            for name in body.alphabet:
                explicit.add(self._resolve_event_ref(name, info))
            missing = alphabet - explicit
            if missing:
                self.fail(f"'{decl.name}' has edges outside its declared alphabet", decl.span)
            unused = explicit - alphabet
            if unused and not body.monitor:
                names = ", ".join(sorted(self.events[e].name for e in unused))
                self.fail(f"'{decl.name}' lists alphabet events without edges: {names}",
                          decl.span)
            alphabet = explicit
        return m.RAutomaton(
            name=decl.name, kind=decl.kind, monitor=body.monitor,
            locations=locations, initials=tuple(initials), marked=frozenset(marked),
            edges=edges, alphabet=frozenset(alphabet),
            own_vars=tuple(info.disc.values()))

    def _check_assignable(self, var: m.RVariable, value: m.RExpr, edge: ast.EdgeDecl):
        want = ("bool" if isinstance(var.domain, m.BoolDomain)
                else "int" if isinstance(var.domain, m.IntDomain)
                else ("enum", var.domain.name))
        if value.ty != want:
            self.fail(f"cannot assign {self._tyname(value.ty)} to '{var.name}'", edge.span)

    def _const_value(self, expr: ast.Expr, info: _AutInfo, domain: m.Domain, dv):
        resolved = self._resolve_expr(expr, info)
        try:
            value = _const_eval(resolved)
        except ValueError:
            self.fail(f"initial value of '{dv.name}' must be constant", dv.span)
        if isinstance(domain, m.BoolDomain) and isinstance(value, bool):
            return value
        if isinstance(domain, m.IntDomain) and isinstance(value, int) and not isinstance(value, bool):
            if not domain.contains(value):
                self.fail(f"initial value {value} outside {domain} for '{dv.name}'", dv.span)
            return value
        if isinstance(domain, m.EnumDomain) and resolved.ty == ("enum", domain.name):
            return value
        self.fail(f"initial value of '{dv.name}' does not match {domain}", dv.span)

    # -- event references -----------------------------------------------------------

    def _resolve_event_ref(self, name: ast.Name, info: _AutInfo | None) -> int:
        if len(name.parts) == 1:
            word = name.parts[0]
            if info is not None and word in info.events:
                return info.events[word]
            if word in self.global_events:
                return self.global_events[word]
            self.fail(f"unknown event '{word}'", name.span)
        if len(name.parts) == 2:
            aut, ev = name.parts
            owner = self.automata.get(aut)
            if owner is None:
                self.fail(f"unknown automaton '{aut}'", name.span)
            if ev not in owner.events:
                self.fail(f"automaton '{aut}' has no event '{ev}'", name.span)
            return owner.events[ev]
        self.fail(f"malformed event reference '{name}'", name.span)

    # -- expressions ------------------------------------------------------------------

    def _tyname(self, ty) -> str:
        return ty if isinstance(ty, str) else f"enum {ty[1]}"

    def _resolve_bool(self, expr: ast.Expr, info: _AutInfo | None) -> m.RExpr:
        resolved = self._resolve_expr(expr, info)
        if resolved.ty != "bool":
            self.fail(f"expected a boolean expression, got {self._tyname(resolved.ty)}",
                      getattr(expr, "span", None))
        return resolved

    def _inline_alg(self, qualified: str, decl: ast.AlgVarDecl, info: _AutInfo | None) -> m.RExpr:
        if qualified in self.alg_cache:
            return self.alg_cache[qualified]
        if qualified in self.alg_stack:
            cycle = " -> ".join(self.alg_stack + [qualified])
            self.fail(f"cyclic algebraic variable: {cycle}", decl.span)
        self.alg_stack.append(qualified)
        try:
            resolved = self._resolve_expr(decl.expr, info)
        finally:
            self.alg_stack.pop()
        want = self._domain_label(decl.type)
        if isinstance(decl.type, ast.IntType):
            ok = resolved.ty == "int"
        else:
            ok = resolved.ty == want
        if not ok:
            self.fail(f"algebraic variable '{qualified}' declared {decl.type} "
                      f"but defined as {self._tyname(resolved.ty)}", decl.span)
        self.alg_cache[qualified] = resolved
        return resolved

    def _resolve_name(self, name: ast.Name, info: _AutInfo | None) -> m.RExpr:
        parts = name.parts
        if len(parts) == 1:
            word = parts[0]
            if info is not None:
                if word in info.disc:
                    vi = info.disc[word]
                    return m.RVar(vi, self._var_ty(vi))
                if word in info.alg:
                    return self._inline_alg(f"{info.decl.name}.{word}", info.alg[word], info)
                if word in info.locations:
                    return m.RLoc(info.index, info.locations[word])
            if word in self.global_alg:
                return self._inline_alg(word, self.global_alg[word], None)
            if word in self.literals:
                enum, idx = self.literals[word]
                return m.RLit(idx, ("enum", enum))
            self.fail(f"unknown name '{word}'", name.span)
        if len(parts) == 2:
            aut, member = parts
            owner = self.automata.get(aut)
            if owner is None:
                self.fail(f"unknown name '{name}'", name.span)
            if member in owner.disc:
                vi = owner.disc[member]
                return m.RVar(vi, self._var_ty(vi))
            if member in owner.alg:
                return self._inline_alg(f"{aut}.{member}", owner.alg[member], owner)
            if member in owner.locations:
                return m.RLoc(owner.index, owner.locations[member])
            self.fail(f"automaton '{aut}' has no variable or location '{member}'", name.span)
        self.fail(f"malformed reference '{name}'", name.span)

    def _var_ty(self, vi: int):
        dom = self.variables[vi].domain
        if isinstance(dom, m.BoolDomain):
            return "bool"
        if isinstance(dom, m.IntDomain):
            return "int"
        return ("enum", dom.name)

    def _resolve_expr(self, expr: ast.Expr, info: _AutInfo | None) -> m.RExpr:
        if isinstance(expr, ast.Lit):
            if isinstance(expr.value, bool):
                return m.RLit(expr.value, "bool")
            return m.RLit(expr.value, "int")
        if isinstance(expr, ast.Name):
            return self._resolve_name(expr, info)
        if isinstance(expr, ast.Call):
            self.fail("unsupported construct: aggregate call outside a featuremodel block",
                      expr.span)
        if isinstance(expr, ast.Unary):
            operand = self._resolve_expr(expr.operand, info)
            if expr.op == "not":
                if operand.ty != "bool":
                    self.fail("'not' needs a boolean operand", expr.span)
                return m.RUn("not", operand, "bool")
            if operand.ty != "int":
                self.fail("unary '-' needs an integer operand", expr.span)
            return m.RUn("-", operand, "int")
        if isinstance(expr, ast.IfExpr):
            cond = self._resolve_bool(expr.cond, info)
            then = self._resolve_expr(expr.then, info)
            orelse = self._resolve_expr(expr.orelse, info)
            if then.ty != orelse.ty:
                self.fail("branches of 'if' have different types", expr.span)
            return m.RIf(cond, then, orelse, then.ty)
        if isinstance(expr, ast.Binary):
            left = self._resolve_expr(expr.left, info)
            right = self._resolve_expr(expr.right, info)
            op = expr.op
            if op in ("and", "or", "=>", "<=>"):
                if left.ty != "bool" or right.ty != "bool":
                    self.fail(f"'{op}' needs boolean operands", expr.span)
                return m.RBin(op, left, right, "bool")
            if op in ("+", "-", "*"):
                if left.ty != "int" or right.ty != "int":
                    self.fail(f"'{op}' needs integer operands", expr.span)
                return m.RBin(op, left, right, "int")
            if op in ("<", "<=", ">", ">="):
                if left.ty != "int" or right.ty != "int":
                    self.fail(f"'{op}' needs integer operands", expr.span)
                return m.RBin(op, left, right, "bool")
            if op in ("=", "!="):
                if left.ty != right.ty:
                    self.fail(f"'{op}' compares values of different types", expr.span)
                return m.RBin(op, left, right, "bool")
        raise AssertionError(f"unhandled expression {expr!r}")


def _const_eval(e: m.RExpr):
    if isinstance(e, m.RLit):
        return e.value
    if isinstance(e, m.RUn):
        v = _const_eval(e.operand)
        return (not v) if e.op == "not" else -v
    if isinstance(e, m.RBin):
        a, b = _const_eval(e.left), _const_eval(e.right)
        return _APPLY[e.op](a, b)
    if isinstance(e, m.RIf):
        return _const_eval(e.then) if _const_eval(e.cond) else _const_eval(e.orelse)
    raise ValueError("not constant")


_APPLY = {
    "and": lambda a, b: a and b,
    "or": lambda a, b: a or b,
    "=>": lambda a, b: (not a) or b,
    "<=>": lambda a, b: a == b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
}


def resolve(spec: ast.SourceSpec, int_range=DEFAULT_INT_RANGE) -> m.ResolvedSpec:
    """Expand, check and flatten a parsed specification."""
    return _Resolver(spec, int_range).run()
