"""Recursive-descent parser for the .fsc language.

Grammar (EBNF, ``[]`` optional, ``{}`` repetition):

    spec        = { decl } EOF
    decl        = enum | events | alg | "plant" "invariant" expr ";"
                | kind ["automaton"] IDENT ":" body "end"
                | kind "def" IDENT "(" [params] ")" ":" body "end"
                | requirement | instance | fmblock
    kind        = "plant" | "requirement" | "supervisor"
    enum        = "enum" IDENT "=" IDENT {"," IDENT} ";"
    events      = ("controllable"|"uncontrollable") IDENT {"," IDENT} ";"
    alg         = "alg" type IDENT "=" expr ";"
    requirement = "requirement" ( "automaton" IDENT ":" body "end"
                                | expr ["needs" expr] ";" )
    instance    = IDENT ":" IDENT "(" [expr {"," expr}] ")" ";"
    params      = "alg" type IDENT {"," "alg" type IDENT}
    body        = { "monitor" ";" | "alphabet" name {"," name} ";"
                  | events | disc | alg | location }
    disc        = "disc" type IDENT ("=" expr | "in" "any") ";"
    location    = "location" [IDENT] ":" { "initial" [expr] ";" | "marked" ";" | edge }
    edge        = "edge" name {"," name} ["when" expr]
                  ["do" IDENT ":=" expr {"," IDENT ":=" expr}] ["goto" IDENT] ";"
    type        = "bool" | "int" ["[" int ".." int "]"] | IDENT
    name        = IDENT {"." IDENT}
    fmblock     = "featuremodel" IDENT ":" { fmstmt } "end"

Expression precedence, loosest first: ``<=>`` (left), ``=>`` (right), ``or``,
``and``, ``not``, comparisons (non-chaining), ``+ -``, ``*``, unary ``-``.
Conditionals are written ``if c : a else b end``.

Feature-model block statements use contextual (non-reserved) directive words:

    fmstmt = "root" F ";" | "mandatory" F F ";" | "optional" F F ";"
           | "alternative" F ":" F {"," F} ";" | "or" F ":" F {"," F} ";"
           | "requires" F F ";" | "excludes" F F ";"
           | "attribute" F "." IDENT "=" INT ";" | "constraint" expr ";"
           | "mode" ("static"|"dynamic") ";" | "strictness" ("strict"|"relaxed") ";"
           | "reconfig" ("controllable"|"uncontrollable") [F {"," F}] ";"
           | "swap" IDENT ":" F {"," F} ";" | "invariant" expr ";"
"""

from __future__ import annotations

from fsc.errors import ParseError, Span
from fsc.lang import syntax as ast
from fsc.lang.tokens import Token, tokenize

_COMPARISONS = ("=", "!=", "<", "<=", ">", ">=")
_KINDS = ("plant", "requirement", "supervisor")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing -----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, value: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (value is None or tok.value == value)

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        if self.at(kind, value):
            return self.advance()
        return None

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind == kind and (value is None or tok.value == value):
            return self.advance()
        want = value if value is not None else kind
        got = tok.value if tok.kind != "eof" else "end of input"
        raise ParseError(f"expected '{want}', found '{got}'", tok.span)

    def unsupported(self, what: str, span: Span):
        raise ParseError(f"unsupported construct: {what}", span)

    # -- entry --------------------------------------------------------------

    def parse_spec(self) -> ast.SourceSpec:
        decls: list[ast.Declaration] = []
        while not self.at("eof"):
            decls.append(self.parse_declaration())
        return ast.SourceSpec(tuple(decls))

    def parse_declaration(self) -> ast.Declaration:
        tok = self.peek()
        if tok.kind == "kw":
            if tok.value == "enum":
                return self.parse_enum()
            if tok.value in ("controllable", "uncontrollable"):
                return self.parse_events()
            if tok.value == "alg":
                return self.parse_alg()
            if tok.value == "featuremodel":
                return self.parse_fmblock()
            if tok.value == "plant" and self.peek(1).value == "invariant":
                span = self.advance().span
                self.advance()
                expr = self.parse_expr()
                self.expect("op", ";")
                return ast.PlantInvariantDecl(expr, span)
            if tok.value == "requirement" and self.peek(1).value not in ("automaton", "def"):
                return self.parse_requirement()
            if tok.value in _KINDS:
                return self.parse_automaton_or_def()
        if tok.kind == "ident" and self.peek(1).value == ":":
            return self.parse_instance()
        raise ParseError(f"expected a declaration, found '{tok.value}'", tok.span)

    # -- simple declarations ------------------------------------------------

    def parse_enum(self) -> ast.EnumDecl:
        span = self.expect("kw", "enum").span
        name = self.expect("ident").value
        self.expect("op", "=")
        literals = [self.expect("ident").value]
        while self.accept("op", ","):
            literals.append(self.expect("ident").value)
        self.expect("op", ";")
        return ast.EnumDecl(name, tuple(literals), span)

    def parse_events(self) -> ast.EventDecl:
        tok = self.advance()
        names = [self.expect("ident").value]
        while self.accept("op", ","):
            names.append(self.expect("ident").value)
        self.expect("op", ";")
        return ast.EventDecl(tuple(names), tok.value == "controllable", tok.span)

    def parse_type(self) -> ast.TypeExpr:
        tok = self.peek()
        if self.accept("kw", "bool"):
            return ast.BoolType()
        if self.accept("kw", "int"):
            if self.accept("op", "["):
                lower = self.parse_int_literal()
                self.expect("op", "..")
                upper = self.parse_int_literal()
                self.expect("op", "]")
                return ast.IntType(lower, upper)
            return ast.IntType()
        if tok.kind == "ident":
            return ast.NamedType(self.advance().value)
        raise ParseError(f"expected a type, found '{tok.value}'", tok.span)

    def parse_int_literal(self) -> int:
        sign = -1 if self.accept("op", "-") else 1
        return sign * int(self.expect("int").value)

    def parse_alg(self) -> ast.AlgVarDecl:
        span = self.expect("kw", "alg").span
        ty = self.parse_type()
        name = self.expect("ident").value
        self.expect("op", "=")
        expr = self.parse_expr()
        self.expect("op", ";")
        return ast.AlgVarDecl(name, ty, expr, span)

    def parse_requirement(self) -> ast.Declaration:
        span = self.expect("kw", "requirement").span
        expr = self.parse_expr()
        if self.accept("kw", "needs"):
            if not isinstance(expr, ast.Name):
                raise ParseError("event condition requires an event name before 'needs'", span)
            condition = self.parse_expr()
            self.expect("op", ";")
            return ast.EventConditionDecl(expr, condition, span)
        self.expect("op", ";")
        return ast.RequirementInvariantDecl(expr, span)

    def parse_instance(self) -> ast.InstanceDecl:
        name_tok = self.expect("ident")
        self.expect("op", ":")
        def_name = self.expect("ident").value
        self.expect("op", "(")
        args: list[ast.Expr] = []
        if not self.at("op", ")"):
            args.append(self.parse_expr())
            while self.accept("op", ","):
                args.append(self.parse_expr())
        self.expect("op", ")")
        self.expect("op", ";")
        return ast.InstanceDecl(name_tok.value, def_name, tuple(args), name_tok.span)

    # -- automata -----------------------------------------------------------

    def parse_automaton_or_def(self) -> ast.Declaration:
        kind_tok = self.advance()
        kind = kind_tok.value
        if self.accept("kw", "def"):
            if kind == "supervisor":
                self.unsupported("supervisor definitions", kind_tok.span)
            name = self.expect("ident").value
            self.expect("op", "(")
            params: list[ast.ParamDecl] = []
            if not self.at("op", ")"):
                params.append(self.parse_param())
                while self.accept("op", ","):
                    params.append(self.parse_param())
            self.expect("op", ")")
            self.expect("op", ":")
            body = self.parse_body()
            self.expect("kw", "end")
            return ast.AutomatonDefDecl(kind, name, tuple(params), body, kind_tok.span)
        self.accept("kw", "automaton")
        name = self.expect("ident").value
        self.expect("op", ":")
        body = self.parse_body()
        self.expect("kw", "end")
        return ast.AutomatonDecl(kind, name, body, kind_tok.span)

    def parse_param(self) -> ast.ParamDecl:
        span = self.expect("kw", "alg").span
        ty = self.parse_type()
        name = self.expect("ident").value
        return ast.ParamDecl(name, ty, span)

    def parse_body(self) -> ast.AutomatonBody:
        monitor = False
        alphabet: tuple[ast.Name, ...] | None = None
        events: list[ast.EventDecl] = []
        disc_vars: list[ast.DiscVarDecl] = []
        alg_vars: list[ast.AlgVarDecl] = []
        locations: list[ast.LocationDecl] = []
        while True:
            tok = self.peek()
            if self.at("kw", "end") or self.at("eof"):
                break
            if self.accept("kw", "monitor"):
                if not self.at("op", ";"):
                    self.unsupported("monitor with an event list", tok.span)
                self.expect("op", ";")
                monitor = True
            elif self.accept("kw", "alphabet"):
                names = [self.parse_name()]
                while self.accept("op", ","):
                    names.append(self.parse_name())
                self.expect("op", ";")
                alphabet = tuple(names)
            elif tok.value in ("controllable", "uncontrollable"):
                events.append(self.parse_events())
            elif tok.value == "disc":
                disc_vars.append(self.parse_disc())
            elif tok.value == "alg":
                alg_vars.append(self.parse_alg())
            elif tok.value == "location":
                locations.append(self.parse_location())
            else:
                raise ParseError(
                    f"expected location, variable, event or 'end', found '{tok.value}'",
                    tok.span)
        return ast.AutomatonBody(monitor, alphabet, tuple(events),
                                 tuple(disc_vars), tuple(alg_vars), tuple(locations))

    def parse_disc(self) -> ast.DiscVarDecl:
        span = self.expect("kw", "disc").span
        ty = self.parse_type()
        name = self.expect("ident").value
        if self.accept("kw", "in"):
            self.expect("kw", "any")
            self.expect("op", ";")
            return ast.DiscVarDecl(name, ty, None, True, span)
        self.expect("op", "=")
        init = self.parse_expr()
        self.expect("op", ";")
        return ast.DiscVarDecl(name, ty, init, False, span)

    def parse_location(self) -> ast.LocationDecl:
        span = self.expect("kw", "location").span
        name = None
        if self.at("ident"):
            name = self.advance().value
        self.expect("op", ":")
        initial = False
        initial_pred: ast.Expr | None = None
        marked = False
        edges: list[ast.EdgeDecl] = []
        while True:
            tok = self.peek()
            if self.accept("kw", "initial"):
                initial = True
                if not self.at("op", ";"):
                    initial_pred = self.parse_expr()
                self.expect("op", ";")
            elif self.accept("kw", "marked"):
                if not self.at("op", ";"):
                    self.unsupported("marked with a predicate", tok.span)
                self.expect("op", ";")
                marked = True
            elif tok.value == "edge":
                edges.append(self.parse_edge())
            else:
                break
        return ast.LocationDecl(name, initial, initial_pred, marked, tuple(edges), span)

    def parse_edge(self) -> ast.EdgeDecl:
        span = self.expect("kw", "edge").span
        events = [self.parse_name()]
        while self.accept("op", ","):
            events.append(self.parse_name())
        guard = None
        if self.accept("kw", "when"):
            guard = self.parse_expr()
        updates: list[tuple[str, ast.Expr]] = []
        if self.accept("kw", "do"):
            updates.append(self.parse_update())
            while self.accept("op", ","):
                updates.append(self.parse_update())
        target = None
        if self.accept("kw", "goto"):
            target = self.expect("ident").value
        self.expect("op", ";")
        return ast.EdgeDecl(tuple(events), guard, tuple(updates), target, span)

    def parse_update(self) -> tuple[str, ast.Expr]:
        name = self.expect("ident").value
        self.expect("op", ":=")
        return name, self.parse_expr()

    def parse_name(self) -> ast.Name:
        tok = self.expect("ident")
        parts = [tok.value]
        while self.accept("op", "."):
            parts.append(self.expect("ident").value)
        return ast.Name(tuple(parts), tok.span)

    # -- expressions ----------------------------------------------------------

    def parse_expr(self) -> ast.Expr:
        return self.parse_iff()

    def parse_iff(self) -> ast.Expr:
        left = self.parse_implies()
        while self.at("op", "<=>"):
            span = self.advance().span
            left = ast.Binary("<=>", left, self.parse_implies(), span)
        return left

    def parse_implies(self) -> ast.Expr:
        left = self.parse_or()
        if self.at("op", "=>"):
            span = self.advance().span
            return ast.Binary("=>", left, self.parse_implies(), span)
        return left

    def parse_or(self) -> ast.Expr:
        left = self.parse_and()
        while self.at("kw", "or"):
            span = self.advance().span
            left = ast.Binary("or", left, self.parse_and(), span)
        return left

    def parse_and(self) -> ast.Expr:
        left = self.parse_not()
        while self.at("kw", "and"):
            span = self.advance().span
            left = ast.Binary("and", left, self.parse_not(), span)
        return left

    def parse_not(self) -> ast.Expr:
        if self.at("kw", "not"):
            span = self.advance().span
            return ast.Unary("not", self.parse_not(), span)
        return self.parse_comparison()

    def parse_comparison(self) -> ast.Expr:
        left = self.parse_additive()
        tok = self.peek()
        if tok.kind == "op" and tok.value in _COMPARISONS:
            self.advance()
            return ast.Binary(tok.value, left, self.parse_additive(), tok.span)
        return left

    def parse_additive(self) -> ast.Expr:
        left = self.parse_multiplicative()
        while self.peek().kind == "op" and self.peek().value in ("+", "-"):
            tok = self.advance()
            left = ast.Binary(tok.value, left, self.parse_multiplicative(), tok.span)
        return left

    def parse_multiplicative(self) -> ast.Expr:
        left = self.parse_unary()
        while self.at("op", "*"):
            span = self.advance().span
            left = ast.Binary("*", left, self.parse_unary(), span)
        return left

    def parse_unary(self) -> ast.Expr:
        if self.at("op", "-"):
            span = self.advance().span
            return ast.Unary("-", self.parse_unary(), span)
        return self.parse_atom()

    def parse_atom(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return ast.Lit(int(tok.value), tok.span)
        if self.accept("kw", "true"):
            return ast.Lit(True, tok.span)
        if self.accept("kw", "false"):
            return ast.Lit(False, tok.span)
        if self.accept("op", "("):
            expr = self.parse_expr()
            self.expect("op", ")")
            return expr
        if self.accept("kw", "if"):
            cond = self.parse_expr()
            self.expect("op", ":")
            then = self.parse_expr()
            self.expect("kw", "else")
            orelse = self.parse_expr()
            self.expect("kw", "end")
            return ast.IfExpr(cond, then, orelse, tok.span)
        if tok.kind == "ident":
            name = self.parse_name()
            if len(name.parts) == 1 and self.at("op", "("):
                self.advance()
                args = [self.parse_expr()]
                while self.accept("op", ","):
                    args.append(self.parse_expr())
                self.expect("op", ")")
                return ast.Call(name.parts[0], tuple(args), tok.span)
            return name
        raise ParseError(f"expected an expression, found '{tok.value}'", tok.span)

    # -- featuremodel block ---------------------------------------------------

    _FM_PAIR = ("mandatory", "optional", "requires", "excludes")

    def parse_fmblock(self) -> ast.FeatureModelDecl:
        span = self.expect("kw", "featuremodel").span
        name = self.expect("ident").value
        self.expect("op", ":")
        stmts: list[ast.FmStmt] = []
        while not self.at("kw", "end"):
            stmts.append(self.parse_fmstmt())
        self.expect("kw", "end")
        return ast.FeatureModelDecl(name, tuple(stmts), span)

    def parse_fmstmt(self) -> ast.FmStmt:
        tok = self.peek()
        word = tok.value
        if word == "or" and tok.kind == "kw":
            self.advance()
            return self.parse_fm_group("or", tok.span)
        if tok.kind == "kw" and word == "invariant":
            self.advance()
            expr = self.parse_expr()
            self.expect("op", ";")
            return ast.FmStmt("invariant", expr=expr, span=tok.span)
        if tok.kind == "kw" and word in ("controllable", "uncontrollable"):
            # shorthand for `reconfig controllable;` inside the block
            self.advance()
            self.expect("op", ";")
            return ast.FmStmt("reconfig", names=(), value=int(word == "controllable"), span=tok.span)
        if tok.kind != "ident":
            raise ParseError(f"expected a feature-model statement, found '{word}'", tok.span)
        self.advance()
        if word == "root":
            f = self.expect("ident").value
            self.expect("op", ";")
            return ast.FmStmt("root", (f,), span=tok.span)
        if word in self._FM_PAIR:
            a = self.expect("ident").value
            b = self.expect("ident").value
            self.expect("op", ";")
            return ast.FmStmt(word, (a, b), span=tok.span)
        if word == "alternative":
            return self.parse_fm_group("alternative", tok.span)
        if word == "attribute":
            feature = self.expect("ident").value
            self.expect("op", ".")
            attr = self.expect("ident").value
            self.expect("op", "=")
            value = self.parse_int_literal()
            self.expect("op", ";")
            return ast.FmStmt("attribute", (feature, attr), value=value, span=tok.span)
        if word == "constraint":
            expr = self.parse_expr()
            self.expect("op", ";")
            return ast.FmStmt("constraint", expr=expr, span=tok.span)
        if word == "mode":
            value = self.expect("ident").value
            if value not in ("static", "dynamic"):
                raise ParseError("mode must be 'static' or 'dynamic'", tok.span)
            self.expect("op", ";")
            return ast.FmStmt("mode", (value,), span=tok.span)
        if word == "strictness":
            value = self.expect("ident").value
            if value not in ("strict", "relaxed"):
                raise ParseError("strictness must be 'strict' or 'relaxed'", tok.span)
            self.expect("op", ";")
            return ast.FmStmt("strictness", (value,), span=tok.span)
        if word == "reconfig":
            ctrl_tok = self.expect("kw")
            if ctrl_tok.value not in ("controllable", "uncontrollable"):
                raise ParseError("reconfig must be 'controllable' or 'uncontrollable'", tok.span)
            names: list[str] = []
            if self.at("ident"):
                names.append(self.advance().value)
                while self.accept("op", ","):
                    names.append(self.expect("ident").value)
            self.expect("op", ";")
            return ast.FmStmt("reconfig", tuple(names),
                              value=int(ctrl_tok.value == "controllable"), span=tok.span)
        if word == "swap":
            event = self.expect("ident").value
            self.expect("op", ":")
            members = [self.expect("ident").value]
            while self.accept("op", ","):
                members.append(self.expect("ident").value)
            self.expect("op", ";")
            return ast.FmStmt("swap", (event, *members), span=tok.span)
        raise ParseError(f"unknown feature-model statement '{word}'", tok.span)

    def parse_fm_group(self, kind: str, span: Span) -> ast.FmStmt:
        parent = self.expect("ident").value
        self.expect("op", ":")
        children = [self.expect("ident").value]
        while self.accept("op", ","):
            children.append(self.expect("ident").value)
        self.expect("op", ";")
        return ast.FmStmt(kind, (parent, *children), span=span)


def parse(source: str) -> ast.SourceSpec:
    """Parse .fsc text into a SourceSpec; raises LexError/ParseError."""
    return _Parser(tokenize(source)).parse_spec()


def parse_expression(source: str) -> ast.Expr:
    """Parse a single expression (used for guards given on the command line)."""
    parser = _Parser(tokenize(source))
    expr = parser.parse_expr()
    parser.expect("eof")
    return expr
