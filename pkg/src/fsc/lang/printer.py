"""Pretty-printer; parse(print(spec)) yields a structurally identical tree."""

from __future__ import annotations

from fsc.lang import syntax as ast

# Binding strength per operator; parentheses are emitted whenever a child binds
# less tightly than its context requires.
_LEVEL = {
    "<=>": 1, "=>": 2, "or": 3, "and": 4, "not": 5,
    "=": 6, "!=": 6, "<": 6, "<=": 6, ">": 6, ">=": 6,
    "+": 7, "-": 7, "*": 8, "u-": 9,
}
_ATOM = 10


def format_expr(expr: ast.Expr, parent_level: int = 0) -> str:
    if isinstance(expr, ast.Lit):
        if isinstance(expr.value, bool):
            return "true" if expr.value else "false"
        return str(expr.value)
    if isinstance(expr, ast.Name):
        return str(expr)
    if isinstance(expr, ast.Call):
        args = ", ".join(format_expr(a) for a in expr.args)
        return f"{expr.func}({args})"
    if isinstance(expr, ast.IfExpr):
        text = (f"if {format_expr(expr.cond)} : {format_expr(expr.then)}"
                f" else {format_expr(expr.orelse)} end")
        return text
    if isinstance(expr, ast.Unary):
        level = _LEVEL["not"] if expr.op == "not" else _LEVEL["u-"]
        inner = format_expr(expr.operand, level)
        text = f"not {inner}" if expr.op == "not" else f"-{inner}"
        return f"({text})" if level < parent_level else text
    if isinstance(expr, ast.Binary):
        level = _LEVEL[expr.op]
        if expr.op == "=>":
            left = format_expr(expr.left, level + 1)  # right-associative
            right = format_expr(expr.right, level)
        elif expr.op in ("<=>", "or", "and", "+", "-", "*"):
            left = format_expr(expr.left, level)  # left-associative
            right = format_expr(expr.right, level + 1)
        else:
            left = format_expr(expr.left, level + 1)  # comparisons do not chain
            right = format_expr(expr.right, level + 1)
        text = f"{left} {expr.op} {right}"
        return f"({text})" if level < parent_level else text
    raise TypeError(f"not an expression: {expr!r}")


def _format_edge(edge: ast.EdgeDecl) -> str:
    parts = ["edge " + ", ".join(str(e) for e in edge.events)]
    if edge.guard is not None:
        parts.append("when " + format_expr(edge.guard))
    if edge.updates:
        parts.append("do " + ", ".join(f"{n} := {format_expr(e)}" for n, e in edge.updates))
    if edge.target is not None:
        parts.append("goto " + edge.target)
    return " ".join(parts) + ";"


def _format_body(body: ast.AutomatonBody, indent: str = "  ") -> list[str]:
    lines: list[str] = []
    if body.monitor:
        lines.append(indent + "monitor;")
    if body.alphabet is not None:
        lines.append(indent + "alphabet " + ", ".join(str(n) for n in body.alphabet) + ";")
    for ev in body.events:
        kw = "controllable" if ev.controllable else "uncontrollable"
        lines.append(f"{indent}{kw} {', '.join(ev.names)};")
    for dv in body.disc_vars:
        if dv.any_init:
            lines.append(f"{indent}disc {dv.type} {dv.name} in any;")
        else:
            lines.append(f"{indent}disc {dv.type} {dv.name} = {format_expr(dv.init)};")
    for av in body.alg_vars:
        lines.append(f"{indent}alg {av.type} {av.name} = {format_expr(av.expr)};")
    for loc in body.locations:
        head = f"{indent}location {loc.name}:" if loc.name else f"{indent}location:"
        lines.append(head)
        if loc.initial:
            if loc.initial_pred is not None:
                lines.append(f"{indent}  initial {format_expr(loc.initial_pred)};")
            else:
                lines.append(f"{indent}  initial;")
        if loc.marked:
            lines.append(f"{indent}  marked;")
        for edge in loc.edges:
            lines.append(indent + "  " + _format_edge(edge))
    return lines


def _format_fmstmt(stmt: ast.FmStmt) -> str:
    k = stmt.kind
    if k in ("root",):
        return f"root {stmt.names[0]};"
    if k in ("mandatory", "optional", "requires", "excludes"):
        return f"{k} {stmt.names[0]} {stmt.names[1]};"
    if k in ("alternative", "or"):
        return f"{k} {stmt.names[0]}: {', '.join(stmt.names[1:])};"
    if k == "attribute":
        return f"attribute {stmt.names[0]}.{stmt.names[1]} = {stmt.value};"
    if k == "constraint":
        return f"constraint {format_expr(stmt.expr)};"
    if k == "invariant":
        return f"invariant {format_expr(stmt.expr)};"
    if k == "mode":
        return f"mode {stmt.names[0]};"
    if k == "strictness":
        return f"strictness {stmt.names[0]};"
    if k == "reconfig":
        word = "controllable" if stmt.value else "uncontrollable"
        tail = (" " + ", ".join(stmt.names)) if stmt.names else ""
        return f"reconfig {word}{tail};"
    if k == "swap":
        return f"swap {stmt.names[0]}: {', '.join(stmt.names[1:])};"
    raise TypeError(f"unknown feature-model statement kind {k!r}")


def format_declaration(decl: ast.Declaration) -> str:
    if isinstance(decl, ast.EnumDecl):
        return f"enum {decl.name} = {', '.join(decl.literals)};"
    if isinstance(decl, ast.EventDecl):
        kw = "controllable" if decl.controllable else "uncontrollable"
        return f"{kw} {', '.join(decl.names)};"
    if isinstance(decl, ast.AlgVarDecl):
        return f"alg {decl.type} {decl.name} = {format_expr(decl.expr)};"
    if isinstance(decl, ast.PlantInvariantDecl):
        return f"plant invariant {format_expr(decl.expr)};"
    if isinstance(decl, ast.RequirementInvariantDecl):
        return f"requirement {format_expr(decl.expr)};"
    if isinstance(decl, ast.EventConditionDecl):
        return f"requirement {decl.event} needs {format_expr(decl.condition)};"
    if isinstance(decl, ast.InstanceDecl):
        args = ", ".join(format_expr(a) for a in decl.args)
        return f"{decl.name}: {decl.def_name}({args});"
    if isinstance(decl, ast.AutomatonDecl):
        lines = [f"{decl.kind} automaton {decl.name}:"]
        lines += _format_body(decl.body)
        lines.append("end")
        return "\n".join(lines)
    if isinstance(decl, ast.AutomatonDefDecl):
        params = ", ".join(f"alg {p.type} {p.name}" for p in decl.params)
        lines = [f"{decl.kind} def {decl.name}({params}):"]
        lines += _format_body(decl.body)
        lines.append("end")
        return "\n".join(lines)
    if isinstance(decl, ast.FeatureModelDecl):
        lines = [f"featuremodel {decl.name}:"]
        lines += ["  " + _format_fmstmt(s) for s in decl.statements]
        lines.append("end")
        return "\n".join(lines)
    raise TypeError(f"unknown declaration {decl!r}")


def format_spec(spec: ast.SourceSpec) -> str:
    return "\n".join(format_declaration(d) for d in spec.declarations) + "\n"
