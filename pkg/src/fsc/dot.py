"""DOT export of explored transition systems.

Figure conventions: marked states get a doubled periphery, uncontrollable
events dashed edges, initial states a dangling arrow.
"""

from __future__ import annotations

from fsc.semantics import TransitionSystem


def _quote(text: str) -> str:
    return '"' + text.replace('"', r'\"') + '"'


def to_dot(ts: TransitionSystem, name: str = "statespace",
           max_label_states: int = 60) -> str:
    lines = [f"digraph {name} {{", "  rankdir = LR;", "  node [shape = circle];"]
    label_all = ts.state_count <= max_label_states and ts.state_texts
    marked = set(ts.marked)
    for si in range(ts.state_count):
        attrs = []
        if si in marked:
            attrs.append("peripheries = 2")
        if label_all:
            attrs.append(f"label = {_quote(ts.state_texts[si])}")
            attrs.append("shape = box")
        else:
            attrs.append(f"label = {_quote(f's{si}')}")
        lines.append(f"  s{si} [{', '.join(attrs)}];")
    for k, si in enumerate(ts.initial):
        lines.append(f"  init{k} [shape = none, label = \"\"];")
        lines.append(f"  init{k} -> s{si};")
    for si, ei, ti in ts.transitions:
        style = ", style = dashed" if not ts.event_controllable[ei] else ""
        lines.append(f"  s{si} -> s{ti} [label = {_quote(ts.event_names[ei])}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
