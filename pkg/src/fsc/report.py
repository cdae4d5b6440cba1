"""Report rendering: delimited statistics plus matplotlib figures.

The report directory receives stats.tsv (stable key/value lines) and, when the
explored space is small enough to draw, a node-link picture of the state space
mirroring the DOT conventions (doubled ring for marked states, dashed edges
for uncontrollable events), plus a per-event transition histogram. Synthesis
reports add the shrinking good-set curve.
"""

from __future__ import annotations

import math
import pathlib

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from fsc.semantics import TransitionSystem

MAX_DRAWN_STATES = 300


def write_stats(path: pathlib.Path, pairs: list[tuple[str, object]]):
    lines = [f"{key}\t{value}" for key, value in pairs]
    path.write_text("\n".join(lines) + "\n")


def stats_pairs(stats: dict) -> list[tuple[str, object]]:
    pairs = [(k, stats[k]) for k in ("states", "transitions", "initial", "marked")
             if k in stats]
    if "components" in stats:
        pairs.append(("components", " ".join(str(c) for c in stats["components"])))
    for name, count in sorted(stats.get("per_event", {}).items()):
        pairs.append((f"transitions[{name}]", count))
    return pairs


def _circular_layout(n: int):
    return [(math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n))
            for i in range(n)]


def draw_state_space(ts: TransitionSystem, path: pathlib.Path):
    """Node-link drawing for small spaces; skipped (returns False) otherwise."""
    if ts.state_count > MAX_DRAWN_STATES or ts.state_count == 0:
        return False
    pos = _circular_layout(ts.state_count)
    fig, ax = plt.subplots(figsize=(8, 8))
    for si, ei, ti in ts.transitions:
        x0, y0 = pos[si]
        x1, y1 = pos[ti]
        style = "--" if not ts.event_controllable[ei] else "-"
        if si == ti:
            ax.plot([x0], [y0], marker="o", ms=16, mfc="none", mec="0.8", zorder=1)
            continue
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="-|>", ls=style, color="0.55",
                                    shrinkA=9, shrinkB=9, lw=0.8), zorder=1)
    marked = set(ts.marked)
    initial = set(ts.initial)
    xs = [p[0] for p in pos]
    ys = [p[1] for p in pos]
    ax.scatter(xs, ys, s=140, c=["#cfe8ff" if i in initial else "white" for i in range(ts.state_count)],
               edgecolors="black", zorder=2)
    for si in marked:
        ax.scatter([pos[si][0]], [pos[si][1]], s=230, facecolors="none",
                   edgecolors="black", zorder=2)
    if ts.state_count <= 40:
        for si in range(ts.state_count):
            ax.annotate(str(si), pos[si], ha="center", va="center", fontsize=7, zorder=3)
    ax.set_axis_off()
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True


def draw_event_histogram(per_event: dict[str, int], path: pathlib.Path):
    if not per_event:
        return False
    names = sorted(per_event, key=per_event.get, reverse=True)
    counts = [per_event[n] for n in names]
    fig, ax = plt.subplots(figsize=(max(6, 0.3 * len(names)), 4))
    ax.bar(range(len(names)), counts, color="#4878a8")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=90, fontsize=7)
    ax.set_ylabel("transitions")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True


def draw_fixpoint_curve(sizes: list[int], path: pathlib.Path):
    if not sizes:
        return False
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(range(1, len(sizes) + 1), sizes, marker="o")
    ax.set_xlabel("iteration")
    ax.set_ylabel("good states")
    ax.set_xticks(range(1, len(sizes) + 1))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True
