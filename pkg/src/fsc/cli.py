"""Command-line entry point.

Subcommands: check, configs, explore, synth, simulate, verify, report.
Input files are concatenated into one model. Exit codes: 0 success,
1 diagnostics, 2 synthesis empty, 3 state budget exceeded.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from fsc import symbolic as sym
from fsc import synth as syn
from fsc.errors import BudgetError, FscError, SynthesisEmpty
from fsc.lang.parser import parse
from fsc.lang.resolver import resolve
from fsc.semantics import DEFAULT_BUDGET, CompiledModel, explore

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_SYNTHESIS_EMPTY = 2
EXIT_BUDGET = 3


def _read_model(paths, int_range):
    sources = []
    for p in paths:
        sources.append(pathlib.Path(p).read_text())
    parsed = parse("\n".join(sources))
    if not parsed.declarations:
        raise FscError("no declarations")
    spec = resolve(parsed, int_range=int_range)
    for warning in spec.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return spec


def _int_range(text: str):
    lo, _, hi = text.partition("..")
    return int(lo), int(hi)


def _emit(args, pairs):
    if args.structured:
        for key, value in pairs:
            print(f"{key}\t{value}")
    else:
        for key, value in pairs:
            print(f"{key}: {value}")


def _pick_engine(args, spec):
    if args.engine != "auto":
        return args.engine
    return "explicit" if spec.worst_case_size() <= args.budget else "symbolic"


def cmd_check(args) -> int:
    _read_model(args.files, args.int_range)
    print(f"ok: {len(args.files)} file(s)")
    return EXIT_OK


def cmd_configs(args) -> int:
    spec = _read_model(args.files, args.int_range)
    if not any(pred is not None for aut in spec.automata for _, pred in aut.initials):
        raise FscError("no validity predicate found (no location carries an "
                       "initial predicate)")
    model = sym.encode(spec)
    count = model.store.sat_count(model.initial, model.cur_cube)
    if count == 0:
        print("warning: 0 valid configurations (dead feature model)", file=sys.stderr)
    print(count)
    return EXIT_OK


def _explore_stats(args, spec):
    engine = _pick_engine(args, spec)
    if engine == "explicit":
        ts = explore(spec, budget=args.budget)
        return engine, ts, ts.stats()
    model = sym.encode(spec, order=args.var_order)
    stats = sym.reachable_stats(model)
    metrics = stats.pop("metrics")
    stats["peak_nodes"] = metrics.peak_nodes
    stats["operations"] = metrics.operations
    return engine, None, stats


def cmd_explore(args) -> int:
    spec = _read_model(args.files, args.int_range)
    engine, ts, stats = _explore_stats(args, spec)
    from fsc.report import stats_pairs

    pairs = [("engine", engine)] + stats_pairs(stats)
    if "peak_nodes" in stats:
        pairs += [("peak_nodes", stats["peak_nodes"]), ("operations", stats["operations"])]
    _emit(args, pairs)
    if args.dot:
        if ts is None:
            print("warning: --dot needs the explicit engine, skipped", file=sys.stderr)
        else:
            from fsc.dot import to_dot

            pathlib.Path(args.dot).write_text(to_dot(ts))
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = _read_model(args.files, args.int_range)
    engine = _pick_engine(args, spec)
    problem = syn.normalize(spec)
    sup, report = syn.synthesize(problem, engine=engine, budget=args.budget,
                                 order=args.var_order)
    pairs = [
        ("engine", engine),
        ("controlled states", report.controlled_states),
        ("controlled transitions", report.controlled_transitions),
        ("iterations", report.iterations),
    ]
    if report.metrics is not None:
        pairs += [
            ("peak_nodes", report.metrics.peak_nodes),
            ("operations", report.metrics.operations),
            ("cache_misses", report.metrics.cache_misses),
        ]
    _emit(args, pairs)
    if report.empty:
        raise SynthesisEmpty(
            "synthesis removed every initial state: no safe nonblocking "
            "controllable behavior exists for this model")
    if args.out:
        pathlib.Path(args.out).write_text(syn.supervisor_text(sup))
        print(f"supervisor written to {args.out}", file=sys.stderr)
    if args.dump:
        model = sym.encode(spec, order=args.var_order)
        result = sym.symbolic_synthesize(model)
        pathlib.Path(args.dump).write_text(sym.predicate_dump(model, result))
        print(f"predicates written to {args.dump}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _read_model(args.files + (args.supervisor or []), args.int_range)
    report = syn.verify_controlled(spec, budget=args.budget)
    pairs = [
        ("safe", report.safe),
        ("nonblocking", report.nonblocking),
        ("controllable", report.controllable),
        ("states", report.states),
        ("transitions", report.transitions),
    ]
    sup = syn.supervisor_from_spec(spec)
    maximality = None
    if report.ok and sup is not None:
        maximality = syn.maximality_probe(spec, sup, sample_budget=args.probe_budget,
                                          seed=args.seed, budget=args.budget)
        pairs += [
            ("maximal", maximality.ok),
            ("probed", maximality.probed),
            ("removed", maximality.removed_total),
        ]
    _emit(args, pairs)
    ok = report.ok and (maximality is None or maximality.ok)
    for name, trace in report.counterexamples.items():
        print(f"{name} violated: {trace}", file=sys.stderr)
    if maximality is not None and not maximality.ok:
        for state_text, event in maximality.readdable[:10]:
            print(f"needlessly removed: {event} at [{state_text}]", file=sys.stderr)
    return EXIT_OK if ok else EXIT_DIAGNOSTICS


def cmd_simulate(args) -> int:
    paths = args.files + (args.supervisor or [])
    spec = _read_model(paths, args.int_range)
    cm = CompiledModel(spec)
    sup = syn.supervisor_from_spec(spec)
    initial = cm.initial_states(args.budget)
    if not initial:
        print("no initial state", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    if len(initial) > 1:
        print(f"{len(initial)} initial states; starting from the first",
              file=sys.stderr)
    state = initial[0]
    if args.script:
        source = iter(pathlib.Path(args.script).read_text().split())
    else:
        source = iter(word for line in sys.stdin for word in line.split())

    def show(state):
        print(f"state: {cm.state_text(state)}")
        names = []
        for ei in cm.event_order:
            if cm.enabled(state, ei):
                ev = spec.events[ei]
                tag = "c" if ev.controllable else "u"
                base = ev.name.rsplit(".", 1)[-1]
                reconfig = " reconfig" if base in ("come", "go") or base.startswith("swap") else ""
                names.append(f"{ev.name} ({tag}{reconfig})")
        print("enabled: " + (", ".join(names) if names else "<none>"))

    show(state)
    for word in source:
        if not word:
            continue
        if word in ("quit", "exit"):
            break
        try:
            ei = spec.event_index(word)
        except KeyError:
            print(f"unknown event '{word}'; state unchanged")
            continue
        choices = cm.enabled(state, ei)
        if not choices:
            guard = None
            if sup is not None and ei in sup.guards:
                if not cm.compile_expr(sup.guards[ei])(state):
                    guard = sup.guard_text(word)
            if guard is not None:
                print(f"disabled by supervisor guard: {guard}")
            else:
                print(f"event '{word}' is not enabled; state unchanged")
            continue
        if len(choices) > 1:
            print(f"{len(choices)} joint choices; taking the first")
        state = cm.step(state, ei, choices[0])
        print(f"-- {word}")
        show(state)
    return EXIT_OK


def cmd_report(args) -> int:
    from fsc import report as rpt

    spec = _read_model(args.files, args.int_range)
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    engine, ts, stats = _explore_stats(args, spec)
    pairs = [("engine", engine)] + rpt.stats_pairs(stats)
    written = ["stats.tsv"]
    if ts is not None:
        if rpt.draw_state_space(ts, outdir / "state_space.png"):
            written.append("state_space.png")
        from fsc.dot import to_dot

        (outdir / "state_space.dot").write_text(to_dot(ts))
        written.append("state_space.dot")
    if rpt.draw_event_histogram(stats.get("per_event", {}), outdir / "events.png"):
        written.append("events.png")
    if args.synth:
        problem = syn.normalize(spec)
        sup, sreport = syn.synthesize(problem, engine=_pick_engine(args, spec),
                                      budget=args.budget, order=args.var_order)
        pairs += [
            ("controlled states", sreport.controlled_states),
            ("controlled transitions", sreport.controlled_transitions),
            ("iterations", sreport.iterations),
        ]
        (outdir / "supervisor.fsc").write_text(syn.supervisor_text(sup))
        written.append("supervisor.fsc")
        if rpt.draw_fixpoint_curve(sreport.good_sizes, outdir / "fixpoint.png"):
            written.append("fixpoint.png")
        if sreport.empty:
            rpt.write_stats(outdir / "stats.tsv", pairs)
            raise SynthesisEmpty("synthesis removed every initial state")
    rpt.write_stats(outdir / "stats.tsv", pairs)
    print(f"report written to {outdir} ({', '.join(written)})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsc",
        description="Feature-model and automata toolkit with supervisory "
                    "controller synthesis for reconfigurable product lines")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, files=True):
        if files:
            p.add_argument("files", nargs="+", help=".fsc input files, concatenated")
        p.add_argument("--engine", choices=["explicit", "symbolic", "auto"],
                       default="auto")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="explicit state budget (default %(default)s)")
        p.add_argument("--int-range", type=_int_range, default=(0, 255),
                       metavar="LO..HI", help="domain for bare 'int' (default 0..255)")
        p.add_argument("--var-order", choices=["affinity", "decl"], default="affinity",
                       help="symbolic variable ordering heuristic")
        p.add_argument("--structured", action="store_true",
                       help="stable key<TAB>value output for scripts")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("check", help="parse and resolve; exit 0 iff clean")
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("configs", help="count valid configurations")
    common(p)
    p.set_defaults(fn=cmd_configs)

    p = sub.add_parser("explore", help="explore the composed state space")
    common(p)
    p.add_argument("--dot", metavar="PATH", help="write DOT of the explored space")
    p.set_defaults(fn=cmd_explore)

    p = sub.add_parser("synth", help="synthesize the maximally permissive supervisor")
    common(p)
    p.add_argument("--out", metavar="PATH", help="write the supervisor as .fsc")
    p.add_argument("--dump", metavar="PATH",
                   help="write the good/reachable/guard predicates as a node list")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("verify", help="check safety, nonblocking, controllability, "
                                      "and probe maximality")
    common(p)
    p.add_argument("--supervisor", nargs="*", metavar="PATH",
                   help="extra file(s) holding the supervisor")
    p.add_argument("--probe-budget", type=int, default=100000)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("simulate", help="step through the model interactively "
                                        "or from a script")
    common(p)
    p.add_argument("--supervisor", nargs="*", metavar="PATH")
    p.add_argument("--script", metavar="PATH", help="whitespace-separated event names")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("report", help="write delimited stats and figures")
    common(p)
    p.add_argument("-o", "--outdir", required=True)
    p.add_argument("--synth", action="store_true", help="include synthesis results")
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SynthesisEmpty as err:
        print(f"synthesis empty: {err}", file=sys.stderr)
        return EXIT_SYNTHESIS_EMPTY
    except BudgetError as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except FscError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DIAGNOSTICS


if __name__ == "__main__":
    sys.exit(main())
