"""Command-line front end: ``rcpc check|simulate|witness|grow|make|suite``.

Exit codes: 0 success / property holds, 1 property fails / suite mismatch,
2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from .construct import (ConstructionError, ConstructionReport, GrowthRule, GrowthVariant,
                        attach_node_r_robust, build_f_elemental, build_mono_chromatic_robust,
                        greedy_proper_coloring, grow, is_proper_coloring, random_rule_neighbors)
from .consensus import (Protocol, ScenarioError, Trace, check_safety, load_scenario,
                        necessity_witness, run_simulation, save_scenario, scenario_from_dict,
                        write_trace_csv)
from .graph import GraphError, load_graph, save_graph
from .robustness import (RobustnessError, is_mono_chromatic_robust, is_r_robust_classic,
                         is_r_robust_colored, is_rs_robust_classic, is_rs_robust_colored,
                         max_rs_frontier)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
INPUT_ERRORS = (GraphError, ScenarioError, RobustnessError, ConstructionError, OSError,
                json.JSONDecodeError, KeyError, TypeError, ValueError)


class InputError(Exception):
    pass


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.json or text is None:
        print(json.dumps(payload, indent=None if args.json else 1))
    else:
        print(text)


def _graph_path(args) -> Path:
    path = getattr(args, "graph_file", None) or args.graph
    if not path:
        raise InputError("no graph given (positional path or --graph)")
    return Path(path)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=1) + "\n")


# -- check ---------------------------------------------------------------------

def cmd_check(args) -> int:
    g = load_graph(_graph_path(args))
    if args.frontier:
        r_max, s_max = args.frontier
        front = max_rs_frontier(g, r_max, s_max)
        _emit(args, {"frontier": [list(p) for p in front]},
              "maximal (r,s): " + (", ".join(f"({r},{s})" for r, s in front) or "none"))
        return EXIT_OK
    kw = {"sample": args.sample, "seed": args.seed} if args.sample else {}
    d = args.definition
    if d == "rs-colored":
        v = is_rs_robust_colored(g, args.r, args.s, **kw)
    elif d == "rs-classic":
        v = is_rs_robust_classic(g, args.r, args.s, **kw)
    elif d == "r-colored":
        v = is_r_robust_colored(g, args.r, **kw)
    elif d == "r-classic":
        v = is_r_robust_classic(g, args.r, **kw)
    else:
        v = is_mono_chromatic_robust(g, **kw)
    _emit(args, v.to_dict())
    return EXIT_OK if v.holds else EXIT_FAIL


# -- simulate ------------------------------------------------------------------

def run_summary(tr: Trace, eps: float, wall: float) -> dict:
    """Summary recomputed from the trace states alone."""
    vals = tr.states[:, tr.normal]
    spread = (vals.max(axis=1) - vals.min(axis=1)) if vals.size else np.zeros(len(tr.states))
    hit = np.flatnonzero(spread < eps)
    return {"final_spread": float(spread[-1]),
            "steps_to_eps": int(hit[0]) if hit.size else None,
            "agreement": bool(spread[-1] < eps),
            "safe": check_safety(tr),
            "T": tr.T,
            "wall_time_s": round(wall, 6)}


def cmd_simulate(args) -> int:
    path = Path(args.scenario)
    sc = load_scenario(path)
    if args.seed_given:
        sc = sc.with_(seed=args.seed)
    if args.T is not None:
        sc = sc.with_(T=args.T)
    t0 = time.perf_counter()
    tr = run_simulation(sc)
    wall = time.perf_counter() - t0
    out = _out_dir(args)
    write_trace_csv(tr, out / f"{path.stem}.csv")
    summary = {"scenario": path.name, "protocol": sc.protocol.value,
               **run_summary(tr, sc.eps, wall)}
    _write_json(out / f"{path.stem}.summary.json", summary)
    steps = summary["steps_to_eps"]
    _emit(args, summary,
          f"{path.name}: {'agreement' if summary['agreement'] else 'no agreement'}"
          f" (spread {summary['final_spread']:.3g}"
          f"{'' if steps is None else f', eps reached at step {steps}'}),"
          f" {'safe' if summary['safe'] else 'UNSAFE'}")
    return EXIT_OK


# -- witness -------------------------------------------------------------------

def cmd_witness(args) -> int:
    g = load_graph(_graph_path(args))
    protocol = Protocol(args.protocol)
    sc = necessity_witness(g, args.F, protocol, T=args.T)
    k = args.F + 1
    kind = "with coloring" if protocol is Protocol.RCPC else "(uniform coloring)"
    if sc is None:
        _emit(args, {"robust": True, "r": k, "s": k, "scenario": None},
              f"graph is ({k},{k})-robust {kind}; no witness")
        return EXIT_OK
    target = Path(args.output) if args.output else _out_dir(args) / "witness.json"
    save_scenario(sc, target)
    _emit(args, {"robust": False, "r": k, "s": k, "scenario": str(target),
                 "adversaries": sorted(sc.adversary.nodes)},
          f"graph is not ({k},{k})-robust {kind}; witness scenario written to {target}")
    return EXIT_OK


# -- grow / make -----------------------------------------------------------------

def _parse_nodes(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"bad node list {text!r}") from None


def _finish_construction(args, report, default_name: str) -> int:
    target = Path(args.output) if args.output else _out_dir(args) / f"{default_name}.json"
    save_graph(report.graph, target)
    rep = report.to_dict()
    _write_json(target.with_suffix(".report.json"), rep)
    _emit(args, {"graph": str(target), **rep},
          f"wrote {target} (n={report.graph.n}, verified={report.verified})")
    return EXIT_OK if report.verified else EXIT_FAIL


def cmd_grow(args) -> int:
    g = load_graph(_graph_path(args))
    if args.rule == "r-robust":
        if args.neighbors is None:
            raise InputError("--neighbors is required for the r-robust rule")
        nb = _parse_nodes(args.neighbors)
        g2 = attach_node_r_robust(g, args.r, nb, args.color)
        report = ConstructionReport(g2, "r-robust", sorted(set(nb)),
                                    [is_r_robust_colored(g2, args.r)])
    else:
        rule = GrowthRule(GrowthVariant(args.rule), args.r, args.s)
        if args.neighbors is not None:
            nb = _parse_nodes(args.neighbors)
        else:
            nb = random_rule_neighbors(g, rule, random.Random(args.seed))
            if nb is None:
                raise InputError(f"graph has no neighbor set satisfying {args.rule}")
        report = grow(g, rule, nb, args.color)
    return _finish_construction(args, report, "grown")


def cmd_make(args) -> int:
    if args.k5_chain:
        n, seed = args.k5_chain
        return _finish_construction(args, build_mono_chromatic_robust(n, seed), f"k5_chain_{n}")
    if args.f_elemental is not None:
        return _finish_construction(args, build_f_elemental(args.f_elemental),
                                    f"f_elemental_{args.f_elemental}")
    g = greedy_proper_coloring(load_graph(_graph_path(args)), order=args.order)
    report = ConstructionReport(g, f"proper-color-{args.order}", [], [])
    if not is_proper_coloring(g):  # pragma: no cover - greedy is always proper
        raise ConstructionError("greedy coloring produced a monochromatic edge")
    return _finish_construction(args, report, "proper_colored")


# -- suite -----------------------------------------------------------------------

def _suite_path(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    bundled = resources.files("rcpc") / "data" / f"{name.removesuffix('.json')}.json"
    if bundled.is_file():
        return Path(str(bundled))
    raise InputError(f"no suite file or bundled suite named {name!r}")


def cmd_suite(args) -> int:
    path = _suite_path(args.suite)
    suite = json.loads(path.read_text())
    entries = suite.get("scenarios", [])
    # validate everything before running anything
    prepared = []
    for k, e in enumerate(entries):
        name = e.get("name", f"scenario_{k}")
        expect = e.get("expect")
        if expect not in ("converges", "diverges"):
            raise InputError(f"{name}: expect must be 'converges' or 'diverges'")
        try:
            prepared.append((name, expect, scenario_from_dict(e["scenario"], path.parent)))
        except (ScenarioError, GraphError, KeyError) as exc:
            raise InputError(f"{name}: {exc}") from None
    results, failures = [], []
    for name, expect, sc in prepared:
        t0 = time.perf_counter()
        tr = run_simulation(sc)
        summary = run_summary(tr, sc.eps, time.perf_counter() - t0)
        got = "converges" if summary["agreement"] else "diverges"
        results.append({"name": name, "protocol": sc.protocol.value, "expect": expect,
                        "outcome": got, "match": got == expect, **summary})
        if got != expect:
            failures.append(name)
    out = _out_dir(args)
    report = {"suite": suite.get("name", path.stem), "passed": not failures,
              "failures": failures, "results": results}
    _write_json(out / f"{path.stem}.summary.json", report)
    lines = [f"{r['name']}: expected {r['expect']}, got {r['outcome']}"
             f"{'' if r['match'] else '  <-- MISMATCH'}" for r in results]
    lines.append(f"{len(results) - len(failures)}/{len(results)} scenarios match")
    _emit(args, report, "\n".join(lines))
    return EXIT_OK if not failures else EXIT_FAIL


# -- parser ------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, top: bool) -> None:
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--graph", default=d(None), help="input graph JSON")
    p.add_argument("--out", default=d("."), help="output directory")
    p.add_argument("--seed", type=int, default=d(None), help="seed override")
    p.add_argument("--json", action="store_true", default=d(False),
                   help="machine-readable stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rcpc", description=__doc__.splitlines()[0])
    _common(ap, top=True)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="certify a robustness property")
    _common(p, top=False)
    p.add_argument("graph_file", nargs="?")
    p.add_argument("--def", dest="definition", default="rs-colored",
                   choices=["rs-colored", "rs-classic", "r-colored", "r-classic",
                            "mono-chromatic"])
    p.add_argument("-r", type=int, default=1)
    p.add_argument("-s", type=int, default=1)
    p.add_argument("--frontier", nargs=2, type=int, metavar=("R", "S"),
                   help="list maximal (r,s) with r <= R, s <= S")
    p.add_argument("--sample", type=int, help="check only this many random pairs")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="run a scenario, write CSV trace and summary")
    _common(p, top=False)
    p.add_argument("scenario")
    p.add_argument("--T", type=int, help="override the horizon")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("witness", help="stuck scenario for a non-robust graph")
    _common(p, top=False)
    p.add_argument("graph_file", nargs="?")
    p.add_argument("--F", type=int, required=True)
    p.add_argument("--protocol", choices=["rcpc", "wmsr"], default="rcpc")
    p.add_argument("--T", type=int, default=10_000)
    p.add_argument("--output", help="scenario path (default <out>/witness.json)")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("grow", help="attach one node under a growth rule")
    _common(p, top=False)
    p.add_argument("graph_file", nargs="?")
    p.add_argument("--rule", required=True,
                   choices=[v.value for v in GrowthVariant] + ["r-robust"])
    p.add_argument("-r", type=int, default=1)
    p.add_argument("-s", type=int, default=1)
    p.add_argument("--neighbors", help="comma-separated ids (default: random valid set)")
    p.add_argument("--color", type=int, default=0, help="color of the new node")
    p.add_argument("--output")
    p.set_defaults(func=cmd_grow)

    p = sub.add_parser("make", help="generate a constructed graph")
    _common(p, top=False)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k5-chain", nargs=2, type=int, metavar=("N", "SEED"))
    g.add_argument("--f-elemental", type=int, metavar="F")
    g.add_argument("--proper-color", action="store_true", help="greedy-color --graph")
    p.add_argument("--order", choices=["degree", "bfs"], default="degree")
    p.add_argument("--output")
    p.set_defaults(func=cmd_make)

    p = sub.add_parser("suite", help="run an experiment suite against expectations")
    _common(p, top=False)
    p.add_argument("suite", help="suite file, or a bundled name (ftotal_suite, flocal_suite)")
    p.set_defaults(func=cmd_suite)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"rcpc: error: {exc}", file=sys.stderr)
    except INPUT_ERRORS as exc:
        print(f"rcpc: error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
