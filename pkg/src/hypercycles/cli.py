"""Command-line entry point: ``hypercycles <verb> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import containers as ct
from .cycles import enumerate_cycles
from .errors import AnnihilationError, ContainerError, PreconditionError, WorkBudgetExceeded
from .experiments import (
    MonotonicityError,
    format_report,
    load_config,
    normalize_config,
    parse_grid,
    regime_sweep,
    supersaturation_report,
    theoretical_curve,
)
from .hypergraph import Hypergraph, HypergraphError
from .random_model import sample
from .supersaturation import build_balanced_family
from .turan import estimate_random_ex, solve

EXIT_OK, EXIT_FAIL, EXIT_PRECONDITION, EXIT_BUDGET = 0, 1, 2, 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _caps(raw: str):
    if raw in ("auto", "none"):
        return None if raw == "none" else "auto"
    caps = {}
    for item in raw.split(","):
        j, _, cap = item.partition("=")
        caps[int(j)] = None if cap in ("inf", "") else int(cap)
    return caps


def cmd_sample(a) -> int:
    G = sample(a.n, a.r, a.p, a.seed)
    _emit(G.to_text(), a.out)
    return EXIT_OK


def cmd_ex(a) -> int:
    G = Hypergraph.load(a.infile)
    res = solve(G, a.ell, a.mode, a.method, a.budget)
    print(f"value: {res.value}")
    print(f"mode: {res.mode}")
    print(f"method: {res.method}")
    print(f"edges: {len(G.edges)}")
    if res.copies is not None:
        print(f"copies: {res.copies}")
    for note in res.notes:
        print(f"note: {note}")
    if a.witness:
        res.witness.save(a.witness)
    return EXIT_OK


def cmd_ex_random(a) -> int:
    stats = estimate_random_ex(a.n, a.r, a.ell, a.p, a.seed, a.trials, a.mode, a.method,
                               budget=a.budget)
    _emit(stats.to_csv(), a.out)
    print(json.dumps(stats.summary()), file=sys.stderr)
    return EXIT_OK


def cmd_supersaturate(a) -> int:
    G = Hypergraph.load(a.infile)
    bf = build_balanced_family(G, a.ell, a.lam, _caps(a.caps), Q=a.Q, budget=a.budget,
                               diagnose=a.diagnose)
    _emit(bf.certificate.to_text(), a.out)
    if a.family:
        Path(a.family).write_text(bf.family.to_text())
    return EXIT_OK


def cmd_supersat_report(a) -> int:
    G = Hypergraph.load(a.infile)
    _emit(format_report(supersaturation_report(G, a.ell, a.lam, _caps(a.caps))), a.out)
    return EXIT_OK


def cmd_containers(a) -> int:
    if a.action == "iterate":
        fam = ct.iterate_containers(a.n, a.r, a.ell, a.k_target, a.eps, a.shrink,
                                    family=a.family, tau_const=a.c,
                                    enforce_codegree=a.enforce_codegree, budget=a.budget)
        print(f"steps: {fam.steps} containers: {len(fam)} max_edges: {max(fam.sizes())}",
              file=sys.stderr)
    else:
        if not a.infile:
            raise PreconditionError("containers build needs --in")
        G = Hypergraph.load(a.infile)
        if a.family == "balanced":
            cycles = build_balanced_family(G, a.ell, 4.0 * math.comb(G.r, 2) + 1,
                                           budget=a.budget).family
        else:
            cycles = enumerate_cycles(G, 2 * a.ell, a.budget)
        S = ct.IncidenceSystem.from_family(cycles)
        if a.tau == "auto":
            tau = ct.default_tau(G.n, G.r, a.ell, max(len(G.edges), 1) / G.n ** (G.r - 1), a.c)
        else:
            tau = float(a.tau)
        fam = ct.build_containers(S, tau, a.eps, enforce_codegree=a.enforce_codegree)
        print(f"containers: {len(fam)} tau: {tau!r} nodes: {fam.nodes}", file=sys.stderr)
    _emit(fam.to_text(), a.out)
    return EXIT_OK


def cmd_curve(a) -> int:
    curve = theoretical_curve(a.r, a.ell, a.n, parse_grid(a.grid))
    lines = ["p,value,regime"]
    lines += [f"{p!r},{v!r},{label}" for p, v, label in curve.points]
    _emit("\n".join(lines) + "\n", a.out)
    for name, err in curve.continuity_errors().items():
        print(f"continuity {name}: {err:.3e}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(a) -> int:
    cfg = load_config(a.config) if a.config else {}
    overrides = {k: v for k, v in (("csv", a.csv), ("json", a.json), ("workers", a.workers))
                 if v is not None}
    cfg = normalize_config({**{k: v for k, v in cfg.items()}, **overrides})
    summary = regime_sweep(cfg)
    print(f"points: {summary['points']} trials: {summary['trials']} "
          f"wall: {summary['wall_seconds']:.2f}s -> {cfg['csv']}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypercycles", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)

    def budget(p):
        p.add_argument("--budget", type=int, default=None,
                       help="enumeration work budget (default: env or 1e8)")

    p = sub.add_parser("sample", help="draw G(n,p)^(r)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("ex", help="Turán number of a host file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--mode", choices=["exact", "lower"], default="exact")
    p.add_argument("--method", choices=["auto", "greedy", "star"], default="auto")
    p.add_argument("--witness", help="write the witness subgraph here")
    budget(p)
    p.set_defaults(func=cmd_ex)

    p = sub.add_parser("ex-random", help="Turán numbers of coupled random samples (CSV)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["exact", "lower"], default="lower")
    p.add_argument("--method", choices=["auto", "greedy", "star"], default="auto")
    p.add_argument("--out")
    budget(p)
    p.set_defaults(func=cmd_ex_random)

    for verb, func in (("supersaturate", cmd_supersaturate), ("supersat-report", cmd_supersat_report)):
        p = sub.add_parser(verb, help="balanced supersaturation pipeline"
                           if verb == "supersaturate" else "claim diagnostics")
        p.add_argument("--in", dest="infile", required=True)
        p.add_argument("--ell", type=int, default=2)
        p.add_argument("--lambda", dest="lam", type=float, required=True)
        p.add_argument("--caps", default="auto", help="auto, none, or j=cap,... list")
        p.add_argument("--out")
        if verb == "supersaturate":
            p.add_argument("--Q", type=float, default=1.0)
            p.add_argument("--family", help="write the family (edge indexes per copy) here")
            p.add_argument("--diagnose", action="store_true")
            budget(p)
        p.set_defaults(func=func)

    p = sub.add_parser("containers", help="build or iterate containers")
    p.add_argument("action", nargs="?", choices=["build", "iterate"], default="build")
    p.add_argument("--in", dest="infile")
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--tau", default="auto")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--c", type=float, default=1.0, help="constant in the default tau")
    p.add_argument("--family", choices=["all", "balanced"], default="all")
    p.add_argument("--enforce-codegree", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--k-target", type=float, default=2.0)
    p.add_argument("--shrink", type=float, default=0.6)
    p.add_argument("--out")
    budget(p)
    p.set_defaults(func=cmd_containers)

    p = sub.add_parser("curve", help="theoretical regime curve (CSV)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--grid", default="geom:1e-6:1:25")
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("sweep", help="coupled regime sweep from a key=value config")
    p.add_argument("--config")
    p.add_argument("--csv")
    p.add_argument("--json")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if a.verb == "containers":
        if a.action == "iterate" and (a.n is None or a.r is None):
            ap.error("containers iterate needs --n and --r")
        if a.enforce_codegree is None:
            # the codegree condition cannot hold on desk-scale iteration steps
            a.enforce_codegree = a.action == "build"
    try:
        return a.func(a)
    except WorkBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except MonotonicityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (PreconditionError, HypergraphError, AnnihilationError, ContainerError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
