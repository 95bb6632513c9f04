"""Theoretical regime curves, coupled sweeps over p, and pipeline diagnostics."""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import PreconditionError
from .hypergraph import Hypergraph
from .supersaturation import build_balanced_family
from .turan import RandomExStats, estimate_random_ex


# -- curves ----------------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    """``value = n^offset * p^slope`` on ``p`` in ``[lo, hi)``, endpoints as exponents of n."""

    label: str
    slope: Fraction
    offset: Fraction
    lo: Fraction | None  # None: unbounded
    hi: Fraction | None

    def exponent_at(self, x: Fraction) -> Fraction:
        """Exponent of n in the value at ``p = n^x``."""
        return self.slope * x + self.offset

    def value(self, n: float, p: float) -> float:
        return float(n) ** float(self.offset) * p ** float(self.slope)


def curve_pieces(r: int, ell: int) -> list[Piece]:
    """Pieces with zeroed o(1) exponents.

    r >= 4: ``p n^r``, plateau ``n^(1+1/(2l-1))``, ``p n^(r-1)``. For r = 3 the
    upper-bound curve replaces the last two by the plateau up to ``1/n``, then
    ``p^(1/(2l-1)) n^(1+2/(2l-1))`` up to ``n^(-1+1/(2l-2))``, then ``p n^2``.
    """
    if r < 3:
        raise PreconditionError("curves are defined for r >= 3 only")
    if ell < 2:
        raise PreconditionError(f"ell must be >= 2, got {ell}")
    a = Fraction(1, 2 * ell - 1)
    x0 = -(r - 1) + a
    x1 = -(r - 2) + a
    plateau = 1 + a
    if r >= 4:
        return [
            Piece("sparse", Fraction(1), Fraction(r), None, x0),
            Piece("plateau", Fraction(0), plateau, x0, x1),
            Piece("dense", Fraction(1), Fraction(r - 1), x1, None),
        ]
    x2 = -1 + Fraction(1, 2 * ell - 2)
    return [
        Piece("sparse", Fraction(1), Fraction(3), None, x0),
        Piece("plateau", Fraction(0), plateau, x0, Fraction(-1)),
        Piece("intermediate", a, 1 + 2 * a, Fraction(-1), x2),
        Piece("dense", Fraction(1), Fraction(2), x2, None),
    ]


@dataclass
class RegimeCurve:
    r: int
    ell: int
    n: float
    pieces: list[Piece]
    points: list[tuple[float, float, str]] = field(default_factory=list)

    @property
    def p0(self) -> float:
        return float(self.n) ** float(self.pieces[0].hi)

    @property
    def p1(self) -> float:
        return float(self.n) ** float(-(self.r - 2) + Fraction(1, 2 * self.ell - 1))

    @property
    def plateau(self) -> float:
        return float(self.n) ** float(self.pieces[1].offset)

    @property
    def breakpoints(self) -> list[float]:
        return [float(self.n) ** float(pc.hi) for pc in self.pieces[:-1]]

    def piece_for(self, p: float) -> Piece:
        x = math.log(p) / math.log(self.n) if p < 1 else 0.0
        for pc in self.pieces:
            if pc.hi is None or x < float(pc.hi):
                return pc
        return self.pieces[-1]

    def value(self, p: float) -> float:
        return self.piece_for(p).value(self.n, p)

    def exact_gaps(self) -> list[Fraction]:
        """Exponent mismatch of adjacent pieces at each breakpoint; all zero."""
        return [pc.exponent_at(pc.hi) - nxt.exponent_at(pc.hi)
                for pc, nxt in zip(self.pieces, self.pieces[1:])]

    def continuity_errors(self) -> dict[str, float]:
        """Relative float errors of the breakpoint identities."""
        n, r = float(self.n), self.r
        out = {
            "p0*n^r vs plateau": _rel(self.p0 * n**r, self.plateau),
            "p1*n^(r-1) vs plateau": _rel(self.p1 * n ** (r - 1), self.plateau),
        }
        for pc, nxt in zip(self.pieces, self.pieces[1:]):
            p = n ** float(pc.hi)
            out[f"{pc.label}|{nxt.label}"] = _rel(pc.value(n, p), nxt.value(n, p))
        return out


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b))


def theoretical_curve(r: int, ell: int, n: float, grid: Sequence[float]) -> RegimeCurve:
    """Evaluate the regime curve on ``grid`` and check its breakpoint identities."""
    for p in grid:
        if not 0.0 < p <= 1.0:
            raise PreconditionError(f"grid values must lie in (0, 1], got {p}")
    curve = RegimeCurve(r, ell, n, curve_pieces(r, ell))
    if any(curve.exact_gaps()):
        raise AssertionError(f"curve pieces disagree at breakpoints: {curve.exact_gaps()}")
    curve.points = [(p, curve.value(p), curve.piece_for(p).label) for p in grid]
    return curve


# -- sweeps ----------------------------------------------------------------------

SWEEP_COLUMNS = ["index", "p", "trials", "mean_value", "stdev", "mean_edges", "mean_copies",
                 "method", "curve_value", "regime"]

DEFAULTS = {"n": 9, "r": 3, "ell": 2, "grid": "geom:0.02:0.45:10", "trials": 10, "seed": 0,
            "mode": "exact", "method": "auto", "csv": "sweep.csv", "json": "sweep.json",
            "workers": 1}


class MonotonicityError(AssertionError):
    pass


def parse_grid(grid: str | Sequence[float]) -> list[float]:
    """``geom:lo:hi:count``, ``lin:lo:hi:count`` or a comma list."""
    if not isinstance(grid, str):
        return [float(p) for p in grid]
    grid = grid.strip()
    if grid.startswith(("geom:", "lin:")):
        kind, lo, hi, count = grid.split(":")
        f = np.geomspace if kind == "geom" else np.linspace
        return [float(p) for p in f(float(lo), float(hi), int(count))]
    return [float(x) for x in grid.split(",") if x.strip()]


def load_config(path: str | Path) -> dict:
    """Flat ``key = value`` text; ``#`` starts a comment."""
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PreconditionError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key] = value
    return normalize_config(cfg)


def normalize_config(cfg: dict) -> dict:
    unknown = set(cfg) - set(DEFAULTS)
    if unknown:
        raise PreconditionError(f"unknown config keys: {sorted(unknown)}")
    out = dict(DEFAULTS)
    out.update(cfg)
    for key in ("n", "r", "ell", "trials", "seed", "workers"):
        try:
            out[key] = int(out[key])
        except (TypeError, ValueError):
            raise PreconditionError(f"config {key} must be an integer, got {out[key]!r}") from None
    if out["mode"] not in ("exact", "lower"):
        raise PreconditionError(f"mode must be exact or lower, got {out['mode']!r}")
    out["grid"] = parse_grid(out["grid"])
    if not out["grid"] or any(not 0.0 <= p <= 1.0 for p in out["grid"]):
        raise PreconditionError("grid must be a nonempty list of values in [0, 1]")
    return out


@dataclass
class SweepRecord:
    index: int
    p: float
    trials: int
    mean_value: float
    stdev: float
    mean_edges: float
    mean_copies: float | None
    method: str
    curve_value: float | None
    regime: str

    def row(self) -> list[str]:
        return [str(self.index), repr(self.p), str(self.trials), _num(self.mean_value),
                _num(self.stdev), _num(self.mean_edges), _num(self.mean_copies), self.method,
                _num(self.curve_value), self.regime]


def _num(x) -> str:
    # repr is locale independent and round-trips
    return "" if x is None else repr(float(x))


def _run_point(args) -> RandomExStats:
    n, r, ell, p, seed, trials, mode, method = args
    return estimate_random_ex(n, r, ell, p, seed, trials, mode, method)


def monotonicity_violations(stats: Sequence[RandomExStats]) -> list[tuple[int, int]]:
    """``(seed, grid index)`` pairs where an exact value drops as p grows."""
    order = sorted(range(len(stats)), key=lambda i: stats[i].p)
    bad = []
    seeds = {t.seed for s in stats for t in s.trials}
    for seed in sorted(seeds):
        last = None
        for i in order:
            t = next((t for t in stats[i].trials if t.seed == seed), None)
            if t is None or t.value is None or t.mode != "exact":
                continue
            if last is not None and t.value < last:
                bad.append((seed, i))
            last = t.value
    return bad


def regime_sweep(config: dict, *, write: bool = True) -> dict:
    """Run the coupled sweep described by ``config`` and write CSV plus JSON summary.

    In exact mode every seed's value sequence must be nondecreasing in p;
    a violation raises :class:`MonotonicityError` after the outputs are written.
    """
    cfg = normalize_config(config)
    t0 = time.perf_counter()
    n, r, ell = cfg["n"], cfg["r"], cfg["ell"]
    grid = cfg["grid"]
    positive = [p for p in grid if p > 0]
    curve = theoretical_curve(r, ell, n, positive) if r >= 3 and positive else None
    jobs = [(n, r, ell, p, cfg["seed"], cfg["trials"], cfg["mode"], cfg["method"]) for p in grid]

    csv_path = Path(cfg["csv"])
    fh = csv_path.open("w", newline="") if write else None
    writer = csv.writer(fh, lineterminator="\n") if fh else None
    if writer:
        echo = "; ".join(f"{k}={cfg[k]}" for k in sorted(cfg) if k != "grid")
        fh.write(f"# config: {echo}\n# grid: {','.join(repr(p) for p in grid)}\n")
        writer.writerow(SWEEP_COLUMNS)
    records, stats = [], []
    try:
        if cfg["workers"] > 1:
            with ProcessPoolExecutor(cfg["workers"]) as pool:
                results = pool.map(_run_point, jobs)
                for i, st in enumerate(results):
                    stats.append(st)
                    records.append(_record(i, st, curve))
                    if writer:
                        writer.writerow(records[-1].row())
        else:
            for i, job in enumerate(jobs):
                st = _run_point(job)
                stats.append(st)
                records.append(_record(i, st, curve))
                if writer:
                    writer.writerow(records[-1].row())
    finally:
        if fh:
            fh.close()

    violations = monotonicity_violations(stats) if cfg["mode"] == "exact" else []
    summary = {
        "config": {**cfg, "grid": grid},
        "points": len(records),
        "trials": sum(len(s.trials) for s in stats),
        "failed_trials": sum(s.summary()["failed"] for s in stats),
        "monotonicity_violations": violations,
        "slopes": _slopes(records),
        "records": [asdict(rec) for rec in records],
        "wall_seconds": time.perf_counter() - t0,
    }
    if write:
        Path(cfg["json"]).write_text(json.dumps(summary, indent=2, default=str) + "\n")
    summary["stats"] = stats
    if violations:
        raise MonotonicityError(f"coupled values decreased in p: {violations}")
    return summary


def _record(i: int, st: RandomExStats, curve: RegimeCurve | None) -> SweepRecord:
    copies = [t.copies for t in st.trials if t.copies is not None]
    methods = sorted({t.method for t in st.trials})
    cv = curve.value(st.p) if curve is not None and st.p > 0 else None
    regime = curve.piece_for(st.p).label if curve is not None and st.p > 0 else "empty"
    mean = st.mean if st.values else 0.0
    return SweepRecord(i, st.p, len(st.trials), mean, st.stdev, st.mean_edges,
                       float(np.mean(copies)) if copies else None, "+".join(methods), cv, regime)


def _slopes(records: Sequence[SweepRecord]) -> list[dict]:
    """Log-log slopes between consecutive grid points, measured next to theoretical."""
    out = []
    pts = sorted((r for r in records if r.p > 0 and r.mean_value > 0), key=lambda r: r.p)
    for a, b in zip(pts, pts[1:]):
        if a.p == b.p:
            continue
        dx = math.log(b.p) - math.log(a.p)
        row = {"p_lo": a.p, "p_hi": b.p,
               "measured": (math.log(b.mean_value) - math.log(a.mean_value)) / dx}
        if a.curve_value and b.curve_value:
            row["theoretical"] = (math.log(b.curve_value) - math.log(a.curve_value)) / dx
        out.append(row)
    return out


# -- supersaturation diagnostics ------------------------------------------------


def supersaturation_report(G: Hypergraph, ell: int, lam: float, caps="auto") -> dict:
    """Measured side against formula side for the three scale claims of the pipeline.

    Logs are natural. The flags say whether the inequality happens to hold at
    this size; they are observations, not assertions.
    """
    bf = build_balanced_family(G, ell, lam, caps)
    cert = bf.certificate
    r, n = G.r, G.n
    R = math.comb(r, 2)
    logn = math.log(n)
    K = len(G.edges) / n ** (r - 1)
    alpha = math.factorial(r) / (2 * r ** (R + r))
    claims = [
        ("shadow size", cert["shadow_size"], cert["shadow_reference"]),
        ("Delta12 scale", cert["Delta12"], 8 * ell * r ** (R + 1) * logn**R * n ** (r - 3)),
        ("shadow x Delta12", cert["shadow_size"] * cert["Delta12"],
         alpha * K * n ** (r - 1) / (2 * logn**R)),
    ]
    rows = []
    for name, lhs, rhs in claims:
        ratio = lhs / rhs if rhs else math.inf
        rows.append({"claim": name, "measured": lhs, "reference": rhs, "ratio": ratio,
                     "holds_here": lhs >= rhs})
    return {"claims": rows, "certificate": dict(cert)}


def format_report(report: dict) -> str:
    lines = ["# diagnostics only; nothing here is asserted"]
    for row in report["claims"]:
        lines.append(f"{row['claim']}: measured={row['measured']!r} reference={row['reference']!r}"
                     f" ratio={row['ratio']!r} holds_here={row['holds_here']}")
    return "\n".join(lines) + "\n"
