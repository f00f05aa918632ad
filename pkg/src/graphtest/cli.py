"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data error, 4 infeasible request.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from graphtest import __version__
from graphtest import rng as streams
from graphtest.calibration import bh_fdr, mc_null, run_test
from graphtest.errors import DataError, InfeasibleError
from graphtest.experiments import (BoundaryConfig, PowerConfig, run_boundary_experiment,
                                   run_enrichment, run_power_comparison)
from graphtest.graph import FAMILIES, generate, graph_spectrum
from graphtest.io import (format_edge_list, format_tsv, parse_edge_list, parse_gene_sets,
                          parse_pvalue_table, parse_score_table, parse_scores, parse_set_edges)
from graphtest.signal import simulate_effect
from graphtest.statistics import STATISTICS, project_scores, smooth_scores, t_max
from graphtest.theory import PowerSurface, power_grid

EXIT_USAGE, EXIT_DATA, EXIT_INFEASIBLE = 2, 3, 4


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _lam(v):
    return "inf" if v is not None and math.isinf(v) else v


def cmd_gen_graph(args):
    kind = args.family
    g = generate(kind, args.n, p=args.p, m=args.m, d=args.d,
                 rng=streams.substream(args.seed, streams.GRAPH, 0))
    _emit(format_edge_list(g), args.out)


def cmd_test(args):
    g = parse_edge_list(args.graph)
    x = parse_scores(args.scores, g.n)
    universe = None
    if args.universe:
        universe = np.fromiter(parse_score_table(args.universe).values(), dtype=float)
    res = run_test(args.stat, g, x, args.B, args.seed, alpha=args.alpha,
                   universe=universe, workers=args.workers)
    _emit(_json(res.to_record(args.set)), args.out)


def cmd_calibrate(args):
    g = parse_edge_list(args.graph)
    ns = mc_null(args.stat, g, args.B, args.seed, workers=args.workers)
    meta = {"command": "calibrate", "statistic": args.stat, "B": args.B, "seed": args.seed,
            "n": g.n, "edges": g.n_edges}
    _emit(format_tsv(["replicate", "value"], enumerate(ns.values.tolist()), meta), args.out)


def cmd_boundary(args):
    kw = dict(family=args.family, n=args.n, p=args.p, m=args.m, d=args.d,
              B=args.B, alpha=args.alpha, seed=args.seed)
    if args.full:
        cfg = BoundaryConfig.full(**kw)
    else:
        cfg = BoundaryConfig(grid=args.grid, replicates=args.replicates, **kw)
    res = run_boundary_experiment(cfg, workers=args.workers)
    meta = {"command": "boundary", **cfg.describe(), "infeasible_cells": res.infeasible_cells}
    text = format_tsv(["xi1", "xi2", "rejection_freq", "n_feasible"], res.rows(), meta)
    _emit(text, args.out)
    if args.out and args.out != "-":
        Path(args.out + ".json").write_text(_json({"infeasible_cells": res.infeasible_cells,
                                                   "cells": cfg.grid * cfg.grid}))


def cmd_power_surface(args):
    surf = PowerSurface(args.alpha, args.B, args.seed)
    d1, d2 = power_grid(args.step, args.delta1_max, args.delta2_max)
    pts = surf.grid(d1, d2)
    rows = [(p.delta1, p.delta2, p.power_tmax, p.power_z, p.power_chi2, p.ratio_z, p.ratio_chi2)
            for p in pts]
    meta = {"command": "power-surface", "alpha": args.alpha, "B": args.B, "seed": args.seed,
            "step": args.step, "delta1_max": args.delta1_max, "delta2_max": args.delta2_max,
            "q_tmax": surf.q_tmax, "min_ratio_z": min(p.ratio_z for p in pts),
            "min_ratio_chi2": min(p.ratio_chi2 for p in pts)}
    cols = ["delta1", "delta2", "power_tmax", "power_z", "power_chi2", "ratio_z", "ratio_chi2"]
    _emit(format_tsv(cols, rows, meta), args.out)


def cmd_simulate_signal(args):
    g = parse_edge_list(args.graph)
    s = graph_spectrum(g)
    eff = simulate_effect(g, s, args.xi1, args.xi2,
                          streams.substream(args.seed, streams.EFFECT, 0), seed=args.seed)
    meta = {"command": "simulate-signal", **eff.sidecar()}
    _emit(format_tsv(["node_id", "mu_value"], enumerate(eff.mu.tolist()), meta), args.out)
    sidecar = _json(eff.sidecar())
    if args.out and args.out != "-":
        Path(args.out + ".json").write_text(sidecar)
    else:
        sys.stderr.write(sidecar)


def cmd_fdr(args):
    rows = parse_pvalue_table(args.pvalues)
    rejected = bh_fdr(rows, args.q)
    out = [(i, p, int(i in rejected), args.q) for i, p in rows]
    meta = {"command": "fdr", "q": args.q, "m": len(rows), "rejected": len(rejected)}
    _emit(format_tsv(["id", "p_value", "rejected", "q"], out, meta), args.out)


def cmd_smooth(args):
    g = parse_edge_list(args.graph)
    x = parse_scores(args.scores, g.n)
    s = graph_spectrum(g)
    if args.lam == "argmax":
        lam = t_max(project_scores(s, x), s).lambda_star
    else:
        try:
            lam = float(args.lam)
        except ValueError:
            raise DataError(f"--lambda must be a number or 'argmax', got {args.lam!r}") from None
    y = smooth_scores(s, x, lam)
    meta = {"command": "smooth", "lambda": _lam(lam), "n": g.n}
    _emit(format_tsv(["node_id", "smoothed"], enumerate(y.tolist()), meta), args.out)


def cmd_compare(args):
    g = parse_edge_list(args.graph)
    xi2 = tuple(-math.inf if v == "smooth" else float(v) for v in args.xi2)
    cfg = PowerConfig(tuple(args.stats), tuple(args.xi1), xi2, args.replicates,
                      args.B, args.alpha, args.seed)
    rows = run_power_comparison(g, cfg, workers=args.workers)
    meta = {"command": "compare", "statistics": list(cfg.statistics), "replicates": cfg.replicates,
            "B": cfg.B, "alpha": cfg.alpha, "seed": cfg.seed, "n": g.n}
    _emit(format_tsv(["xi1", "xi2", "statistic", "power"],
                     [(r["xi1"], r["xi2"], r["statistic"], r["power"]) for r in rows], meta),
          args.out)


def cmd_enrich(args):
    sets = parse_gene_sets(args.gene_sets)
    scores = parse_score_table(args.scores)
    edges = parse_set_edges(args.edges) if args.edges else {}
    recs = run_enrichment(sets, scores, edges, args.stat, args.B, args.seed, args.q, args.workers)
    for r in recs:
        if r.dropped:
            sys.stderr.write(f"{r.name}: dropped {len(r.dropped)} unscored members\n")
    rows = [(r.name, r.n_genes, r.value, _lam(r.lambda_star), r.p_value, int(r.rejected))
            for r in recs]
    meta = {"command": "enrich", "statistic": args.stat, "B": args.B, "seed": args.seed, "q": args.q}
    _emit(format_tsv(["set", "n_genes", "value", "lambda_star", "p_value", "rejected"], rows, meta),
          args.out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphtest", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=True, workers=False, out=True):
        if seed:
            p.add_argument("--seed", type=int, required=True)
        if workers:
            p.add_argument("--workers", type=int, default=1)
        if out:
            p.add_argument("--out", "-o", default=None, help="output file (default stdout)")

    def family_args(p):
        p.add_argument("--family", choices=FAMILIES, required=True)
        p.add_argument("--n", type=int)
        p.add_argument("--p", type=float)
        p.add_argument("--m", type=int)
        p.add_argument("--d", type=int)

    p = sub.add_parser("gen-graph", help="generate a graph edge list")
    family_args(p)
    common(p)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("test", help="test one score vector on a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--stat", choices=STATISTICS, default="t_max")
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--set", default="", help="label stored in the result record")
    p.add_argument("--universe", help="'id value' score table for a gene-randomization null")
    common(p, workers=True)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("calibrate", help="Monte Carlo null sample of a statistic")
    p.add_argument("--graph", required=True)
    p.add_argument("--stat", choices=STATISTICS, default="t_max")
    p.add_argument("--B", type=int, default=1000)
    common(p, workers=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("boundary", help="detection-boundary rejection grid")
    family_args(p)
    p.add_argument("--grid", type=int, default=25)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--full", action="store_true", help="50x50 grid with 500 replicates")
    common(p, workers=True)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("power-surface", help="asymptotic power surfaces on a (delta1, delta2) grid")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--B", type=int, default=100_000)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--delta1-max", type=float, default=3.0)
    p.add_argument("--delta2-max", type=float, default=4.0)
    common(p)
    p.set_defaults(func=cmd_power_surface)

    p = sub.add_parser("simulate-signal", help="draw an effect with given energy and smoothness")
    p.add_argument("--graph", required=True)
    p.add_argument("--xi1", type=float, required=True)
    p.add_argument("--xi2", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_simulate_signal)

    p = sub.add_parser("fdr", help="Benjamini-Hochberg over a p-value table")
    p.add_argument("--pvalues", required=True)
    p.add_argument("--q", type=float, required=True)
    common(p, seed=False)
    p.set_defaults(func=cmd_fdr)

    p = sub.add_parser("smooth", help="Laplacian smoothing of scores")
    p.add_argument("--graph", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--lambda", dest="lam", required=True, help="non-negative value or 'argmax'")
    common(p, seed=False)
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("compare", help="power of several statistics on one graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--stats", nargs="+", choices=STATISTICS,
                   default=["t_max", "maxmean", "meanabs", "chi2"])
    p.add_argument("--xi1", type=float, nargs="+", required=True)
    p.add_argument("--xi2", nargs="+", required=True, help="values, or 'smooth' for constant effects")
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    common(p, workers=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("enrich", help="gene-set tests with randomization null and BH")
    p.add_argument("--gene-sets", required=True, help="GMT file")
    p.add_argument("--scores", required=True, help="'gene value' table")
    p.add_argument("--edges", help="'set gene_a gene_b' pathway edges")
    p.add_argument("--stat", choices=STATISTICS, default="t_max")
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--q", type=float, default=0.05)
    common(p, workers=True)
    p.set_defaults(func=cmd_enrich)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.func(args)
    except InfeasibleError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    except (DataError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA
    except ValueError as exc:
        sys.stderr.write(f"usage: {exc}\n")
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
