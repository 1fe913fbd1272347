"""Command-line pipeline: analyze, generate, split, metrics, theory.

Every subcommand writes its artifacts into --out with fixed filenames plus
a `<command>.config.json` sidecar echoing the full configuration, so any
output can be regenerated from its sidecar alone. Outputs are validated
before exit; exit status is 0 only when everything was written and checked.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .graph import Graph, load_edge_list, load_node_table, save_edge_list
from .homophily import (
    BetaGoal,
    global_homophily,
    homophily_histogram,
    local_homophily_all,
)
from .metrics import (
    MetricRecord,
    baseline_adjust,
    delta_metrics,
    load_predictions,
    micro_f1,
    multiclass_statistical_parity,
    per_class_statistical_parity,
)
from .rewire import EditLog, generate
from .splits import load_split, save_split, save_split_diagnostics, stratified_split
from .theory import TheoryParams, save_sweep, sweep_alpha


def _dump_json(obj, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_config(out_dir: Path, command: str, args: argparse.Namespace) -> None:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg["subcommand"] = command
    _dump_json(cfg, out_dir / f"{command}.config.json")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_pair(args):
    g = load_edge_list(args.graph, one_indexed=args.one_indexed)
    t = load_node_table(args.nodes)
    if len(t) < g.node_count:
        raise ValueError(f"node table has {len(t)} rows but the graph references "
                         f"node ids up to {g.node_count - 1}")
    if len(t) > g.node_count:
        # trailing table rows are isolated nodes; widen the graph to match
        g = Graph.from_edges(len(t), g.edges)
    return g, t


def _cmd_analyze(args) -> int:
    out = _out_dir(args)
    g, t = _load_pair(args)
    h_global = global_homophily(g, t)
    ratios = local_homophily_all(g, t)
    hist = homophily_histogram(g, t, args.bins)
    with open(out / "ratios.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("node_id,ratio\n")
        for node, r in enumerate(ratios):
            fh.write(f"{node},{'' if np.isnan(r) else repr(float(r))}\n")
    edges = hist.edges()
    with open(out / "histogram.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin,lo,hi,mass\n")
        for b in range(hist.bin_count):
            fh.write(f"{b},{float(edges[b])!r},{float(edges[b + 1])!r},"
                     f"{float(hist.mass[b])!r}\n")
    _dump_json({
        "nodes": g.node_count,
        "edges": g.edge_count,
        "global_homophily": h_global,
        "valid_ratio_nodes": int((~np.isnan(ratios)).sum()),
        "bins": args.bins,
    }, out / "summary.json")
    _write_config(out, "analyze", args)
    if abs(hist.mass.sum() - 1.0) > 1e-9:
        raise RuntimeError("histogram mass does not sum to 1")
    return 0


def _cmd_generate(args) -> int:
    out = _out_dir(args)
    g, t = _load_pair(args)
    goal = BetaGoal(args.alpha, args.beta)
    generated, log, report = generate(g, t, goal, args.bins, args.seed)
    save_edge_list(generated, out / "generated_edges.txt")
    log.save(out / "edit_log.jsonl")
    _dump_json({
        "emd_original_goal": report.emd_original_goal,
        "emd_generated_goal": report.emd_generated_goal,
        "edits_rewire": report.edits_rewire,
        "edits_refine": report.edits_refine,
        "degree_delta_histogram": {str(k): v for k, v in
                                   sorted(report.degree_delta_histogram.items())},
    }, out / "report.json")
    _write_config(out, "generate", args)
    replayed = EditLog.load(out / "edit_log.jsonl").replay(g)
    if replayed.edges != generated.edges:
        raise RuntimeError("edit log replay does not reproduce the generated graph")
    return 0


def _cmd_split(args) -> int:
    out = _out_dir(args)
    g, t = _load_pair(args)
    ratios = local_homophily_all(g, t)
    gammas = args.gamma if args.gamma else [0.0]
    for gm in gammas:
        assignment = stratified_split(ratios, gm, args.bins, args.seed,
                                      train_frac=args.train_frac, val_frac=args.val_frac)
        stem = f"split_gamma{gm:g}"
        save_split(assignment, out / f"{stem}.csv")
        save_split_diagnostics(assignment, out / f"{stem}.json")
        reloaded = load_split(out / f"{stem}.csv")
        if not np.array_equal(reloaded, assignment.tags):
            raise RuntimeError(f"{stem}.csv did not round-trip")
    _write_config(out, "split", args)
    return 0


def _score(path, dataset: str, model: str) -> tuple[dict, MetricRecord]:
    table = load_predictions(path)
    f1 = micro_f1(table)
    if table.class_count >= 2:
        sp = multiclass_statistical_parity(table)
        per_class = [float(x) for x in per_class_statistical_parity(table)]
    else:
        sp = 0.0
        per_class = [0.0]
    payload = {"f1": f1, "sp": sp, "n_eval": table.n_eval, "per_class_sp": per_class}
    return payload, MetricRecord(f1=f1, sp=sp, n_eval=table.n_eval,
                                 dataset=dataset, model=model)


def _cmd_metrics(args) -> int:
    out = _out_dir(args)
    payload_a, rec_a = _score(args.run_a, args.dataset, args.model)
    _dump_json(payload_a, out / "metrics_a.json")
    rec_b = None
    if args.run_b:
        payload_b, rec_b = _score(args.run_b, args.dataset, args.model)
        _dump_json(payload_b, out / "metrics_b.json")
        d_f1, d_sp = delta_metrics(rec_a, rec_b)
        _dump_json({"delta_f1": d_f1, "delta_sp": d_sp}, out / "delta.json")
    if args.baseline:
        _, rec_base = _score(args.baseline, args.dataset, "baseline")
        adj_a = baseline_adjust(rec_a, rec_base)
        _dump_json({"f1": adj_a.f1, "sp": adj_a.sp}, out / "adjusted_a.json")
        if rec_b is not None:
            adj_b = baseline_adjust(rec_b, rec_base)
            _dump_json({"f1": adj_b.f1, "sp": adj_b.sp}, out / "adjusted_b.json")
    _write_config(out, "metrics", args)
    return 0


def _cmd_theory(args) -> int:
    out = _out_dir(args)
    grid = [float(x) for x in args.alpha_grid.split(",") if x.strip() != ""]
    if not grid:
        raise ValueError("--alpha-grid must list at least one value")
    params = TheoryParams(n=args.n, k=args.k, d=args.d, h=args.h, alpha_shift=0.0,
                          mu_l=args.mu_l, mu_s=args.mu_s, sigma=args.sigma,
                          lambda_reg=args.lam)
    rows = sweep_alpha(params, grid, args.trials, args.seed)
    if not rows:
        raise ValueError("every grid point was skipped; no sweep rows produced")
    save_sweep(rows, out / "sweep.csv")
    _write_config(out, "theory", args)
    return 0


def _add_graph_args(sp) -> None:
    sp.add_argument("--graph", required=True, help="edge-list file")
    sp.add_argument("--nodes", required=True, help="node table CSV")
    sp.add_argument("--one-indexed", action="store_true",
                    help="edge list counts nodes from 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homshift",
        description="Local-homophily analysis, goal-directed graph rewiring, "
                    "distribution-shift splits, fairness metrics, and the "
                    "linear-GNN disparity model.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="local homophily distribution of a graph")
    _add_graph_args(p)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("generate", help="rewire a graph toward a Beta homophily goal")
    _add_graph_args(p)
    p.add_argument("--alpha", type=float, required=True, help="goal Beta alpha")
    p.add_argument("--beta", type=float, required=True, help="goal Beta beta")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("split", help="gamma-stratified train/val/test splits")
    _add_graph_args(p)
    p.add_argument("--gamma", type=float, action="append",
                   help="repeatable; default 0")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--train-frac", type=float, default=0.8)
    p.add_argument("--val-frac", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("metrics", help="score prediction files (micro-F1, parity)")
    p.add_argument("--run-a", required=True, help="prediction CSV")
    p.add_argument("--run-b", help="second prediction CSV for delta metrics")
    p.add_argument("--baseline", help="baseline prediction CSV to subtract")
    p.add_argument("--dataset", default="dataset")
    p.add_argument("--model", default="model")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("theory", help="closed-form vs Monte-Carlo logit-gap sweep")
    p.add_argument("--n", type=int, default=1000, help="training nodes")
    p.add_argument("--k", type=int, default=500, help="nodes with y=s=0")
    p.add_argument("--d", type=int, default=10, help="neighborhood degree")
    p.add_argument("--h", type=float, default=0.7, help="training homophily")
    p.add_argument("--alpha-grid", default="0.0",
                   help="comma-separated shifts; use the = form for "
                        "negative values, e.g. --alpha-grid=-0.2,0.0,0.2")
    p.add_argument("--mu-l", type=float, default=1.0)
    p.add_argument("--mu-s", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--lam", type=float, default=1e-3, help="ridge strength")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_theory)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"homshift {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
