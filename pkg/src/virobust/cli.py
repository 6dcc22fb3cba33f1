"""Command-line orchestration of the robustness workflow.

Composable subcommands share JSON artifacts: ``generate``/``cluster``/
``perturb``/``nullmodel``/``curve``/``test``/``report``, plus a single
``run`` that executes the whole chain. Exit codes: 0 success, 2 input
error, 3 numerical error, 4 saturation/sampling error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .community import detect, modularity
from .errors import InputError, NumericalError, SamplingError, SaturationError
from .fpca import fpca_test_from_curves
from .generate import GeneratorSpec, generate
from .gp import gp_test
from .graph import Graph, graph_summary, load_edge_list, serialize_edge_list
from .iwt import iwt_report, iwt_test_from_curves
from .pipeline import VICurveSet, default_grid, null_base_graph, run_pipeline
from .report import curve_plot_svg, pvalue_plot_svg
from .rewire import rewire, rng_stream


def _default_seed() -> int:
    return int(os.environ.get("VIROBUST_SEED", "0"))


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _load_graph(path) -> Graph:
    return load_edge_list(path)


def _cmd_generate(args):
    spec = GeneratorSpec(
        n=args.n,
        n_modules=args.modules,
        avg_degree=args.avg_degree,
        target_q=args.q,
        seed=args.seed,
    )
    result = generate(spec)
    _write(args.out, serialize_edge_list(result.graph))
    if args.planted:
        _write(
            args.planted,
            _dump(
                {
                    "labels": result.planted.labels.tolist(),
                    "K": result.planted.k,
                    "achieved_Q": result.achieved_q,
                }
            ),
        )
    print(f"generated n={result.graph.n} m={result.graph.m} Q={result.achieved_q:.4f}")


def _cmd_cluster(args):
    g = _load_graph(args.input)
    part = detect(g, args.method, rng_seed=args.seed)
    payload = {
        "labels": part.labels.tolist(),
        "K": part.k,
        "Q": modularity(g, part) if g.m else 0.0,
    }
    _write(args.out, _dump(payload))
    print(f"clustered K={part.k} Q={payload['Q']:.4f}")


def _cmd_perturb(args):
    g = _load_graph(args.input)
    out = rewire(g, args.p, rng_stream(args.seed, 100))
    _write(args.out, serialize_edge_list(out))
    print(f"perturbed p={args.p} m={out.m}")


def _cmd_nullmodel(args):
    g = _load_graph(args.input)
    null = null_base_graph(g, args.seed)
    _write(args.out, serialize_edge_list(null))
    print(f"null model m={null.m}")


def _cmd_curve(args):
    g = _load_graph(args.input)
    grid = default_grid(args.levels, args.reps, args.subreps)
    curves = run_pipeline(g, args.method, grid, args.seed, null_draws=args.null_draws)
    _write(args.out, curves.to_json())
    if args.csv:
        _write(args.csv, curves.to_csv())
    print(f"curves written to {args.out}")


def _cmd_test(args):
    curves = VICurveSet.from_json(Path(args.curves).read_text(encoding="utf-8"))
    if args.which == "gp":
        result = gp_test(curves)
    elif args.which == "fpca":
        result = fpca_test_from_curves(
            curves, pve=args.pve, alpha=args.alpha, n_perm=args.perms, seed=args.seed
        )
    else:
        iwt = iwt_test_from_curves(
            curves, n_perm=args.perms, basis=args.basis, seed=args.seed
        )
        result = iwt_report(iwt, levels=curves.grid.levels)
    _write(args.out, _dump(result))
    print(f"{args.which} test written to {args.out}")


def _cmd_report(args):
    curves = VICurveSet.from_json(Path(args.curves).read_text(encoding="utf-8"))
    _write(args.out_curves, curve_plot_svg(curves))
    if args.iwt:
        iwt = json.loads(Path(args.iwt).read_text(encoding="utf-8"))
        _write(args.out_pvalues, pvalue_plot_svg(iwt["adjusted_p"], iwt["levels"]))
    print("report rendered")


def _cmd_run(args):
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    config = {
        "input": args.input,
        "generate": None
        if args.input
        else {
            "n": args.n,
            "modules": args.modules,
            "avg_degree": args.avg_degree,
            "q": args.q,
        },
        "method": args.method,
        "levels": args.levels,
        "reps": args.reps,
        "subreps": args.subreps,
        "null_draws": args.null_draws,
        "tests": sorted(args.tests.split(",")),
        "seed": args.seed,
        "perms": args.perms,
        "pve": args.pve,
        "alpha": args.alpha,
    }
    config_hash = hashlib.sha256(_dump(config).encode()).hexdigest()[:16]

    if args.input:
        g = _load_graph(args.input)
    else:
        spec = GeneratorSpec(
            n=args.n,
            n_modules=args.modules,
            avg_degree=args.avg_degree,
            target_q=args.q,
            seed=args.seed,
        )
        labeled = generate(spec)
        g = labeled.graph
        _write(outdir / "graph.edgelist", serialize_edge_list(g))

    part = detect(g, args.method, rng_seed=args.seed)
    grid = default_grid(args.levels, args.reps, args.subreps)
    curves = run_pipeline(g, args.method, grid, args.seed, null_draws=args.null_draws)
    _write(outdir / "curves.json", curves.to_json())
    _write(outdir / "curves.csv", curves.to_csv())

    tests = {}
    selected = set(config["tests"])
    if "gp" in selected:
        tests["gp"] = gp_test(curves)
        _write(outdir / "gp.json", _dump(tests["gp"]))
    if "fpca" in selected:
        tests["fpca"] = fpca_test_from_curves(
            curves, pve=args.pve, alpha=args.alpha, n_perm=args.perms, seed=args.seed
        )
        _write(outdir / "fpca.json", _dump(tests["fpca"]))
    iwt_result = None
    if "iwt" in selected:
        iwt_result = iwt_test_from_curves(curves, n_perm=args.perms, seed=args.seed)
        tests["iwt"] = iwt_report(iwt_result, levels=curves.grid.levels)
        _write(outdir / "iwt.json", _dump(tests["iwt"]))

    _write(outdir / "curves.svg", curve_plot_svg(curves))
    if iwt_result is not None:
        _write(
            outdir / "pvalues.svg",
            pvalue_plot_svg(iwt_result.adjusted, curves.grid.levels),
        )

    summary = {
        "version": __version__,
        "config_hash": config_hash,
        "seed": args.seed,
        "method": args.method,
        "graph": graph_summary(g),
        "partition": {"K": part.k, "Q": modularity(g, part) if g.m else 0.0},
        "tests": tests,
    }
    _write(outdir / "summary.json", _dump(summary))
    print(f"run complete; summary at {outdir / 'summary.json'}")


def validate_summary(summary: dict):
    """Check a run summary against the shipped JSON schema."""
    import jsonschema

    schema_path = Path(__file__).parent / "schemas" / "summary.schema.json"
    schema = json.loads(schema_path.read_text(encoding="utf-8"))
    jsonschema.validate(summary, schema)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="virobust",
        description="Statistical validation of community robustness",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    seed_kw = dict(type=int, default=_default_seed())

    p = sub.add_parser("generate", help="generate a modular random graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--modules", type=int, required=True)
    p.add_argument("--avg-degree", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out", required=True)
    p.add_argument("--planted")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("cluster", help="detect communities")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["fastgreedy", "louvain"], required=True)
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("perturb", help="degree-preserving rewire")
    p.add_argument("--input", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("nullmodel", help="configuration-model sample")
    p.add_argument("--input", required=True)
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_nullmodel)

    p = sub.add_parser("curve", help="build VI curves")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["fastgreedy", "louvain"], required=True)
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--subreps", type=int, default=10)
    p.add_argument("--null-draws", type=int, default=1)
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("test", help="significance tests on curves")
    p.add_argument("which", choices=["gp", "fpca", "iwt"])
    p.add_argument("--curves", required=True)
    p.add_argument("--pve", type=float, default=0.95)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--perms", type=int, default=999)
    p.add_argument("--basis", choices=["pointwise", "bspline"], default="pointwise")
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("report", help="render SVG plots from artifacts")
    p.add_argument("--curves", required=True)
    p.add_argument("--iwt")
    p.add_argument("--out-curves", required=True)
    p.add_argument("--out-pvalues", default="pvalues.svg")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("run", help="full workflow")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input")
    src.add_argument("--n", type=int)
    p.add_argument("--modules", type=int, default=5)
    p.add_argument("--avg-degree", type=float, default=10.0)
    p.add_argument("--q", type=float, default=0.4)
    p.add_argument("--method", choices=["fastgreedy", "louvain"], default="fastgreedy")
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--subreps", type=int, default=10)
    p.add_argument("--null-draws", type=int, default=1)
    p.add_argument("--tests", default="gp,fpca,iwt")
    p.add_argument("--perms", type=int, default=999)
    p.add_argument("--pve", type=float, default=0.95)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--threads", type=int, default=int(os.environ.get("VIROBUST_THREADS", "1")))
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=_cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except (SaturationError, SamplingError) as exc:
        print(f"sampling error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
