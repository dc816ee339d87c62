"""Command-line entry points: serve, bench, gen, lp."""

import argparse
import json
import sys

import numpy as np

from . import datasets as ds_mod
from .bench import EXPERIMENTS, BenchSpec, run_experiment
from .errors import ScatterLabelError
from .labelprop import run_label_propagation
from .metrics import f1_report


def _coerce(value):
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def _parse_params(pairs):
    params = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise SystemExit(f"error: bad --param {pair!r}, expected key=value")
        key, value = pair.split("=", 1)
        params[key] = _coerce(value)
    return params


def build_parser():
    parser = argparse.ArgumentParser(
        prog="scatterlabel",
        description="interactive scatter-plot labeling workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--data-dir", default=None,
                       help="directory for session event logs")

    bench = sub.add_parser("bench", help="run a benchmark experiment")
    bench.add_argument("experiment", choices=sorted(EXPERIMENTS))
    bench.add_argument("--out", required=True, help="output directory")
    bench.add_argument("--data-dir", default=None,
                       help="directory holding MNIST IDX files")
    bench.add_argument("--param", action="append", metavar="KEY=VALUE",
                       help="override an experiment parameter")

    gen = sub.add_parser("gen", help="generate a dataset file")
    gen.add_argument("generator", choices=["two_moons", "x_shape", "four_gaussians"])
    gen.add_argument("--out", required=True)
    gen.add_argument("--n", type=int, default=200)
    gen.add_argument("--n-per-class", type=int, default=100)
    gen.add_argument("--noise", type=float, default=None)
    gen.add_argument("--seed", type=int, default=0)

    lp = sub.add_parser("lp", help="run label propagation on a dataset file")
    lp.add_argument("--data", required=True, help="dataset file from `gen`")
    lp.add_argument("--r", type=float, default=0.9,
                    help="unlabeled fraction")
    lp.add_argument("--split-seed", type=int, default=0)
    lp.add_argument("--k", type=int, default=10)
    lp.add_argument("--lam", type=float, default=0.99)
    lp.add_argument("--out", default=None,
                    help="write hardened labels to this CSV")
    return parser


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.data_dir), host=args.host, port=args.port)
    return 0


def cmd_bench(args):
    spec = BenchSpec(
        experiment=args.experiment,
        out_dir=args.out,
        data_dir=args.data_dir,
        params=_parse_params(args.param),
    )
    result = run_experiment(spec)
    print(json.dumps({
        "experiment": result.experiment,
        "rows": len(result.rows),
        "results": result.results_path,
        "timing": result.timing_path,
    }))
    return 0


def cmd_gen(args):
    spec = {"generator": args.generator, "seed": args.seed}
    if args.generator == "four_gaussians":
        spec["n_per_class"] = args.n_per_class
    else:
        spec["n"] = args.n
        if args.noise is not None:
            spec["noise"] = args.noise
    ds = ds_mod.generate(spec)
    ds_mod.save_dataset(ds, args.out)
    print(json.dumps({"name": ds.name, "n": ds.n, "dims": ds.dims,
                      "classes": ds.class_count, "path": args.out}))
    return 0


def cmd_lp(args):
    ds = ds_mod.load_dataset(args.data)
    split = ds_mod.make_split(ds, args.r, args.split_seed)
    labels, soft, unreached = run_label_propagation(
        ds.X, split, ds.y[split.labeled], ds.class_count,
        k=args.k, lam=args.lam,
    )
    report = f1_report(labels, ds.y, ds.class_count)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("index,label\n")
            for i, c in enumerate(labels):
                fh.write(f"{i},{int(c)}\n")
    print(json.dumps({
        "macro_f1": report.macro_f1,
        "accuracy": report.accuracy,
        "iterations": soft.iterations,
        "converged": bool(soft.converged),
        "unreached": int(unreached),
    }))
    return 0


COMMANDS = {"serve": cmd_serve, "bench": cmd_bench, "gen": cmd_gen, "lp": cmd_lp}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ScatterLabelError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
