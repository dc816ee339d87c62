"""Benchmark harness.

Each experiment writes two CSVs into <out_dir>/<experiment>/:

* results.csv — everything deterministically derived from seeds.  Re-running
  the same experiment must reproduce this file byte for byte.
* timing.csv  — wall-clock measurements, which naturally vary run to run.

Experiments:

* lp_accuracy_curve — propagation quality and interactive labeling quality
  on two moons as the unlabeled rate R grows.
* lp_time_scaling   — propagation wall time vs n (log-log slope) and the
  number of interactive steps vs n.
* dr_compare        — labeling quality per view type (pca / isomap / tsne /
  reprojection-enabled pca) on the four-class dataset.
* mnist_labeling    — interactive labeling vs propagation on an MNIST
  subset (needs the IDX files on disk).
* mnist_downstream  — classifier trained on session labels vs true labels.
"""

import csv
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .datasets import (
    Dataset,
    PreprocessSpec,
    gen_four_gaussians,
    gen_two_moons,
    load_mnist_idx,
    make_split,
)
from .embedding import isomap, pca_embedding, tsne
from .errors import InvalidParameter
from .labelprop import build_affinity, harden, normalize, propagate
from .linalg import covariance_matrix, top_eigenpairs
from .metrics import classify, f1_report, train_logistic
from .oracle import AnnotatorPolicy, run_headless
from .session import Session

MNIST_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}


@dataclass
class BenchSpec:
    experiment: str
    out_dir: str
    data_dir: str = None
    params: dict = field(default_factory=dict)


@dataclass
class BenchResult:
    experiment: str
    rows: list
    timing: list
    results_path: str
    timing_path: str


def _fmt(v):
    if v is None or v == "":
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def _write_csv(path, rows, columns):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c, "")) for c in columns])


def _assigned(ledger):
    return ledger.label  # -1 where untouched, by construction


def _score(ledger, ds):
    report = f1_report(_assigned(ledger), ds.y, ds.class_count)
    return report


# -- experiment: lp_accuracy_curve -------------------------------------------


def _run_lp(ds, split, k, lam):
    graph = normalize(build_affinity(ds.X, k=k))
    soft = propagate(graph, split, ds.y[split.labeled], ds.class_count, lam=lam)
    labels, unreached = harden(soft, split, ds.y[split.labeled])
    return labels, soft, unreached


def _scaled_policy(n, **kw):
    """Annotator whose group granularity tracks scene density.

    Densifying a fixed figure shrinks the link radius roughly like 1/sqrt(n),
    which sheds low-density fringe clumps as separate components; scaling the
    merge threshold keeps the perceived grouping of the picture constant.
    The wider link factor tolerates the sparse fringes of small scenes, where
    the nominal radius under-connects long before it over-connects.
    """
    kw.setdefault("link_radius_factor", 4.0)
    kw.setdefault("foreign_tolerance", 0.001)
    return AnnotatorPolicy(min_group=max(5, int(0.15 * n)), **kw)


def lp_accuracy_curve(spec):
    p = spec.params
    n = int(p.get("n", 200))
    noise = float(p.get("noise", 0.08))
    r_grid = list(p.get("r_grid", [0.5, 0.8, 0.9, 0.95, 0.99, 0.995]))
    k_grid = list(p.get("k_grid", [5, 10, 20]))
    lam_grid = list(p.get("lam_grid", [0.9, 0.99]))
    seeds = int(p.get("seeds", 20))

    rows, timing = [], []
    for r in r_grid:
        for s in range(seeds):
            ds = gen_two_moons(n, noise, seed=s)
            split = make_split(ds, r, seed=1000 + s)
            for k in k_grid:
                for lam in lam_grid:
                    t0 = time.perf_counter()
                    labels, soft, unreached = _run_lp(ds, split, k, lam)
                    dt = time.perf_counter() - t0
                    rep = f1_report(labels, ds.y, ds.class_count)
                    rows.append({
                        "kind": "lp", "r": r, "k": k, "lam": lam, "seed": s,
                        "f1": rep.macro_f1, "accuracy": rep.accuracy,
                        "coverage": rep.coverage, "unreached": unreached,
                        "iterations": soft.iterations, "steps": "",
                    })
                    timing.append({"kind": "lp", "r": r, "k": k, "lam": lam,
                                   "seed": s, "seconds": dt})
            t0 = time.perf_counter()
            session = Session(ds, "none", "pca", {}, split)
            ledger, transcript = run_headless(session, _scaled_policy(n))
            dt = time.perf_counter() - t0
            rep = _score(ledger, ds)
            rows.append({
                "kind": "pvil", "r": r, "k": "", "lam": "", "seed": s,
                "f1": rep.macro_f1, "accuracy": rep.accuracy,
                "coverage": rep.coverage, "unreached": "",
                "iterations": "", "steps": transcript["steps"],
            })
            timing.append({"kind": "pvil", "r": r, "k": "", "lam": "",
                           "seed": s, "seconds": dt})
    columns = ["kind", "r", "k", "lam", "seed", "f1", "accuracy", "coverage",
               "unreached", "iterations", "steps"]
    tcolumns = ["kind", "r", "k", "lam", "seed", "seconds"]
    return rows, columns, timing, tcolumns


# -- experiment: lp_time_scaling ----------------------------------------------


def _dense_lp_bytes(n):
    # distance buffer reused as W, plus S, plus the argsort scratch
    return 3 * n * n * 8


def lp_time_scaling(spec):
    p = spec.params
    sizes = list(p.get("sizes", [100, 1000, 10000]))
    if p.get("include_large"):
        sizes = sizes + [100000]
    pvil_sizes = list(p.get("pvil_sizes", [1000, 10000, 100000]))
    noise = float(p.get("noise", 0.08))
    r = float(p.get("r", 0.9))
    pvil_r = float(p.get("pvil_r", 0.99))
    k = int(p.get("k", 10))
    lam = float(p.get("lam", 0.99))
    iterations = int(p.get("iterations", 300))
    mem_budget = float(p.get("mem_budget_bytes", 3.5e9))

    rows, timing = [], []
    for n in sizes:
        if _dense_lp_bytes(n) > mem_budget:
            rows.append({"kind": "lp", "n": n, "status": "skipped_memory",
                         "iterations": "", "f1": "", "steps": ""})
            continue
        ds = gen_two_moons(n, noise, seed=0)
        split = make_split(ds, r, seed=1)
        t0 = time.perf_counter()
        graph = normalize(build_affinity(ds.X, k=k))
        # eps=0 pins the iteration count so timings compare pure per-step cost
        soft = propagate(graph, split, ds.y[split.labeled], ds.class_count,
                         lam=lam, eps=0.0, max_iter=iterations)
        labels, _ = harden(soft, split, ds.y[split.labeled])
        dt = time.perf_counter() - t0
        rep = f1_report(labels, ds.y, ds.class_count)
        rows.append({"kind": "lp", "n": n, "status": "ok",
                     "iterations": soft.iterations, "f1": rep.macro_f1,
                     "steps": ""})
        timing.append({"kind": "lp", "n": n, "seconds": dt})
        del graph, soft
    for n in pvil_sizes:
        ds = gen_two_moons(n, noise, seed=0)
        split = make_split(ds, pvil_r, seed=1)
        t0 = time.perf_counter()
        session = Session(ds, "none", "pca", {}, split)
        ledger, transcript = run_headless(session, _scaled_policy(n))
        dt = time.perf_counter() - t0
        rep = _score(ledger, ds)
        rows.append({"kind": "pvil", "n": n, "status": "ok",
                     "iterations": "", "f1": rep.macro_f1,
                     "steps": transcript["steps"]})
        timing.append({"kind": "pvil", "n": n, "seconds": dt})
    columns = ["kind", "n", "status", "iterations", "f1", "steps"]
    tcolumns = ["kind", "n", "seconds"]
    return rows, columns, timing, tcolumns


def fit_loglog_slope(ns, seconds):
    """Least-squares slope of log10(seconds) against log10(n)."""
    ns = np.asarray(ns, dtype=float)
    seconds = np.asarray(seconds, dtype=float)
    if ns.size < 2:
        raise InvalidParameter("need at least two sizes to fit a slope")
    lx, ly = np.log10(ns), np.log10(seconds)
    lx = lx - lx.mean()
    return float(np.sum(lx * (ly - ly.mean())) / np.sum(lx * lx))


# -- experiment: dr_compare ----------------------------------------------------


def dr_compare(spec):
    p = spec.params
    n_per_class = int(p.get("n_per_class", 1200))
    r = float(p.get("r", 0.995))
    run_seeds = int(p.get("run_seeds", 5))
    dataset_seed = int(p.get("dataset_seed", 7))
    embed_seed = int(p.get("embed_seed", 1234))
    isomap_k = int(p.get("isomap_k", 10))
    tsne_iters = int(p.get("tsne_iterations", 500))
    perplexity = float(p.get("perplexity", 30.0))
    # Blob-scale scenes: clusters occupy a sliver of the canvas, so the
    # perceptual link slack is far wider relative to the 1-NN spacing than
    # on a single connected figure.  One value serves all four views.
    link_factor = float(p.get("link_factor", 7.0))

    # Raw coordinates: the blob layout (two distant blobs, two stacked along
    # the low-variance axis) is the point of the comparison; rescaling the
    # axes would hand the planar projections the very separation the study
    # measures their failure to find.
    ds = gen_four_gaussians(n_per_class, seed=dataset_seed)
    Xp = ds.X

    views, fit_seconds = {}, {}
    t0 = time.perf_counter()
    views["pca"] = pca_embedding(Xp, d=2).coords
    fit_seconds["pca"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    views["isomap"] = isomap(Xp, k=isomap_k, d=2).coords
    fit_seconds["isomap"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    views["tsne"] = tsne(Xp, perplexity=perplexity, iterations=tsne_iters,
                         seed=embed_seed).coords
    fit_seconds["tsne"] = time.perf_counter() - t0
    views["mdr"] = views["pca"]
    fit_seconds["mdr"] = fit_seconds["pca"]

    dr_params = {
        "pca": {},
        "isomap": {"k": isomap_k},
        "tsne": {"perplexity": perplexity, "iterations": tsne_iters,
                 "seed": embed_seed},
        "mdr": {},
    }
    rows, timing = [], []
    for m in ["pca", "isomap", "tsne", "mdr"]:
        timing.append({"method": m, "seed": "", "stage": "fit",
                       "seconds": fit_seconds[m]})
    for s in range(run_seeds):
        split = make_split(ds, r, seed=100 + s)
        for m in ["pca", "isomap", "tsne", "mdr"]:
            session = Session(
                ds, "none", "pca" if m == "mdr" else m, dr_params[m], split,
                root_coords=views[m], root_fit_seconds=fit_seconds[m],
            )
            policy = _scaled_policy(ds.n, link_radius_factor=link_factor,
                                    allow_reproject=(m == "mdr"))
            t0 = time.perf_counter()
            ledger, transcript = run_headless(session, policy)
            dt = time.perf_counter() - t0
            rep = _score(ledger, ds)
            rows.append({
                "method": m, "seed": s, "f1": rep.macro_f1,
                "accuracy": rep.accuracy, "coverage": rep.coverage,
                "steps": transcript["steps"], "rounds": transcript["rounds"],
            })
            timing.append({"method": m, "seed": s, "stage": "session",
                           "seconds": dt})
            timing.append({"method": m, "seed": s, "stage": "dr_total",
                           "seconds": session.dr_seconds})
    columns = ["method", "seed", "f1", "accuracy", "coverage", "steps", "rounds"]
    tcolumns = ["method", "seed", "stage", "seconds"]
    return rows, columns, timing, tcolumns


# -- MNIST experiments ---------------------------------------------------------


def _mnist_paths(spec, names):
    data_dir = spec.data_dir or (spec.params or {}).get("data_dir")
    if not data_dir:
        raise FileNotFoundError(
            "MNIST experiments need --data-dir pointing at the IDX files "
            f"({', '.join(MNIST_FILES.values())})"
        )
    paths = {k: os.path.join(data_dir, MNIST_FILES[k]) for k in names}
    missing = [v for v in paths.values() if not os.path.exists(v)]
    if missing:
        raise FileNotFoundError(
            "missing MNIST IDX files: " + ", ".join(missing)
            + ". Place the standard uncompressed IDX files "
            f"({', '.join(MNIST_FILES.values())}) in {data_dir} and re-run."
        )
    return paths


def _mnist_subset(spec, per_class, pca_dims, embed_seed):
    paths = _mnist_paths(spec, ["train_images", "train_labels"])
    full = load_mnist_idx(paths["train_images"], paths["train_labels"])
    keep = []
    counts = {c: 0 for c in range(full.class_count)}
    for i, c in enumerate(full.y):
        if counts[int(c)] < per_class:
            counts[int(c)] += 1
            keep.append(i)
        if len(keep) == per_class * full.class_count:
            break
    keep = np.array(keep)
    X, y = full.X[keep], full.y[keep]
    mean = X.mean(axis=0)
    cov = covariance_matrix(X)
    vals, vecs = top_eigenpairs(cov, pca_dims)
    signs = np.sign(vecs[np.argmax(np.abs(vecs), axis=0), np.arange(pca_dims)])
    signs[signs == 0] = 1.0
    basis = vecs * signs
    Xr = (X - mean) @ basis
    ds = Dataset(name="mnist_subset", X=Xr, y=y, class_count=full.class_count,
                 provenance={"generator": "mnist_subset", "per_class": per_class,
                             "pca_dims": pca_dims, "seed": embed_seed})
    return ds, mean, basis


def mnist_labeling(spec):
    p = spec.params
    per_class = int(p.get("per_class", 200))
    pca_dims = int(p.get("pca_dims", 50))
    r = float(p.get("r", 0.995))
    run_seeds = int(p.get("run_seeds", 3))
    embed_seed = int(p.get("embed_seed", 1234))
    tsne_iters = int(p.get("tsne_iterations", 500))

    ds, _, _ = _mnist_subset(spec, per_class, pca_dims, embed_seed)
    prep = PreprocessSpec("zscore").fit(ds.X)
    t0 = time.perf_counter()
    view = tsne(prep.apply(ds.X), perplexity=30.0, iterations=tsne_iters,
                seed=embed_seed).coords
    fit_dt = time.perf_counter() - t0

    rows, timing = [], []
    timing.append({"kind": "tsne_fit", "seed": "", "seconds": fit_dt})
    dr_params = {"perplexity": "auto", "iterations": tsne_iters, "seed": embed_seed}
    for s in range(run_seeds):
        split = make_split(ds, r, seed=100 + s)
        t0 = time.perf_counter()
        labels, soft, unreached = _run_lp(ds, split, k=10, lam=0.99)
        dt = time.perf_counter() - t0
        rep = f1_report(labels, ds.y, ds.class_count)
        rows.append({"kind": "lp", "seed": s, "f1": rep.macro_f1,
                     "accuracy": rep.accuracy, "coverage": rep.coverage,
                     "steps": "", "unreached": unreached})
        timing.append({"kind": "lp", "seed": s, "seconds": dt})
        session = Session(ds, "zscore", "tsne", dr_params, split,
                          root_coords=view, root_fit_seconds=fit_dt)
        t0 = time.perf_counter()
        ledger, transcript = run_headless(session, AnnotatorPolicy())
        dt = time.perf_counter() - t0
        rep = _score(ledger, ds)
        rows.append({"kind": "pvil", "seed": s, "f1": rep.macro_f1,
                     "accuracy": rep.accuracy, "coverage": rep.coverage,
                     "steps": transcript["steps"], "unreached": ""})
        timing.append({"kind": "pvil", "seed": s, "seconds": dt})
    columns = ["kind", "seed", "f1", "accuracy", "coverage", "steps", "unreached"]
    tcolumns = ["kind", "seed", "seconds"]
    return rows, columns, timing, tcolumns


def mnist_downstream(spec):
    p = spec.params
    per_class = int(p.get("per_class", 200))
    pca_dims = int(p.get("pca_dims", 50))
    r = float(p.get("r", 0.995))
    embed_seed = int(p.get("embed_seed", 1234))
    tsne_iters = int(p.get("tsne_iterations", 500))

    ds, mean, basis = _mnist_subset(spec, per_class, pca_dims, embed_seed)
    test_paths = _mnist_paths(spec, ["test_images", "test_labels"])
    test = load_mnist_idx(test_paths["test_images"], test_paths["test_labels"])
    Xt = (test.X - mean) @ basis

    prep = PreprocessSpec("zscore").fit(ds.X)
    t0 = time.perf_counter()
    view = tsne(prep.apply(ds.X), perplexity=30.0, iterations=tsne_iters,
                seed=embed_seed).coords
    fit_dt = time.perf_counter() - t0
    split = make_split(ds, r, seed=100)
    session = Session(ds, "zscore", "tsne",
                      {"perplexity": "auto", "iterations": tsne_iters,
                       "seed": embed_seed},
                      split, root_coords=view, root_fit_seconds=fit_dt)
    ledger, transcript = run_headless(session, AnnotatorPolicy())

    rows, timing = [], []
    for source in ["truth", "pvil"]:
        if source == "truth":
            mask = np.ones(ds.n, dtype=bool)
            labels = ds.y
        else:
            mask = ledger.labeled_mask()
            labels = ledger.label
        t0 = time.perf_counter()
        model = train_logistic(ds.X[mask], labels[mask], ds.class_count, seed=0)
        dt = time.perf_counter() - t0
        pred = classify(model, Xt)
        acc = float(np.mean(pred == test.y))
        rows.append({"source": source, "train_n": int(mask.sum()),
                     "test_accuracy": acc, "steps": transcript["steps"]})
        timing.append({"source": source, "seconds": dt})
    columns = ["source", "train_n", "test_accuracy", "steps"]
    tcolumns = ["source", "seconds"]
    return rows, columns, timing, tcolumns


# -- driver --------------------------------------------------------------------


EXPERIMENTS = {
    "lp_accuracy_curve": lp_accuracy_curve,
    "lp_time_scaling": lp_time_scaling,
    "dr_compare": dr_compare,
    "mnist_labeling": mnist_labeling,
    "mnist_downstream": mnist_downstream,
}

# Keys each experiment reads from spec.params.  run_experiment rejects
# anything outside this set so a typo'd --param fails instead of silently
# running the default grid.
EXPERIMENT_PARAMS = {
    "lp_accuracy_curve": {"n", "noise", "r_grid", "k_grid", "lam_grid", "seeds"},
    "lp_time_scaling": {
        "sizes", "include_large", "pvil_sizes", "noise", "r", "pvil_r",
        "k", "lam", "iterations", "mem_budget_bytes",
    },
    "dr_compare": {
        "n_per_class", "r", "run_seeds", "dataset_seed", "embed_seed",
        "isomap_k", "tsne_iterations", "perplexity", "link_factor",
    },
    "mnist_labeling": {
        "data_dir", "per_class", "pca_dims", "r", "run_seeds",
        "embed_seed", "tsne_iterations",
    },
    "mnist_downstream": {
        "data_dir", "per_class", "pca_dims", "r", "embed_seed",
        "tsne_iterations",
    },
}


def run_experiment(spec):
    if spec.experiment not in EXPERIMENTS:
        raise InvalidParameter(
            f"unknown experiment {spec.experiment!r}; "
            f"choose from {sorted(EXPERIMENTS)}"
        )
    unknown = sorted(set(spec.params or {}) - EXPERIMENT_PARAMS[spec.experiment])
    if unknown:
        raise InvalidParameter(
            f"unknown parameter(s) for {spec.experiment}: {', '.join(unknown)}; "
            f"valid: {', '.join(sorted(EXPERIMENT_PARAMS[spec.experiment]))}"
        )
    rows, columns, timing, tcolumns = EXPERIMENTS[spec.experiment](spec)
    exp_dir = os.path.join(spec.out_dir, spec.experiment)
    os.makedirs(exp_dir, exist_ok=True)
    results_path = os.path.join(exp_dir, "results.csv")
    timing_path = os.path.join(exp_dir, "timing.csv")
    _write_csv(results_path, rows, columns)
    _write_csv(timing_path, timing, tcolumns)
    return BenchResult(
        experiment=spec.experiment,
        rows=rows,
        timing=timing,
        results_path=results_path,
        timing_path=timing_path,
    )
