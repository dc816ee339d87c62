"""Interactive scatter-plot labeling workbench.

Core pieces: projection-based 2-D views (PCA / isomap / t-SNE over
hand-rolled symmetric eigensolvers), graph label propagation as the
automatic baseline, purity-gated labeling sessions with reprojection,
a scripted annotator for headless experiments, and a benchmark harness.
"""

from .datasets import (
    Dataset,
    SeedSplit,
    gen_four_gaussians,
    gen_two_moons,
    gen_x_shape,
    generate,
    load_dataset,
    load_mnist_idx,
    make_split,
    save_dataset,
)
from .embedding import classical_mds, isomap, pca_embedding, tsne
from .labelprop import build_affinity, harden, normalize, propagate, run_label_propagation
from .metrics import EvalReport, f1_report, train_logistic, classify, unlabeled_rate
from .oracle import AnnotatorPolicy, run_headless, segment_view
from .session import Session, replay_log
from .bench import BenchSpec, run_experiment

__version__ = "0.1.0"

__all__ = [
    "AnnotatorPolicy",
    "BenchSpec",
    "Dataset",
    "EvalReport",
    "SeedSplit",
    "Session",
    "build_affinity",
    "classical_mds",
    "classify",
    "f1_report",
    "gen_four_gaussians",
    "gen_two_moons",
    "gen_x_shape",
    "generate",
    "harden",
    "isomap",
    "load_dataset",
    "load_mnist_idx",
    "make_split",
    "normalize",
    "pca_embedding",
    "propagate",
    "replay_log",
    "run_experiment",
    "run_headless",
    "run_label_propagation",
    "save_dataset",
    "segment_view",
    "tsne",
    "unlabeled_rate",
    "__version__",
]
