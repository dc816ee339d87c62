"""Evaluation metrics and a small softmax probe for downstream utility.

Label vectors use -1 for "still unlabeled".  Unlabeled points are never
counted as predictions of any class; they count as misses (false negatives)
of their true class, which penalizes annotators that leave points behind.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, InvalidParameter
from .rng import make_rng, normals


@dataclass
class EvalReport:
    accuracy: float
    macro_f1: float
    per_class_precision: list
    per_class_recall: list
    per_class_f1: list
    confusion: np.ndarray = field(repr=False)
    coverage: float = 1.0


def unlabeled_rate(assigned):
    assigned = np.asarray(assigned)
    if assigned.size == 0:
        return 0.0
    return float(np.mean(assigned < 0))


def f1_report(assigned, truth, class_count):
    """One-vs-rest precision/recall/F1 per class plus macro-F1.

    confusion[i][j] counts truth i assigned j; the unlabeled are excluded
    from the confusion matrix but still depress recall.
    """
    assigned = np.asarray(assigned)
    truth = np.asarray(truth)
    if assigned.shape != truth.shape:
        raise InvalidParameter("assigned and truth must have the same shape")
    p = int(class_count)
    confusion = np.zeros((p, p), dtype=np.int64)
    covered = assigned >= 0
    for t, a in zip(truth[covered], assigned[covered]):
        confusion[int(t), int(a)] += 1

    precision, recall, f1 = [], [], []
    for c in range(p):
        tp = int(np.sum(covered & (assigned == c) & (truth == c)))
        fp = int(np.sum(covered & (assigned == c) & (truth != c)))
        fn = int(np.sum((truth == c))) - tp  # unlabeled truth-c points count here
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        precision.append(prec)
        recall.append(rec)
        f1.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)

    correct = int(np.sum(covered & (assigned == truth)))
    accuracy = correct / truth.size if truth.size else 0.0
    return EvalReport(
        accuracy=accuracy,
        macro_f1=float(np.mean(f1)) if f1 else 0.0,
        per_class_precision=precision,
        per_class_recall=recall,
        per_class_f1=f1,
        confusion=confusion,
        coverage=float(np.mean(covered)) if truth.size else 1.0,
    )


# -- multinomial logistic probe ---------------------------------------------


def _softmax(Z):
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def loss_and_grad(W, b, X, Y_onehot, l2):
    """Cross-entropy with L2 on weights; gradient wrt (W, b)."""
    n = X.shape[0]
    P = _softmax(X @ W + b)
    eps = 1e-12
    loss = -np.sum(Y_onehot * np.log(P + eps)) / n + 0.5 * l2 * np.sum(W * W)
    G = (P - Y_onehot) / n
    gW = X.T @ G + l2 * W
    gb = G.sum(axis=0)
    return loss, gW, gb


@dataclass
class LogisticModel:
    W: np.ndarray
    b: np.ndarray
    mean: np.ndarray
    scale: np.ndarray
    class_count: int
    losses: list = field(default_factory=list, repr=False)


def train_logistic(X, y, class_count, *, lr=0.1, epochs=300, l2=1e-4, seed=0):
    """Full-batch gradient descent on standardized features.

    The step size halves whenever the objective increases, so the run
    cannot diverge; the loss trace is kept for inspection.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.shape[0] != y.shape[0]:
        raise InvalidParameter("X and y row counts differ")
    if X.shape[0] == 0:
        raise InvalidParameter("cannot train on an empty set")
    if np.any(y < 0) or np.any(y >= class_count):
        raise InvalidParameter("labels must be in [0, class_count)")
    mean = X.mean(axis=0)
    scale = X.std(axis=0, ddof=0)
    scale = np.where(scale > 0, scale, 1.0)
    Xs = (X - mean) / scale

    n, d = Xs.shape
    p = int(class_count)
    Y = np.zeros((n, p))
    Y[np.arange(n), y] = 1.0
    rng = make_rng(seed)
    W = 0.01 * normals(rng, (d, p))
    b = np.zeros(p)

    losses = []
    step = lr
    prev = np.inf
    for _ in range(epochs):
        loss, gW, gb = loss_and_grad(W, b, Xs, Y, l2)
        if not np.isfinite(loss):
            raise DivergenceError("logistic training produced a non-finite loss")
        if loss > prev:
            step *= 0.5
        losses.append(float(loss))
        prev = loss
        W = W - step * gW
        b = b - step * gb
    return LogisticModel(W=W, b=b, mean=mean, scale=scale, class_count=p, losses=losses)


def classify(model, X):
    X = np.asarray(X, dtype=float)
    Xs = (X - model.mean) / model.scale
    P = _softmax(Xs @ model.W + model.b)
    return np.argmax(P, axis=1)
