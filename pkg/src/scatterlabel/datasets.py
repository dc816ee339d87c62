"""Datasets: synthetic generators, MNIST-style IDX ingestion, preprocessing,
seed splits, and a self-describing on-disk record format.

All generators are bit-deterministic per (parameters, seed): randomness
flows through the pinned generator in `rng`, and Gaussians come from the
package's own Box-Muller transform.
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, InvalidParameter, InvalidSplit, ParseError
from .rng import make_rng, normals


@dataclass
class Dataset:
    name: str
    X: np.ndarray            # n×D float64
    y: np.ndarray            # n int32 class ids, contiguous from 0
    class_count: int
    provenance: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def dims(self):
        return self.X.shape[1]


@dataclass
class SeedSplit:
    labeled: np.ndarray
    unlabeled: np.ndarray


@dataclass
class PreprocessSpec:
    """Fitted preprocessing statistics; mode in {none, zscore, minmax}.

    Zero-spread features pass through unchanged in either mode.
    """

    mode: str = "none"
    center: np.ndarray = None
    scale: np.ndarray = None

    def fit(self, X):
        if self.mode not in ("none", "zscore", "minmax"):
            raise InvalidParameter(f"unknown preprocess mode {self.mode!r}")
        X = np.asarray(X, dtype=float)
        if self.mode == "zscore":
            self.center = X.mean(axis=0)
            spread = X.std(axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(X.shape[1])
            self.scale = np.where(spread > 0, spread, 1.0)
            self.center = np.where(spread > 0, self.center, 0.0)
        elif self.mode == "minmax":
            lo = X.min(axis=0)
            hi = X.max(axis=0)
            span = hi - lo
            self.scale = np.where(span > 0, span, 1.0)
            self.center = np.where(span > 0, lo, 0.0)
        else:
            self.center = np.zeros(X.shape[1])
            self.scale = np.ones(X.shape[1])
        return self

    def apply(self, X):
        if self.center is None:
            raise InvalidParameter("preprocess spec not fitted")
        return (np.asarray(X, dtype=float) - self.center) / self.scale


def preprocess(ds, spec):
    """Dataset with transformed samples; truth and provenance unchanged."""
    return Dataset(
        name=ds.name,
        X=spec.apply(ds.X),
        y=ds.y,
        class_count=ds.class_count,
        provenance=ds.provenance,
    )


def gen_two_moons(n, noise, seed):
    """Two interleaved half-circle arcs of n/2 points each.

    Arc 0 is the upper unit semicircle; arc 1 is arc 0 shifted by (1, −0.5)
    and reflected across the x-axis, giving the classic interleave.
    """
    if n < 2:
        raise DegenerateInput("need n >= 2")
    if noise < 0:
        raise InvalidParameter("noise must be >= 0")
    rng = make_rng(seed)
    n0 = n // 2 + (n % 2)
    n1 = n // 2
    # evenly spaced angles: growing n densifies the same figure
    t0 = np.linspace(0.0, np.pi, n0)
    t1 = np.linspace(0.0, np.pi, max(n1, 1))[:n1]
    arc0 = np.column_stack([np.cos(t0), np.sin(t0)])
    arc1 = np.column_stack([1.0 + np.cos(t1), 0.5 - np.sin(t1)])
    X = np.vstack([arc0, arc1])
    if noise > 0:
        X = X + noise * normals(rng, X.shape)
    y = np.concatenate([np.zeros(n0, dtype=np.int32), np.ones(n1, dtype=np.int32)])
    return Dataset(
        name="two_moons",
        X=X,
        y=y,
        class_count=2,
        provenance={"generator": "two_moons", "n": n, "noise": noise, "seed": seed},
    )


def gen_x_shape(n, noise, seed):
    """Two line segments crossing at the origin at ±45°, one class each."""
    if n < 2:
        raise DegenerateInput("need n >= 2")
    rng = make_rng(seed)
    n0 = n // 2 + (n % 2)
    n1 = n // 2
    t0 = np.linspace(-1.0, 1.0, n0)
    t1 = np.linspace(-1.0, 1.0, max(n1, 1))[:n1]
    seg0 = np.column_stack([t0, t0])       # y = x
    seg1 = np.column_stack([t1, -t1])      # y = −x
    X = np.vstack([seg0, seg1])
    if noise > 0:
        X = X + noise * normals(rng, X.shape)
    y = np.concatenate([np.zeros(n0, dtype=np.int32), np.ones(n1, dtype=np.int32)])
    return Dataset(
        name="x_shape",
        X=X,
        y=y,
        class_count=2,
        provenance={"generator": "x_shape", "n": n, "noise": noise, "seed": seed},
    )


FOUR_GAUSSIAN_MEANS = np.array(
    [[5.0, 3.0, 1.0], [5.0, 3.0, 5.0], [50.0, 3.0, 2.0], [5.0, 50.0, 2.0]]
)
FOUR_GAUSSIAN_COV = np.array(
    [[0.30, 0.04, 0.06], [0.04, 0.20, 0.05], [0.06, 0.05, 0.20]]
)


def _cholesky3(A):
    """Lower Cholesky factor; the fixed covariance is positive definite."""
    L = np.zeros_like(A)
    for i in range(A.shape[0]):
        for j in range(i + 1):
            s = A[i, j] - L[i, :j] @ L[j, :j]
            if i == j:
                if s <= 0:
                    raise DegenerateInput("covariance is not positive definite")
                L[i, j] = np.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    return L


_FOUR_GAUSSIAN_CHOL = _cholesky3(FOUR_GAUSSIAN_COV)


def gen_four_gaussians(n_per_class, seed):
    """Four 3-D Gaussian blobs with a shared covariance; class c = blob c."""
    if n_per_class < 1:
        raise DegenerateInput("need n_per_class >= 1")
    rng = make_rng(seed)
    blocks = []
    for mean in FOUR_GAUSSIAN_MEANS:
        z = normals(rng, (n_per_class, 3))
        blocks.append(mean + z @ _FOUR_GAUSSIAN_CHOL.T)
    X = np.vstack(blocks)
    y = np.repeat(np.arange(4, dtype=np.int32), n_per_class)
    return Dataset(
        name="four_gaussians",
        X=X,
        y=y,
        class_count=4,
        provenance={"generator": "four_gaussians", "n_per_class": n_per_class, "seed": seed},
    )


GENERATORS = {
    "two_moons": gen_two_moons,
    "x_shape": gen_x_shape,
    "four_gaussians": gen_four_gaussians,
}


def generate(spec):
    """Build a dataset from a provenance-style dict (generator + params)."""
    kind = spec.get("generator")
    if kind == "two_moons":
        return gen_two_moons(spec["n"], spec.get("noise", 0.08), spec["seed"])
    if kind == "x_shape":
        return gen_x_shape(spec["n"], spec.get("noise", 0.05), spec["seed"])
    if kind == "four_gaussians":
        return gen_four_gaussians(spec["n_per_class"], spec["seed"])
    raise InvalidParameter(f"unknown generator {kind!r}")


# ---------------------------------------------------------------------------
# IDX ingestion (big-endian magic + dims, unsigned byte payload)

_IDX_IMAGES_MAGIC = 0x00000803
_IDX_LABELS_MAGIC = 0x00000801


def _read_idx_images(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4:
        raise ParseError(f"{path}: truncated header", 0)
    (magic,) = struct.unpack(">i", data[:4])
    if magic != _IDX_IMAGES_MAGIC:
        raise ParseError(f"{path}: bad images magic 0x{magic:08x}", 0)
    if len(data) < 16:
        raise ParseError(f"{path}: truncated dimension header", len(data))
    count, rows, cols = struct.unpack(">iii", data[4:16])
    expected = 16 + count * rows * cols
    if len(data) < expected:
        raise ParseError(
            f"{path}: truncated pixel payload, expected {expected} bytes", len(data)
        )
    pixels = np.frombuffer(data, dtype=np.uint8, count=count * rows * cols, offset=16)
    return pixels.reshape(count, rows * cols), rows, cols


def _read_idx_labels(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4:
        raise ParseError(f"{path}: truncated header", 0)
    (magic,) = struct.unpack(">i", data[:4])
    if magic != _IDX_LABELS_MAGIC:
        raise ParseError(f"{path}: bad labels magic 0x{magic:08x}", 0)
    if len(data) < 8:
        raise ParseError(f"{path}: truncated count header", len(data))
    (count,) = struct.unpack(">i", data[4:8])
    if len(data) < 8 + count:
        raise ParseError(f"{path}: truncated label payload", len(data))
    return np.frombuffer(data, dtype=np.uint8, count=count, offset=8)


def load_mnist_idx(images_path, labels_path):
    """Image/label IDX pair → Dataset with pixels scaled to [0, 1]."""
    pixels, rows, cols = _read_idx_images(images_path)
    labels = _read_idx_labels(labels_path)
    if pixels.shape[0] != labels.shape[0]:
        raise ParseError(
            f"image count {pixels.shape[0]} != label count {labels.shape[0]}", 8
        )
    X = pixels.astype(float) / 255.0
    y = labels.astype(np.int32)
    classes = int(y.max()) + 1 if y.size else 0
    return Dataset(
        name="mnist_idx",
        X=X,
        y=y,
        class_count=classes,
        provenance={
            "images_path": str(images_path),
            "labels_path": str(labels_path),
            "rows": rows,
            "cols": cols,
        },
    )


def write_idx_images(path, images_u8):
    """Inverse of the image reader; used by tests and fixtures."""
    images_u8 = np.asarray(images_u8, dtype=np.uint8)
    count = images_u8.shape[0]
    side = int(np.sqrt(images_u8.shape[1]))
    with open(path, "wb") as fh:
        fh.write(struct.pack(">iiii", _IDX_IMAGES_MAGIC, count, side, side))
        fh.write(images_u8.tobytes())


def write_idx_labels(path, labels_u8):
    labels_u8 = np.asarray(labels_u8, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(struct.pack(">ii", _IDX_LABELS_MAGIC, labels_u8.shape[0]))
        fh.write(labels_u8.tobytes())


# ---------------------------------------------------------------------------
# Splits

def make_split(ds, r_unlabeled, seed):
    """Seed/unlabeled split at the requested unlabeled rate.

    Stratified (each class gets at least one seed, round-robin by class)
    whenever the labeled budget covers the class count; uniform otherwise.
    """
    if not 0 <= r_unlabeled < 1:
        raise InvalidParameter("r_unlabeled must be in [0, 1)")
    n = ds.n
    budget = int(round((1.0 - r_unlabeled) * n))
    if budget <= 0:
        raise InvalidSplit(
            f"labeled budget is 0 at R_unlabeled={r_unlabeled} with n={n}; "
            "both propagation and interactive labeling need at least one seed"
        )
    rng = make_rng(seed)
    if budget >= ds.class_count:
        per_class = [np.where(ds.y == c)[0] for c in range(ds.class_count)]
        shuffled = [idx[rng.permutation(len(idx))] for idx in per_class]
        take = [0] * ds.class_count
        picked = []
        c = 0
        while len(picked) < budget:
            if take[c] < len(shuffled[c]):
                picked.append(shuffled[c][take[c]])
                take[c] += 1
            c = (c + 1) % ds.class_count
        labeled = np.sort(np.array(picked, dtype=np.int64))
    else:
        labeled = np.sort(rng.permutation(n)[:budget].astype(np.int64))
    mask = np.ones(n, dtype=bool)
    mask[labeled] = False
    return SeedSplit(labeled=labeled, unlabeled=np.where(mask)[0])


# ---------------------------------------------------------------------------
# On-disk record: one JSON header line, then raw f32 samples + u8 truth.

def save_dataset(ds, path):
    header = {
        "name": ds.name,
        "n": int(ds.n),
        "dims": int(ds.dims),
        "classes": int(ds.class_count),
        "provenance": ds.provenance,
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(ds.X.astype("<f4").tobytes())
        fh.write(ds.y.astype(np.uint8).tobytes())


def load_dataset(path):
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: bad dataset header", 0) from exc
        n, dims = header["n"], header["dims"]
        body = fh.read()
    need = n * dims * 4 + n
    if len(body) < need:
        raise ParseError(f"{path}: truncated body, expected {need} bytes", len(header_line) + len(body))
    X = np.frombuffer(body, dtype="<f4", count=n * dims).reshape(n, dims).astype(float)
    y = np.frombuffer(body, dtype=np.uint8, count=n, offset=n * dims * 4).astype(np.int32)
    return Dataset(
        name=header["name"],
        X=X,
        y=y,
        class_count=header["classes"],
        provenance=header.get("provenance", {}),
    )
