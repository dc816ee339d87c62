import numpy as np
import pytest

from scatterlabel.datasets import Dataset, SeedSplit


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def blob_dataset(centers, per, spread=0.3, seed=0, name="blobs"):
    """Well-separated Gaussian blobs; helper for session/oracle tests."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    X = np.vstack([c + spread * rng.standard_normal((per, centers.shape[1]))
                   for c in centers])
    y = np.repeat(np.arange(len(centers), dtype=np.int32), per)
    return Dataset(name=name, X=X, y=y, class_count=len(centers),
                   provenance={"generator": "test_blobs", "seed": seed})


def split_first_per_class(ds, per_class=1):
    """Deterministic split: first `per_class` indices of each class are seeds."""
    labeled = []
    for c in range(ds.class_count):
        labeled.extend(np.where(ds.y == c)[0][:per_class])
    labeled = np.asarray(sorted(labeled), dtype=np.int64)
    mask = np.ones(ds.n, dtype=bool)
    mask[labeled] = False
    return SeedSplit(labeled=labeled, unlabeled=np.where(mask)[0])
