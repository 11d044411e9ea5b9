import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ufsbench.dataset import MultiLabelDataset

DATA_DIR = Path(__file__).parent.parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


def random_dataset(rng, p=20, n_feat=6, q=3, name="toy"):
    X = rng.normal(size=(p, n_feat))
    Y = (rng.random(size=(p, q)) < 0.4).astype(int)
    # ensure no degenerate all-equal label columns
    Y[0] = 1
    Y[1] = 0
    return MultiLabelDataset(
        name=name,
        X=X,
        Y=Y,
        feature_names=[f"f{i}" for i in range(n_feat)],
        label_names=[f"l{i}" for i in range(q)],
    )


@pytest.fixture
def toy_dataset(rng):
    return random_dataset(rng)


def clustered_dataset(rng, p=60, noise_feats=6, name="clusters"):
    """Two clusters separated along feature 0; labels follow the clusters."""
    assign = rng.random(p) < 0.5
    X = rng.normal(scale=0.3, size=(p, 1 + noise_feats))
    X[:, 0] += np.where(assign, 3.0, -3.0)
    Y = np.stack([assign, ~assign, rng.random(p) < 0.5], axis=1).astype(int)
    return MultiLabelDataset(
        name=name,
        X=X,
        Y=Y,
        feature_names=[f"f{i}" for i in range(1 + noise_feats)],
        label_names=["a", "b", "c"],
    )
