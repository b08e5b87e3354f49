import numpy as np
import pytest

from defakehop.cascade import fit_cascade, transform
from defakehop.distill import DistillConfig, describe, fit_distillers
from defakehop.errors import DataError, DimensionError


def _labeled_patches(n, seed=0):
    rng = np.random.default_rng(seed)
    labels = np.tile([0.0, 1.0], n // 2)
    patches = np.clip(0.5 + 0.1 * rng.normal(size=(n, 32, 32, 3)), 0, 1)
    # fakes get a faint checkerboard so channels carry label signal
    checker = ((-1.0) ** np.add.outer(np.arange(32), np.arange(32)))[:, :, None]
    patches[labels == 1] += 0.04 * checker
    return np.clip(patches, 0, 1), labels


@pytest.fixture(scope="module")
def pipeline():
    patches, labels = _labeled_patches(80)
    tree = fit_cascade(patches)
    maps = transform(tree, patches)
    distillers = fit_distillers(maps, labels)
    return tree, maps, labels, distillers


def test_one_distiller_per_kept_channel(pipeline):
    tree, maps, _, distillers = pipeline
    want = sum(m.shape[-1] for m in maps)
    assert len(distillers) == want
    assert want <= 30
    got = [(d.hop, d.channel) for d in distillers]
    expect = [(hop, c) for hop in (1, 2, 3)
              for c in range(maps[hop - 1].shape[-1])]
    assert got == expect


def test_pca_caps_respected(pipeline):
    _, _, _, distillers = pipeline
    caps = {1: 45, 2: 25, 3: 5}
    dims = {1: 225, 2: 49, 3: 9}
    for d in distillers:
        assert 1 <= d.pca.kept <= caps[d.hop]
        assert d.pca.input_dim == dims[d.hop]


def test_descriptor_is_probability_matrix(pipeline):
    _, maps, labels, distillers = pipeline
    desc = describe(distillers, maps)
    assert desc.shape == (len(labels), len(distillers))
    assert np.all(desc > 0.0) and np.all(desc < 1.0)


def test_channels_carry_signal(pipeline):
    _, maps, labels, distillers = pipeline
    desc = describe(distillers, maps)
    # on training data, at least some channel separates the classes
    gaps = np.abs(desc[labels == 1].mean(axis=0) - desc[labels == 0].mean(axis=0))
    assert gaps.max() > 0.2


def test_describe_rejects_mismatched_maps(pipeline):
    _, maps, _, distillers = pipeline
    truncated = [maps[0][..., :1], maps[1][..., :1], maps[2][..., :1]]
    with pytest.raises(DimensionError):
        describe(distillers, truncated)
    with pytest.raises(DataError):
        describe([], maps)


def test_single_class_rejected(pipeline):
    _, maps, labels, _ = pipeline
    with pytest.raises(DataError):
        fit_distillers(maps, np.zeros_like(labels))


def test_custom_caps():
    patches, labels = _labeled_patches(40, seed=1)
    tree = fit_cascade(patches)
    maps = transform(tree, patches)
    distillers = fit_distillers(maps, labels,
                                DistillConfig(pca_caps=(3, 2, 1)))
    for d in distillers:
        assert d.pca.kept <= {1: 3, 2: 2, 3: 1}[d.hop]
