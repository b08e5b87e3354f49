"""Feature distillation: per-channel spatial PCA followed by a per-channel
soft classifier.

Each kept channel's spatial map is flattened (225 / 49 / 9 values at hops
1 / 2 / 3), reduced by PCA to at most 45 / 25 / 5 coefficients keeping
about 90% of the energy, and scored by a depth-1 boosted-stump classifier.
The concatenated per-channel probabilities form the patch descriptor.
"""
from dataclasses import dataclass

import numpy as np

from .boosting import BoostParams, fit_boosted, predict_proba
from .errors import DataError, DimensionError
from .saab import apply_spatial_pca, fit_spatial_pca

DEFAULT_PCA_CAPS = (45, 25, 5)


@dataclass
class DistillConfig:
    energy_target: float = 0.9
    pca_caps: tuple = DEFAULT_PCA_CAPS
    n_trees: int = 100
    learning_rate: float = 0.3
    reg_lambda: float = 1.0
    min_child_weight: float = 1.0


@dataclass
class ChannelDistiller:
    hop: int                 # 1..3
    channel: int             # column within the hop's output maps
    pca: object              # SpatialPca
    classifier: object       # StumpEnsembleModel, depth 1


def _flat_channel(hop_maps, hop, channel):
    m = hop_maps[hop - 1][..., channel]
    return m.reshape(m.shape[0], -1)


def fit_distillers(hop_maps, labels, config=None):
    """One distiller per kept channel across all hops, in channel order."""
    cfg = config or DistillConfig()
    labels = np.asarray(labels, dtype=np.float64).ravel()
    if np.unique(labels).size < 2:
        raise DataError("distiller training needs both classes present")
    params = BoostParams(
        max_depth=1,
        n_trees=cfg.n_trees,
        learning_rate=cfg.learning_rate,
        reg_lambda=cfg.reg_lambda,
        min_child_weight=cfg.min_child_weight,
    )
    distillers = []
    for hop in (1, 2, 3):
        n_channels = hop_maps[hop - 1].shape[-1]
        cap = cfg.pca_caps[hop - 1]
        for c in range(n_channels):
            flat = _flat_channel(hop_maps, hop, c)
            pca = fit_spatial_pca(flat, cfg.energy_target, cap)
            coeffs = apply_spatial_pca(pca, flat)
            clf = fit_boosted(coeffs, labels, params)
            distillers.append(ChannelDistiller(hop, c, pca, clf))
    return distillers


def describe(distillers, hop_maps):
    """Probability descriptor matrix (n_patches, n_distillers)."""
    if not distillers:
        raise DataError("no distillers fitted")
    n = hop_maps[0].shape[0]
    out = np.empty((n, len(distillers)))
    for col, dist in enumerate(distillers):
        if dist.channel >= hop_maps[dist.hop - 1].shape[-1]:
            raise DimensionError(
                f"hop {dist.hop} has no channel {dist.channel}; "
                "maps do not match the fitted model"
            )
        flat = _flat_channel(hop_maps, dist.hop, dist.channel)
        coeffs = apply_spatial_pca(dist.pca, flat)
        out[:, col] = predict_proba(dist.classifier, coeffs)
    return out
