"""Light-weight deepfake patch classifier.

Feature extraction by a three-hop channel-wise Saab cascade, feature
distillation by per-channel spatial PCA plus boosted-stump soft
classifiers, and a multi-region / multi-frame ensemble on top.
"""
from .backend import BACKEND_NAME
from .boosting import (BoostParams, StumpEnsembleModel, count_parameters,
                       fit_boosted, predict_proba)
from .cascade import CascadeConfig, CwSaabTree, fit_cascade, transform
from .config import PipelineConfig
from .ensemble import auc
from .pipeline import DefakeHopModel, train_model
from .saab import (SaabNode, SpatialPca, apply_saab_node, apply_spatial_pca,
                   fit_saab_node, fit_spatial_pca)
from .store import load, save
from .tensor import extract_windows, load_pten, max_pool, save_pten

__version__ = "0.1.0"
__all__ = [
    "BACKEND_NAME",
    "BoostParams",
    "CascadeConfig",
    "CwSaabTree",
    "DefakeHopModel",
    "PipelineConfig",
    "SaabNode",
    "SpatialPca",
    "StumpEnsembleModel",
    "apply_saab_node",
    "apply_spatial_pca",
    "auc",
    "count_parameters",
    "extract_windows",
    "fit_boosted",
    "fit_cascade",
    "fit_saab_node",
    "fit_spatial_pca",
    "load",
    "load_pten",
    "max_pool",
    "predict_proba",
    "save",
    "save_pten",
    "train_model",
    "transform",
]
