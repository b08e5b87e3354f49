"""End-to-end model: per-region feature pipelines plus the final
ensemble classifier.

After fitting, every real-valued parameter is snapped to its 32-bit
float value (kept in float64 storage), so the serialized model
round-trips bit-exactly and a freshly trained model predicts identically
to a saved-and-reloaded one.
"""
import time
from dataclasses import dataclass, field

import numpy as np

from . import cascade as _cascade
from . import distill as _distill
from .config import PipelineConfig
from .distill import DistillConfig
from .ensemble import (REGIONS, FrameRecord, build_ensemble_vectors,
                       fit_final, score_videos)
from .errors import DataError

MODEL_FORMAT_VERSION = 1


@dataclass
class RegionPipeline:
    tree: object                    # CwSaabTree
    distillers: list                # list[ChannelDistiller]
    descriptor_mean: np.ndarray     # training mean descriptor, for imputation

    @property
    def descriptor_dim(self):
        return len(self.distillers)


@dataclass
class DefakeHopModel:
    format_version: int
    config: PipelineConfig
    regions: dict                   # region name -> RegionPipeline
    final_classifier: object        # StumpEnsembleModel, depth 6
    region_order: tuple = REGIONS
    summary: dict = field(default_factory=dict)


def _f32(x):
    return np.asarray(x, dtype=np.float32).astype(np.float64)


def _finalize_saab_node(node):
    node.mean_vector = _f32(node.mean_vector)
    node.ac_kernels = _f32(node.ac_kernels)
    node.eigenvalues = _f32(node.eigenvalues)
    node.dc_variance = float(np.float32(node.dc_variance))
    node.total_variance = float(np.float32(node.total_variance))
    node.bias = float(np.float32(node.bias))
    node.energy = float(np.float32(node.energy))


def _finalize_tree(tree):
    for hop_nodes in tree.nodes:
        for node in hop_nodes:
            _finalize_saab_node(node)
    for hop_records in tree.records:
        for rec in hop_records:
            rec.energy = float(np.float32(rec.energy))


def _finalize_booster(model):
    model.threshold = _f32(model.threshold)
    model.value = _f32(model.value)
    model.base_score = float(np.float32(model.base_score))
    model.params.learning_rate = float(np.float32(model.params.learning_rate))


def _finalize_distiller(dist):
    dist.pca.mean_vector = _f32(dist.pca.mean_vector)
    dist.pca.components = _f32(dist.pca.components)
    if dist.pca.eigenvalues is not None:
        dist.pca.eigenvalues = _f32(dist.pca.eigenvalues)
    dist.pca.energy_captured = float(np.float32(dist.pca.energy_captured))
    _finalize_booster(dist.classifier)


def _distill_config(cfg):
    return DistillConfig(
        energy_target=cfg.energy_target,
        pca_caps=cfg.pca_caps,
        n_trees=cfg.channel_trees,
        learning_rate=cfg.learning_rate,
        reg_lambda=cfg.reg_lambda,
        min_child_weight=cfg.min_child_weight,
    )


def _cascade_config(cfg):
    return _cascade.CascadeConfig(
        kernel_size=cfg.kernel_size,
        max_channels_per_hop=cfg.max_channels_per_hop,
        th_discard=cfg.th_discard,
        th_forward=cfg.th_forward,
    )


def _region_patches(frames, region):
    return np.stack([fr.patches[region] for fr in frames])


def train_model(frames, config=None, workers=1, log=None):
    """Train the full model on FrameGroups (all three regions present).

    Frames must carry both classes.  Returns the finalized model.
    """
    cfg = config or PipelineConfig()
    log = log or (lambda msg: None)
    labels = np.asarray([fr.label for fr in frames], dtype=np.float64)
    if np.unique(labels).size < 2:
        raise DataError("training data contains a single class")
    missing = [r for r in REGIONS if any(r not in fr.patches for fr in frames)]
    if missing:
        raise DataError(f"missing region(s) in training data: {', '.join(missing)}")

    regions = {}
    descriptors = {}
    summary = {"regions": {}}
    for region in REGIONS:
        t0 = time.perf_counter()
        patches = _region_patches(frames, region)
        tree = _cascade.fit_cascade(patches, _cascade_config(cfg), workers=workers)
        if tree.degenerate:
            raise DataError(f"region {region}: degenerate (constant) patch data")
        maps = _cascade.transform(tree, patches, workers=workers)
        distillers = _distill.fit_distillers(maps, labels, _distill_config(cfg))
        _finalize_tree(tree)
        for dist in distillers:
            _finalize_distiller(dist)
        # recompute descriptors with the finalized (float32-snapped)
        # parameters so training matches inference exactly
        maps = _cascade.transform(tree, patches, workers=workers)
        desc = _distill.describe(distillers, maps)
        descriptors[region] = desc
        regions[region] = RegionPipeline(
            tree=tree,
            distillers=distillers,
            descriptor_mean=_f32(desc.mean(axis=0)),
        )
        summary["regions"][region] = {
            "channels_per_hop": [tree.output_channels(h) for h in (1, 2, 3)],
            "descriptor_dim": len(distillers),
        }
        log(f"region {region}: channels/hop "
            f"{summary['regions'][region]['channels_per_hop']}, "
            f"descriptor dim {len(distillers)} "
            f"({time.perf_counter() - t0:.3f}s)")

    t0 = time.perf_counter()
    records = [
        FrameRecord(
            video_id=fr.video_id,
            frame_index=fr.frame_index,
            descriptor=np.concatenate([descriptors[r][i] for r in REGIONS]),
            label=fr.label,
        )
        for i, fr in enumerate(frames)
    ]
    ordered, vectors = build_ensemble_vectors(records)
    vec_labels = np.asarray([fr.label for fr in ordered], dtype=np.float64)
    final = fit_final(
        vectors,
        vec_labels,
        n_trees=cfg.final_trees,
        max_depth=cfg.final_depth,
        learning_rate=cfg.learning_rate,
        reg_lambda=cfg.reg_lambda,
        min_child_weight=cfg.min_child_weight,
    )
    _finalize_booster(final)
    summary["ensemble"] = {
        "vector_dim": int(vectors.shape[1]),
        "n_frames": len(records),
    }
    log(f"ensemble: vector dim {vectors.shape[1]} "
        f"({time.perf_counter() - t0:.3f}s)")
    return DefakeHopModel(
        format_version=MODEL_FORMAT_VERSION,
        config=cfg,
        regions=regions,
        final_classifier=final,
        summary=summary,
    )


def describe_frames(model, frames, workers=1):
    """FrameRecords with descriptors for a batch of FrameGroups.

    Frames missing a region use the stored training-mean descriptor for
    that region (imputation at inference).
    """
    descs = {}
    for region in REGIONS:
        pipeline = model.regions[region]
        have = [i for i, fr in enumerate(frames) if region in fr.patches]
        desc = np.tile(pipeline.descriptor_mean, (len(frames), 1))
        if have:
            patches = np.stack([frames[i].patches[region] for i in have])
            maps = _cascade.transform(pipeline.tree, patches, workers=workers)
            desc[have] = _distill.describe(pipeline.distillers, maps)
        descs[region] = desc
    return [
        FrameRecord(
            video_id=fr.video_id,
            frame_index=fr.frame_index,
            descriptor=np.concatenate([descs[r][i] for r in REGIONS]),
            label=fr.label,
        )
        for i, fr in enumerate(frames)
    ]


def predict_frames(model, frames, workers=1):
    """(video scores, frame records, frame probabilities)."""
    records = describe_frames(model, frames, workers=workers)
    return score_videos(model.final_classifier, records)


def predict_patch_probabilities(model, frames, workers=1):
    """Frame probabilities only; used by round-trip tests."""
    _, ordered, probs = predict_frames(model, frames, workers=workers)
    return ordered, probs
