"""Versioned single-file model container ("DFHM v1") and the
parameter-count report.

Layout: magic ``DFHM``, u16 format version, u16 section count, section
table (16-byte name, u64 offset, u64 length, u32 crc32), little-endian
payloads.  Two sections: ``meta`` (JSON structure) and ``arrays`` (all
numeric payloads, 32-bit little-endian, indexed from meta).  Each section
carries its own CRC so corruption is localized on load.
"""
import json
import struct
import zlib

import numpy as np

from .boosting import (BoostParams, StumpEnsembleModel, count_parameters,
                       full_shape_tree_parameters)
from .cascade import CascadeConfig, ChannelRecord, CwSaabTree
from .config import PipelineConfig, config_from_dict
from .distill import ChannelDistiller
from .errors import ModelError
from .pipeline import MODEL_FORMAT_VERSION, DefakeHopModel, RegionPipeline
from .saab import SaabNode, SpatialPca

MAGIC = b"DFHM"
_NAME_LEN = 16
_HEADER = struct.Struct("<4sHH")
_SECTION = struct.Struct(f"<{_NAME_LEN}sQQI")


class _ArrayBank:
    """Accumulates named arrays into one blob with a JSON-able index."""

    def __init__(self):
        self.blob = bytearray()
        self.index = {}

    def add(self, name, arr, dtype):
        arr = np.ascontiguousarray(np.asarray(arr), dtype=dtype)
        self.index[name] = {
            "offset": len(self.blob),
            "shape": list(arr.shape),
            "dtype": dtype,
        }
        self.blob += arr.tobytes()
        return name

    def add_f(self, name, arr):
        return self.add(name, arr, "<f4")

    def add_i(self, name, arr):
        return self.add(name, arr, "<i4")


class _ArrayReader:
    def __init__(self, blob, index):
        self.blob = blob
        self.index = index

    def get(self, name):
        try:
            meta = self.index[name]
        except KeyError as exc:
            raise ModelError(f"model file missing array {name!r}") from exc
        dtype = np.dtype(meta["dtype"])
        shape = tuple(meta["shape"])
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        start = meta["offset"]
        end = start + count * dtype.itemsize
        if end > len(self.blob):
            raise ModelError(f"array {name!r} extends past the arrays section")
        arr = np.frombuffer(self.blob[start:end], dtype=dtype).reshape(shape)
        if dtype.kind == "f":
            return arr.astype(np.float64)
        if meta["dtype"] == "<u1":
            return arr.copy()
        return arr.astype(np.int64)


def _dump_booster(model, prefix, bank):
    bank.add_f(f"{prefix}/threshold", model.threshold)
    bank.add_f(f"{prefix}/value", model.value)
    bank.add_i(f"{prefix}/feature", model.feature)
    bank.add_i(f"{prefix}/left", model.left)
    bank.add_i(f"{prefix}/right", model.right)
    bank.add(f"{prefix}/is_leaf", model.is_leaf, "<u1")
    bank.add_i(f"{prefix}/tree_starts", model.tree_starts)
    return {
        "n_features": model.n_features,
        "base_score": model.base_score,
        "params": {
            "max_depth": model.params.max_depth,
            "n_trees": model.params.n_trees,
            "learning_rate": model.params.learning_rate,
            "reg_lambda": model.params.reg_lambda,
            "min_child_weight": model.params.min_child_weight,
        },
        "arrays": prefix,
    }


def _load_booster(meta, reader):
    prefix = meta["arrays"]
    p = meta["params"]
    return StumpEnsembleModel(
        n_features=int(meta["n_features"]),
        params=BoostParams(
            max_depth=int(p["max_depth"]),
            n_trees=int(p["n_trees"]),
            learning_rate=float(p["learning_rate"]),
            reg_lambda=float(p["reg_lambda"]),
            min_child_weight=float(p["min_child_weight"]),
        ),
        base_score=float(meta["base_score"]),
        tree_starts=reader.get(f"{prefix}/tree_starts"),
        feature=reader.get(f"{prefix}/feature"),
        threshold=reader.get(f"{prefix}/threshold"),
        left=reader.get(f"{prefix}/left"),
        right=reader.get(f"{prefix}/right"),
        value=reader.get(f"{prefix}/value"),
        is_leaf=reader.get(f"{prefix}/is_leaf"),
    )


def _dump_saab_node(node, prefix, bank):
    bank.add_f(f"{prefix}/mean", node.mean_vector)
    bank.add_f(f"{prefix}/ac_kernels", node.ac_kernels)
    bank.add_f(f"{prefix}/eigenvalues", node.eigenvalues)
    return {
        "input_dim": node.input_dim,
        "dc_variance": node.dc_variance,
        "total_variance": node.total_variance,
        "bias": node.bias,
        "energy": node.energy,
        "arrays": prefix,
    }


def _load_saab_node(meta, reader):
    prefix = meta["arrays"]
    return SaabNode(
        input_dim=int(meta["input_dim"]),
        mean_vector=reader.get(f"{prefix}/mean"),
        ac_kernels=reader.get(f"{prefix}/ac_kernels"),
        eigenvalues=reader.get(f"{prefix}/eigenvalues"),
        dc_variance=float(meta["dc_variance"]),
        total_variance=float(meta["total_variance"]),
        bias=float(meta["bias"]),
        energy=float(meta["energy"]),
    )


def _dump_tree(tree, prefix, bank):
    hops = []
    for h, nodes in enumerate(tree.nodes):
        hops.append({
            "nodes": [_dump_saab_node(n, f"{prefix}/h{h}/n{i}", bank)
                      for i, n in enumerate(nodes)],
            "node_parent_record": list(tree.node_parent_record[h]),
            "records": [
                {
                    "hop": r.hop,
                    "node_index": r.node_index,
                    "node_path": list(r.node_path),
                    "kernel_index": r.kernel_index,
                    "energy": r.energy,
                    "disposition": r.disposition,
                }
                for r in tree.records[h]
            ],
        })
    return {
        "config": {
            "kernel_size": tree.config.kernel_size,
            "max_channels_per_hop": tree.config.max_channels_per_hop,
            "th_discard": tree.config.th_discard,
            "th_forward": tree.config.th_forward,
        },
        "degenerate": tree.degenerate,
        "hops": hops,
    }


def _load_tree(meta, reader):
    c = meta["config"]
    tree = CwSaabTree(
        config=CascadeConfig(
            kernel_size=int(c["kernel_size"]),
            max_channels_per_hop=int(c["max_channels_per_hop"]),
            th_discard=float(c["th_discard"]),
            th_forward=float(c["th_forward"]),
        ),
        degenerate=bool(meta["degenerate"]),
    )
    for hop_meta in meta["hops"]:
        tree.nodes.append([_load_saab_node(m, reader) for m in hop_meta["nodes"]])
        tree.node_parent_record.append([int(i) for i in hop_meta["node_parent_record"]])
        tree.records.append([
            ChannelRecord(
                hop=int(r["hop"]),
                node_index=int(r["node_index"]),
                node_path=tuple(r["node_path"]),
                kernel_index=int(r["kernel_index"]),
                energy=float(r["energy"]),
                disposition=str(r["disposition"]),
            )
            for r in hop_meta["records"]
        ])
    return tree


def _dump_pca(pca, prefix, bank):
    bank.add_f(f"{prefix}/mean", pca.mean_vector)
    bank.add_f(f"{prefix}/components", pca.components)
    bank.add_f(f"{prefix}/eigenvalues",
               pca.eigenvalues if pca.eigenvalues is not None else [])
    return {
        "input_dim": pca.input_dim,
        "energy_captured": pca.energy_captured,
        "arrays": prefix,
    }


def _load_pca(meta, reader):
    prefix = meta["arrays"]
    return SpatialPca(
        input_dim=int(meta["input_dim"]),
        mean_vector=reader.get(f"{prefix}/mean"),
        components=reader.get(f"{prefix}/components"),
        eigenvalues=reader.get(f"{prefix}/eigenvalues"),
        energy_captured=float(meta["energy_captured"]),
    )


def save(model, path):
    bank = _ArrayBank()
    regions_meta = {}
    for region, pipe in model.regions.items():
        prefix = f"r/{region}"
        bank.add_f(f"{prefix}/descriptor_mean", pipe.descriptor_mean)
        regions_meta[region] = {
            "tree": _dump_tree(pipe.tree, f"{prefix}/tree", bank),
            "distillers": [
                {
                    "hop": d.hop,
                    "channel": d.channel,
                    "pca": _dump_pca(d.pca, f"{prefix}/d{i}/pca", bank),
                    "classifier": _dump_booster(d.classifier, f"{prefix}/d{i}/clf", bank),
                }
                for i, d in enumerate(pipe.distillers)
            ],
            "descriptor_mean": f"{prefix}/descriptor_mean",
        }
    meta = {
        "format_version": model.format_version,
        "config": model.config.to_dict(),
        "region_order": list(model.region_order),
        "regions": regions_meta,
        "final_classifier": _dump_booster(model.final_classifier, "final", bank),
        "summary": model.summary,
        "arrays": bank.index,
    }
    meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
    sections = [(b"meta", meta_bytes), (b"arrays", bytes(bank.blob))]

    table_size = _HEADER.size + _SECTION.size * len(sections)
    offset = table_size
    table = b""
    payloads = b""
    for name, payload in sections:
        table += _SECTION.pack(name.ljust(_NAME_LEN, b"\0"), offset,
                               len(payload), zlib.crc32(payload))
        payloads += payload
        offset += len(payload)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, model.format_version, len(sections)))
        fh.write(table)
        fh.write(payloads)


def _read_sections(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ModelError(f"cannot read model file {path}: {exc}") from exc
    if len(data) < _HEADER.size:
        raise ModelError(f"{path}: truncated model file")
    magic, version, n_sections = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ModelError(f"{path}: not a DFHM model file")
    if version != MODEL_FORMAT_VERSION:
        raise ModelError(
            f"{path}: unsupported model format version {version} "
            f"(supported: {MODEL_FORMAT_VERSION})"
        )
    sections = {}
    pos = _HEADER.size
    for _ in range(n_sections):
        if pos + _SECTION.size > len(data):
            raise ModelError(f"{path}: truncated section table")
        raw_name, offset, length, crc = _SECTION.unpack_from(data, pos)
        pos += _SECTION.size
        name = raw_name.rstrip(b"\0").decode("ascii", errors="replace")
        if offset + length > len(data):
            raise ModelError(f"{path}: section {name!r} extends past end of file")
        payload = data[offset:offset + length]
        if zlib.crc32(payload) != crc:
            raise ModelError(f"{path}: checksum failure in section {name!r}")
        sections[name] = payload
    return sections


def load(path):
    sections = _read_sections(path)
    if "meta" not in sections or "arrays" not in sections:
        raise ModelError(f"{path}: missing required sections")
    try:
        meta = json.loads(sections["meta"].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelError(f"{path}: corrupt meta section") from exc
    reader = _ArrayReader(sections["arrays"], meta["arrays"])
    regions = {}
    for region, rmeta in meta["regions"].items():
        regions[region] = RegionPipeline(
            tree=_load_tree(rmeta["tree"], reader),
            distillers=[
                ChannelDistiller(
                    hop=int(d["hop"]),
                    channel=int(d["channel"]),
                    pca=_load_pca(d["pca"], reader),
                    classifier=_load_booster(d["classifier"], reader),
                )
                for d in rmeta["distillers"]
            ],
            descriptor_mean=reader.get(rmeta["descriptor_mean"]),
        )
    return DefakeHopModel(
        format_version=int(meta["format_version"]),
        config=config_from_dict(meta["config"]),
        regions=regions,
        final_classifier=_load_booster(meta["final_classifier"], reader),
        region_order=tuple(meta["region_order"]),
        summary=meta.get("summary", {}),
    )


# ---------------------------------------------------------------------------
# parameter accounting

_HOP_INPUT_DIMS = (27, 9, 9)
_SPATIAL_DIMS = (225, 49, 9)


def paper_upper_bound_report(config=None):
    """Upper-bound accounting with default caps: 10 channels per hop,
    full-shape trees."""
    cfg = config or PipelineConfig()
    cap = cfg.max_channels_per_hop
    rows = []
    for h in range(3):
        rows.append((f"Hop-{h + 1} kernels", _HOP_INPUT_DIMS[h] * cap))
    for h in range(3):
        rows.append((f"PCA Hop-{h + 1}", _SPATIAL_DIMS[h] * cfg.pca_caps[h]))
    per_stump = full_shape_tree_parameters(cfg.channel_depth) * cfg.channel_trees
    rows.append(("Channel-wise boosters", 3 * cap * per_stump))
    rows.append(("Final booster",
                 full_shape_tree_parameters(cfg.final_depth) * cfg.final_trees))
    total = sum(v for _, v in rows)
    return {"mode": "paper-upper-bound", "rows": rows, "total": total}


def model_report(model):
    """Actual counts of a trained model, with a full-shape column, per
    region and combined."""
    per_region = {}
    for region, pipe in model.regions.items():
        rows = []
        for h in range(3):
            rows.append((f"Hop-{h + 1} kernels",
                         pipe.tree.kernel_parameter_count(h + 1), None))
        for h in range(3):
            count = sum(d.pca.input_dim * d.pca.kept
                        for d in pipe.distillers if d.hop == h + 1)
            rows.append((f"PCA Hop-{h + 1}", count, None))
        actual = sum(count_parameters(d.classifier) for d in pipe.distillers)
        full = sum(count_parameters(d.classifier, full_shape=True)
                   for d in pipe.distillers)
        rows.append(("Channel-wise boosters", actual, full))
        per_region[region] = rows
    final_actual = count_parameters(model.final_classifier)
    final_full = count_parameters(model.final_classifier, full_shape=True)
    combined_actual = final_actual + sum(
        r[1] for rows in per_region.values() for r in rows)
    return {
        "mode": "actual",
        "per_region": per_region,
        "final_booster": (final_actual, final_full),
        "total_actual": combined_actual,
    }
