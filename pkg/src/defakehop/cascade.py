"""Three-hop channel-wise Saab cascade.

Hop-1 fits one Saab node on 3x3x3 blocks of the 32x32x3 input; every
forwarded channel then gets its own single-channel node at the next hop
(9-D blocks).  Channel energy is parent energy times the channel's share
of its node's variance; energies drive the forward / keep / discard
partition and the per-hop channel cap.  Kept and forwarded channels both
contribute output maps; discarded channels produce nothing.

Shape chain on 32x32 input: 30->15 (hop 1), 13->7 (hop 2), 5->3 (hop 3).
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .errors import DataError, DimensionError, InsufficientDataError
from .saab import apply_saab_channels, fit_saab_node_from_moments

N_HOPS = 3
PATCH_SHAPE = (32, 32, 3)
# chunking is fixed so results do not depend on the worker count
_CHUNK = 64

FORWARD = "forward"
KEEP = "keep"
DISCARD = "discard"


@dataclass
class CascadeConfig:
    kernel_size: int = 3
    max_channels_per_hop: int = 10
    th_discard: float = 0.002
    th_forward: float = 0.01


@dataclass
class ChannelRecord:
    hop: int                      # 1..3
    node_index: int               # producing node, within its hop
    node_path: tuple              # ancestor record indices, one per earlier hop
    kernel_index: int             # 0 = local mean, i >= 1 = frequency kernel i-1
    energy: float
    disposition: str


@dataclass
class CwSaabTree:
    config: CascadeConfig
    nodes: list = field(default_factory=list)          # per hop: list[SaabNode]
    node_parent_record: list = field(default_factory=list)  # per hop: parent record idx per node
    records: list = field(default_factory=list)        # per hop: list[ChannelRecord]
    degenerate: bool = False

    @property
    def fitted(self):
        return len(self.nodes) == N_HOPS

    def output_records(self, hop):
        """Non-discarded records of a hop (1-based), in record order."""
        return [r for r in self.records[hop - 1] if r.disposition != DISCARD]

    def output_channels(self, hop):
        return len(self.output_records(hop))

    def kernel_parameter_count(self, hop):
        """Budget accounting: input_dim x non-discarded channels."""
        recs = self.output_records(hop)
        if not recs:
            return 0
        dim = 27 if hop == 1 else 9
        return dim * len(recs)


def _check_patches(patches):
    patches = np.ascontiguousarray(np.asarray(patches, dtype=np.float64))
    if patches.ndim != 4 or patches.shape[1:] != PATCH_SHAPE:
        raise DimensionError(
            f"expected patches of shape (n, 32, 32, 3), got {patches.shape}"
        )
    return patches


def _chunks(n):
    return [(i, min(i + _CHUNK, n)) for i in range(0, n, _CHUNK)]


def _window_moments(maps, k, workers):
    """Streaming first/second moments of all k x k windows of a map batch."""
    n = maps.shape[0]

    def one(span):
        lo, hi = span
        w = kernels.extract_windows(maps[lo:hi], k, k)
        flat = w.reshape(-1, w.shape[-1])
        return flat.sum(axis=0), flat.T @ flat, flat.shape[0]

    results = _run_chunked(one, _chunks(n), workers)
    s1 = results[0][0].copy()
    s2 = results[0][1].copy()
    count = results[0][2]
    for a, b, c in results[1:]:
        s1 += a
        s2 += b
        count += c
    return s1, s2, count


def _run_chunked(fn, spans, workers):
    if workers <= 1 or len(spans) <= 1:
        return [fn(s) for s in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, spans))


def _hop_responses(maps, node, kernel_indices, k, workers):
    """Window + filter + pool for one node; output (n, ph, pw, len(idx))."""
    n = maps.shape[0]

    def one(span):
        lo, hi = span
        w = kernels.extract_windows(maps[lo:hi], k, k)
        m, oh, ow, d = w.shape
        resp = apply_saab_channels(node, w.reshape(-1, d), kernel_indices)
        resp = np.ascontiguousarray(resp.reshape(m, oh, ow, len(kernel_indices)))
        return kernels.max_pool2(resp)

    return np.concatenate(_run_chunked(one, _chunks(n), workers), axis=0)


def _partition_hop(tree, hop, raw):
    """raw: list of (node_index, node_path, kernel_index, energy).

    Thresholds first, then the energy cap; zero-energy channels are
    always discarded.  Only hops 1 and 2 may forward.
    """
    cfg = tree.config
    records = []
    for node_index, path, ki, energy in raw:
        if energy <= 0.0 or energy < cfg.th_discard:
            disp = DISCARD
        elif hop < N_HOPS and energy >= cfg.th_forward:
            disp = FORWARD
        else:
            disp = KEEP
        records.append(ChannelRecord(hop, node_index, path, ki, energy, disp))
    survivors = [i for i, r in enumerate(records) if r.disposition != DISCARD]
    survivors.sort(key=lambda i: (-records[i].energy, records[i].node_index,
                                  records[i].kernel_index))
    for i in survivors[cfg.max_channels_per_hop:]:
        records[i].disposition = DISCARD
    return records


def _node_channel_energies(node, parent_energy):
    variances = np.concatenate(([node.dc_variance], node.eigenvalues))
    if node.total_variance <= 0.0:
        return np.zeros_like(variances)
    return parent_energy * variances / node.total_variance


def fit_cascade(patches, config=None, workers=1):
    """Fit the 3-hop tree on 32x32x3 patches; returns a CwSaabTree."""
    patches = _check_patches(patches)
    if patches.shape[0] < 2:
        raise InsufficientDataError("need >= 2 patches to fit the cascade")
    cfg = config or CascadeConfig()
    k = cfg.kernel_size
    tree = CwSaabTree(config=cfg)

    # hop 1: one node over all 27-D windows
    s1, s2, count = _window_moments(patches, k, workers)
    node1 = fit_saab_node_from_moments(s1, s2, count)
    tree.nodes.append([node1])
    tree.node_parent_record.append([-1])
    energies = _node_channel_energies(node1, 1.0)
    raw = [(0, (), ki, float(e)) for ki, e in enumerate(energies)]
    tree.records.append(_partition_hop(tree, 1, raw))
    out_recs = tree.output_records(1)
    if not out_recs:
        tree.degenerate = True
        tree.nodes.extend([[], []])
        tree.node_parent_record.extend([[], []])
        tree.records.extend([[], []])
        return tree

    maps = _hop_responses(patches, node1, [r.kernel_index for r in out_recs],
                          k, workers)

    # hops 2 and 3: one single-channel node per forwarded parent channel
    for hop in (2, 3):
        prev_records = tree.records[hop - 2]
        prev_out = tree.output_records(hop - 1)
        nodes, parent_recs, raw = [], [], []
        fwd = [(ri, r) for ri, r in enumerate(prev_records)
               if r.disposition == FORWARD]
        for ri, rec in fwd:
            col = prev_out.index(rec)
            channel_map = np.ascontiguousarray(maps[..., col:col + 1])
            s1, s2, count = _window_moments(channel_map, k, workers)
            node = fit_saab_node_from_moments(s1, s2, count)
            node.energy = rec.energy
            node_index = len(nodes)
            nodes.append(node)
            parent_recs.append(ri)
            path = rec.node_path + (ri,)
            for ki, e in enumerate(_node_channel_energies(node, rec.energy)):
                raw.append((node_index, path, ki, float(e)))
        tree.nodes.append(nodes)
        tree.node_parent_record.append(parent_recs)
        tree.records.append(_partition_hop(tree, hop, raw))
        if hop < N_HOPS:
            maps = _transform_hop(tree, hop, maps, workers)
    return tree


def _transform_hop(tree, hop, prev_maps, workers):
    """Outputs of a deeper hop given the previous hop's output maps."""
    prev_out = tree.output_records(hop - 1)
    parent_recs = tree.node_parent_record[hop - 1]
    prev_records = tree.records[hop - 2]
    hop_out = tree.output_records(hop)
    parts = []
    for node_index, node in enumerate(tree.nodes[hop - 1]):
        parent_rec = prev_records[parent_recs[node_index]]
        col = prev_out.index(parent_rec)
        idx = [r.kernel_index for r in hop_out if r.node_index == node_index]
        if not idx:
            continue
        channel_map = np.ascontiguousarray(prev_maps[..., col:col + 1])
        parts.append(_hop_responses(channel_map, node,
                                    idx, tree.config.kernel_size, workers))
    if not parts:
        n = prev_maps.shape[0]
        side = (prev_maps.shape[1] - tree.config.kernel_size + 1 + 1) // 2
        return np.zeros((n, side, side, 0))
    return np.concatenate(parts, axis=-1)


def transform(tree, patches, workers=1):
    """Hop output maps for a patch batch: [(n,15,15,K1), (n,7,7,K2), (n,3,3,K3)].

    Channel order within each hop follows ChannelRecord order.
    """
    if not tree.fitted:
        raise DataError("cascade tree is not fitted")
    patches = _check_patches(patches)
    out_recs = tree.output_records(1)
    if not out_recs:
        raise DataError("degenerate cascade: no channels survived fitting")
    maps = _hop_responses(patches, tree.nodes[0][0],
                          [r.kernel_index for r in out_recs],
                          tree.config.kernel_size, workers)
    outputs = [maps]
    for hop in (2, 3):
        maps = _transform_hop(tree, hop, maps, workers)
        outputs.append(maps)
    return outputs
