"""Single-node Saab transform and spatial PCA.

A Saab node splits a block vector into a local-mean (DC) response and
frequency (AC) responses: the DC kernel is the unit constant vector, the
AC kernels are eigenvectors of the covariance of the DC-removed,
mean-centered samples, sorted by descending eigenvalue.  The bias term of
the formulation is fixed at 0 here: there is no nonlinearity between
hops and AC responses are invariant to constant offsets, so a nonzero
bias would not change any downstream feature.  The field is kept for
format stability.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InsufficientDataError

_SIGN_EPS = 1e-9
_RANK_EPS = 1e-10


@dataclass
class SaabNode:
    input_dim: int
    mean_vector: np.ndarray          # (d,) training mean of the raw samples
    ac_kernels: np.ndarray           # (k, d) orthonormal, eigenvalue-descending
    eigenvalues: np.ndarray          # (k,) variances of the AC responses
    dc_variance: float               # variance of the DC response
    total_variance: float            # dc_variance + sum(eigenvalues)
    bias: float = 0.0
    energy: float = 1.0              # fraction of root energy reaching this node

    @property
    def dc_kernel(self):
        return np.full(self.input_dim, 1.0 / np.sqrt(self.input_dim))

    @property
    def n_channels(self):
        return 1 + len(self.eigenvalues)


def _fix_signs(vectors):
    """First component with magnitude > 1e-9 made positive, per vector."""
    out = vectors.copy()
    for i, v in enumerate(out):
        sig = np.flatnonzero(np.abs(v) > _SIGN_EPS)
        if sig.size and v[sig[0]] < 0:
            out[i] = -v
    return out


def _eig_descending(cov):
    """Symmetric eigendecomposition, eigenvalue-descending, stable ties."""
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(-evals, kind="stable")
    return np.maximum(evals[order], 0.0), evecs[:, order].T


def fit_saab_node_from_moments(s1, s2, n):
    """Fit from the running sums s1 = sum(x) (d,), s2 = sum(x xT) (d, d).

    Lets the cascade stream training windows in fixed-size chunks instead
    of materializing them all at once.
    """
    d = s1.shape[0]
    if n < 2:
        raise InsufficientDataError(f"need >= 2 samples to fit a Saab node, got {n}")
    if d < 2:
        raise InsufficientDataError(f"need sample dim >= 2, got {d}")
    mean = s1 / n
    cov = (s2 - n * np.outer(mean, mean)) / (n - 1)
    cov = (cov + cov.T) / 2.0
    dc = np.full(d, 1.0 / np.sqrt(d))
    dc_variance = float(dc @ cov @ dc)
    # covariance of the DC-removed residual: P C P with P = I - dc dcT
    cd = cov @ dc
    resid = cov - np.outer(cd, dc) - np.outer(dc, cd) + dc_variance * np.outer(dc, dc)
    resid = (resid + resid.T) / 2.0
    evals, evecs = _eig_descending(resid)
    # residual has rank <= d-1 (the DC direction is in its null space)
    evals, evecs = evals[: d - 1], evecs[: d - 1]
    keep = evals > max(evals[0] if evals.size else 0.0, 0.0) * _RANK_EPS
    evals, evecs = evals[keep], evecs[keep]
    evecs = _fix_signs(evecs)
    total = dc_variance + float(np.sum(evals))
    return SaabNode(
        input_dim=d,
        mean_vector=mean,
        ac_kernels=np.ascontiguousarray(evecs),
        eigenvalues=evals,
        dc_variance=max(dc_variance, 0.0),
        total_variance=total,
    )


def fit_saab_node(samples):
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2:
        raise DimensionError("samples must be a 2-D matrix of block vectors")
    s1 = samples.sum(axis=0)
    s2 = samples.T @ samples
    return fit_saab_node_from_moments(s1, s2, samples.shape[0])


def apply_saab_node(node, samples):
    """Responses [dc . x, ac . (x - mean)] + bias, one row per sample."""
    samples = np.asarray(samples, dtype=np.float64)
    single = samples.ndim == 1
    if single:
        samples = samples[None]
    if samples.shape[1] != node.input_dim:
        raise DimensionError(
            f"sample dim {samples.shape[1]} != node input_dim {node.input_dim}"
        )
    out = np.empty((samples.shape[0], node.n_channels))
    out[:, 0] = samples @ node.dc_kernel
    if len(node.eigenvalues):
        out[:, 1:] = (samples - node.mean_vector) @ node.ac_kernels.T
    out += node.bias
    return out[0] if single else out


def apply_saab_channels(node, samples, kernel_indices):
    """Responses for a subset of channels; index 0 = DC, i >= 1 = AC i-1."""
    samples = np.asarray(samples, dtype=np.float64)
    out = np.empty((samples.shape[0], len(kernel_indices)))
    centered = None
    for col, ki in enumerate(kernel_indices):
        if ki == 0:
            out[:, col] = samples @ node.dc_kernel
        else:
            if centered is None:
                centered = samples - node.mean_vector
            out[:, col] = centered @ node.ac_kernels[ki - 1]
    out += node.bias
    return out


@dataclass
class SpatialPca:
    input_dim: int
    mean_vector: np.ndarray
    components: np.ndarray           # (kept, d) orthonormal rows
    eigenvalues: np.ndarray = field(repr=False, default=None)
    energy_captured: float = 1.0

    @property
    def kept(self):
        return self.components.shape[0]


def fit_spatial_pca(samples, energy_target, cap):
    """Keep min(cap, smallest k with cumulative energy >= target), never 0."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[0] < 2:
        raise InsufficientDataError("spatial PCA needs >= 2 samples")
    n, d = samples.shape
    mean = samples.mean(axis=0)
    centered = samples - mean
    cov = centered.T @ centered / (n - 1)
    cov = (cov + cov.T) / 2.0
    evals, evecs = _eig_descending(cov)
    evecs = _fix_signs(evecs)
    total = float(np.sum(evals))
    if total <= 0.0:
        kept = 1
        captured = 1.0
    else:
        frac = np.cumsum(evals) / total
        kept = int(np.searchsorted(frac, energy_target - 1e-12) + 1)
        kept = max(1, min(kept, int(cap), d))
        captured = float(frac[kept - 1])
    return SpatialPca(
        input_dim=d,
        mean_vector=mean,
        components=np.ascontiguousarray(evecs[:kept]),
        eigenvalues=evals[:kept],
        energy_captured=captured,
    )


def apply_spatial_pca(pca, samples):
    samples = np.asarray(samples, dtype=np.float64)
    single = samples.ndim == 1
    if single:
        samples = samples[None]
    if samples.shape[1] != pca.input_dim:
        raise DimensionError(
            f"sample dim {samples.shape[1]} != PCA input_dim {pca.input_dim}"
        )
    out = (samples - pca.mean_vector) @ pca.components.T
    return out[0] if single else out
