import numpy as np
import pytest

from defakehop.errors import DimensionError, InsufficientDataError
from defakehop.saab import (apply_saab_channels, apply_saab_node,
                            apply_spatial_pca, fit_saab_node,
                            fit_saab_node_from_moments, fit_spatial_pca)

from .oracles import jacobi_eigh


def _random_samples(rng, n, d):
    # low-rank structure plus noise so eigenvalue spectra are non-trivial
    k = rng.integers(1, d + 1)
    basis = rng.normal(size=(k, d))
    scale = rng.uniform(0.1, 3.0, size=k)
    return rng.normal(size=(n, k)) * scale @ basis + 0.05 * rng.normal(size=(n, d))


def _residual_covariance(samples):
    # projection form, deliberately different from the fitting code
    d = samples.shape[1]
    cov = np.cov(samples, rowvar=False)
    dc = np.full(d, 1.0 / np.sqrt(d))
    proj = np.eye(d) - np.outer(dc, dc)
    return proj @ cov @ proj


def test_dc_kernel_is_unit_constant():
    node = fit_saab_node(np.random.default_rng(0).normal(size=(50, 9)))
    dc = node.dc_kernel
    np.testing.assert_allclose(dc, dc[0])
    assert abs(np.linalg.norm(dc) - 1.0) < 1e-12


@pytest.mark.parametrize("d", [9, 27])
def test_kernels_orthonormal(d):
    rng = np.random.default_rng(d)
    for _ in range(20):
        node = fit_saab_node(_random_samples(rng, 80, d))
        kernels = np.vstack([node.dc_kernel, node.ac_kernels])
        gram = kernels @ kernels.T
        np.testing.assert_allclose(gram, np.eye(len(kernels)), atol=1e-5)


@pytest.mark.parametrize("d", [9, 27])
def test_eigenvalues_match_jacobi_oracle(d):
    rng = np.random.default_rng(100 + d)
    for _ in range(10):
        samples = _random_samples(rng, 120, d)
        node = fit_saab_node(samples)
        evals, _ = jacobi_eigh(_residual_covariance(samples))
        want = evals[: len(node.eigenvalues)]
        np.testing.assert_allclose(node.eigenvalues, want,
                                   rtol=1e-6, atol=1e-9 * max(1.0, evals[0]))


@pytest.mark.parametrize("d", [9, 27])
def test_response_variances_match_eigenvalues(d):
    rng = np.random.default_rng(200 + d)
    for _ in range(10):
        samples = _random_samples(rng, 150, d)
        node = fit_saab_node(samples)
        resp = apply_saab_node(node, samples)
        var = resp.var(axis=0, ddof=1)
        np.testing.assert_allclose(var[0], node.dc_variance, rtol=1e-5)
        np.testing.assert_allclose(var[1:], node.eigenvalues,
                                   rtol=1e-5, atol=1e-10)


@pytest.mark.parametrize("d", [9, 27])
def test_ac_responses_offset_invariant(d):
    rng = np.random.default_rng(300 + d)
    samples = _random_samples(rng, 60, d)
    node = fit_saab_node(samples)
    base = apply_saab_node(node, samples)
    shifted = apply_saab_node(node, samples + 7.25)
    np.testing.assert_allclose(shifted[:, 1:], base[:, 1:], atol=1e-9)
    # the DC response does move, by offset * sqrt(d)
    np.testing.assert_allclose(shifted[:, 0] - base[:, 0],
                               7.25 * np.sqrt(d), rtol=1e-9)


def test_energy_accounting_trace():
    rng = np.random.default_rng(5)
    for d in (9, 27):
        samples = _random_samples(rng, 100, d)
        node = fit_saab_node(samples)
        trace = float(np.trace(np.cov(samples, rowvar=False)))
        total = node.dc_variance + float(np.sum(node.eigenvalues))
        assert abs(total - trace) <= 1e-6 * trace
        assert abs(node.total_variance - trace) <= 1e-6 * trace


def test_fit_from_moments_matches_direct():
    rng = np.random.default_rng(6)
    samples = _random_samples(rng, 90, 9)
    direct = fit_saab_node(samples)
    via = fit_saab_node_from_moments(samples.sum(axis=0),
                                     samples.T @ samples, len(samples))
    np.testing.assert_array_equal(via.mean_vector, direct.mean_vector)
    np.testing.assert_array_equal(via.ac_kernels, direct.ac_kernels)
    np.testing.assert_array_equal(via.eigenvalues, direct.eigenvalues)


def test_sign_convention_deterministic():
    rng = np.random.default_rng(7)
    samples = _random_samples(rng, 70, 9)
    a = fit_saab_node(samples)
    b = fit_saab_node(samples.copy())
    np.testing.assert_array_equal(a.ac_kernels, b.ac_kernels)
    for v in a.ac_kernels:
        first = v[np.flatnonzero(np.abs(v) > 1e-9)[0]]
        assert first > 0


def test_apply_saab_channels_matches_full():
    rng = np.random.default_rng(8)
    samples = _random_samples(rng, 40, 9)
    node = fit_saab_node(samples)
    full = apply_saab_node(node, samples)
    sub = apply_saab_channels(node, samples, [0, 2, 1])
    # matvec vs matmat BLAS paths, so equality only up to rounding
    np.testing.assert_allclose(sub[:, 0], full[:, 0], rtol=1e-12)
    np.testing.assert_allclose(sub[:, 1], full[:, 2], rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(sub[:, 2], full[:, 1], rtol=1e-12, atol=1e-12)


def test_saab_input_validation():
    with pytest.raises(InsufficientDataError):
        fit_saab_node(np.zeros((1, 9)))
    with pytest.raises(InsufficientDataError):
        fit_saab_node(np.zeros((5, 1)))
    with pytest.raises(DimensionError):
        fit_saab_node(np.zeros(9))
    node = fit_saab_node(np.random.default_rng(9).normal(size=(10, 9)))
    with pytest.raises(DimensionError):
        apply_saab_node(node, np.zeros((3, 8)))


def test_constant_samples_have_no_ac_kernels():
    node = fit_saab_node(np.full((20, 9), 3.0))
    assert len(node.eigenvalues) == 0
    resp = apply_saab_node(node, np.full((4, 9), 3.0))
    assert resp.shape == (4, 1)


def test_spatial_pca_energy_target_and_cap():
    rng = np.random.default_rng(10)
    samples = _random_samples(rng, 200, 20)
    pca = fit_spatial_pca(samples, 0.9, cap=20)
    assert 1 <= pca.kept <= 20
    assert pca.energy_captured >= 0.9
    # one fewer component must fall below the target
    if pca.kept > 1:
        evals = np.linalg.eigvalsh(np.cov(samples, rowvar=False))[::-1]
        frac = np.cumsum(evals) / evals.sum()
        assert frac[pca.kept - 2] < 0.9
    capped = fit_spatial_pca(samples, 0.999999, cap=3)
    assert capped.kept == 3


def test_spatial_pca_roundtrip_energy():
    rng = np.random.default_rng(11)
    samples = _random_samples(rng, 150, 12)
    pca = fit_spatial_pca(samples, 0.9, cap=12)
    coeffs = apply_spatial_pca(pca, samples)
    # captured variance fraction matches the reported energy
    total = np.var(samples - samples.mean(axis=0), ddof=1, axis=0).sum()
    got = np.var(coeffs, ddof=1, axis=0).sum()
    np.testing.assert_allclose(got / total, pca.energy_captured, rtol=1e-8)


def test_spatial_pca_constant_input():
    pca = fit_spatial_pca(np.full((10, 6), 2.0), 0.9, cap=4)
    assert pca.kept == 1
    assert pca.energy_captured == 1.0
