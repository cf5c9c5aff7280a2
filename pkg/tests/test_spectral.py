"""Spectral factorization: worked scalar cases, residual oracle, round trips."""

import numpy as np
import pytest

from conftest import factorable_laurent
from matmoments import (LaurentPoly, NoConvergence, NotPsdOnCircle, fejer_riesz,
                        laurent_from_json, laurent_to_json, verify_factor)


def scalar_laurent(*vals):
    """Coefficients A_{-band}..A_{band} as 1x1 matrices."""
    return LaurentPoly(np.array([[[v]] for v in vals], dtype=complex))


def test_scalar_singular_example():
    # 2 + z + 1/z = (1+z)(1+1/z): spectral zero at z = -1
    u = scalar_laurent(1, 2, 1)
    fac = fejer_riesz(u)
    assert fac.residual <= 1e-10
    assert fac.deg == 1
    # factor coefficients approach (1, 1) up to phase
    mags = np.abs(fac.coeffs).ravel()
    assert np.allclose(mags, [1.0, 1.0], atol=1e-3)


def test_constant_identity():
    u = LaurentPoly(np.eye(2, dtype=complex)[np.newaxis])
    fac = fejer_riesz(u)
    assert fac.residual <= 1e-12
    assert np.allclose(fac.coeffs[0], np.eye(2), atol=1e-10)


def test_block_diagonal_singular():
    coeffs = np.zeros((3, 2, 2), dtype=complex)
    coeffs[0] = np.diag([1.0, 0.0])
    coeffs[1] = np.diag([2.0, 1.0])
    coeffs[2] = np.diag([1.0, 0.0])
    fac = fejer_riesz(LaurentPoly(coeffs))
    assert fac.residual <= 1e-10


def test_not_psd_on_circle():
    # z + 1/z = 2 cos t is negative at t = pi
    with pytest.raises(NotPsdOnCircle):
        fejer_riesz(scalar_laurent(1, 0, 1))


def test_verify_factor_exact_cases():
    u = scalar_laurent(1, 2, 1)
    assert verify_factor(u, np.array([[[1.0]], [[1.0]]], dtype=complex)) == 0.0
    uid = LaurentPoly(np.eye(2, dtype=complex)[np.newaxis])
    assert verify_factor(uid, np.eye(2, dtype=complex)[np.newaxis]) == 0.0
    # dropping the z coefficient leaves mismatch 1 in both slots
    assert verify_factor(u, np.array([[[1.0]]], dtype=complex)) == 1.0


def test_verify_factor_size_mismatch():
    u = scalar_laurent(1, 2, 1)
    with pytest.raises(ValueError, match="size mismatch"):
        verify_factor(u, np.eye(2, dtype=complex)[np.newaxis])


def test_round_trip_random_factors():
    rng = np.random.default_rng(17)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        band = int(rng.integers(0, 7))
        u, _ = factorable_laurent(rng, n, band)
        fac = fejer_riesz(u)
        scale = np.max(np.abs(u.coeff(0)))
        assert fac.residual <= 1e-6 * scale
        assert fac.deg == band
        assert verify_factor(u, fac) == fac.residual


def test_real_input_gives_real_factor():
    rng = np.random.default_rng(19)
    u, _ = factorable_laurent(rng, 2, 3, real=True)
    fac = fejer_riesz(u)
    assert np.max(np.abs(fac.coeffs.imag)) <= 1e-8 * np.max(np.abs(fac.coeffs.real))


def test_factor_products_unique():
    # P P* is determined by u even though P is only unique up to unitary
    rng = np.random.default_rng(23)
    u, _ = factorable_laurent(rng, 3, 4)
    f1 = fejer_riesz(u)
    f2 = fejer_riesz(u)
    def product(fac):
        b = fac.coeffs
        return np.stack([sum(b[j + k] @ b[j].conj().T for j in range(b.shape[0] - k))
                         for k in range(b.shape[0])])
    scale = np.max(np.abs(u.coeff(0)))
    assert np.max(np.abs(product(f1) - product(f2))) <= 1e-6 * scale


def test_positivity_of_factor_product_on_circle():
    rng = np.random.default_rng(29)
    u, _ = factorable_laurent(rng, 2, 4)
    fac = fejer_riesz(u)
    for t in np.linspace(0, 2 * np.pi, 32, endpoint=False):
        p = sum(fac.coeffs[k] * np.exp(1j * k * t) for k in range(fac.deg + 1))
        w = np.linalg.eigvalsh(p @ p.conj().T)
        assert w[0] >= -1e-8


def test_no_convergence_reports_best_residual():
    # dips to -1e-6 between validation grid points: passes the grid but
    # admits no exact factor, so the solver must give up with its best
    delta = 0.9 * np.pi / 16
    a1 = np.exp(-1j * delta)
    u = LaurentPoly(np.array([[[np.conj(a1)]], [[2.0 - 1e-6]], [[a1]]]))
    with pytest.raises(NoConvergence) as info:
        fejer_riesz(u)
    assert 0.0 < info.value.best.residual < 1e-5


def test_hermitian_precondition_enforced():
    bad = LaurentPoly(np.array([[[1.0]], [[1.0]], [[2.0]]], dtype=complex))
    with pytest.raises(ValueError, match="hermitian"):
        fejer_riesz(bad)


def test_zero_input():
    fac = fejer_riesz(LaurentPoly(np.zeros((3, 2, 2), dtype=complex)))
    assert fac.residual == 0.0
    assert np.all(fac.coeffs == 0)


def test_laurent_json_round_trip():
    rng = np.random.default_rng(31)
    u, _ = factorable_laurent(rng, 2, 2)
    back = laurent_from_json(laurent_to_json(u))
    assert np.allclose(back.coeffs, u.coeffs)
    with pytest.raises(ValueError, match="coeffs_im"):
        laurent_from_json({"n": 1, "band": 1, "coeffs_re": [[[1.0]]] * 3})
