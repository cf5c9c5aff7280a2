"""Shared helpers: random inputs with controlled conditioning and
independent reassembly oracles that avoid the library's own arithmetic."""

import numpy as np
from numpy.polynomial import polynomial as npoly

from matmoments import AtomicMatrixMeasure, LaurentPoly


def rand_psd(rng, n, lo=0.3, hi=3.0):
    """Random symmetric PSD matrix with eigenvalues in [lo, hi]."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return q @ np.diag(rng.uniform(lo, hi, n)) @ q.T


def rand_symmetric_poly(rng, n, deg):
    c = rng.standard_normal((deg + 1, n, n))
    return 0.5 * (c + np.transpose(c, (0, 2, 1)))


def separated_points(rng, count, lo, hi, sep):
    while True:
        pts = np.sort(rng.uniform(lo, hi, count))
        if count == 1 or np.min(np.diff(pts)) >= sep:
            return pts


def rand_measure(rng, n, count, lo, hi, sep=0.05, wlo=0.3, whi=3.0):
    pts = separated_points(rng, count, lo, hi, sep)
    return AtomicMatrixMeasure(n, [(float(x), rand_psd(rng, n, wlo, whi)) for x in pts])


def factorable_laurent(rng, n, band, real=False):
    """A Laurent polynomial P P* built from a random factor; returns (u, B)."""
    b = rng.standard_normal((band + 1, n, n))
    if not real:
        b = b + 1j * rng.standard_normal((band + 1, n, n))
    coeffs = np.zeros((2 * band + 1, n, n), dtype=complex)
    for k in range(band + 1):
        ck = sum(b[j + k] @ b[j].conj().T for j in range(band + 1 - k))
        coeffs[band + k] = ck
        coeffs[band - k] = ck.conj().T
    return LaurentPoly(coeffs), b


def entrywise_reassembly(f, cert):
    """Residual of F - sum_g g * sum G G^T via numpy.polynomial arithmetic.

    Independent of the library's matmul/scalar_poly_mult code paths.
    """
    gen_coeffs = {"1": [1.0], "x": [0.0, 1.0], "1-x": [1.0, -1.0], "x(1-x)": [0.0, 1.0, -1.0]}
    n = f.n
    width = f.deg + 1
    for key, factors in cert.sigma.items():
        for g in factors:
            width = max(width, 2 * g.deg + len(gen_coeffs[key]))
    total = np.zeros((width, n, n))
    for key, factors in cert.sigma.items():
        gen = np.array(gen_coeffs[key])
        for g in factors:
            arr = np.array(g.as_float().coeffs)
            for r in range(n):
                for c in range(n):
                    acc = np.zeros(1)
                    for s in range(n):
                        acc = npoly.polyadd(acc, npoly.polymul(arr[:, r, s], arr[:, c, s]))
                    acc = npoly.polymul(acc, gen)
                    total[:len(acc), r, c] += acc
    ff = np.zeros((width, n, n))
    ff[:f.deg + 1] = np.array(f.as_float().coeffs)
    return float(np.max(np.abs(total - ff)))
