"""Sum-of-hermitian-squares certificates for matrix polynomials.

A symmetric matrix polynomial F that is PSD on the line, the half-line or
the unit interval is decomposed as F = sum_g g * sigma_g, where g ranges
over the cone generators {1}, {1, x} or {1, x, 1-x, x(1-x)} and each
sigma_g is an explicit sum of squares G_i G_i^T.

The line case routes through the unit circle: homogenize, expand
F~(cos t, sin t) into a Laurent polynomial in e^{2it} with exact rational
binomial weights, spectrally factor, and split the rotated factor into its
real and imaginary homogeneous parts H and K, giving F = H H^T + K K^T at
(1, x).  The half-line substitutes x = a^2 and splits the line factors by
parity; the interval applies a Moebius substitution x = s/(1+s) to reduce
to the half-line and sorts the cleared powers of (1-x) onto the four
generators by parity.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import spectral
from .polymat import (LaurentPoly, MatrixPoly, _conv1d, _maxabs, matmul,
                      matrixpoly_from_json, matrixpoly_to_json, scalar_poly_mult,
                      compose_scalar, transpose_poly, even_odd_split, poly_trace)

DEFAULT_TOL = 1e-8

GENERATORS = {
    "1": [1.0],
    "x": [0.0, 1.0],
    "1-x": [1.0, -1.0],
    "x(1-x)": [0.0, 1.0, -1.0],
}

VARIANT_GENERATORS = {
    "line": ("1",),
    "halfline": ("1", "x"),
    "interval": ("1", "x", "1-x", "x(1-x)"),
}


class OddDegree(ValueError):
    pass


class _NotPsdOnDomain(ValueError):
    def __init__(self, min_eigenvalue, at_x):
        self.min_eigenvalue = min_eigenvalue
        self.at_x = at_x
        super().__init__(f"eigenvalue {min_eigenvalue:.3e} at x={at_x:.6f}")


class NotPsdOnLine(_NotPsdOnDomain):
    pass


class NotPsdOnHalfLine(_NotPsdOnDomain):
    pass


class NotPsdOnInterval(_NotPsdOnDomain):
    pass


class SosConsistencyError(RuntimeError):
    """Internal identity failed beyond tolerance (bad input conditioning)."""


@dataclass
class SosCertificate:
    """Decomposition F = sum_g g * sum_i G_i G_i^T over cone generators."""

    variant: str
    sigma: dict
    residual: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANT_GENERATORS:
            raise ValueError(f"unknown variant '{self.variant}'")
        allowed = set(VARIANT_GENERATORS[self.variant])
        for key in self.sigma:
            if key not in allowed:
                raise ValueError(f"generator '{key}' not allowed for variant '{self.variant}'")
        if self.variant == "line" and len(self.sigma.get("1", [])) > 2:
            raise ValueError("line certificates carry at most two factors")

    def factors(self, key):
        return self.sigma.get(key, [])


@dataclass
class ScalarizedSet:
    """Scalar polynomials whose joint nonnegativity set equals {x : G(x) PSD}."""

    polys: list = field(default_factory=list)
    source: MatrixPoly = None


def _require_symmetric(f, what="input"):
    ff = f.as_float()
    scale = max(1.0, ff.max_coeff_abs())
    defect = max(_maxabs(c - c.T) for c in ff.coeffs)
    if defect > 1e-12 * scale:
        raise ValueError(f"{what} must be a symmetric matrix polynomial")


def _chebyshev_grid(a, b, count):
    k = np.arange(count)
    nodes = np.cos((2 * k + 1) * np.pi / (2 * count))
    return 0.5 * (a + b) + 0.5 * (b - a) * nodes


def _grid_check(ff, a, b, thresh, exc):
    worst, worst_x = np.inf, a
    for x in _chebyshev_grid(a, b, 8 * (ff.deg + 1)):
        v = ff(x)
        w = np.linalg.eigvalsh(0.5 * (v + v.T))
        if w[0] < worst:
            worst, worst_x = w[0], float(x)
    if worst < -thresh:
        raise exc(worst, worst_x)


_I_POW = {0: (1, 0), 1: (0, 1), 2: (-1, 0), 3: (0, -1)}


def _trig_laurent(f):
    """Laurent polynomial u with u(e^{2it}) = F~(cos t, sin t).

    F~(u, v) = F(v/u) u^deg is the homogenization; the expansion uses
    cos t = (w + 1/w)/2 and sin t = (w - 1/w)/(2i) with exact rational
    binomial weights, rounding only when the weights multiply the
    coefficient matrices.
    """
    d = f.deg
    nh = d // 2
    ff = f.as_float()
    n = f.n
    coeffs = np.zeros((2 * nh + 1, n, n), dtype=np.complex128)
    denom = Fraction(1, 2**d)
    for j in range(-nh, nh + 1):
        acc_re = np.zeros((n, n))
        acc_im = np.zeros((n, n))
        for k in range(d + 1):
            s = 0
            for a in range(max(0, nh + j - (d - k)), min(k, nh + j) + 1):
                s += (-1) ** (k - a) * comb(k, a) * comb(d - k, nh + j - a)
            if s == 0:
                continue
            # phase of i^{-k}: purely real for even k, purely imaginary for odd k
            pre, pim = _I_POW[(-k) % 4]
            w = s * denom
            if pre:
                acc_re += float(pre * w) * ff.coeffs[k]
            if pim:
                acc_im += float(pim * w) * ff.coeffs[k]
        coeffs[j + nh] = acc_re + 1j * acc_im
    return LaurentPoly(coeffs)


def _line_factors(b_stack):
    """Split G(cos t, sin t) = P(e^{2it}) e^{-i n t} into real parts H, K.

    G(u, v) = sum_k B_k (u + iv)^k (u - iv)^{n-k} is homogeneous of degree
    n with complex coefficients; H and K are its real and imaginary parts,
    returned dehomogenized at (1, x).
    """
    nh = b_stack.shape[0] - 1
    n = b_stack.shape[1]
    h = np.zeros((nh + 1, n, n))
    k_mat = np.zeros((nh + 1, n, n))
    for e in range(nh + 1):
        gamma = np.zeros((n, n), dtype=np.complex128)
        for k in range(nh + 1):
            w = 0j
            for a in range(max(0, e - (nh - k)), min(k, e) + 1):
                b = e - a
                pre, pim = _I_POW[((k - a) - (nh - k - b)) % 4]
                w += comb(k, a) * comb(nh - k, b) * (pre + 1j * pim)
            if w != 0:
                gamma += w * b_stack[k]
        # coefficient of u^e v^{nh-e} lands on x^{nh-e} at (1, x)
        h[nh - e] = gamma.real
        k_mat[nh - e] = gamma.imag
    return MatrixPoly(h), MatrixPoly(k_mat)


def _spectral_factor_or_best(u, tol):
    """Factor u, keeping the best attempt; the reassembly residual decides."""
    try:
        return spectral.fejer_riesz(u, tol=min(1e-10, tol / 100.0)), None
    except spectral.NoConvergence as exc:
        return exc.best, exc


def decompose_line(f, tol=DEFAULT_TOL):
    """Certificate F = H H^T + K K^T for F PSD on the whole line.

    Requires even degree with PSD leading coefficient; at most two factors
    are emitted.
    """
    _require_symmetric(f)
    if f.deg % 2:
        raise OddDegree(f"degree {f.deg} is odd")
    ff = f.as_float()
    scale = max(1.0, ff.max_coeff_abs())
    lead = ff.coeffs[-1]
    w = np.linalg.eigvalsh(0.5 * (lead + lead.T))
    if w[0] < -tol * scale:
        raise NotPsdOnLine(w[0], np.inf)
    t_bound = 1.0 + ff.max_coeff_abs()
    _grid_check(ff, -t_bound, t_bound, tol * scale, NotPsdOnLine)

    u = _trig_laurent(ff)
    fac, pending = _spectral_factor_or_best(u, tol)
    h, k = _line_factors(fac.coeffs)

    cross = matmul(k, transpose_poly(h)) - matmul(h, transpose_poly(k))
    if cross.max_coeff_abs() > 1e-8 * scale:
        if pending is not None:
            raise pending
        raise SosConsistencyError(
            f"cross term H K^T - K H^T did not cancel ({cross.max_coeff_abs():.3e})")

    # factors whose square contributes below the residual promise are noise
    # left over from the factorization gauge; dropping them keeps the
    # certificate minimal and the reassembly check below still decides
    drop = 1e-3 * tol * scale
    factors = [p for p in (h, k)
               if (p.deg + 1) * p.max_coeff_abs() ** 2 > drop]
    cert = SosCertificate("line", {"1": factors})
    cert.residual = verify_certificate(ff, cert)
    if cert.residual > tol * scale:
        if pending is not None:
            raise pending
        raise SosConsistencyError(f"reassembly residual {cert.residual:.3e} above tolerance")
    return cert


def _significant(factors, tol, scale):
    drop = 1e-3 * tol * scale
    return [p for p in factors if (p.deg + 1) * p.max_coeff_abs() ** 2 > drop]


def decompose_halfline(f, tol=DEFAULT_TOL):
    """Certificate F = sigma_0 + x sigma_1 for F PSD on [0, inf).

    Substitutes x = a^2, decomposes on the line and splits each factor
    P(a) = R(a^2) + a Q(a^2); the R go to sigma_0 and the Q to sigma_1.
    """
    _require_symmetric(f)
    ff = f.as_float()
    scale = max(1.0, ff.max_coeff_abs())
    t_bound = 1.0 + ff.max_coeff_abs()
    _grid_check(ff, 0.0, t_bound, tol * scale, NotPsdOnHalfLine)

    g = compose_scalar(ff, [0.0, 0.0, 1.0])
    inner = decompose_line(g, tol=tol)
    sig0, sig1 = [], []
    for p in inner.factors("1"):
        r, q = even_odd_split(p)
        sig0.append(r)
        sig1.append(q)
    cert = SosCertificate("halfline", {"1": _significant(sig0, tol, scale),
                                       "x": _significant(sig1, tol, scale)})
    cert.residual = verify_certificate(ff, cert)
    if cert.residual > tol * scale:
        raise SosConsistencyError(f"reassembly residual {cert.residual:.3e} above tolerance")
    return cert


def _clear_substitution(p, d, sign):
    """sum_k C_k x^k (1 + sign*x)^(d-k); exact binomial clearing."""
    if d < p.deg:
        raise ValueError("clearing degree below polynomial degree")
    n = p.n
    out = np.zeros((d + 1, n, n))
    for k in range(p.deg + 1):
        for j in range(d - k + 1):
            out[k + j] += comb(d - k, j) * (sign ** j) * p.coeffs[k]
    return MatrixPoly(out)


def _one_minus_x_power(e):
    return [comb(e, j) * (-1.0) ** j for j in range(e + 1)]


def decompose_interval(f, tol=DEFAULT_TOL):
    """Four-generator certificate for F PSD on [0, 1].

    Clears x = s/(1+s) to a half-line problem, pulls factors back with
    s = x/(1-x) and sorts the leftover powers of (1-x) onto the
    generators 1, x, 1-x, x(1-x) by parity.
    """
    _require_symmetric(f)
    ff = f.as_float()
    scale = max(1.0, ff.max_coeff_abs())
    _grid_check(ff, 0.0, 1.0, tol * scale, NotPsdOnInterval)

    d = ff.deg
    g = _clear_substitution(ff, d, +1)
    inner = decompose_halfline(g, tol=tol)

    sigma = {key: [] for key in VARIANT_GENERATORS["interval"]}
    for p in inner.factors("1"):
        e = p.deg
        extra = d - 2 * e
        if extra < 0:
            raise SosConsistencyError("degree bookkeeping failed on an even factor")
        pulled = _clear_substitution(p, e, -1)
        pulled = scalar_poly_mult(_one_minus_x_power(extra // 2), pulled)
        sigma["1" if extra % 2 == 0 else "1-x"].append(pulled)
    for p in inner.factors("x"):
        e = p.deg
        extra = d - 1 - 2 * e
        if extra < 0:
            raise SosConsistencyError("degree bookkeeping failed on an odd factor")
        pulled = _clear_substitution(p, e, -1)
        pulled = scalar_poly_mult(_one_minus_x_power(extra // 2), pulled)
        sigma["x" if extra % 2 == 0 else "x(1-x)"].append(pulled)
    sigma = {key: _significant(val, tol, scale) for key, val in sigma.items()}
    sigma = {key: val for key, val in sigma.items() if val}

    cert = SosCertificate("interval", sigma)
    cert.residual = verify_certificate(ff, cert)
    if cert.residual > tol * scale:
        raise SosConsistencyError(f"reassembly residual {cert.residual:.3e} above tolerance")
    return cert


def verify_certificate(f, cert):
    """Max coefficient mismatch of F - sum_g g * sum_i G_i G_i^T.

    Pure check; returns the residual without judging it.
    """
    total = MatrixPoly.zero(f.n)
    for key, factors in cert.sigma.items():
        gen = GENERATORS[key]
        for g in factors:
            if g.n != f.n:
                raise ValueError(f"size mismatch: factor is {g.n}x{g.n}, input is {f.n}x{f.n}")
            total = total + scalar_poly_mult(gen, matmul(g, transpose_poly(g)))
    ff = f.as_float()
    tf = total.as_float()
    res = 0.0
    for k in range(max(ff.deg, tf.deg) + 1):
        res = max(res, _maxabs(ff.coeff(k) - tf.coeff(k)))
    return res


def scalarize(g):
    """Scalar constraints with the same solution set as G(x) PSD.

    Returns the signed characteristic-polynomial coefficients
    det(tI - G(x)) = sum_j (-1)^j c_j(x) t^{n-j}: for a symmetric matrix
    all eigenvalues are real, and they are all nonnegative exactly when
    every elementary symmetric function c_j of them is nonnegative.
    """
    _require_symmetric(g)
    gf = g.as_float()
    n = g.n
    traces = []
    power = gf
    for _ in range(n):
        traces.append([float(v) for v in poly_trace(power)])
        power = matmul(power, gf)
    elem = [[1.0]]
    for k in range(1, n + 1):
        acc = [0.0]
        for i in range(1, k + 1):
            term = _conv1d(elem[k - i], traces[i - 1])
            sgn = 1.0 if (i - 1) % 2 == 0 else -1.0
            width = max(len(acc), len(term))
            acc = [(acc[j] if j < len(acc) else 0.0) + sgn * (term[j] if j < len(term) else 0.0)
                   for j in range(width)]
        elem.append([v / k for v in acc])
    polys = []
    for e in elem[1:]:
        arr = np.array(e)
        nz = np.nonzero(np.abs(arr) > 1e-14 * max(1.0, np.max(np.abs(arr))))[0]
        polys.append(arr[:nz[-1] + 1] if nz.size else arr[:1])
    return ScalarizedSet(polys=polys, source=g)


def certificate_to_json(cert):
    return {
        "variant": cert.variant,
        "sigma": {key: [matrixpoly_to_json(p) for p in factors]
                  for key, factors in cert.sigma.items()},
        "residual": float(cert.residual),
    }


def certificate_from_json(doc):
    if not isinstance(doc, dict):
        raise ValueError("certificate document must be a JSON object")
    for key in ("variant", "sigma"):
        if key not in doc:
            raise ValueError(f"missing field '{key}'")
    if doc["variant"] not in VARIANT_GENERATORS:
        raise ValueError(f"field 'variant' must be one of {sorted(VARIANT_GENERATORS)}")
    sigma_doc = doc["sigma"]
    if not isinstance(sigma_doc, dict):
        raise ValueError("field 'sigma' must be an object")
    sigma = {}
    for key, entries in sigma_doc.items():
        if key not in GENERATORS:
            raise ValueError(f"unknown generator '{key}' in 'sigma'")
        if not isinstance(entries, list):
            raise ValueError(f"sigma['{key}'] must be a list of matrix polynomials")
        sigma[key] = [matrixpoly_from_json(entry) for entry in entries]
    return SosCertificate(doc["variant"], sigma, float(doc.get("residual", 0.0)))
