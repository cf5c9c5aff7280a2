"""Fejer-Riesz spectral factorization of matrix Laurent polynomials.

Writes u(z) = P(z) P*(z), with P an ordinary matrix polynomial and
P*(z) = sum_k B_k^H z^{-k}, for Laurent polynomials that are Hermitian
positive semidefinite on the unit circle.

The driver is Bauer's method: Cholesky-factor a banded block-Toeplitz
section T_N = [A_{i-j}] and read the candidate coefficients off the last
block row, doubling N until the residual settles.  Bauer alone converges
only polynomially when u has spectral zeros on the circle, so every Bauer
estimate is polished by a coefficient-space Newton iteration on
A_k = sum_j B_{j+k} B_j^H, which restores fast convergence in both the
definite and the singular case.  Inputs that defeat both are retried with
an epsilon*I regularization and Richardson extrapolation in sqrt(eps).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .polymat import LaurentPoly, _maxabs

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ORDER = 4096


class NotPsdOnCircle(ValueError):
    """Input fails the PSD-on-circle precondition on the validation grid."""

    def __init__(self, min_eigenvalue, at_angle):
        self.min_eigenvalue = min_eigenvalue
        self.at_angle = at_angle
        super().__init__(
            f"eigenvalue {min_eigenvalue:.3e} below tolerance at angle t={at_angle:.6f}")


class NoConvergence(RuntimeError):
    """Factorization did not reach the residual target within max_order."""

    def __init__(self, best):
        self.best = best
        super().__init__(f"no convergence; best residual {best.residual:.3e} "
                         f"at Toeplitz order {best.toeplitz_order}")


@dataclass
class SpectralFactor:
    """Polynomial factor B_0, ..., B_n with bookkeeping from the solve."""

    coeffs: np.ndarray          # (deg+1, n, n) complex
    residual: float
    epsilon_used: float
    toeplitz_order: int

    @property
    def n(self):
        return self.coeffs.shape[1]

    @property
    def deg(self):
        return self.coeffs.shape[0] - 1


def _factor_conv(b):
    """c_k = sum_j B_{j+k} B_j^H for k = 0..deg."""
    deg = b.shape[0] - 1
    out = np.zeros_like(b)
    for k in range(deg + 1):
        for j in range(deg + 1 - k):
            out[k] += b[j + k] @ b[j].conj().T
    return out


def _residual_coeffs(a_stack, band, b):
    """A_k - sum_j B_{j+k} B_j^H for k = 0..band (b has band+1 coefficients)."""
    conv = _factor_conv(b)
    return np.stack([a_stack[band + k] - conv[k] for k in range(band + 1)])


def _residual(a_stack, band, b):
    return float(np.max(np.abs(_residual_coeffs(a_stack, band, b))))


def verify_factor(u, factor):
    """Residual max_k ||A_k - sum_j B_{j+k} B_j^H|| of a candidate factor.

    ``factor`` is a SpectralFactor or a (deg+1, n, n) coefficient stack.
    Pure check; no tolerance judgment.
    """
    b = factor.coeffs if isinstance(factor, SpectralFactor) else np.asarray(factor, dtype=np.complex128)
    if b.ndim == 2:
        b = b[np.newaxis]
    if b.shape[1:] != (u.n, u.n):
        raise ValueError(f"size mismatch: factor is {b.shape[1:]}, input is {(u.n, u.n)}")
    conv = _factor_conv(b)
    kmax = max(u.band, b.shape[0] - 1)
    res = 0.0
    for k in range(kmax + 1):
        ak = u.coeff(k)
        ck = conv[k] if k < conv.shape[0] else np.zeros_like(ak)
        res = max(res, _maxabs(ak - ck))
    return res


def _bauer_tail(a_stack, band, n, order):
    """Last block row of the Cholesky factor of the order-N Toeplitz section."""
    m = order * n
    bw = (band + 1) * n - 1
    real_input = np.max(np.abs(a_stack.imag)) == 0.0
    stack = a_stack.real if real_input else a_stack
    ab = np.zeros((bw + 1, m), dtype=stack.dtype)
    for d in range(bw + 1):
        q = np.arange(m - d)
        bi = (q + d) // n - q // n
        ri = (q + d) % n
        ci = q % n
        ok = bi <= band
        vals = stack[np.minimum(bi, band) + band, ri, ci]
        ab[d, :m - d] = np.where(ok, vals, 0.0)
    chol = scipy.linalg.cholesky_banded(ab, lower=True)
    b = np.zeros((band + 1, n, n), dtype=np.complex128)
    for k in range(band + 1):
        for r in range(n):
            for s in range(n):
                d = k * n + r - s
                if 0 <= d <= bw:
                    b[k, r, s] = chol[d, (order - 1 - k) * n + s]
    return b


def _gauge_fix(b):
    """Right-multiply by a unitary so B_0 is lower triangular, real diagonal >= 0."""
    n = b.shape[1]
    q, r = np.linalg.qr(b[0].conj().T)
    d = np.ones(n, dtype=np.complex128)
    for i in range(n):
        if abs(r[i, i]) > 1e-300:
            d[i] = r[i, i] / abs(r[i, i])
    u = q @ np.diag(d)
    return np.stack([bk @ u for bk in b])


def _transpose_perm(n):
    p = np.zeros((n * n, n * n))
    for r in range(n):
        for c in range(n):
            p[r * n + c, c * n + r] = 1.0
    return p


def _newton_step(a_stack, band, b, perm):
    """Least-norm solution D of  D P* + P D* = (A - B B*)  in coefficient space."""
    n = b.shape[1]
    nb = n * n
    dim = (band + 1) * nb
    eye = np.eye(n)
    j1 = np.zeros((dim, dim), dtype=np.complex128)
    j2 = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(band + 1):
        for a in range(k, band + 1):
            # D_a -> D_a B_{a-k}^H contributes kron(I, conj(B_{a-k})) (row-major vec)
            j1[k * nb:(k + 1) * nb, a * nb:(a + 1) * nb] += np.kron(eye, b[a - k].conj())
        for bb in range(band + 1 - k):
            # D_b -> B_{k+b} D_b^H acts on conj(vec D_b) through the transposition
            j2[k * nb:(k + 1) * nb, bb * nb:(bb + 1) * nb] += np.kron(b[k + bb], eye) @ perm
    e = _residual_coeffs(a_stack, band, b).reshape(-1)
    top = np.hstack([j1.real + j2.real, -j1.imag + j2.imag])
    bot = np.hstack([j1.imag + j2.imag, j1.real - j2.real])
    big = np.vstack([top, bot])
    rhs = np.concatenate([e.real, e.imag])
    sol, *_ = np.linalg.lstsq(big, rhs, rcond=None)
    d = sol[:dim] + 1j * sol[dim:]
    return d.reshape(band + 1, n, n)


def _newton_refine(a_stack, band, b, target, max_iter=60):
    perm = _transpose_perm(b.shape[1])
    res = _residual(a_stack, band, b)
    best_b, best_res = b, res
    for _ in range(max_iter):
        if best_res <= target:
            break
        delta = _newton_step(a_stack, band, b, perm)
        step = 1.0
        improved = False
        for _ in range(25):
            cand = b + step * delta
            cand_res = _residual(a_stack, band, cand)
            if cand_res < res * (1.0 - 1e-4 * step):
                b, res = cand, cand_res
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        if res < best_res:
            best_b, best_res = b, res
    return best_b, best_res


def _solve_sweep(a_stack, band, n, tol_abs, max_order):
    """Bauer + Newton over geometrically growing Toeplitz orders."""
    best = (None, np.inf, 0)
    order = max(16, 2 * (band + 1))
    orders = []
    while order <= max_order:
        orders.append(order)
        order *= 2
    if not orders:
        orders = [max(max_order, band + 1)]
    for order in orders:
        try:
            b = _bauer_tail(a_stack, band, n, order)
        except np.linalg.LinAlgError:
            continue
        b = _gauge_fix(b)
        b, res = _newton_refine(a_stack, band, b, target=0.01 * tol_abs)
        if res < best[1]:
            best = (b, res, order)
        if res <= tol_abs:
            break
    return best


def fejer_riesz(u, tol=DEFAULT_TOL, max_order=DEFAULT_MAX_ORDER):
    """Spectral factor of a Laurent polynomial PSD on the unit circle.

    Parameters
    ----------
    u : LaurentPoly
        Hermitian-valued input, A_{-k} = A_k^H, with u(e^{it}) >= -tol
        (relative to the scale of A_0) on a grid of 4*(band+1) angles.
    tol : float
        Residual target, relative to max(1, ||A_0||).
    max_order : int
        Largest Toeplitz section order tried by Bauer's method.

    Returns
    -------
    SpectralFactor
        Factor with deg = band(u), residual below tol * max(1, ||A_0||),
        canonical up to right multiplication by a constant unitary.

    Raises
    ------
    NotPsdOnCircle
        Grid eigenvalue below the tolerance; the input violates the
        precondition.
    NoConvergence
        Residual target not reached by order max_order; carries the best
        factor found.
    """
    band, n = u.band, u.n
    scale = max(1.0, _maxabs(u.coeff(0)))
    if u.hermitian_defect() > 1e-10 * scale:
        raise ValueError("input is not hermitian-valued on the circle (A_{-k} != A_k^H)")

    npts = 4 * (band + 1)
    worst, worst_t = np.inf, 0.0
    for t in 2.0 * np.pi * np.arange(npts) / npts:
        v = u.eval_circle(t)
        w = np.linalg.eigvalsh(0.5 * (v + v.conj().T))
        if w[0] < worst:
            worst, worst_t = w[0], t
    if worst < -tol * scale:
        raise NotPsdOnCircle(worst, worst_t)

    a_stack = np.array(u.coeffs)
    if _maxabs(a_stack) == 0.0:
        return SpectralFactor(np.zeros((band + 1, n, n), dtype=np.complex128), 0.0, 0.0, 0)

    tol_abs = tol * scale
    b, res, order = _solve_sweep(a_stack, band, n, tol_abs, max_order)
    best = SpectralFactor(b, res, 0.0, order) if b is not None else None

    if best is None or best.residual > tol_abs:
        # PSD-but-singular inputs: factor u + eps*I for two eps values and
        # Richardson-extrapolate in sqrt(eps) (the factor error is O(sqrt(eps))).
        eye = np.eye(n)
        inner_order = min(max_order, 512)
        for eps_rel in (1e-8, 1e-6, 1e-4):
            eps = eps_rel * scale
            results = []
            for e in (eps, eps / 4.0):
                shifted = np.array(a_stack)
                shifted[band] = shifted[band] + e * eye
                bb, rr, oo = _solve_sweep(shifted, band, n, 1e-13 * scale, inner_order)
                if bb is None or rr > np.sqrt(e) * scale:
                    results = None
                    break
                results.append(_gauge_fix(bb))
            if results is None:
                continue
            extrap = 2.0 * results[1] - results[0]
            extrap, res = _newton_refine(a_stack, band, extrap, target=0.01 * tol_abs)
            if best is None or res < best.residual:
                best = SpectralFactor(extrap, res, eps, inner_order)
            if res <= tol_abs:
                break

    if best is None:
        best = SpectralFactor(np.zeros((band + 1, n, n), dtype=np.complex128),
                              np.inf, 0.0, 0)
    if best.residual > tol_abs:
        raise NoConvergence(best)
    return best


def laurent_to_json(u):
    """JSON document {"n", "band", "coeffs_re", "coeffs_im"}, indexed -band..band."""
    return {
        "n": u.n,
        "band": u.band,
        "coeffs_re": [[[float(v) for v in row] for row in c] for c in u.coeffs.real],
        "coeffs_im": [[[float(v) for v in row] for row in c] for c in u.coeffs.imag],
    }


def laurent_from_json(doc):
    if not isinstance(doc, dict):
        raise ValueError("Laurent polynomial document must be a JSON object")
    for key in ("n", "band", "coeffs_re", "coeffs_im"):
        if key not in doc:
            raise ValueError(f"missing field '{key}'")
    n, band = doc["n"], doc["band"]
    if not isinstance(n, int) or n < 1:
        raise ValueError("field 'n' must be a positive integer")
    if not isinstance(band, int) or band < 0:
        raise ValueError("field 'band' must be a nonnegative integer")
    expect = 2 * band + 1
    for key in ("coeffs_re", "coeffs_im"):
        part = doc[key]
        if not isinstance(part, list) or len(part) != expect:
            raise ValueError(f"field '{key}' must list {expect} matrices")
        for k, c in enumerate(part):
            if not isinstance(c, list) or len(c) != n or any(
                    not isinstance(row, list) or len(row) != n for row in c):
                raise ValueError(f"{key}[{k}] must be an {n}x{n} matrix")
            for row in c:
                for v in row:
                    if not isinstance(v, (int, float)) or not np.isfinite(v):
                        raise ValueError(f"{key}[{k}] has a non-finite or non-numeric entry")
    re = np.array(doc["coeffs_re"], dtype=float)
    im = np.array(doc["coeffs_im"], dtype=float)
    return LaurentPoly(re + 1j * im)
