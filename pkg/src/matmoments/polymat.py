"""Univariate matrix polynomials and matrix Laurent polynomials.

Coefficients are dense real square matrices.  Integer and Fraction
coefficients are kept exact (object dtype); float coefficients use float64.
Complex matrices appear only in :class:`LaurentPoly`, which feeds the
spectral factorization routines.
"""

import numbers
from fractions import Fraction

import numpy as np

STRIP_TOL = 1e-14


def _maxabs(mat):
    """Largest absolute entry, as a float (works for object arrays)."""
    arr = np.asarray(mat)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def _as_coeff_array(coeffs):
    arr = np.asarray(coeffs)
    if arr.ndim == 2:
        arr = arr[np.newaxis, :, :]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[1] == 0:
        raise ValueError("coefficients must form a (deg+1, n, n) stack of square matrices")
    if arr.dtype == object:
        return arr.copy()
    if np.iscomplexobj(arr):
        raise ValueError("matrix polynomial coefficients must be real")
    return arr.astype(np.float64)


def _is_zero_coeff(mat):
    if mat.dtype == object:
        return all(x == 0 for x in mat.flat)
    return _maxabs(mat) < STRIP_TOL


class MatrixPoly:
    """Polynomial sum_k C_k x^k with real n-by-n coefficient matrices.

    Trailing (near-)zero coefficients are stripped on construction, so
    ``deg`` is the true degree; the zero polynomial has deg 0 and a single
    zero coefficient.  Instances are immutable.
    """

    def __init__(self, coeffs, symmetric=False):
        arr = _as_coeff_array(coeffs)
        last = arr.shape[0]
        while last > 1 and _is_zero_coeff(arr[last - 1]):
            last -= 1
        arr = arr[:last]
        if symmetric:
            for k, c in enumerate(arr):
                if not np.array_equal(c, c.T):
                    raise ValueError(f"coefficient {k} is not exactly symmetric")
        arr.setflags(write=False)
        self._coeffs = arr
        self.symmetric = bool(symmetric)

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def n(self):
        return self._coeffs.shape[1]

    @property
    def deg(self):
        return self._coeffs.shape[0] - 1

    @property
    def is_exact(self):
        return self._coeffs.dtype == object

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((1, n, n)))

    @classmethod
    def constant(cls, mat, symmetric=False):
        return cls(np.asarray(mat)[np.newaxis], symmetric=symmetric)

    @classmethod
    def from_scalar(cls, coeffs):
        """Scalar polynomial as a 1x1 matrix polynomial."""
        coeffs = list(coeffs)
        arr = [[[c]] for c in coeffs]
        return cls(np.array(arr, dtype=object) if _has_exact(coeffs) else np.array(arr, dtype=float))

    def coeff(self, k):
        if 0 <= k <= self.deg:
            return self._coeffs[k]
        return np.zeros((self.n, self.n), dtype=self._coeffs.dtype)

    def as_float(self):
        if not self.is_exact:
            return self
        return MatrixPoly(self._coeffs.astype(np.float64))

    def max_coeff_abs(self):
        return _maxabs(self._coeffs)

    def __call__(self, x):
        res = np.array(self._coeffs[-1])
        for k in range(self.deg - 1, -1, -1):
            res = res * x + self._coeffs[k]
        return res

    def __add__(self, other):
        if not isinstance(other, MatrixPoly):
            return NotImplemented
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        la, lb = self.deg + 1, other.deg + 1
        dt = object if (self.is_exact or other.is_exact) else np.float64
        out = np.zeros((max(la, lb), self.n, self.n), dtype=dt)
        out[:la] += self._coeffs
        out[:lb] += other._coeffs
        return MatrixPoly(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return MatrixPoly(-np.array(self._coeffs))

    def __rmul__(self, scalar):
        if not isinstance(scalar, (numbers.Number, Fraction)):
            return NotImplemented
        dt = object if (self.is_exact or isinstance(scalar, Fraction)) else np.float64
        return MatrixPoly(np.array(self._coeffs, dtype=dt) * scalar)

    __mul__ = __rmul__

    def __matmul__(self, other):
        return matmul(self, other)

    def __repr__(self):
        return f"MatrixPoly(n={self.n}, deg={self.deg})"


def _has_exact(values):
    return any(isinstance(v, Fraction) for v in values)


def eval_poly(p, x):
    """Evaluate sum_k C_k x^k by Horner's rule."""
    return p(x)


def matmul(p, q):
    """Noncommutative coefficient convolution (P*Q)(x) = P(x) Q(x)."""
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n}")
    dt = object if (p.is_exact or q.is_exact) else np.float64
    out = np.zeros((p.deg + q.deg + 1, p.n, p.n), dtype=dt)
    for i in range(p.deg + 1):
        ci = p.coeffs[i]
        for j in range(q.deg + 1):
            out[i + j] += ci.dot(q.coeffs[j])
    return MatrixPoly(out)


def transpose_poly(p):
    """Coefficient-wise transpose; the adjoint for real coefficients."""
    return MatrixPoly(np.transpose(np.array(p.coeffs), (0, 2, 1)), symmetric=p.symmetric)


def even_odd_split(p):
    """Split P(a) = R(a^2) + a*Q(a^2); returns (R, Q) exactly."""
    even = np.array(p.coeffs[0::2])
    odd = np.array(p.coeffs[1::2])
    r = MatrixPoly(even)
    q = MatrixPoly(odd) if odd.shape[0] else MatrixPoly.zero(p.n)
    return r, q


def _conv1d(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def compose_scalar(p, q):
    """Substitute a scalar polynomial: returns P(q(x)) expanded.

    ``q`` is a coefficient sequence, constant term first.
    """
    qc = list(q)
    if not qc:
        qc = [0]
    for c in qc:
        if isinstance(c, complex):
            raise ValueError("substitution polynomial must have real coefficients")
    exact = p.is_exact or _has_exact(qc)
    dt = object if exact else np.float64
    max_len = p.deg * (len(qc) - 1) + 1 if len(qc) > 1 else 1
    out = np.zeros((max(max_len, 1), p.n, p.n), dtype=dt)
    power = [1]
    for k in range(p.deg + 1):
        ck = p.coeffs[k]
        for j, w in enumerate(power):
            if w != 0:
                out[j] += w * ck
        if k < p.deg:
            power = _conv1d(power, qc)
    return MatrixPoly(out)


def scalar_poly_mult(q, p):
    """Multiply a matrix polynomial by the scalar polynomial q."""
    qc = list(q)
    if not qc:
        return MatrixPoly.zero(p.n)
    exact = p.is_exact or _has_exact(qc)
    dt = object if exact else np.float64
    out = np.zeros((len(qc) + p.deg, p.n, p.n), dtype=dt)
    for j, w in enumerate(qc):
        if w != 0:
            for k in range(p.deg + 1):
                out[j + k] += w * p.coeffs[k]
    return MatrixPoly(out)


def sup_norm_on(p, interval, grid):
    """Max spectral norm of P(x) over a uniform grid on [a, b]."""
    a, b = interval
    if a > b:
        raise ValueError(f"empty interval: [{a}, {b}]")
    if grid < 2:
        raise ValueError("grid must have at least 2 points")
    pf = p.as_float()
    return max(float(np.linalg.norm(pf(x), 2)) for x in np.linspace(a, b, grid))


def poly_trace(p):
    """Trace of each coefficient, as a scalar coefficient list."""
    return [np.trace(c) for c in p.coeffs]


def matrixpoly_to_json(p):
    """JSON document {"n", "symmetric", "coeffs"} with coeffs[k] = C_k."""
    return {
        "n": p.n,
        "symmetric": bool(p.symmetric),
        "coeffs": [[[float(v) for v in row] for row in c] for c in p.coeffs],
    }


def matrixpoly_from_json(doc):
    if not isinstance(doc, dict):
        raise ValueError("matrix polynomial document must be a JSON object")
    for key in ("n", "coeffs"):
        if key not in doc:
            raise ValueError(f"missing field '{key}'")
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise ValueError("field 'n' must be a positive integer")
    coeffs = doc["coeffs"]
    if not isinstance(coeffs, list) or not coeffs:
        raise ValueError("field 'coeffs' must be a non-empty list")
    stack = []
    for k, c in enumerate(coeffs):
        if not isinstance(c, list) or len(c) != n:
            raise ValueError(f"coeffs[{k}] must be an {n}x{n} matrix")
        for row in c:
            if not isinstance(row, list) or len(row) != n:
                raise ValueError(f"coeffs[{k}] is ragged or not {n}x{n}")
            for v in row:
                if not isinstance(v, (int, float)) or not np.isfinite(v):
                    raise ValueError(f"coeffs[{k}] has a non-finite or non-numeric entry")
        stack.append(c)
    symmetric = bool(doc.get("symmetric", False))
    arr = np.array(stack, dtype=float)
    if symmetric:
        defect = max(_maxabs(c - c.T) for c in arr)
        if defect > 0:
            raise ValueError("field 'symmetric' set but coefficients are not symmetric")
    return MatrixPoly(arr, symmetric=symmetric)


class LaurentPoly:
    """Matrix Laurent polynomial sum_{k=-band}^{band} A_k z^k, complex coefficients."""

    def __init__(self, coeffs):
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError("coefficients must form a (2*band+1, n, n) stack of square matrices")
        if arr.shape[0] % 2 == 0:
            raise ValueError("coefficient stack must have odd length 2*band+1")
        arr.setflags(write=False)
        self._coeffs = arr

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def n(self):
        return self._coeffs.shape[1]

    @property
    def band(self):
        return (self._coeffs.shape[0] - 1) // 2

    def coeff(self, k):
        """Coefficient A_k, for -band <= k <= band."""
        if abs(k) > self.band:
            return np.zeros((self.n, self.n), dtype=np.complex128)
        return self._coeffs[k + self.band]

    def hermitian_defect(self):
        """max_k ||A_{-k} - A_k^H||, zero iff hermitian-valued on the circle."""
        return max(_maxabs(self.coeff(-k) - self.coeff(k).conj().T) for k in range(self.band + 1))

    def eval_circle(self, t):
        """Value at z = exp(i t)."""
        z = np.exp(1j * t)
        res = np.zeros((self.n, self.n), dtype=np.complex128)
        for k in range(-self.band, self.band + 1):
            res += self.coeff(k) * z**k
        return res

    def __repr__(self):
        return f"LaurentPoly(n={self.n}, band={self.band})"
