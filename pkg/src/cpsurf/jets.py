"""Truncated bivariate Taylor jets in the light-cone variables.

A :class:`Jet2` stores the Taylor coefficients c_ab = (1/(a! b!)) dL^a dR^b F
of a complex scalar F at one expansion point, for all total orders a+b <= 3.
Arithmetic and elementary-function composition propagate every coefficient
exactly (to rounding), so first, second and third derivatives come out of a
single evaluation with no finite-difference error.

Coefficients live in a complex ndarray whose last axis has length 10; any
leading axes are batch axes broadcast numpy-style, which lets one expression
evaluation cover a whole grid of points at once.

Differentiation (:meth:`Jet2.deriv_l` / :meth:`Jet2.deriv_r`) shifts
coefficients down one order; the top-order coefficients of the result are
beyond the truncation and are zero-filled.  Callers must not consume more
orders than survive their chain of derivatives (three orders of the input
field cover every formula in this package).

The second half of the module works with small matrices whose entries are
jets, stored as numpy object arrays.  These carry the projector, the tangent
matrices and the moving-frame algebra.
"""

import numpy as np

from .errors import DivisionByZeroValue, DomainError

ORDER = 3

#: Monomial exponents (a, b) of xi_L^a xi_R^b in graded order.
MONOMIALS = tuple(
    (a, total - a) for total in range(ORDER + 1) for a in range(total, -1, -1)
)
NUM_COEFFS = len(MONOMIALS)
INDEX = {ab: i for i, ab in enumerate(MONOMIALS)}

#: Values (of divisors, sqrt/log arguments, ...) below this are singular.
EPSILON = 1e-12

#: Elementary functions accepted by :func:`apply_function`.
FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos", "tan",
             "sinh", "cosh", "tanh", "arctan")

# Sparse structure of the truncated product: triples (i, j, k) with
# monomial i * monomial j = monomial k, sorted by k so one reduceat call
# accumulates each output coefficient.
_TRIPLES = sorted(
    (INDEX[(a1 + a2, b1 + b2)], i, j)
    for i, (a1, b1) in enumerate(MONOMIALS)
    for j, (a2, b2) in enumerate(MONOMIALS)
    if (a1 + a2) + (b1 + b2) <= ORDER)
_MUL_K = np.array([t[0] for t in _TRIPLES])
_MUL_I = np.array([t[1] for t in _TRIPLES])
_MUL_J = np.array([t[2] for t in _TRIPLES])
_MUL_OFFSETS = np.searchsorted(_MUL_K, np.arange(NUM_COEFFS))
_MUL_GROUPS = tuple(
    tuple((i, j) for k2, i, j in _TRIPLES if k2 == k)
    for k in range(NUM_COEFFS))


def _mul_coeffs(x, y):
    # Two regimes: a fancy-index gather wins for near-scalar jets, while
    # large batches are memory-bound and prefer strided column sums.
    if x.size + y.size < 4000:
        prod = x[..., _MUL_I] * y[..., _MUL_J]
        return np.add.reduceat(prod, _MUL_OFFSETS, axis=-1)
    out = np.empty(np.broadcast_shapes(x.shape, y.shape), dtype=complex)
    for k, pairs in enumerate(_MUL_GROUPS):
        i0, j0 = pairs[0]
        acc = x[..., i0] * y[..., j0]
        for i, j in pairs[1:]:
            acc += x[..., i] * y[..., j]
        out[..., k] = acc
    return out


def _shift_table(axis):
    # Partial derivative as a coefficient shift with Taylor renormalization.
    dst, src, fac = [], [], []
    for i, (a, b) in enumerate(MONOMIALS):
        s = INDEX.get((a + 1, b) if axis == 0 else (a, b + 1))
        if s is not None:
            dst.append(i)
            src.append(s)
            fac.append((a + 1) if axis == 0 else (b + 1))
    return np.array(dst), np.array(src), np.array(fac, dtype=float)


_DL_DST, _DL_SRC, _DL_FAC = _shift_table(0)
_DR_DST, _DR_SRC, _DR_FAC = _shift_table(1)

_FACTORIALS = (1.0, 1.0, 2.0, 6.0)


def _is_plain_scalar(x):
    return isinstance(x, (int, float, complex, np.integer, np.floating,
                          np.complexfloating)) or (
        isinstance(x, np.ndarray) and x.dtype != object)


class Jet2:
    """Order-3 Taylor jet of a complex scalar in (xi_L, xi_R)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = coeffs

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs):
        """Build a jet from an explicit coefficient array (validated)."""
        c = np.asarray(coeffs, dtype=complex)
        if c.shape[-1:] != (NUM_COEFFS,):
            raise ValueError(f"coefficient axis must have length {NUM_COEFFS}")
        if not np.all(np.isfinite(c)):
            raise ValueError("jet coefficients must be finite")
        return cls(c.copy())

    @classmethod
    def constant(cls, value):
        """Jet of a constant; `value` may be a scalar or a batch array."""
        v = np.asarray(value, dtype=complex)
        c = np.zeros(v.shape + (NUM_COEFFS,), dtype=complex)
        c[..., 0] = v
        return cls(c)

    @classmethod
    def variable_l(cls, point_value):
        """Jet of the coordinate xi_L expanded at `point_value`."""
        v = np.asarray(point_value, dtype=complex)
        c = np.zeros(v.shape + (NUM_COEFFS,), dtype=complex)
        c[..., 0] = v
        c[..., INDEX[(1, 0)]] = 1.0
        return cls(c)

    @classmethod
    def variable_r(cls, point_value):
        """Jet of the coordinate xi_R expanded at `point_value`."""
        v = np.asarray(point_value, dtype=complex)
        c = np.zeros(v.shape + (NUM_COEFFS,), dtype=complex)
        c[..., 0] = v
        c[..., INDEX[(0, 1)]] = 1.0
        return cls(c)

    # -- accessors -----------------------------------------------------------

    @property
    def value(self):
        """Value coefficient c_00 (complex scalar or batch array)."""
        return self.coeffs[..., 0]

    @property
    def batch_shape(self):
        return self.coeffs.shape[:-1]

    def coeff(self, a, b):
        """Taylor coefficient c_ab."""
        return self.coeffs[..., INDEX[(a, b)]]

    def derivative(self, a, b):
        """Partial derivative dL^a dR^b F = a! b! c_ab."""
        return self.coeffs[..., INDEX[(a, b)]] * (_FACTORIALS[a] * _FACTORIALS[b])

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.coeffs + other.coeffs)
        if _is_plain_scalar(other):
            c = np.broadcast_arrays(
                self.coeffs, np.zeros(np.shape(other) + (1,)))[0].copy()
            c[..., 0] = c[..., 0] + other
            return Jet2(c)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.coeffs - other.coeffs)
        if _is_plain_scalar(other):
            return self + (-np.asarray(other))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return Jet2(_mul_coeffs(self.coeffs, other.coeffs))
        if _is_plain_scalar(other):
            return Jet2(self.coeffs * np.asarray(other)[..., None])
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        if _is_plain_scalar(other):
            arr = np.asarray(other)
            if np.any(np.abs(arr) < EPSILON):
                raise DivisionByZeroValue("division by a scalar below epsilon")
            return Jet2(self.coeffs / arr[..., None])
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_plain_scalar(other):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, exponent):
        """Integer power by repeated multiplication (negative allowed)."""
        if not isinstance(exponent, (int, np.integer)):
            raise TypeError("jet power requires an integer exponent")
        e = int(exponent)
        if e < 0:
            return self.reciprocal() ** (-e)
        out = Jet2.constant(np.ones(self.batch_shape))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def reciprocal(self):
        """Truncated geometric-series reciprocal 1/F."""
        v = self.value
        if np.any(np.abs(v) < EPSILON):
            raise DivisionByZeroValue("jet value coefficient below epsilon")
        u = Jet2(self.coeffs / v[..., None])
        u.coeffs[..., 0] = 0.0  # u = F/F(0) - 1 has zero constant term
        series = ((-u + 1.0) * u - 1.0) * u + 1.0
        return Jet2(series.coeffs / v[..., None])

    def conj(self):
        """Complex conjugate (commutes with the real-variable derivatives)."""
        return Jet2(np.conj(self.coeffs))

    @property
    def real(self):
        """Real part as a jet, (F + conj F)/2."""
        return Jet2(self.coeffs.real.astype(complex))

    @property
    def imag(self):
        """Imaginary part as a jet (a real-coefficient jet)."""
        return Jet2(self.coeffs.imag.astype(complex))

    # -- calculus ------------------------------------------------------------

    def deriv_l(self):
        """Jet of dF/dxi_L; top-order coefficients are zero-filled."""
        c = np.zeros_like(self.coeffs)
        c[..., _DL_DST] = self.coeffs[..., _DL_SRC] * _DL_FAC
        return Jet2(c)

    def deriv_r(self):
        """Jet of dF/dxi_R; top-order coefficients are zero-filled."""
        c = np.zeros_like(self.coeffs)
        c[..., _DR_DST] = self.coeffs[..., _DR_SRC] * _DR_FAC
        return Jet2(c)

    def __repr__(self):
        if self.batch_shape:
            return f"Jet2(batch {self.batch_shape}, value {self.value!r})"
        terms = ", ".join(f"c{a}{b}={self.coeffs[INDEX[(a, b)]]:.6g}"
                          for (a, b) in MONOMIALS
                          if abs(self.coeffs[INDEX[(a, b)]]) > 0)
        return f"Jet2({terms or '0'})"


# -- elementary functions ----------------------------------------------------

def _guard(v, fn, mask):
    if np.any(mask):
        raise DomainError(f"{fn} applied outside its domain")


def _d_exp(v):
    e = np.exp(v)
    return e, e, e, e


def _d_log(v):
    _guard(v, "log", np.abs(v) < EPSILON)
    return np.log(v), 1.0 / v, -1.0 / v ** 2, 2.0 / v ** 3


def _d_sqrt(v):
    _guard(v, "sqrt", np.abs(v) < EPSILON)
    s = np.sqrt(v)
    return s, 0.5 / s, -0.25 / (v * s), 0.375 / (v * v * s)


def _d_sin(v):
    s, c = np.sin(v), np.cos(v)
    return s, c, -s, -c


def _d_cos(v):
    s, c = np.sin(v), np.cos(v)
    return c, -s, -c, s


def _d_tan(v):
    _guard(v, "tan", np.abs(np.cos(v)) < EPSILON)
    t = np.tan(v)
    sec2 = 1.0 + t * t
    return t, sec2, 2.0 * t * sec2, 2.0 * sec2 * (sec2 + 2.0 * t * t)


def _d_sinh(v):
    s, c = np.sinh(v), np.cosh(v)
    return s, c, s, c


def _d_cosh(v):
    s, c = np.sinh(v), np.cosh(v)
    return c, s, c, s


def _d_tanh(v):
    t = np.tanh(v)
    m = 1.0 - t * t
    return t, m, -2.0 * t * m, m * (6.0 * t * t - 2.0)


def _d_arctan(v):
    w = 1.0 + v * v
    _guard(v, "arctan", np.abs(w) < EPSILON)
    return np.arctan(v), 1.0 / w, -2.0 * v / w ** 2, (6.0 * v * v - 2.0) / w ** 3


_FN_TABLE = {
    "exp": _d_exp, "log": _d_log, "sqrt": _d_sqrt,
    "sin": _d_sin, "cos": _d_cos, "tan": _d_tan,
    "sinh": _d_sinh, "cosh": _d_cosh, "tanh": _d_tanh,
    "arctan": _d_arctan,
}


def apply_function(fn, x):
    """Compose an elementary function with a jet.

    Univariate Taylor composition through order 3: with d = x - x(0),
    fn(x) = f0 + f1 d + (f2/2) d^2 + (f3/6) d^3 where fk is the k-th
    derivative of `fn` at the value coefficient.
    """
    if fn not in _FN_TABLE:
        raise DomainError(f"unknown elementary function '{fn}'")
    f0, f1, f2, f3 = _FN_TABLE[fn](np.asarray(x.value, dtype=complex))
    delta = Jet2(x.coeffs.copy())
    delta.coeffs[..., 0] = 0.0
    # Horner form over the nilpotent increment.
    out = (Jet2.constant(f3 / 6.0) * delta + f2 / 2.0) * delta + f1
    out = out * delta + f0
    if not np.all(np.isfinite(out.coeffs)):
        raise DomainError(f"{fn} produced non-finite jet coefficients")
    return out


# Spec-level operation aliases.
def jet_add(x, y):
    return x + y


def jet_mul(x, y):
    return x * y


def jet_div(x, y):
    return x / y


def jet_conj(x):
    return x.conj()


jet_apply = apply_function


# -- matrices of jets --------------------------------------------------------
#
# A "jet matrix" is a numpy object array of shape (n, m) holding Jet2 entries
# (all with a common batch shape).  Loops are over the small matrix axes; the
# per-entry coefficient arithmetic is vectorized.

def mat_from_constant(values):
    """Jet matrix of a constant complex matrix."""
    values = np.asarray(values, dtype=complex)
    out = np.empty(values.shape, dtype=object)
    for idx in np.ndindex(values.shape):
        out[idx] = Jet2.constant(values[idx])
    return out


def mat_identity(n):
    return mat_from_constant(np.eye(n))


def mat_mul(a, b):
    """Matrix product of two jet matrices."""
    n, m = a.shape
    m2, k = b.shape
    if m != m2:
        raise ValueError("jet matrix shapes do not align")
    out = np.empty((n, k), dtype=object)
    for i in range(n):
        for j in range(k):
            acc = a[i, 0] * b[0, j]
            for l in range(1, m):
                acc = acc + a[i, l] * b[l, j]
            out[i, j] = acc
    return out


def mat_scale(a, s):
    """Multiply every entry by a jet or scalar."""
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        out[idx] = a[idx] * s
    return out


def mat_dagger(a):
    """Conjugate transpose."""
    n, m = a.shape
    out = np.empty((m, n), dtype=object)
    for i in range(n):
        for j in range(m):
            out[j, i] = a[i, j].conj()
    return out


def mat_commutator(a, b):
    return mat_mul(a, b) - mat_mul(b, a)


def mat_deriv_l(a):
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        out[idx] = a[idx].deriv_l()
    return out


def mat_deriv_r(a):
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        out[idx] = a[idx].deriv_r()
    return out


def mat_trace(a):
    n = a.shape[0]
    acc = a[0, 0]
    for i in range(1, n):
        acc = acc + a[i, i]
    return acc


def mat_value(a):
    """Value coefficients as a plain complex array, batch axes leading."""
    n, m = a.shape
    batch = a[0, 0].batch_shape
    out = np.empty(batch + (n, m), dtype=complex)
    for i in range(n):
        for j in range(m):
            out[..., i, j] = a[i, j].value
    return out


def su_inner(a, b):
    """Scalar product (A, B) = -tr(AB)/2 on su(N), as a jet."""
    n, m = a.shape
    acc = None
    for i in range(n):
        for l in range(m):
            term = a[i, l] * b[l, i]
            acc = term if acc is None else acc + term
    return acc * (-0.5)


def su_inner_value(a, b):
    """Scalar product of plain su(N) value matrices (real part returned)."""
    return -0.5 * np.trace(np.asarray(a) @ np.asarray(b)).real


def su_norm_value(a):
    v = su_inner_value(a, a)
    return np.sqrt(max(v, 0.0))
