"""Surface construction: tangent form, metric, curvature, path integration.

The tangent matrices are X_L = [dL P, P] and X_R = -[dR P, P]; on solutions
the su(N)-valued 1-form X_L dxi_L + X_R dxi_R is closed, and the surface is
recovered by path integration from a base point (Weierstrass-type
immersion).  The induced metric comes straight from the field, and the
Gaussian curvature from an exact jet evaluation of the curvature formula
for metrics whose diagonal entries are single-coordinate functions (which
the conservation laws guarantee on solutions).
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import jets, model
from .errors import (DegeneratePoint, QuadratureNonConvergence,
                     SingularPathPoint, ZeroJL)
from .jets import EPSILON, Jet2
from .solution import eval_field


def su_violation(m):
    """Deviation of a value matrix from su(N): max of |M + M^dag| and |tr M|."""
    m = np.asarray(m)
    anti = np.abs(m + np.swapaxes(m, -1, -2).conj()).max()
    tr = np.abs(np.trace(m, axis1=-2, axis2=-1)).max()
    return max(anti, tr)


@dataclass(frozen=True)
class TangentPair:
    """Jet-valued tangent matrices of the immersion."""

    x_l: np.ndarray  # object array of jets, X_L = [dL P, P]
    x_r: np.ndarray  # object array of jets, X_R = -[dR P, P]

    def values(self):
        return jets.mat_value(self.x_l), jets.mat_value(self.x_r)


def tangent_form(f):
    """Tangent pair from a field jet; |f| > 0 required."""
    p = model.projector(f).mat
    pl = jets.mat_deriv_l(p)
    pr = jets.mat_deriv_r(p)
    x_l = jets.mat_commutator(pl, p)
    x_r = jets.mat_scale(jets.mat_commutator(pr, p), -1.0)
    return TangentPair(x_l=x_l, x_r=x_r)


def closedness_residual(f):
    """Frobenius norm of dR X_L - dL X_R at the values (0 on solutions)."""
    t = tangent_form(f)
    d = jets.mat_value(jets.mat_deriv_r(t.x_l) - jets.mat_deriv_l(t.x_r))
    return np.sqrt((np.abs(d) ** 2).sum(axis=(-2, -1)))


# -- induced metric and regularity ---------------------------------------------

class Regularity(enum.Enum):
    REGULAR = "Regular"
    DEGENERATE_CONDITIONS_VIOLATED = "DegenerateConditionsViolated"
    POSITIVE_SEMIDEFINITE_BOUNDARY = "PositiveSemidefiniteBoundary"


@dataclass(frozen=True)
class MetricSample:
    j_l: float
    g_lr: float
    j_r: float
    det_g: float
    regularity: object  # Regularity, or an object array of them when batched


@dataclass(frozen=True)
class RegularityReport:
    regularity: object
    det_g: float
    det_g_tol: float
    im_cross: float          # Im(dLf^dag P dRf), raw
    min_singular_value: float  # of the N x 3 column matrix (dLf, dRf, f)
    rank_tol: float
    posdef1: object          # bool or bool array
    posdef2: object


def default_det_g_tol(j_l, j_r):
    """Scale-aware degeneracy threshold for det G."""
    return 1e-9 * (1.0 + j_l + j_r) ** 2


def metric_jets(f):
    """(J_L, G_LR, J_R) as real jets."""
    s = model.field_norm_sq(f)
    inv_s = s.reciprocal()
    p = model.projector(f).mat
    fl = [c.deriv_l() for c in f.components]
    fr = [c.deriv_r() for c in f.components]
    j_l = (model.bilinear(p, fl, fl) * inv_s).real
    j_r = (model.bilinear(p, fr, fr) * inv_s).real
    g_lr = -(model.bilinear(p, fr, fl) * inv_s).real
    return j_l, g_lr, j_r


def metric_values(f):
    """Plain arrays (j_l, g_lr, j_r, det_g, cross) from the field values.

    `cross` is the complex scalar dLf^dag P dRf whose imaginary part feeds
    the first sufficient positivity condition.
    """
    s = model.field_norm_sq(f).value.real
    p = model.projector_values(f)
    fl = f.derivatives(1, 0)
    fr = f.derivatives(0, 1)
    p_fr = np.einsum("...ij,...j->...i", p, fr)
    p_fl = np.einsum("...ij,...j->...i", p, fl)
    j_l = (np.sum(fl.conj() * p_fl, axis=-1) / s).real
    j_r = (np.sum(fr.conj() * p_fr, axis=-1) / s).real
    cross = np.sum(fl.conj() * p_fr, axis=-1)
    g_lr = -(cross / s).real
    det_g = j_l * j_r - g_lr ** 2
    return j_l, g_lr, j_r, det_g, cross


def classify_regularity(f, det_g_tol=None, rank_tol_factor=1e-8):
    """Regularity flag plus the diagnostics behind it.

    Regular iff det G exceeds the tolerance.  At degenerate points the two
    sufficient positivity conditions are evaluated: a nonzero imaginary
    part of dLf^dag P dRf, and linear independence of (dLf, dRf, f)
    measured by the smallest singular value of the stacked column matrix.
    """
    j_l, g_lr, j_r, det_g, cross = metric_values(f)
    if det_g_tol is None:
        det_g_tol = default_det_g_tol(j_l, j_r)
    cols = np.stack([f.derivatives(1, 0), f.derivatives(0, 1), f.values()],
                    axis=-1)
    svals = np.linalg.svd(cols, compute_uv=False)
    min_sv = svals[..., -1] if f.n >= 3 else np.zeros_like(det_g)
    col_scale = np.linalg.norm(cols, axis=-2).max(axis=-1)
    rank_tol = rank_tol_factor * col_scale
    s = model.field_norm_sq(f).value.real
    im_tol = 1e-10 * (1.0 + np.abs(cross) / s)
    posdef1 = np.abs(cross.imag) > im_tol * s
    posdef2 = min_sv > rank_tol
    regular = det_g > det_g_tol
    flags = np.where(regular, Regularity.REGULAR,
                     np.where(posdef1 | posdef2,
                              Regularity.POSITIVE_SEMIDEFINITE_BOUNDARY,
                              Regularity.DEGENERATE_CONDITIONS_VIOLATED))
    if flags.ndim == 0:
        flags = flags.item()
    return RegularityReport(
        regularity=flags, det_g=det_g, det_g_tol=det_g_tol,
        im_cross=cross.imag, min_singular_value=min_sv, rank_tol=rank_tol,
        posdef1=posdef1, posdef2=posdef2)


def induced_metric(f, det_g_tol=None):
    """Metric sample with its regularity classification.

    Field formulas only; `metric_from_traces` provides the independent
    trace-based evaluation for cross-checks.
    """
    j_l, g_lr, j_r, det_g, _ = metric_values(f)
    report = classify_regularity(f, det_g_tol=det_g_tol)
    return MetricSample(j_l=j_l, g_lr=g_lr, j_r=j_r, det_g=det_g,
                        regularity=report.regularity)


def metric_from_traces(f):
    """(J_L, G_LR, J_R) via the su(N) scalar products of the tangents."""
    x_l, x_r = tangent_form(f).values()
    def sip(a, b):
        return -0.5 * np.einsum("...ij,...ji->...", a, b).real
    return sip(x_l, x_l), sip(x_l, x_r), sip(x_r, x_r)


# -- Gaussian curvature ----------------------------------------------------------

def _masked_fill(jet, keep, fill):
    c = jet.coeffs.copy()
    c[~keep] = 0.0
    c[~keep, 0] = fill
    return Jet2(c)


def gaussian_curvature(f, det_g_tol=None):
    """Gaussian curvature at a regular point, all derivatives from jets.

    K = (1/sqrt(det G)) dR[(dL G_LR - (1/2) G_LR dL ln J_L)/sqrt(det G)].
    Raises DegeneratePoint below the det G tolerance and ZeroJL when the
    logarithmic derivative is unavailable.
    """
    j_l, g_lr, j_r, det_g, _ = metric_values(f)
    tol = default_det_g_tol(j_l, j_r) if det_g_tol is None else det_g_tol
    if np.any(det_g <= tol):
        raise DegeneratePoint(f"det G = {np.min(det_g):.3e} at or below tolerance")
    if np.any(j_l <= EPSILON):
        raise ZeroJL("J_L vanishes; curvature formula needs ln J_L")
    return _curvature_from_jets(f)


def _curvature_from_jets(f):
    j_l, g_lr, j_r = metric_jets(f)
    det_g = j_l * j_r - g_lr * g_lr
    sqrt_det = jets.apply_function("sqrt", det_g)
    ln_jl = jets.apply_function("log", j_l)
    inner = (g_lr.deriv_l() - 0.5 * g_lr * ln_jl.deriv_l()) / sqrt_det
    return (inner.deriv_r().value / sqrt_det.value).real


def curvature_grid(f, det_g_tol=None):
    """Batched curvature with NaN at degenerate points.

    Returns (K, regular_mask); no exception for degenerate entries, so one
    batched call can cover a mixed grid.
    """
    j_l, g_lr_v, j_r, det_g, _ = metric_values(f)
    tol = default_det_g_tol(j_l, j_r) if det_g_tol is None else det_g_tol
    mask = (det_g > tol) & (j_l > EPSILON)
    mask = np.asarray(mask)
    j_l_j, g_lr, j_r_j = metric_jets(f)
    det_jet = j_l_j * j_r_j - g_lr * g_lr
    det_safe = _masked_fill(det_jet, mask, 1.0)
    jl_safe = _masked_fill(j_l_j, mask, 1.0)
    sqrt_det = jets.apply_function("sqrt", det_safe)
    ln_jl = jets.apply_function("log", jl_safe)
    inner = (g_lr.deriv_l() - 0.5 * g_lr * ln_jl.deriv_l()) / sqrt_det
    k = (inner.deriv_r().value / sqrt_det.value).real
    k = np.where(mask, k, np.nan)
    return k, mask


# -- Weierstrass integration -----------------------------------------------------

_SIMPSON_CACHE = {}

#: Nodes evaluated per batched field call; keeps temporaries cache-friendly.
_EVAL_CHUNK = 40000


def _simpson_weights(panels):
    if panels not in _SIMPSON_CACHE:
        w = np.ones(panels + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        _SIMPSON_CACHE[panels] = w / 3.0
    return _SIMPSON_CACHE[panels]


def _halved_weights(panels):
    # Simpson weights of the panels/2 rule expressed on the fine node grid.
    key = ("half", panels)
    if key not in _SIMPSON_CACHE:
        w = np.zeros(panels + 1)
        w[::2] = 2.0 * _simpson_weights(panels // 2)
        _SIMPSON_CACHE[key] = w
    return _SIMPSON_CACHE[key]


def tangent_values_at(spec, xi_l, xi_r):
    """(X_L, X_R, det_g, det_g_tol) values at a batch of points."""
    f = eval_field(spec, (np.asarray(xi_l, float), np.asarray(xi_r, float)))
    s = model.field_norm_sq(f).value.real
    p = model.projector_values(f)
    fv = f.values()
    j_l, g_lr, j_r, det_g, _ = metric_values(f)
    def m_mat(df):
        u = np.einsum("...ij,...j->...i", p, df)
        return (u[..., :, None] * fv.conj()[..., None, :]
                - fv[..., :, None] * u.conj()[..., None, :]) / s[..., None, None]
    x_l = m_mat(f.derivatives(1, 0))
    x_r = -m_mat(f.derivatives(0, 1))
    return x_l, x_r, det_g, default_det_g_tol(j_l, j_r)


def _tangent_values_chunked(spec, xi_l, xi_r):
    n_pts = xi_l.size
    if n_pts <= _EVAL_CHUNK:
        return tangent_values_at(spec, xi_l, xi_r)
    parts = [tangent_values_at(spec, xi_l[i:i + _EVAL_CHUNK],
                               xi_r[i:i + _EVAL_CHUNK])
             for i in range(0, n_pts, _EVAL_CHUNK)]
    return tuple(np.concatenate([p[k] for p in parts]) for k in range(4))


def _leg_nodes(t0, t1, panels):
    # t0/t1 arrays of edge endpoints -> (n_edges, panels+1) node matrix
    frac = np.linspace(0.0, 1.0, panels + 1)
    return t0[:, None] + (t1 - t0)[:, None] * frac[None, :]


def _edge_values(spec, axis, fixed, t0, t1, panels, require_regular):
    """Tangent values on all Simpson nodes: (n_edges, panels+1, N, N)."""
    nodes = _leg_nodes(t0, t1, panels)
    fix = np.repeat(fixed[:, None], panels + 1, axis=1)
    if axis == "l":
        pts = (nodes.ravel(), fix.ravel())
    else:
        pts = (fix.ravel(), nodes.ravel())
    x_l, x_r, det_g, tol = _tangent_values_chunked(spec, pts[0], pts[1])
    if require_regular and np.any(det_g <= tol):
        i = int(np.argmin(det_g - tol))
        raise SingularPathPoint(
            f"det G = {det_g.ravel()[i]:.3e} on path at (xi_L, xi_R) = "
            f"({pts[0][i]:.6g}, {pts[1][i]:.6g})")
    integrand = x_l if axis == "l" else x_r
    n = integrand.shape[-1]
    return integrand.reshape(t0.shape[0], panels + 1, n, n)


def _edge_integrals(spec, axis, fixed, t0, t1, panels, require_regular,
                    with_coarse=False):
    """Composite-Simpson integrals of the tangent matrix over edges.

    `axis` is "l" (integrate X_L over xi_L) or "r"; `fixed` holds the other
    coordinate per edge.  With `with_coarse` the half-panel-count result is
    assembled from the same node values (no extra field evaluations) for
    Richardson error estimates.
    """
    t0 = np.atleast_1d(np.asarray(t0, float))
    t1 = np.atleast_1d(np.asarray(t1, float))
    fixed = np.broadcast_to(np.asarray(fixed, float), t0.shape)
    vals = _edge_values(spec, axis, fixed, t0, t1, panels, require_regular)
    h = ((t1 - t0) / panels)[:, None, None]
    fine = h * np.einsum("k,ekij->eij", _simpson_weights(panels), vals)
    if not with_coarse:
        return fine
    coarse = h * np.einsum("k,ekij->eij", _halved_weights(panels), vals)
    return fine, coarse


def _refined_edges(spec, axis, fixed, t0, t1, panels, tol, max_panels,
                   require_regular):
    panels = max(4, panels + (-panels) % 4)  # multiple of 4 for halving
    while True:
        fine, coarse = _edge_integrals(spec, axis, fixed, t0, t1, panels,
                                       require_regular, with_coarse=True)
        err = np.abs(fine - coarse).max() / 15.0
        scale = 1.0 + np.abs(fine).max()
        if err <= tol * scale:
            return fine, panels, err
        panels *= 2
        if panels > max_panels:
            raise QuadratureNonConvergence(
                f"Simpson refinement stalled at {panels // 2} panels "
                f"(error estimate {err:.3e})")


def integrate_to(spec, base, target, panels=64, tol=1e-9, max_panels=4096,
                 require_regular=True, adaptive=True, order="lr"):
    """Immersion X at a single target, X(base) = 0.

    Axis-aligned staircase: with order "lr" the xi_L leg runs first at the
    base xi_R, then the xi_R leg at the target xi_L ("rl" swaps the legs;
    on solutions the result is path-independent).
    """
    b_l, b_r = float(base[0]), float(base[1])
    t_l, t_r = float(target[0]), float(target[1])
    legs = []
    if order == "lr":
        legs.append(("l", b_r, b_l, t_l))
        legs.append(("r", t_l, b_r, t_r))
    elif order == "rl":
        legs.append(("r", b_l, b_r, t_r))
        legs.append(("l", t_r, b_l, t_l))
    else:
        raise ValueError("order must be 'lr' or 'rl'")
    total = None
    for axis, fixed, t0, t1 in legs:
        if t0 == t1:
            continue
        if adaptive:
            val, _, _ = _refined_edges(spec, axis, [fixed], [t0], [t1],
                                       panels, tol, max_panels, require_regular)
        else:
            val = _edge_integrals(spec, axis, [fixed], [t0], [t1], panels,
                                  require_regular)
        total = val[0] if total is None else total + val[0]
    if total is None:
        f = eval_field(spec, (b_l, b_r))
        total = np.zeros((f.n, f.n), dtype=complex)
    return total


@dataclass(frozen=True)
class ImmersionGrid:
    xi_l: np.ndarray     # (n_l,) node coordinates
    xi_r: np.ndarray     # (n_r,)
    x: np.ndarray        # (n_l, n_r, N, N) su(N) immersion values
    base_index: tuple
    panels: int
    error_estimate: float


def integrate_grid(spec, xi_l, xi_r, base_index=(0, 0), panels=4, tol=1e-9,
                   max_panels=256, require_regular=True, adaptive=True):
    """Immersion over a full rectangular grid, X = 0 at the base node.

    One cumulative xi_L pass along the base row, then cumulative xi_R
    passes up and down every column; each cell edge gets a composite
    Simpson integral, refined globally until the Richardson estimate meets
    the tolerance.  Reusing the row endpoints keeps the cost linear in the
    number of cells (exactness of the form makes the path choice free).
    """
    xi_l = np.asarray(xi_l, dtype=float)
    xi_r = np.asarray(xi_r, dtype=float)
    n_l, n_r = xi_l.size, xi_r.size
    i0, j0 = base_index
    if not (0 <= i0 < n_l and 0 <= j0 < n_r):
        raise ValueError("base index outside the grid")
    nn = eval_field(spec, (float(xi_l[0]), float(xi_r[0]))).n

    def edges(axis, fixed, t0, t1):
        if adaptive:
            return _refined_edges(spec, axis, fixed, t0, t1, panels, tol,
                                  max_panels, require_regular)
        return (_edge_integrals(spec, axis, fixed, t0, t1, panels,
                                require_regular), panels, 0.0)

    worst_err = 0.0
    panels_used = panels
    x = np.zeros((n_l, n_r, nn, nn), dtype=complex)
    # Row pass at xi_R = xi_r[j0].
    if n_l > 1:
        row_int, panels_used, err = edges("l", np.full(n_l - 1, xi_r[j0]),
                                          xi_l[:-1], xi_l[1:])
        worst_err = max(worst_err, err)
        for i in range(i0 + 1, n_l):
            x[i, j0] = x[i - 1, j0] + row_int[i - 1]
        for i in range(i0 - 1, -1, -1):
            x[i, j0] = x[i + 1, j0] - row_int[i]
    # Column passes, all columns in one batched call.
    if n_r > 1:
        fixed = np.repeat(xi_l, n_r - 1)
        col_int, panels_used, err = edges("r", fixed, np.tile(xi_r[:-1], n_l),
                                          np.tile(xi_r[1:], n_l))
        worst_err = max(worst_err, err)
        col_int = col_int.reshape(n_l, n_r - 1, nn, nn)
        for j in range(j0 + 1, n_r):
            x[:, j] = x[:, j - 1] + col_int[:, j - 1]
        for j in range(j0 - 1, -1, -1):
            x[:, j] = x[:, j + 1] - col_int[:, j]
    return ImmersionGrid(xi_l=xi_l, xi_r=xi_r, x=x, base_index=(i0, j0),
                         panels=panels_used, error_estimate=worst_err)
