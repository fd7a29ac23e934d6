"""Moving frames in su(N): basis, rotation cascade, normals, structure data.

The frame at a regular point consists of the two tangent matrices plus
N^2 - 3 orthonormal normals.  A unitary cascade built from the field value
rotates the problem so the tangents occupy a known block; Gram-Schmidt over
that block produces the first normals, the remaining basis elements pass
through untouched, and everything is conjugated back.  Because the cascade
is a smooth function of the field, the whole construction runs on jets,
which gives the xi-derivatives of the normals (and hence the full
structure matrices of the frame's first-order system) without finite
differences.
"""

from dataclasses import dataclass

import numpy as np

from . import jets, model
from .errors import (DegeneratePoint, GramSchmidtRankDeficiency,
                     LinearSolveFailure, OddPanelCount, SingularGridPoint,
                     VanishingCommutator, ZeroField)
from .immersion import (Regularity, classify_regularity, default_det_g_tol,
                        metric_values, tangent_form)
from .jets import EPSILON, Jet2
from .solution import eval_field

#: Residual-to-input norm ratio below which a Gram-Schmidt candidate is
#: discarded as linearly dependent.
GS_DISCARD = 1e-8


def su_basis(n):
    """Orthonormal su(n) basis as (label, matrix) pairs.

    Order: A_jk, B_jk interleaved over pairs (j,k) in lexicographic order,
    then the diagonal C_p elements.  Orthonormal under (A,B) = -tr(AB)/2.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    elems = []
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            a = np.zeros((n, n), dtype=complex)
            a[j - 1, k - 1] = 1j
            a[k - 1, j - 1] = 1j
            b = np.zeros((n, n), dtype=complex)
            b[j - 1, k - 1] = 1.0
            b[k - 1, j - 1] = -1.0
            elems.append((f"A_{j}{k}", a))
            elems.append((f"B_{j}{k}", b))
    for p in range(1, n):
        c = np.zeros((n, n), dtype=complex)
        scale = 1j * np.sqrt(2.0 / (p * (p + 1)))
        for d in range(p):
            c[d, d] = scale
        c[p, p] = -p * scale
        elems.append((f"C_{p}", c))
    return elems


def su_coordinates(x, basis=None):
    """Coordinates of an su(N) value matrix in the ordered basis."""
    x = np.asarray(x)
    n = x.shape[-1]
    if basis is None:
        basis = su_basis(n)
    return np.stack(
        [-0.5 * np.einsum("...ij,ji->...", x, e).real for _, e in basis],
        axis=-1)


# -- unitary cascade -------------------------------------------------------------

def _safe_sqrt(x):
    """Jet sqrt that treats an (identically) vanishing argument as zero."""
    if np.abs(x.value) < EPSILON:
        return Jet2.constant(np.zeros(x.batch_shape))
    return jets.apply_function("sqrt", x)


def _phi_dagger_jets(f):
    """Jet-valued Phi^dag with Phi^dag f = (|f|, 0, ..., 0)^T.

    Cascade of 2x2 block rotations; a block whose denominator vanishes is
    replaced by the identity.
    """
    n = f.n
    comps = f.components
    # r2[k] = sum_{j >= k} |f_j|^2 (1-based), as real jets
    r2 = [None] * (n + 2)
    acc = Jet2.constant(np.zeros(f.batch_shape))
    for k in range(n, 0, -1):
        acc = acc + (comps[k - 1].conj() * comps[k - 1]).real
        r2[k] = acc
    r2[n + 1] = Jet2.constant(np.zeros(f.batch_shape))
    acc_mat = None
    for k in range(n - 1, 0, -1):
        if np.abs(r2[k].value) < EPSILON:
            continue  # vanishing denominator: identity factor
        inv_rk = _safe_sqrt(r2[k]).reciprocal()
        block = jets.mat_identity(n)
        if k == n - 1:
            # first step uses the raw last two components
            block[k - 1, k - 1] = comps[k - 1].conj() * inv_rk
            block[k - 1, k] = comps[k].conj() * inv_rk
            block[k, k - 1] = -(comps[k] * inv_rk)
            block[k, k] = comps[k - 1] * inv_rk
        else:
            # later steps see the accumulated modulus in slot k+1
            r_next = _safe_sqrt(r2[k + 1])
            block[k - 1, k - 1] = comps[k - 1].conj() * inv_rk
            block[k - 1, k] = r_next * inv_rk
            block[k, k - 1] = -(r_next * inv_rk)
            block[k, k] = comps[k - 1] * inv_rk
        acc_mat = block if acc_mat is None else jets.mat_mul(block, acc_mat)
    if acc_mat is None:
        acc_mat = jets.mat_identity(n)
    return acc_mat


def build_phi(f0):
    """SU(N) cascade element for a plain vector f0 (values only)."""
    f0 = np.asarray(f0, dtype=complex)
    if np.linalg.norm(f0) < EPSILON:
        raise ZeroField("cascade needs a nonzero vector")
    comps = tuple(Jet2.constant(c) for c in f0)

    class _Vec:
        n = f0.size
        components = comps
        batch_shape = ()

    phi_dag = jets.mat_value(_phi_dagger_jets(_Vec()))
    return phi_dag.conj().T


# -- frame construction ----------------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """Tangents plus orthonormal normals at one point (values and jets)."""

    point: tuple
    x_l: np.ndarray          # value matrices
    x_r: np.ndarray
    normals: tuple           # value matrices
    labels: tuple            # basis origin of each normal ("~" = reorthogonalized)
    phi: np.ndarray          # value of the cascade unitary
    x_l_jet: np.ndarray      # jet matrices backing the derivatives
    x_r_jet: np.ndarray
    normal_jets: tuple

    @property
    def n(self):
        return self.x_l.shape[0]

    def tau(self):
        """Frame members in system order: tangents then normals."""
        return (self.x_l, self.x_r) + self.normals

    def tau_jets(self):
        return (self.x_l_jet, self.x_r_jet) + self.normal_jets


def _gram_schmidt_jets(candidates, n):
    """Orthonormalize jet matrices; returns the accepted (index, jet) list."""
    ortho = []
    accepted = []
    for idx, cand in enumerate(candidates):
        w = cand
        for e in ortho:
            coef = jets.su_inner(e, w)
            w = w - jets.mat_scale(e, coef)
        norm2 = jets.su_inner(w, w).real
        input2 = jets.su_inner(cand, cand).real.value.real
        if norm2.value.real <= (GS_DISCARD ** 2) * max(input2, EPSILON):
            if idx < 2:
                raise DegeneratePoint(
                    "tangent matrices are linearly dependent")
            continue
        inv_norm = jets.apply_function("sqrt", norm2).reciprocal()
        e = jets.mat_scale(w, inv_norm)
        ortho.append(e)
        if idx >= 2:
            accepted.append((idx, e))
    if len(accepted) != 2 * (n - 1) - 2:
        raise GramSchmidtRankDeficiency(
            f"expected {2 * (n - 1) - 2} reorthogonalized normals, "
            f"got {len(accepted)}")
    return accepted


def build_frame(f, det_g_tol=None):
    """Moving frame at a regular point (unbatched field jets only)."""
    if f.batch_shape != ():
        raise ValueError("build_frame needs an unbatched field jet")
    report = classify_regularity(f, det_g_tol=det_g_tol)
    if report.regularity is not Regularity.REGULAR:
        raise DegeneratePoint(
            f"point is {report.regularity.value} (det G = {report.det_g:.3e})")
    n = f.n
    t = tangent_form(f)
    phi_dag = _phi_dagger_jets(f)
    phi_mat = jets.mat_dagger(phi_dag)
    xl_rot = jets.mat_mul(phi_dag, jets.mat_mul(t.x_l, phi_mat))
    xr_rot = jets.mat_mul(phi_dag, jets.mat_mul(t.x_r, phi_mat))
    basis = su_basis(n)
    first_block = basis[:2 * (n - 1)]   # the A_1j / B_1j pairs
    rest = basis[2 * (n - 1):]
    candidates = [xl_rot, xr_rot] + [jets.mat_from_constant(m)
                                     for _, m in first_block]
    accepted = _gram_schmidt_jets(candidates, n)
    normal_jets = []
    labels = []
    for idx, e in accepted:
        label, _ = first_block[idx - 2]
        labels.append(label + "~")
        normal_jets.append(jets.mat_mul(phi_mat, jets.mat_mul(e, phi_dag)))
    for label, m in rest:
        labels.append(label)
        normal_jets.append(
            jets.mat_mul(phi_mat, jets.mat_mul(jets.mat_from_constant(m),
                                               phi_dag)))
    return Frame(
        point=f.point,
        x_l=jets.mat_value(t.x_l), x_r=jets.mat_value(t.x_r),
        normals=tuple(jets.mat_value(nj) for nj in normal_jets),
        labels=tuple(labels),
        phi=jets.mat_value(phi_mat),
        x_l_jet=t.x_l, x_r_jet=t.x_r,
        normal_jets=tuple(normal_jets))


def normalization_table(f, frame):
    """Deviations from the frame normalization conditions.

    Returns a (2 + k) x (2 + k) matrix: entry (i, j) is the scalar product
    of frame members i and j minus its required value (metric block for the
    tangents, identity for the normals, zero across).
    """
    j_l, g_lr, j_r, _, _ = metric_values(f)
    members = frame.tau()
    m = len(members)
    expected = np.zeros((m, m))
    expected[:2, :2] = [[j_l, g_lr], [g_lr, j_r]]
    expected[2:, 2:] = np.eye(m - 2)
    table = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            table[i, j] = jets.su_inner_value(members[i], members[j])
    return table - expected


# -- structure matrices of the frame system --------------------------------------

@dataclass(frozen=True)
class GWData:
    """Coefficients of the first-order frame system dL tau = U tau,
    dR tau = V tau."""

    a_ll: float
    a_lr: float
    a_rl: float
    a_rr: float
    q_l: np.ndarray       # (k,) normal components of the LL second derivative
    q_r: np.ndarray
    h_mixed: np.ndarray   # (k,) normal components of the mixed second derivative
    alpha_l: np.ndarray
    beta_l: np.ndarray
    alpha_r: np.ndarray
    beta_r: np.ndarray
    s_l: np.ndarray       # (k, k), antisymmetric
    s_r: np.ndarray
    u: np.ndarray         # (2+k, 2+k)
    v: np.ndarray
    antisymmetry_violation: float


def second_derivative_values(f):
    """(dLL X, dLR X, dRR X) value matrices from the tangent jets."""
    t = tangent_form(f)
    x_ll = jets.mat_value(jets.mat_deriv_l(t.x_l))
    x_lr = jets.mat_value(jets.mat_deriv_r(t.x_l))
    x_rr = jets.mat_value(jets.mat_deriv_r(t.x_r))
    return x_ll, x_lr, x_rr


def _solve_tangential(g, rhs):
    try:
        sol = np.linalg.solve(g, rhs)
    except np.linalg.LinAlgError as exc:
        raise LinearSolveFailure(str(exc)) from exc
    if not np.all(np.isfinite(sol)):
        raise LinearSolveFailure("non-finite tangential coefficients")
    return sol


def gw_coefficients(f, frame):
    """Extract all structure coefficients by scalar-product projection."""
    j_l, g_lr, j_r, det_g, _ = metric_values(f)
    if det_g <= default_det_g_tol(j_l, j_r):
        raise DegeneratePoint("structure data needs det G above tolerance")
    x_ll, x_lr, x_rr = second_derivative_values(f)
    g = np.array([[j_l, g_lr], [g_lr, j_r]])
    sip = jets.su_inner_value
    a_l = _solve_tangential(g, [sip(frame.x_l, x_ll), sip(frame.x_r, x_ll)])
    a_r = _solve_tangential(g, [sip(frame.x_l, x_rr), sip(frame.x_r, x_rr)])
    normals = frame.normals
    k = len(normals)
    b_ll = x_ll - a_l[0] * frame.x_l - a_l[1] * frame.x_r
    b_rr = x_rr - a_r[0] * frame.x_l - a_r[1] * frame.x_r
    q_l = np.array([sip(b_ll, nj) for nj in normals])
    q_r = np.array([sip(b_rr, nj) for nj in normals])
    h_mixed = np.array([sip(x_lr, nj) for nj in normals])
    alpha_l = (h_mixed * g_lr - q_l * j_r) / det_g
    beta_l = (q_l * g_lr - h_mixed * j_l) / det_g
    alpha_r = (q_r * g_lr - h_mixed * j_r) / det_g
    beta_r = (h_mixed * g_lr - q_r * j_l) / det_g
    dl_n = [jets.mat_value(jets.mat_deriv_l(nj)) for nj in frame.normal_jets]
    dr_n = [jets.mat_value(jets.mat_deriv_r(nj)) for nj in frame.normal_jets]
    s_l = np.array([[sip(dl_n[i], normals[j]) for j in range(k)]
                    for i in range(k)])
    s_r = np.array([[sip(dr_n[i], normals[j]) for j in range(k)]
                    for i in range(k)])
    violation = max(np.abs(s_l + s_l.T).max(), np.abs(s_r + s_r.T).max())
    s_l = 0.5 * (s_l - s_l.T)
    s_r = 0.5 * (s_r - s_r.T)
    m = 2 + k
    u = np.zeros((m, m))
    v = np.zeros((m, m))
    u[0, :2] = a_l
    u[0, 2:] = q_l
    u[1, 2:] = h_mixed
    u[2:, 0] = alpha_l
    u[2:, 1] = beta_l
    u[2:, 2:] = s_l
    v[0, 2:] = h_mixed
    v[1, :2] = a_r
    v[1, 2:] = q_r
    v[2:, 0] = alpha_r
    v[2:, 1] = beta_r
    v[2:, 2:] = s_r
    return GWData(a_ll=a_l[0], a_lr=a_l[1], a_rl=a_r[0], a_rr=a_r[1],
                  q_l=q_l, q_r=q_r, h_mixed=h_mixed,
                  alpha_l=alpha_l, beta_l=beta_l,
                  alpha_r=alpha_r, beta_r=beta_r,
                  s_l=s_l, s_r=s_r, u=u, v=v,
                  antisymmetry_violation=violation)


def a_coefficients_closed_form(f):
    """Tangential coefficients from the explicit field formulas.

    Cross-check oracle for the projection route in `gw_coefficients`;
    returns ((a_ll, a_lr), (a_rl, a_rr)).
    """
    j_l, g_lr, j_r, det_g, _ = metric_values(f)
    s = model.field_norm_sq(f).value.real
    p = model.projector_values(f)
    fv = f.values()
    fl = f.derivatives(1, 0)
    fr = f.derivatives(0, 1)
    fll = f.derivatives(2, 0)
    frr = f.derivatives(0, 2)

    def bil(u, v):
        return np.sum(u.conj() * np.einsum("...ij,...j->...i", p, v), axis=-1)

    dlf_f = np.sum(fl.conj() * fv, axis=-1)
    f_dlf = np.sum(fv.conj() * fl, axis=-1)
    drf_f = np.sum(fr.conj() * fv, axis=-1)
    f_drf = np.sum(fv.conj() * fr, axis=-1)
    a_ll = ((j_r * bil(fl, fll) + g_lr * bil(fr, fll)) / s
            - 2.0 * dlf_f * bil(fl, fr) * g_lr / s ** 2
            - 2.0 * f_dlf * j_l * j_r / s).real / det_g
    a_lr = (-(j_l * bil(fr, fll) + g_lr * bil(fl, fll)) / s
            + 2.0 * dlf_f * bil(fl, fr) * j_l / s ** 2
            + 2.0 * f_dlf * j_l * g_lr / s).real / det_g
    a_rr = ((j_l * bil(fr, frr) + g_lr * bil(fl, frr)) / s
            - 2.0 * drf_f * bil(fr, fl) * g_lr / s ** 2
            - 2.0 * f_drf * j_r * j_l / s).real / det_g
    a_rl = (-(j_r * bil(fl, frr) + g_lr * bil(fr, frr)) / s
            + 2.0 * drf_f * bil(fr, fl) * j_r / s ** 2
            + 2.0 * f_drf * j_r * g_lr / s).real / det_g
    return (a_ll, a_lr), (a_rl, a_rr)


def gw_reconstruction_residual(f, frame, gw=None):
    """Rowwise Frobenius residuals of dL tau = U tau and dR tau = V tau."""
    if gw is None:
        gw = gw_coefficients(f, frame)
    members = frame.tau()
    member_jets = frame.tau_jets()
    res_l, res_r = [], []
    for i, mj in enumerate(member_jets):
        dl = jets.mat_value(jets.mat_deriv_l(mj))
        dr = jets.mat_value(jets.mat_deriv_r(mj))
        rec_l = sum(gw.u[i, j] * members[j] for j in range(len(members)))
        rec_r = sum(gw.v[i, j] * members[j] for j in range(len(members)))
        res_l.append(np.linalg.norm(dl - rec_l))
        res_r.append(np.linalg.norm(dr - rec_r))
    return np.array(res_l), np.array(res_r)


def gauss_codazzi_residual(spec, point, h=1e-3, det_g_tol=None):
    """Compatibility residual |dR U - dL V + [U, V]|_F by central differences.

    The structure matrices themselves come from exact jet data; only the
    outer derivative is finite-differenced, so the residual decays as h^2
    on solutions.
    """
    xi_l, xi_r = float(point[0]), float(point[1])

    def uv_at(pl, pr):
        f = eval_field(spec, (pl, pr))
        frame = build_frame(f, det_g_tol=det_g_tol)
        gw = gw_coefficients(f, frame)
        return gw.u, gw.v

    u_c, v_c = uv_at(xi_l, xi_r)
    _, v_lp = uv_at(xi_l + h, xi_r)
    _, v_lm = uv_at(xi_l - h, xi_r)
    u_rp, _ = uv_at(xi_l, xi_r + h)
    u_rm, _ = uv_at(xi_l, xi_r - h)
    du_r = (u_rp - u_rm) / (2.0 * h)
    dv_l = (v_lp - v_lm) / (2.0 * h)
    resid = du_r - dv_l + u_c @ v_c - v_c @ u_c
    return np.linalg.norm(resid)


# -- curvature objects -----------------------------------------------------------

def second_fundamental_form(f, frame):
    """Coefficient matrices (LL, LR, RR) of the normal-valued quadratic form.

    The LR entry appears with weight 2 in the form itself; all three are
    orthogonal to the tangent plane at solution points.
    """
    gw = gw_coefficients(f, frame)
    x_ll, x_lr, x_rr = second_derivative_values(f)
    b_ll = x_ll - gw.a_ll * frame.x_l - gw.a_lr * frame.x_r
    b_rr = x_rr - gw.a_rl * frame.x_l - gw.a_rr * frame.x_r
    return b_ll, x_lr, b_rr


@dataclass(frozen=True)
class MeanCurvature:
    matrix: np.ndarray
    scalar: float | None  # against the single normal when N = 2


def mean_curvature(f, frame):
    """Mean curvature vector (half the metric trace of the second form).

    The closed-form CP^1 example value and the CP^1 shortcut formula both
    correspond to this classical normalization.
    """
    j_l, g_lr, j_r, det_g, _ = metric_values(f)
    b_ll, x_lr, b_rr = second_fundamental_form(f, frame)
    h = (j_r * b_ll - 2.0 * g_lr * x_lr + j_l * b_rr) / (2.0 * det_g)
    scalar = None
    if f.n == 2:
        n0 = frame.normals[0]
        scalar = jets.su_inner_value(h, n0) / jets.su_inner_value(n0, n0)
    return MeanCurvature(matrix=h, scalar=scalar)


def mean_curvature_values(f, det_g_tol=None):
    """Batched mean-curvature value matrices, frame-free.

    Returns (H, mask); entries outside the regular mask are NaN.
    """
    j_l, g_lr, j_r, det_g, _ = metric_values(f)
    tol = default_det_g_tol(j_l, j_r) if det_g_tol is None else det_g_tol
    mask = np.asarray(det_g > tol)
    x_ll, x_lr, x_rr = second_derivative_values(f)
    x_l, x_r = tangent_form(f).values()
    g = np.zeros(np.shape(det_g) + (2, 2))
    g[..., 0, 0], g[..., 0, 1] = j_l, g_lr
    g[..., 1, 0], g[..., 1, 1] = g_lr, j_r
    g_safe = np.where(mask[..., None, None], g,
                      np.eye(2) * np.ones_like(g))

    def sip(a, b):
        return -0.5 * np.einsum("...ij,...ji->...", a, b).real

    rhs_ll = np.stack([sip(x_l, x_ll), sip(x_r, x_ll)], axis=-1)
    rhs_rr = np.stack([sip(x_l, x_rr), sip(x_r, x_rr)], axis=-1)
    a_l = np.linalg.solve(g_safe, rhs_ll[..., None])[..., 0]
    a_r = np.linalg.solve(g_safe, rhs_rr[..., None])[..., 0]
    b_ll = x_ll - (a_l[..., 0, None, None] * x_l + a_l[..., 1, None, None] * x_r)
    b_rr = x_rr - (a_r[..., 0, None, None] * x_l + a_r[..., 1, None, None] * x_r)
    det_safe = np.where(mask, det_g, 1.0)
    h = ((j_r[..., None, None] * b_ll
          - 2.0 * g_lr[..., None, None] * x_lr
          + j_l[..., None, None] * b_rr)
         / (2.0 * det_safe[..., None, None]))
    h = np.where(mask[..., None, None], h, np.nan)
    return h, mask


def cp1_shortcut_readings(f):
    """Scalar mean curvature under candidate readings of the CP^1 shortcut.

    The printed shortcut denominator is ambiguous; this evaluates the
    scalar 2(a + abar)/D projected on the normal i(1-2P) for each reading
    of D and reports which one agrees with the general-formula scalar.
    """
    if f.n != 2:
        raise ValueError("shortcut applies to N = 2 only")
    p = model.projector(f).mat
    fl = [c.deriv_l() for c in f.components]
    fr = [c.deriv_r() for c in f.components]
    a = model.bilinear(p, fl, fr).value       # dLf^dag P dRf
    abar = model.bilinear(p, fr, fl).value    # dRf^dag P dLf
    c_rr = model.bilinear(p, fr, fr).value
    readings = {
        "RdagPL_minus_LdagPR": abar - a,
        "LdagPR_minus_RdagPL": a - abar,
        "printed_literal": abar - c_rr,
    }
    frame = build_frame(f)
    general = mean_curvature(f, frame).scalar
    out = {}
    for name, d in readings.items():
        out[name] = complex(-2j * (a + abar) / d)
    best = min(out, key=lambda k: abs(out[k] - general))
    return best, out, general


def alt_normals(f, det_g_tol=None):
    """The two shortcut unit normals: projector-based and commutator-based.

    The commutator normal is [X_L, X_R] normalized (the commutator of
    anti-Hermitian matrices is already anti-Hermitian).  Raises
    VanishingCommutator when its norm is negligible.
    """
    report = classify_regularity(f, det_g_tol=det_g_tol)
    if report.regularity is not Regularity.REGULAR:
        raise DegeneratePoint("alt normals need a regular point")
    n = f.n
    p = model.projector_values(f)
    eye = np.eye(n)
    n_p = 1j * np.sqrt(2.0) * (np.sqrt((n - 1) / n) * eye
                               - np.sqrt(n / (n - 1)) * p)
    x_l, x_r = tangent_form(f).values()
    comm = x_l @ x_r - x_r @ x_l
    norm2 = jets.su_inner_value(comm, comm)
    if norm2 < 1e-24:
        raise VanishingCommutator("tangent commutator norm below tolerance")
    n_comm = comm / np.sqrt(norm2)
    return n_p, n_comm


# -- Willmore functional ---------------------------------------------------------

@dataclass(frozen=True)
class WillmoreResult:
    value: float
    refinements: tuple  # ((panels_l, panels_r, value), ...)
    converged: bool


def _simpson_2d(values, h_l, h_r):
    n_l, n_r = values.shape

    def w(n):
        v = np.ones(n)
        v[1:-1:2] = 4.0
        v[2:-1:2] = 2.0
        return v / 3.0

    return h_l * h_r * np.einsum("i,j,ij->", w(n_l), w(n_r), values)


def willmore(spec, domain, grid, tol=1e-6, max_doublings=6, det_g_tol=None):
    """Willmore functional over a rectangle by composite Simpson quadrature.

    `domain` is (xi_l_min, xi_l_max, xi_r_min, xi_r_max) and `grid` the
    initial panel counts (both even).  Panels double until the value is
    stable to `tol` (relative); every node must be a regular point.
    """
    l0, l1, r0, r1 = (float(v) for v in domain)
    m_l, m_r = int(grid[0]), int(grid[1])
    if m_l % 2 or m_r % 2 or m_l < 2 or m_r < 2:
        raise OddPanelCount("Simpson quadrature needs even panel counts >= 2")
    if l1 <= l0 or r1 <= r0:
        return WillmoreResult(value=0.0, refinements=((m_l, m_r, 0.0),),
                              converged=True)

    def integral(m_l, m_r):
        xi_l = np.linspace(l0, l1, m_l + 1)
        xi_r = np.linspace(r0, r1, m_r + 1)
        pl, pr = np.meshgrid(xi_l, xi_r, indexing="ij")
        f = eval_field(spec, (pl.ravel(), pr.ravel()))
        j_l, g_lr, j_r, det_g, _ = metric_values(f)
        tol_arr = (default_det_g_tol(j_l, j_r) if det_g_tol is None
                   else det_g_tol)
        if np.any(det_g <= tol_arr):
            i = int(np.argmin(det_g - tol_arr))
            raise SingularGridPoint(
                f"det G = {det_g.ravel()[i]:.3e} at quadrature node "
                f"({pl.ravel()[i]:.6g}, {pr.ravel()[i]:.6g})")
        h, _ = mean_curvature_values(f, det_g_tol=det_g_tol)
        h_sq = -0.5 * np.einsum("...ij,...ji->...", h, h).real
        integrand = (h_sq * np.sqrt(det_g)).reshape(m_l + 1, m_r + 1)
        return _simpson_2d(integrand, (l1 - l0) / m_l, (r1 - r0) / m_r)

    refinements = []
    value = integral(m_l, m_r)
    refinements.append((m_l, m_r, value))
    converged = False
    for _ in range(max_doublings):
        m_l *= 2
        m_r *= 2
        finer = integral(m_l, m_r)
        refinements.append((m_l, m_r, finer))
        if abs(finer - value) <= tol * (1.0 + abs(finer)):
            value = finer
            converged = True
            break
        value = finer
    return WillmoreResult(value=value, refinements=tuple(refinements),
                          converged=converged)
