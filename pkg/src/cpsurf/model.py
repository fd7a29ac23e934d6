"""Sigma-model layer: projector, residuals, currents, symmetry transforms.

Everything here consumes a :class:`~cpsurf.solution.FieldJet` and is pure;
batched field jets give batched outputs.  The Euler-Lagrange residuals are
the solution certificates used throughout the geometry layers: a field is
treated as a solution where the dimensionless residual norm is small.
"""

from dataclasses import dataclass

import numpy as np

from . import dsl, jets
from .dsl import BinOp, Call, Imag, Num, Var
from .errors import NotUnitary, ZeroField
from .jets import EPSILON


def field_norm_sq(f):
    """|f|^2 = f^dag f as a real jet."""
    acc = None
    for c in f.components:
        term = c.conj() * c
        acc = term if acc is None else acc + term
    return acc.real


def _require_nonzero(f):
    s = field_norm_sq(f)
    if np.any(np.abs(s.value) < EPSILON):
        raise ZeroField("|f| vanishes at the expansion point")
    return s


@dataclass(frozen=True)
class ProjectorJet:
    """Jet-valued orthogonal projector 1 - f f^dag / |f|^2."""

    mat: np.ndarray  # (N, N) object array of Jet2
    n: int

    def value(self):
        return jets.mat_value(self.mat)

    def invariant_violation(self):
        """max of |P^2 - P|, |P^dag - P|, |tr P - (N-1)| at the values."""
        p = self.value()
        idem = np.abs(p @ p - p).max()
        herm = np.abs(np.swapaxes(p, -1, -2).conj() - p).max()
        tr = np.abs(np.trace(p, axis1=-2, axis2=-1) - (self.n - 1)).max()
        return max(idem, herm, tr)


def projector(f):
    """Jet-valued projector P = 1 - (1/|f|^2) f (x) f^dag."""
    s = _require_nonzero(f)
    n = f.n
    inv_s = s.reciprocal()
    mat = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            term = -(f.components[i] * f.components[j].conj() * inv_s)
            mat[i, j] = term + 1.0 if i == j else term
    return ProjectorJet(mat=mat, n=n)


def projector_values(f):
    """Plain value-level projector, shape batch + (N, N)."""
    s = _require_nonzero(f)
    fv = f.values()
    p = -fv[..., :, None] * fv.conj()[..., None, :] / s.value.real[..., None, None]
    p = p + np.eye(f.n)
    return p


def el_residual(f):
    """Euler-Lagrange residual vector P{dLdR f - ((f^dag dR f) dL f
    + (f^dag dL f) dR f)/|f|^2}; zero exactly on solutions."""
    s = _require_nonzero(f).value.real
    fv = f.values()
    fl = f.derivatives(1, 0)
    fr = f.derivatives(0, 1)
    flr = f.derivatives(1, 1)
    a_r = np.sum(fv.conj() * fr, axis=-1)[..., None]
    a_l = np.sum(fv.conj() * fl, axis=-1)[..., None]
    inner = flr - (a_r * fl + a_l * fr) / s[..., None]
    p = projector_values(f)
    return np.einsum("...ij,...j->...i", p, inner)


def el_residual_norm(f):
    """Dimensionless residual norm, scaled by 1 + |dLdR f|."""
    r = el_residual(f)
    scale = 1.0 + np.linalg.norm(f.derivatives(1, 1), axis=-1)
    return np.linalg.norm(r, axis=-1) / scale


@dataclass(frozen=True)
class MatrixResidual:
    """Matrix forms of the equations of motion at the values."""

    commutator_form: np.ndarray   # [dLdR P, P]
    conservation_form: np.ndarray  # dL[dR P, P] + dR[dL P, P]

    def norms(self):
        def frob(m):
            return np.sqrt((np.abs(m) ** 2).sum(axis=(-2, -1)))
        return frob(self.commutator_form), frob(self.conservation_form)


def el_residual_matrix(f):
    """Both matrix residual forms; each vanishes on solutions."""
    p = projector(f).mat
    pl = jets.mat_deriv_l(p)
    pr = jets.mat_deriv_r(p)
    plr = jets.mat_deriv_r(pl)
    comm = jets.mat_value(jets.mat_commutator(plr, p))
    m_l = jets.mat_commutator(pl, p)
    m_r = jets.mat_commutator(pr, p)
    cons = jets.mat_value(jets.mat_deriv_l(m_r) + jets.mat_deriv_r(m_l))
    return MatrixResidual(commutator_form=comm, conservation_form=cons)


def bilinear(p_mat, u, v):
    """u^dag P v as a jet; `u`, `v` are sequences of component jets."""
    n = len(u)
    acc = None
    for i in range(n):
        row = None
        for j in range(n):
            term = p_mat[i, j] * v[j]
            row = term if row is None else row + term
        term = u[i].conj() * row
        acc = term if acc is None else acc + term
    return acc


def currents(f):
    """Conserved light-cone currents (J_L, J_R) as real jets, values >= 0."""
    s = _require_nonzero(f)
    p = projector(f).mat
    inv_s = s.reciprocal()
    fl = [c.deriv_l() for c in f.components]
    fr = [c.deriv_r() for c in f.components]
    j_l = (bilinear(p, fl, fl) * inv_s).real
    j_r = (bilinear(p, fr, fr) * inv_s).real
    return j_l, j_r


def action_density(f):
    """Lagrangian density (dLf^dag P dRf + dRf^dag P dLf)/(4 |f|^2)."""
    s = _require_nonzero(f)
    p = projector(f).mat
    fl = [c.deriv_l() for c in f.components]
    fr = [c.deriv_r() for c in f.components]
    num = bilinear(p, fl, fr) + bilinear(p, fr, fl)
    return (num.value / (4.0 * s.value)).real


# -- symmetry transforms on specs ----------------------------------------------

def _as_ast(expr):
    return dsl.parse_expr(expr) if isinstance(expr, str) else expr


def apply_gauge(spec, alpha, beta):
    """Local U(1) x R transform: components scaled by exp(i alpha + beta).

    `alpha`, `beta` are real-valued expressions of the coordinates (sources
    or ASTs).  The projector, currents and all induced geometry are
    invariant under this transform.
    """
    alpha = _as_ast(alpha)
    beta = _as_ast(beta)
    factor = Call("exp", BinOp("+", BinOp("*", Imag(), alpha), beta))
    comps = tuple(BinOp("*", c, factor) for c in spec.components)
    return spec.with_components(comps)


def apply_global(spec, phi):
    """Global U(N) transform f -> Phi f, folded into constant-coefficient
    component expressions so the result stays serializable."""
    phi = np.asarray(phi, dtype=complex)
    n = spec.n
    if phi.shape != (n, n):
        raise NotUnitary(f"expected a {n}x{n} matrix")
    if np.abs(phi.conj().T @ phi - np.eye(n)).max() > 1e-12:
        raise NotUnitary("matrix fails the unitarity tolerance 1e-12")
    comps = []
    for i in range(n):
        acc = None
        for j in range(n):
            c = phi[i, j]
            if c == 0:
                continue
            term = BinOp("*", Num(c), spec.components[j])
            acc = term if acc is None else BinOp("+", acc, term)
        comps.append(acc if acc is not None else Num(0j))
    return spec.with_components(tuple(comps))


def parity_swap(spec):
    """Exchange xi_L <-> xi_R in every component."""
    mapping = {"xiL": Var("xiR"), "xiR": Var("xiL")}
    comps = tuple(dsl.substitute(c, mapping) for c in spec.components)
    return spec.with_components(comps)


def reparametrize(spec, alpha, beta):
    """Conformal reparametrization xi_L -> alpha(xi_L), xi_R -> beta(xi_R).

    `alpha` must reference only xiL and `beta` only xiR (each must be an
    order-preserving 1-to-1 map on the domain of interest; that is the
    caller's responsibility).
    """
    alpha = _as_ast(alpha)
    beta = _as_ast(beta)
    if dsl.uses_variable(alpha, "xiR"):
        raise ValueError("alpha must depend on xiL only")
    if dsl.uses_variable(beta, "xiL"):
        raise ValueError("beta must depend on xiR only")
    mapping = {"xiL": alpha, "xiR": beta}
    comps = tuple(dsl.substitute(c, mapping) for c in spec.components)
    return spec.with_components(comps)
