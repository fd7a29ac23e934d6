"""Field candidates f: Omega -> C^N and their evaluation to jets.

A :class:`SolutionSpec` holds N component expressions plus real parameter
bindings; :func:`eval_field` turns a spec into a :class:`FieldJet` -- every
component's order-3 jet at one expansion point (or a batch of points).

Built-in specs cover the analytic test fields: a closed-form CP^1 solution
depending on one real parameter p < -1, its embedding into higher N,
constants, and left/right movers (fields of one light-cone coordinate only).
"""

from dataclasses import dataclass, field

import numpy as np

from . import dsl
from .errors import EvaluationDomainError
from .jets import EPSILON, Jet2

#: chi = xiL - xiR, rendered once for the closed-form solution strings.
_CHI = "(xiL-xiR)"

#: g(chi) for the CP^1 example.
_G_SRC = f"(p+1)*{_CHI}/(2*(p-1))"

#: h(chi) for the CP^1 example.
_H_SRC = (f"arctan((p+1)/(2*sqrt(-p))*tanh({_G_SRC}))"
          f"+(p+2*sqrt(-p)-1)*{_CHI}/(2*(p-1))")

#: Second component of the CP^1 example.
_CP1_F2_SRC = (f"sqrt(((p-1)*cosh({_G_SRC})+(p+1))/"
               f"((p-1)*cosh({_G_SRC})-(p+1)))*exp(i*(xiL-({_H_SRC})))")


@dataclass(frozen=True)
class SolutionSpec:
    """Immutable field candidate: N component ASTs plus parameter bindings."""

    n: int
    components: tuple
    params: dict = field(default_factory=dict)
    builtin: str | None = None  # provenance label, informational only

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need N >= 2")
        if len(self.components) != self.n:
            raise ValueError(f"expected {self.n} components, "
                             f"got {len(self.components)}")
        unbound = set()
        for comp in self.components:
            unbound |= dsl.free_params(comp)
        unbound -= set(self.params)
        if unbound:
            raise ValueError(f"unbound parameters: {sorted(unbound)}")
        for name, value in self.params.items():
            if isinstance(value, complex) or not np.isreal(value):
                raise ValueError(f"parameter '{name}' must be real")

    @classmethod
    def from_sources(cls, sources, params=None, builtin=None):
        comps = tuple(dsl.parse_expr(s) for s in sources)
        return cls(n=len(comps), components=comps, params=dict(params or {}),
                   builtin=builtin)

    def component_sources(self):
        return tuple(dsl.to_source(c) for c in self.components)

    def with_components(self, components, builtin=None):
        return SolutionSpec(n=len(components), components=tuple(components),
                            params=dict(self.params), builtin=builtin)


@dataclass(frozen=True)
class FieldJet:
    """All components of f as order-3 jets at one expansion point."""

    components: tuple  # N Jet2 values, shared batch shape
    point: tuple       # (xi_l, xi_r) scalars or batch arrays

    @property
    def n(self):
        return len(self.components)

    @property
    def batch_shape(self):
        return self.components[0].batch_shape

    def values(self):
        """Stacked value coefficients, shape batch + (N,)."""
        return np.stack([c.value for c in self.components], axis=-1)

    def derivatives(self, a, b):
        """Stacked partials dL^a dR^b f, shape batch + (N,)."""
        return np.stack([c.derivative(a, b) for c in self.components], axis=-1)


def eval_field(spec, point):
    """Evaluate a spec at (xi_l, xi_r); either may be a batch array.

    Raises EvaluationDomainError when a component leaves an elementary
    function's domain or when |f| vanishes at the point.
    """
    xi_l, xi_r = point
    xl = Jet2.variable_l(np.asarray(xi_l, dtype=float))
    xr = Jet2.variable_r(np.asarray(xi_r, dtype=float))
    comps = [dsl.evaluate(c, xl, xr, spec.params) for c in spec.components]
    # Constant components must share the batch shape of the rest.
    batch = np.broadcast_shapes(xl.batch_shape, xr.batch_shape,
                                *(c.batch_shape for c in comps))
    comps = tuple(
        c if c.batch_shape == batch
        else Jet2(np.broadcast_to(c.coeffs, batch + (c.coeffs.shape[-1],)).copy())
        for c in comps)
    norm_sq = sum(np.abs(c.value) ** 2 for c in comps)
    if np.any(norm_sq < EPSILON):
        raise EvaluationDomainError("|f| vanishes at an evaluation point")
    for c in comps:
        if not np.all(np.isfinite(c.coeffs)):
            raise EvaluationDomainError("field jet has non-finite coefficients")
    return FieldJet(components=comps, point=(xi_l, xi_r))


# -- built-in specs ------------------------------------------------------------

def cp1_example(p=-1.5):
    """Closed-form CP^1 solution with parameter p < -1."""
    if not p < -1:
        raise ValueError("cp1_example requires p < -1")
    return SolutionSpec.from_sources(
        ("1", _CP1_F2_SRC), params={"p": float(p)}, builtin="cp1_example")


def cp1_example_sources():
    """Component sources of the CP^1 example with `p` left symbolic."""
    return ("1", _CP1_F2_SRC)


def cp1_embedded(n=3, p=-1.5):
    """The CP^1 example padded with zero components into C^n.

    Still an exact solution of the N = n model; useful for exercising the
    full su(n) frame machinery at regular points.
    """
    if n < 3:
        raise ValueError("embedding needs n >= 3")
    if not p < -1:
        raise ValueError("cp1_embedded requires p < -1")
    sources = ("1", _CP1_F2_SRC) + ("0",) * (n - 2)
    return SolutionSpec.from_sources(sources, params={"p": float(p)},
                                     builtin="cp1_embedded")


def constant(sources=("1", "2")):
    """Constant field; trivially a solution with a fully degenerate metric."""
    spec = SolutionSpec.from_sources(sources, builtin="constant")
    for comp in spec.components:
        if dsl.uses_variable(comp, "xiL") or dsl.uses_variable(comp, "xiR"):
            raise ValueError("constant spec must not depend on coordinates")
    return spec


def left_mover(sources=("1", "exp(i*xiL)")):
    """Field of xi_L only: an exact solution with a degenerate metric."""
    spec = SolutionSpec.from_sources(sources, builtin="left_mover")
    for comp in spec.components:
        if dsl.uses_variable(comp, "xiR"):
            raise ValueError("left_mover components must not depend on xiR")
    return spec


def right_mover(sources=("1", "exp(i*xiR)")):
    """Field of xi_R only: an exact solution with a degenerate metric."""
    spec = SolutionSpec.from_sources(sources, builtin="right_mover")
    for comp in spec.components:
        if dsl.uses_variable(comp, "xiL"):
            raise ValueError("right_mover components must not depend on xiL")
    return spec


_BUILTINS = {
    "cp1_example": cp1_example,
    "cp1_embedded": cp1_embedded,
    "constant": constant,
    "left_mover": left_mover,
    "right_mover": right_mover,
}


def builtin_catalog():
    """Identifiers accepted by :func:`make_builtin`."""
    return tuple(sorted(_BUILTINS))


def make_builtin(name, **kwargs):
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown builtin '{name}'; "
                         f"catalog: {builtin_catalog()}") from None
    return factory(**kwargs)
