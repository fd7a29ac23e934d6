"""Solution-spec tests: builtins, closed-form oracle, jet evaluation."""

import cmath

import numpy as np
import pytest

from cpsurf import solution
from cpsurf.errors import EvaluationDomainError
from cpsurf.solution import (SolutionSpec, builtin_catalog, cp1_example,
                             eval_field, make_builtin)


def cp1_closed_form(xi_l, xi_r, p):
    """Second component of the CP^1 example by direct complex arithmetic."""
    chi = xi_l - xi_r
    g = (p + 1) * chi / (2 * (p - 1))
    h = (cmath.atan((p + 1) / (2 * cmath.sqrt(-p)) * cmath.tanh(g))
         + (p + 2 * cmath.sqrt(-p) - 1) * chi / (2 * (p - 1)))
    ratio = (((p - 1) * cmath.cosh(g) + (p + 1))
             / ((p - 1) * cmath.cosh(g) - (p + 1)))
    return cmath.sqrt(ratio) * cmath.exp(1j * (xi_l - h))


class TestBuiltinCatalog:
    def test_required_ids_present(self):
        cat = builtin_catalog()
        for required in ("cp1_example", "constant", "left_mover",
                         "right_mover"):
            assert required in cat

    def test_make_builtin_unknown(self):
        with pytest.raises(ValueError):
            make_builtin("no_such_builtin")

    def test_cp1_requires_p_below_minus_one(self):
        with pytest.raises(ValueError):
            cp1_example(p=-0.5)
        with pytest.raises(ValueError):
            cp1_example(p=-1.0)

    def test_mover_dependence_validated(self):
        with pytest.raises(ValueError):
            solution.left_mover(("1", "exp(i*xiR)"))
        with pytest.raises(ValueError):
            solution.right_mover(("1", "xiL"))
        with pytest.raises(ValueError):
            solution.constant(("1", "xiL"))


class TestCp1Example:
    def test_value_at_chi_zero(self):
        # At xi_L = xi_R = 0 and p = -3/2 the hand evaluation gives
        # f = (1, sqrt(3/2)): the ratio reduces to -p and the phase is zero.
        f = eval_field(cp1_example(-1.5), (0.0, 0.0))
        vals = f.values()
        assert vals[0] == pytest.approx(1.0)
        assert vals[1] == pytest.approx(np.sqrt(1.5))

    @pytest.mark.parametrize("p", [-1.5, -2.0, -4.0])
    def test_matches_closed_form_everywhere(self, p):
        rng = np.random.default_rng(42)
        spec = cp1_example(p)
        for _ in range(10):
            xi_l, xi_r = rng.uniform(-2, 2, size=2)
            f = eval_field(spec, (xi_l, xi_r))
            want = cp1_closed_form(xi_l, xi_r, p)
            assert f.values()[1] == pytest.approx(want, rel=1e-12)

    def test_derivatives_match_finite_differences(self):
        spec = cp1_example(-1.5)
        h = 1e-5
        for pt in [(0.6, -0.4), (1.2, 0.1)]:
            f = eval_field(spec, pt)
            fd_l = (cp1_closed_form(pt[0] + h, pt[1], -1.5)
                    - cp1_closed_form(pt[0] - h, pt[1], -1.5)) / (2 * h)
            fd_r = (cp1_closed_form(pt[0], pt[1] + h, -1.5)
                    - cp1_closed_form(pt[0], pt[1] - h, -1.5)) / (2 * h)
            assert abs(f.derivatives(1, 0)[1] - fd_l) <= 1e-6 * (1 + abs(fd_l))
            assert abs(f.derivatives(0, 1)[1] - fd_r) <= 1e-6 * (1 + abs(fd_r))

    def test_embedded_matches_cp1(self):
        f2 = eval_field(cp1_example(-1.5), (0.4, -0.7))
        f3 = eval_field(solution.cp1_embedded(3, -1.5), (0.4, -0.7))
        assert f3.n == 3
        assert np.allclose(f3.values()[:2], f2.values())
        assert f3.values()[2] == 0.0


class TestEvalField:
    def test_linear_component_jets(self):
        spec = SolutionSpec.from_sources(("1", "xiL"))
        f = eval_field(spec, (0.0, 0.0))
        assert np.allclose(f.values(), [1.0, 0.0])
        assert np.allclose(f.derivatives(1, 0), [0.0, 1.0])
        assert np.allclose(f.derivatives(0, 1), [0.0, 0.0])
        assert np.allclose(f.derivatives(1, 1), [0.0, 0.0])

    def test_constant_spec_zero_derivatives(self):
        f = eval_field(solution.constant(("1", "2")), (0.3, -1.7))
        assert np.allclose(f.values(), [1.0, 2.0])
        for a, b in [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)]:
            assert np.allclose(f.derivatives(a, b), 0.0)

    def test_zero_field_rejected(self):
        spec = SolutionSpec.from_sources(("xiL", "xiR"))
        with pytest.raises(EvaluationDomainError):
            eval_field(spec, (0.0, 0.0))

    def test_batched_evaluation(self):
        spec = cp1_example(-1.5)
        xs = np.linspace(0.1, 1.0, 6)
        ys = np.linspace(-1.0, -0.1, 6)
        batch = eval_field(spec, (xs, ys))
        assert batch.batch_shape == (6,)
        for i in range(6):
            single = eval_field(spec, (xs[i], ys[i]))
            assert np.allclose(batch.components[1].coeffs[i],
                               single.components[1].coeffs)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SolutionSpec.from_sources(("1",))  # N < 2
        with pytest.raises(ValueError):
            SolutionSpec.from_sources(("1", "q*xiL"))  # unbound parameter
        with pytest.raises(ValueError):
            SolutionSpec.from_sources(("1", "q*xiL"), params={"q": 1 + 1j})
