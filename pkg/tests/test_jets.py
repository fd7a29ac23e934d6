"""Jet engine tests: frozen-oracle values, ring axioms, FD cross-checks."""

import math

import numpy as np
import pytest

from cpsurf import jets
from cpsurf.errors import DivisionByZeroValue, DomainError
from cpsurf.jets import Jet2, apply_function


def random_jet(rng, scale=1.0):
    c = scale * (rng.standard_normal(jets.NUM_COEFFS)
                 + 1j * rng.standard_normal(jets.NUM_COEFFS))
    return Jet2.from_coeffs(c)


def coeffs_close(x, y, tol=1e-12):
    return np.allclose(x.coeffs, y.coeffs, rtol=tol, atol=tol)


class TestArithmetic:
    def test_mul_by_unit_is_identity(self):
        rng = np.random.default_rng(7)
        x = random_jet(rng)
        one = Jet2.constant(1.0)
        assert coeffs_close(x * one, x)
        assert coeffs_close(one * x, x)

    def test_monomial_product(self):
        # xi_L * xi_R expanded at the origin: only c_11 = 1 survives.
        x = Jet2.variable_l(0.0) * Jet2.variable_r(0.0)
        expected = np.zeros(jets.NUM_COEFFS, dtype=complex)
        expected[jets.INDEX[(1, 1)]] = 1.0
        assert np.array_equal(x.coeffs, expected)

    def test_div_geometric_series(self):
        # 1/(1 + xi_L) at the origin: c_a0 = (-1)^a, all mixed terms zero.
        q = Jet2.constant(1.0) / (Jet2.variable_l(0.0) + 1.0)
        for (a, b) in jets.MONOMIALS:
            want = (-1.0) ** a if b == 0 else 0.0
            assert q.coeff(a, b) == pytest.approx(want, abs=1e-15)

    def test_distributivity_random(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            x, y, z = (random_jet(rng) for _ in range(3))
            lhs = (x + y) * z
            rhs = x * z + y * z
            assert np.allclose(lhs.coeffs, rhs.coeffs, rtol=1e-13, atol=1e-13)

    def test_polynomial_composition_exact(self):
        # Integer-coefficient polynomials at integer points: float ops are
        # exact, so jet arithmetic must reproduce the shifted Taylor
        # coefficients bit-for-bit.
        rng = np.random.default_rng(3)
        for _ in range(20):
            coeffs = {ab: complex(rng.integers(-3, 4)) for ab in jets.MONOMIALS}
            p_l, p_r = (int(rng.integers(-2, 3)) for _ in range(2))
            xl = Jet2.variable_l(float(p_l))
            xr = Jet2.variable_r(float(p_r))
            built = Jet2.constant(0.0)
            for (a, b), c in coeffs.items():
                built = built + (xl ** a) * (xr ** b) * c
            # Oracle: binomial recentering of the polynomial at (p_l, p_r).
            expected = np.zeros(jets.NUM_COEFFS, dtype=complex)
            for (a, b), c in coeffs.items():
                for i in range(a + 1):
                    for j in range(b + 1):
                        expected[jets.INDEX[(i, j)]] += (
                            c * math.comb(a, i) * math.comb(b, j)
                            * p_l ** (a - i) * p_r ** (b - j))
            assert np.array_equal(built.coeffs, expected)

    def test_reciprocal_times_self(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            x = random_jet(rng) + 3.0  # keep value away from zero
            prod = x * x.reciprocal()
            assert prod.value == pytest.approx(1.0, abs=1e-13)
            one = Jet2.constant(1.0)
            assert np.allclose(prod.coeffs, one.coeffs, atol=1e-12)

    def test_division_by_zero_value(self):
        with pytest.raises(DivisionByZeroValue):
            Jet2.constant(1.0) / Jet2.variable_l(0.0)

    def test_integer_power(self):
        x = Jet2.variable_l(2.0)
        cube = x ** 3
        assert cube.value == pytest.approx(8.0)
        assert cube.derivative(1, 0) == pytest.approx(12.0)
        assert cube.derivative(2, 0) == pytest.approx(12.0)
        assert cube.derivative(3, 0) == pytest.approx(6.0)
        inv2 = x ** -2
        assert inv2.value == pytest.approx(0.25)
        assert inv2.derivative(1, 0) == pytest.approx(-2.0 / 8.0)


class TestConjugation:
    def test_real_jet_fixed(self):
        rng = np.random.default_rng(2)
        c = rng.standard_normal(jets.NUM_COEFFS)
        x = Jet2.from_coeffs(c)
        assert np.array_equal(x.conj().coeffs, x.coeffs)

    def test_imag_variable(self):
        x = 1j * Jet2.variable_l(0.0)
        assert np.array_equal(x.conj().coeffs, (-1j * Jet2.variable_l(0.0)).coeffs)

    def test_involution(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            x = random_jet(rng)
            assert np.array_equal(x.conj().conj().coeffs, x.coeffs)


class TestElementaryFunctions:
    def test_exp_taylor(self):
        # exp(xi_L) at the origin: c_a0 = 1/a!.
        e = apply_function("exp", Jet2.variable_l(0.0))
        for (a, b) in jets.MONOMIALS:
            want = 1.0 / math.factorial(a) if b == 0 else 0.0
            assert e.coeff(a, b) == pytest.approx(want, abs=1e-15)

    def test_cosh_zero(self):
        c = apply_function("cosh", Jet2.constant(0.0))
        expected = np.zeros(jets.NUM_COEFFS, dtype=complex)
        expected[0] = 1.0
        assert np.allclose(c.coeffs, expected, atol=1e-16)

    def test_sqrt_binomial(self):
        # sqrt(4 + xi_R): binomial series 2(1 + x/4)^(1/2).
        s = apply_function("sqrt", Jet2.variable_r(0.0) + 4.0)
        assert s.coeff(0, 0) == pytest.approx(2.0)
        assert s.coeff(0, 1) == pytest.approx(1.0 / 4.0)
        assert s.coeff(0, 2) == pytest.approx(-1.0 / 64.0)
        assert s.coeff(0, 3) == pytest.approx(1.0 / 512.0)

    @pytest.mark.parametrize("fn,point", [
        ("exp", 0.3), ("log", 1.7), ("sqrt", 2.2), ("sin", 0.4),
        ("cos", 0.4), ("tan", 0.3), ("sinh", 0.5), ("cosh", 0.5),
        ("tanh", 0.25), ("arctan", 0.6),
    ])
    def test_against_finite_differences(self, fn, point):
        # Central differences on the scalar function vs jet coefficients.
        base = np.vectorize(lambda t: complex(getattr(np, fn)(t)))
        h = 1e-5

        def scalar(t):
            return base(t).item()

        x = apply_function(fn, Jet2.variable_l(point))
        fd1 = (scalar(point + h) - scalar(point - h)) / (2 * h)
        assert abs(x.derivative(1, 0) - fd1) <= 1e-6 * (1 + abs(fd1))
        assert x.value == pytest.approx(scalar(point), rel=1e-12)

    def test_composition_chain_rule_mixed(self):
        # d/dxi_R sqrt(4 + xi_L*xi_R) at (1, 2): mixed partials via oracle
        # f = sqrt(4 + uv); exercised through the full bivariate chain.
        u0, v0 = 1.0, 2.0
        x = apply_function(
            "sqrt", Jet2.variable_l(u0) * Jet2.variable_r(v0) + 4.0)

        def f(u, v):
            return math.sqrt(4 + u * v)

        h = 1e-5
        fd_l = (f(u0 + h, v0) - f(u0 - h, v0)) / (2 * h)
        fd_r = (f(u0, v0 + h) - f(u0, v0 - h)) / (2 * h)
        fd_lr = (f(u0 + h, v0 + h) - f(u0 + h, v0 - h)
                 - f(u0 - h, v0 + h) + f(u0 - h, v0 - h)) / (4 * h * h)
        assert x.derivative(1, 0).real == pytest.approx(fd_l, rel=1e-8)
        assert x.derivative(0, 1).real == pytest.approx(fd_r, rel=1e-8)
        assert x.derivative(1, 1).real == pytest.approx(fd_lr, rel=1e-5)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            apply_function("sqrt", Jet2.variable_l(0.0))
        with pytest.raises(DomainError):
            apply_function("log", Jet2.constant(0.0))
        with pytest.raises(DomainError):
            apply_function("tan", Jet2.constant(np.pi / 2))
        with pytest.raises(DomainError):
            apply_function("nonsense", Jet2.constant(1.0))


class TestCalculus:
    def test_deriv_shifts(self):
        rng = np.random.default_rng(17)
        x = random_jet(rng)
        dl = x.deriv_l()
        for (a, b) in jets.MONOMIALS:
            if a + b <= jets.ORDER - 1:
                assert dl.coeff(a, b) == (a + 1) * x.coeff(a + 1, b)
            else:
                assert dl.coeff(a, b) == 0.0

    def test_deriv_product_rule(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            x, y = random_jet(rng), random_jet(rng)
            lhs = (x * y).deriv_r()
            rhs = x.deriv_r() * y + x * y.deriv_r()
            # Only orders 0..2 of the derivative are meaningful.
            for (a, b) in jets.MONOMIALS:
                if a + b <= jets.ORDER - 1:
                    assert lhs.coeff(a, b) == pytest.approx(
                        rhs.coeff(a, b), rel=1e-12, abs=1e-12)


class TestBatch:
    def test_batched_matches_scalar(self):
        points = np.linspace(0.1, 2.0, 7)
        batched = apply_function(
            "log", Jet2.variable_l(points) * Jet2.variable_l(points) + 1.0)
        for i, p in enumerate(points):
            single = apply_function(
                "log", Jet2.variable_l(p) * Jet2.variable_l(p) + 1.0)
            assert np.allclose(batched.coeffs[i], single.coeffs)

    def test_batch_shape_propagates(self):
        x = Jet2.variable_l(np.zeros(5))
        assert (x * x + 1.0).batch_shape == (5,)


class TestJetMatrices:
    def test_mat_mul_and_trace(self):
        a = jets.mat_from_constant([[1, 2j], [0, 1]])
        b = jets.mat_from_constant([[0, 1], [1, 0]])
        prod = jets.mat_value(jets.mat_mul(a, b))
        assert np.allclose(prod, np.array([[2j, 1], [1, 0]]))
        assert jets.mat_trace(a).value == pytest.approx(2.0)

    def test_su_inner_orthonormal(self):
        # Pauli-like su(2) elements have unit norm under -tr(AB)/2.
        a = jets.mat_from_constant([[0, 1j], [1j, 0]])
        assert jets.su_inner(a, a).value == pytest.approx(1.0)

    def test_dagger(self):
        a = jets.mat_from_constant([[1 + 1j, 2], [3j, 4]])
        d = jets.mat_value(jets.mat_dagger(a))
        assert np.allclose(d, np.array([[1 - 1j, -3j], [2, 4]]))
