"""Parser tests: grammar shape, precedence, errors, round-tripping."""

import cmath

import numpy as np
import pytest

from cpsurf import dsl
from cpsurf.dsl import BinOp, Call, Imag, Neg, Num, Param, Var, parse_expr
from cpsurf.errors import ParseError, UnboundParameter
from cpsurf.jets import Jet2


def direct_eval(ast, xl, xr, params):
    """Independent complex evaluation used as the oracle for jet values."""
    if isinstance(ast, Num):
        return ast.value
    if isinstance(ast, Imag):
        return 1j
    if isinstance(ast, Var):
        return xl if ast.name == "xiL" else xr
    if isinstance(ast, Param):
        return complex(params[ast.name])
    if isinstance(ast, Neg):
        return -direct_eval(ast.arg, xl, xr, params)
    if isinstance(ast, Call):
        v = direct_eval(ast.arg, xl, xr, params)
        if ast.fn == "conj":
            return v.conjugate()
        if ast.fn == "arctan":
            return cmath.atan(v)
        return getattr(cmath, ast.fn)(v)
    ops = {"+": lambda a, b: a + b, "-": lambda a, b: a - b,
           "*": lambda a, b: a * b, "/": lambda a, b: a / b,
           "^": lambda a, b: a ** b}
    return ops[ast.op](direct_eval(ast.lhs, xl, xr, params),
                       direct_eval(ast.rhs, xl, xr, params))


class TestGrammar:
    def test_function_call_shape(self):
        ast = parse_expr("exp(i*xiL)")
        assert ast == Call("exp", BinOp("*", Imag(), Var("xiL")))

    def test_precedence_mul_over_add(self):
        ast = parse_expr("a+b*c")
        assert ast == BinOp("+", Param("a"), BinOp("*", Param("b"), Param("c")))

    def test_left_associativity(self):
        assert parse_expr("a-b-c") == BinOp(
            "-", BinOp("-", Param("a"), Param("b")), Param("c"))

    def test_power_tighter_than_unary_minus(self):
        ast = parse_expr("-xiL^2")
        assert ast == Neg(BinOp("^", Var("xiL"), Num(complex(2))))

    def test_unary_minus_tighter_than_mul(self):
        assert parse_expr("-a*b") == BinOp("*", Neg(Param("a")), Param("b"))

    def test_parens(self):
        ast = parse_expr("(a+b)*c")
        assert ast == BinOp("*", BinOp("+", Param("a"), Param("b")), Param("c"))

    def test_number_forms(self):
        assert parse_expr("2.5e-3") == Num(complex(2.5e-3))
        assert parse_expr(".5") == Num(complex(0.5))


class TestErrors:
    def test_unclosed_paren_offset(self):
        with pytest.raises(ParseError) as err:
            parse_expr("cosh(xiL")
        assert err.value.offset == 9
        assert ")" in err.value.expected

    def test_trailing_garbage(self):
        with pytest.raises(ParseError) as err:
            parse_expr("a+b )")
        assert err.value.offset == 5

    def test_function_without_call(self):
        with pytest.raises(ParseError) as err:
            parse_expr("exp + 1")
        assert "(" in err.value.expected

    def test_empty(self):
        with pytest.raises(ParseError):
            parse_expr("   ")

    def test_non_ascii_rejected(self):
        with pytest.raises(ParseError) as err:
            parse_expr("xiL + α")
        assert err.value.offset == 7

    def test_unknown_character(self):
        with pytest.raises(ParseError):
            parse_expr("a ? b")

    def test_unbound_parameter(self):
        ast = parse_expr("q*xiL")
        with pytest.raises(UnboundParameter):
            dsl.evaluate(ast, Jet2.variable_l(0.0), Jet2.variable_r(0.0), {})


SAMPLES = [
    ("exp(i*xiL)*cosh(xiR)", {}),
    ("sqrt(4+xiL^2)/(1+tanh(xiR))", {}),
    ("arctan(k*xiL)-sin(xiR/3)", {"k": 0.7}),
    ("-xiL^3+2*xiR^2-xiL*xiR", {}),
    ("conj(i*xiL+xiR)", {}),
    ("(p+1)*(xiL-xiR)/(2*(p-1))", {"p": -1.5}),
    ("2^xiL", {}),
    ("log(cosh(xiL)+sinh(xiR)^2+2)", {}),
]


class TestEvaluation:
    @pytest.mark.parametrize("src,params", SAMPLES)
    def test_value_matches_direct_complex_eval(self, src, params):
        ast = parse_expr(src)
        rng = np.random.default_rng(hash(src) % 2 ** 32)
        for _ in range(5):
            ql, qr = rng.uniform(-1.2, 1.2, size=2)
            jet = dsl.evaluate(ast, Jet2.variable_l(ql), Jet2.variable_r(qr),
                               params)
            want = direct_eval(ast, complex(ql), complex(qr), params)
            assert abs(jet.value - want) <= 1e-12 * (1 + abs(want))

    @pytest.mark.parametrize("src,params", SAMPLES)
    def test_first_derivatives_match_finite_differences(self, src, params):
        ast = parse_expr(src)
        rng = np.random.default_rng(hash(src) % 2 ** 31)
        h = 1e-5
        for _ in range(3):
            ql, qr = rng.uniform(-1.0, 1.0, size=2)
            jet = dsl.evaluate(ast, Jet2.variable_l(ql), Jet2.variable_r(qr),
                               params)
            fd_l = (direct_eval(ast, ql + h, qr, params)
                    - direct_eval(ast, ql - h, qr, params)) / (2 * h)
            fd_r = (direct_eval(ast, ql, qr + h, params)
                    - direct_eval(ast, ql, qr - h, params)) / (2 * h)
            assert abs(jet.derivative(1, 0) - fd_l) <= 1e-6 * (1 + abs(fd_l))
            assert abs(jet.derivative(0, 1) - fd_r) <= 1e-6 * (1 + abs(fd_r))


class TestRoundTrip:
    @pytest.mark.parametrize("src,params", SAMPLES)
    def test_to_source_reparses_to_same_tree(self, src, params):
        ast = parse_expr(src)
        assert parse_expr(dsl.to_source(ast)) == ast

    def test_substitute_swaps_variables(self):
        ast = parse_expr("xiL*cosh(xiR)")
        swapped = dsl.substitute(ast, {"xiL": Var("xiR"), "xiR": Var("xiL")})
        assert swapped == parse_expr("xiR*cosh(xiL)")

    def test_complex_constant_renders(self):
        # Synthesized complex constants re-parse to a different tree with
        # the same value.
        node = BinOp("*", Num(1.5 - 2.0j), Var("xiL"))
        reparsed = parse_expr(dsl.to_source(node))
        for ql, qr in [(0.3, -0.4), (1.1, 0.2)]:
            assert direct_eval(reparsed, ql, qr, {}) == pytest.approx(
                direct_eval(node, ql, qr, {}))

    def test_free_params(self):
        assert dsl.free_params(parse_expr("a*xiL+exp(b)")) == {"a", "b"}

    def test_uses_variable(self):
        ast = parse_expr("sin(xiL)+c")
        assert dsl.uses_variable(ast, "xiL")
        assert not dsl.uses_variable(ast, "xiR")
