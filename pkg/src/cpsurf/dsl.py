"""Small ASCII expression language for field components.

Grammar (tightest binding first):

    primary := NUMBER | 'i' | IDENT | IDENT '(' expr ')' | '(' expr ')'
    power   := primary ('^' primary)*          # left-associative
    unary   := '-' unary | power
    term    := unary (('*' | '/') unary)*
    expr    := term (('+' | '-') term)*

`xiL` and `xiR` are the coordinates, `i` the imaginary unit; any other
identifier not followed by '(' is a named real parameter bound at
evaluation time.  Function identifiers: exp, log, sqrt, sin, cos, tan,
sinh, cosh, tanh, arctan, conj.  Sources must be ASCII.

Parse errors carry a 1-based byte offset and the set of token kinds that
would have been accepted at that position.
"""

from dataclasses import dataclass

from . import jets
from .errors import (DivisionByZeroValue, DomainError, EvaluationDomainError,
                     ParseError, UnboundParameter)
from .jets import Jet2, apply_function

VARIABLES = ("xiL", "xiR")
FUNCTION_NAMES = jets.FUNCTIONS + ("conj",)


# -- AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: complex  # literals are real; synthesized constants may be complex


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Var:
    name: str  # "xiL" or "xiR"


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "ExprAst"


@dataclass(frozen=True)
class Neg:
    arg: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    lhs: "ExprAst"
    rhs: "ExprAst"


ExprAst = Num | Imag | Var | Param | Call | Neg | BinOp


# -- lexer --------------------------------------------------------------------

_OPERATORS = "+-*/^()"


@dataclass(frozen=True)
class _Token:
    kind: str   # "num", "ident", an operator char, or "end"
    text: str
    offset: int  # 1-based position of the first character


def _tokenize(source):
    if not source.isascii():
        bad = next(i for i, ch in enumerate(source) if not ch.isascii())
        raise ParseError("non-ASCII character", bad + 1, ("ASCII text",))
    tokens = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPERATORS:
            tokens.append(_Token(ch, ch, i + 1))
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n and (source[j].isdigit() or source[j] == "."):
                j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k >= n or not source[k].isdigit():
                    raise ParseError("malformed number exponent", j + 1,
                                     ("digit",))
                j = k
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            try:
                float(text)
            except ValueError:
                raise ParseError("malformed number", i + 1, ("number",)) from None
            tokens.append(_Token("num", text, i + 1))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("ident", source[i:j], i + 1))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i + 1,
                         ("number", "identifier", "operator"))
    tokens.append(_Token("end", "", n + 1))
    return tokens


# -- parser -------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.cur
        self.pos += 1
        return tok

    def expect(self, kind, expected):
        if self.cur.kind != kind:
            raise ParseError(f"unexpected {self._describe(self.cur)}",
                             self.cur.offset, expected)
        return self.advance()

    @staticmethod
    def _describe(tok):
        return "end of input" if tok.kind == "end" else f"token {tok.text!r}"

    def parse(self):
        ast = self.expr()
        if self.cur.kind != "end":
            raise ParseError(f"trailing input {self.cur.text!r}",
                             self.cur.offset, ("end of input",))
        return ast

    def expr(self):
        node = self.term()
        while self.cur.kind in "+-":
            op = self.advance().kind
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.cur.kind in "*/":
            op = self.advance().kind
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.cur.kind == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        node = self.primary()
        while self.cur.kind == "^":
            self.advance()
            node = BinOp("^", node, self.primary())
        return node

    def primary(self):
        tok = self.cur
        if tok.kind == "num":
            self.advance()
            return Num(complex(float(tok.text)))
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")", (")",))
            return node
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name == "i":
                return Imag()
            if name in FUNCTION_NAMES:
                self.expect("(", ("(",))
                arg = self.expr()
                self.expect(")", (")",))
                return Call(name, arg)
            if name in VARIABLES:
                return Var(name)
            return Param(name)
        raise ParseError(f"unexpected {self._describe(tok)}", tok.offset,
                         ("number", "identifier", "(", "-"))


def parse_expr(source):
    """Parse a component expression into an AST."""
    if not source or not source.strip():
        raise ParseError("empty expression", 1,
                         ("number", "identifier", "(", "-"))
    return _Parser(_tokenize(source)).parse()


# -- evaluation ---------------------------------------------------------------

def _int_exponent(node):
    if isinstance(node, Num) and node.value.imag == 0:
        r = node.value.real
        if r == round(r) and abs(r) <= 64:
            return int(round(r))
    if isinstance(node, Neg):
        inner = _int_exponent(node.arg)
        if inner is not None:
            return -inner
    return None


def evaluate(ast, xl, xr, params):
    """Evaluate an AST on jets; `xl`, `xr` are the coordinate jets.

    Raises EvaluationDomainError when an elementary function leaves its
    domain, and UnboundParameter for missing parameter bindings.
    """
    try:
        return _eval(ast, xl, xr, params)
    except (DomainError, DivisionByZeroValue) as exc:
        raise EvaluationDomainError(str(exc)) from exc


def _eval(ast, xl, xr, params):
    if isinstance(ast, Num):
        return Jet2.constant(ast.value)
    if isinstance(ast, Imag):
        return Jet2.constant(1j)
    if isinstance(ast, Var):
        return xl if ast.name == "xiL" else xr
    if isinstance(ast, Param):
        try:
            return Jet2.constant(complex(params[ast.name]))
        except KeyError:
            raise UnboundParameter(
                f"parameter '{ast.name}' has no binding") from None
    if isinstance(ast, Neg):
        return -_eval(ast.arg, xl, xr, params)
    if isinstance(ast, Call):
        arg = _eval(ast.arg, xl, xr, params)
        if ast.fn == "conj":
            return arg.conj()
        return apply_function(ast.fn, arg)
    if isinstance(ast, BinOp):
        if ast.op == "^":
            e = _int_exponent(ast.rhs)
            base = _eval(ast.lhs, xl, xr, params)
            if e is not None:
                return base ** e
            expo = _eval(ast.rhs, xl, xr, params)
            return apply_function("exp", expo * apply_function("log", base))
        lhs = _eval(ast.lhs, xl, xr, params)
        rhs = _eval(ast.rhs, xl, xr, params)
        if ast.op == "+":
            return lhs + rhs
        if ast.op == "-":
            return lhs - rhs
        if ast.op == "*":
            return lhs * rhs
        return lhs / rhs
    raise TypeError(f"not an expression node: {ast!r}")


# -- utilities ----------------------------------------------------------------

def free_params(ast):
    """Names of parameters referenced anywhere in the tree."""
    out = set()
    _walk_params(ast, out)
    return out


def _walk_params(ast, out):
    if isinstance(ast, Param):
        out.add(ast.name)
    elif isinstance(ast, (Call, Neg)):
        _walk_params(ast.arg, out)
    elif isinstance(ast, BinOp):
        _walk_params(ast.lhs, out)
        _walk_params(ast.rhs, out)


def uses_variable(ast, name):
    """True when the tree references the coordinate `name`."""
    if isinstance(ast, Var):
        return ast.name == name
    if isinstance(ast, (Call, Neg)):
        return uses_variable(ast.arg, name)
    if isinstance(ast, BinOp):
        return uses_variable(ast.lhs, name) or uses_variable(ast.rhs, name)
    return False


def substitute(ast, mapping):
    """Replace coordinate references by other ASTs (simultaneous)."""
    if isinstance(ast, Var) and ast.name in mapping:
        return mapping[ast.name]
    if isinstance(ast, Call):
        return Call(ast.fn, substitute(ast.arg, mapping))
    if isinstance(ast, Neg):
        return Neg(substitute(ast.arg, mapping))
    if isinstance(ast, BinOp):
        return BinOp(ast.op, substitute(ast.lhs, mapping),
                     substitute(ast.rhs, mapping))
    return ast


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def to_source(ast):
    """Render an AST back to parseable source text."""
    return _render(ast, 0)


def _fmt_real(x):
    return format(float(x), ".17g")


def _render(ast, parent_prec):
    if isinstance(ast, Num):
        v = ast.value
        if v.imag == 0:
            text = _fmt_real(v.real)
            needs = v.real < 0 and parent_prec > 0
        else:
            sign = "+" if v.imag >= 0 else "-"
            text = f"({_fmt_real(v.real)}{sign}{_fmt_real(abs(v.imag))}*i)"
            needs = False
        return f"({text})" if needs else text
    if isinstance(ast, Imag):
        return "i"
    if isinstance(ast, (Var, Param)):
        return ast.name
    if isinstance(ast, Call):
        return f"{ast.fn}({_render(ast.arg, 0)})"
    if isinstance(ast, Neg):
        inner = _render(ast.arg, 3)
        text = f"-{inner}"
        return f"({text})" if parent_prec > 2 else text
    if isinstance(ast, BinOp):
        prec = _PRECEDENCE[ast.op]
        lhs = _render(ast.lhs, prec)
        rhs = _render(ast.rhs, prec + 1)  # left-associative
        text = f"{lhs}{ast.op}{rhs}"
        return f"({text})" if prec < parent_prec else text
    raise TypeError(f"not an expression node: {ast!r}")
