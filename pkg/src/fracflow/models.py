"""Mobility-model expressions: grammar, parser, printer, and preset catalog.

Expressions are trees over the saturation variable ``s`` built from
constants, sums, products, quotients, real powers, and ``exp``.  The text
grammar (used inline on the CLI and in model spec files) is::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | factor
    factor := base ('^' number)?
    base   := number | 's' | '(' expr ')' | 'exp' '(' expr ')'

Numbers are unsigned decimals with optional exponent notation; a leading
'-' is handled by the unary rule, and a '-' directly after '^' is allowed.
Model spec files hold one assignment per line (``m_a = <expr>``,
``m_b = <expr>``); lines starting with '#' are ignored.

Trees are immutable; equality is structural.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .jet import DomainError, Jet3, Real
from . import jet


class ParseError(ValueError):
    """Syntax or lookup failure, with the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------------------
# expression tree


class ModelExpr:
    """Base class for mobility-expression nodes."""

    def eval_jet(self, s: Real) -> Jet3:
        """Value and first three derivatives at s (scalar or array)."""
        try:
            return self._jet(s)
        except DomainError as exc:
            raise DomainError(f"{exc} while evaluating {self} at s={s!r}") from None

    def eval(self, s: Real) -> Real:
        """Value only; cheaper than eval_jet for plain sampling."""
        try:
            return self._value(s)
        except DomainError as exc:
            raise DomainError(f"{exc} while evaluating {self} at s={s!r}") from None

    def _jet(self, s: Real) -> Jet3:
        raise NotImplementedError

    def _value(self, s: Real) -> Real:
        raise NotImplementedError

    def __str__(self) -> str:
        return _print(self, _PREC_SUM)


@dataclass(frozen=True)
class Const(ModelExpr):
    value: float

    def _jet(self, s):
        c = self.value * jet._ones_like(s)
        return jet.constant(c)

    def _value(self, s):
        return self.value * jet._ones_like(s)


@dataclass(frozen=True)
class Var(ModelExpr):
    def _jet(self, s):
        return jet.seed(s)

    def _value(self, s):
        return s


@dataclass(frozen=True)
class Sum(ModelExpr):
    terms: tuple[ModelExpr, ...]

    def _jet(self, s):
        acc = self.terms[0]._jet(s)
        for t in self.terms[1:]:
            acc = jet.add(acc, t._jet(s))
        return acc

    def _value(self, s):
        acc = self.terms[0]._value(s)
        for t in self.terms[1:]:
            acc = acc + t._value(s)
        return acc


@dataclass(frozen=True)
class Prod(ModelExpr):
    factors: tuple[ModelExpr, ...]

    def _jet(self, s):
        acc = self.factors[0]._jet(s)
        for f in self.factors[1:]:
            acc = jet.mul(acc, f._jet(s))
        return acc

    def _value(self, s):
        acc = self.factors[0]._value(s)
        for f in self.factors[1:]:
            acc = acc * f._value(s)
        return acc


@dataclass(frozen=True)
class Quot(ModelExpr):
    num: ModelExpr
    den: ModelExpr

    def _jet(self, s):
        return jet.div(self.num._jet(s), self.den._jet(s))

    def _value(self, s):
        d = self.den._value(s)
        if np.any(np.asarray(d) == 0.0):
            raise DomainError("division by zero")
        return self.num._value(s) / d


@dataclass(frozen=True)
class Pow(ModelExpr):
    base: ModelExpr
    exponent: float

    def _jet(self, s):
        return jet.pow_const(self.base._jet(s), self.exponent)

    def _value(self, s):
        b = self.base._value(s)
        p = self.exponent
        if p != round(p) and np.any(np.asarray(b) < 0.0):
            raise DomainError(f"non-integer power {p} of a negative value")
        if p < 0 and np.any(np.asarray(b) == 0.0):
            raise DomainError(f"zero raised to negative power {p}")
        return b ** p


@dataclass(frozen=True)
class Exp(ModelExpr):
    arg: ModelExpr

    def _jet(self, s):
        return jet.exp_jet(self.arg._jet(s))

    def _value(self, s):
        return np.exp(self.arg._value(s))


@dataclass(frozen=True)
class ModelPair:
    """Mobilities of the two phases.

    m_a is evaluated at s, m_b at 1 - s; the reflection is applied by the
    flux module, never baked into the stored expressions.
    """

    m_a: ModelExpr
    m_b: ModelExpr


# ---------------------------------------------------------------------------
# canonical printer

_PREC_SUM, _PREC_TERM, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def _num_str(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def _split_negation(e: ModelExpr):
    # Return the positive counterpart if e prints with a leading minus.
    if isinstance(e, Const) and e.value < 0:
        return Const(-e.value)
    if isinstance(e, Prod) and isinstance(e.factors[0], Const) and e.factors[0].value < 0:
        lead = -e.factors[0].value
        rest = e.factors[1:]
        if lead == 1.0 and len(rest) == 1:
            return rest[0]
        if lead == 1.0:
            return Prod(rest)
        return Prod((Const(lead),) + rest)
    return None


def _prec(e: ModelExpr) -> int:
    if isinstance(e, Sum):
        return _PREC_SUM
    if isinstance(e, (Prod, Quot)):
        return _PREC_TERM
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _print(e: ModelExpr, ctx: int) -> str:
    if isinstance(e, Const):
        text = _num_str(e.value)
    elif isinstance(e, Var):
        text = "s"
    elif isinstance(e, Sum):
        parts = [_print(e.terms[0], _PREC_TERM)]
        for t in e.terms[1:]:
            pos = _split_negation(t)
            if pos is not None:
                parts.append(" - " + _print(pos, _PREC_TERM))
            else:
                parts.append(" + " + _print(t, _PREC_TERM))
        text = "".join(parts)
    elif isinstance(e, Prod):
        # '*'/'/' chains are left-associative: only non-first quotient
        # factors need parens
        parts = [_print(e.factors[0], _PREC_TERM)]
        parts += [_print(f, _PREC_POW) for f in e.factors[1:]]
        text = "*".join(parts)
    elif isinstance(e, Quot):
        left = _print(e.num, _PREC_TERM)
        right = _print(e.den, _PREC_POW)
        if isinstance(e.den, (Prod, Quot)):
            right = "(" + right + ")"
        text = left + "/" + right
    elif isinstance(e, Pow):
        base = _print(e.base, _PREC_SUM)
        # a negative literal base would re-parse as unary minus on the power
        if _prec(e.base) < _PREC_ATOM or (isinstance(e.base, Const) and e.base.value < 0):
            base = "(" + base + ")"
        text = base + "^" + _num_str(e.exponent)
        return text if ctx <= _PREC_POW else "(" + text + ")"
    elif isinstance(e, Exp):
        return "exp(" + _print(e.arg, _PREC_SUM) + ")"
    else:  # pragma: no cover
        raise TypeError(f"unknown node {type(e).__name__}")
    return text if _prec(e) >= ctx else "(" + text + ")"


# ---------------------------------------------------------------------------
# recursive-descent parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos)
        if m.lastgroup == "num":
            tokens.append(("num", float(m.group("num")), m.start("num")))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self) -> ModelExpr:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing {val!r}", pos)
        return e

    def expr(self) -> ModelExpr:
        terms = [self.term()]
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                terms.append(_negate(rhs) if val == "-" else rhs)
            else:
                break
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self) -> ModelExpr:
        current = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.unary()
                if val == "*":
                    if isinstance(current, Prod):
                        current = Prod(current.factors + (rhs,))
                    else:
                        current = Prod((current, rhs))
                else:
                    current = Quot(current, rhs)
            else:
                break
        return current

    def unary(self) -> ModelExpr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return _negate(self.unary())
        return self.factor()

    def factor(self) -> ModelExpr:
        base = self.base()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            sign = 1.0
            kind, val, pos = self.peek()
            if kind == "op" and val == "-":
                self.next()
                sign = -1.0
            kind, val, pos = self.next()
            if kind != "num":
                raise ParseError("expected a numeric exponent after '^'", pos)
            return Pow(base, sign * val)
        return base

    def base(self) -> ModelExpr:
        kind, val, pos = self.next()
        if kind == "num":
            return Const(val)
        if kind == "ident":
            if val == "s":
                return Var()
            if val == "exp":
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Exp(arg)
            raise ParseError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"expected an expression, got {val!r}" if val else "unexpected end of input", pos)


def _negate(e: ModelExpr) -> ModelExpr:
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Prod):
        first = e.factors[0]
        if isinstance(first, Const):
            if first.value == -1.0 and len(e.factors) == 2:
                return e.factors[1]
            if first.value == -1.0:
                return Prod(e.factors[1:])
            return Prod((Const(-first.value),) + e.factors[1:])
        return Prod((Const(-1.0),) + e.factors)
    return Prod((Const(-1.0), e))


def parse(text: str) -> ModelExpr:
    """Parse an expression in the grammar above into a ModelExpr."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# preset catalog

def _one_minus(e: ModelExpr) -> ModelExpr:
    return Sum((Const(1.0), _negate(e)))


def power(A: float = 1.0, a: float = 2.0) -> ModelExpr:
    """Power-law mobility A*s^a (A > 0, a > 1)."""
    if not (A > 0 and a > 1):
        raise ValueError(f"power preset needs A > 0 and a > 1, got A={A}, a={a}")
    body = Pow(Var(), float(a))
    return body if A == 1.0 else Prod((Const(float(A)), body))


def corey_a() -> ModelExpr:
    """Wetting-phase Corey mobility s^4."""
    return Pow(Var(), 4.0)


def corey_b() -> ModelExpr:
    """Non-wetting Corey mobility s^2*(1 - (1-s)^2), as a function of its own saturation."""
    return brooks_b(2.0, 2.0)


def brooks_b(eta: float, alpha: float) -> ModelExpr:
    """Brooks-Corey family s^eta*(1 - (1-s)^alpha) (eta >= 1, alpha > 1)."""
    if not (eta >= 1 and alpha > 1):
        raise ValueError(f"brooks_b preset needs eta >= 1 and alpha > 1, got eta={eta}, alpha={alpha}")
    return Prod((Pow(Var(), float(eta)), _one_minus(Pow(_one_minus(Var()), float(alpha)))))


def chierici(A: float = 1.0, B: float = 3.0, M: float = 1.0) -> ModelExpr:
    """Chierici exponential mobility A*exp(-B*((1-s)/s)^M) (A, B, M > 0).

    The negative exponent of the original (s/(1-s))^-M form is folded into
    the reciprocal base so the power node keeps a positive exponent.
    """
    if not (A > 0 and B > 0 and M > 0):
        raise ValueError(f"chierici preset needs A, B, M > 0, got A={A}, B={B}, M={M}")
    ratio = Quot(_one_minus(Var()), Var())
    arg = ratio if M == 1.0 else Pow(ratio, float(M))
    body = Exp(Prod((Const(-float(B)), arg)))
    return body if A == 1.0 else Prod((Const(float(A)), body))


_PRESETS = {
    "power": power,
    "corey_a": corey_a,
    "corey_b": corey_b,
    "brooks_b": brooks_b,
    "chierici": chierici,
}


def preset(name: str, **params: float) -> ModelExpr:
    """Build a catalog preset by name; see _PRESETS for the choices."""
    try:
        builder = _PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choices: {sorted(_PRESETS)}") from None
    return builder(**params)


def product(m1: ModelExpr, m2: ModelExpr) -> ModelExpr:
    """Product of two mobility expressions (flattens nested products)."""
    f1 = m1.factors if isinstance(m1, Prod) else (m1,)
    f2 = m2.factors if isinstance(m2, Prod) else (m2,)
    return Prod(f1 + f2)


def catalog() -> dict[str, ModelExpr]:
    """Representative named instances of every model family in the catalog."""
    return {
        "power_quadratic": power(1.0, 2.0),
        "power_generic": power(2.5, 3.5),
        "corey_a": corey_a(),
        "corey_b": corey_b(),
        "brooks_b_2_2": brooks_b(2.0, 2.0),
        "brooks_b_3_2.5": brooks_b(3.0, 2.5),
        "chierici_B3": chierici(1.0, 3.0, 1.0),
        "counterexample_1": parse("s^1.1 * exp(s^10)"),
        "counterexample_2": parse("s^1.1 * (1 + 15*s^10)"),
        "counterexample_3": parse("s^1.1 * (1 + 15*s^30)"),
    }


# ---------------------------------------------------------------------------
# model spec files

def parse_model_file(text: str) -> dict[str, ModelExpr]:
    """Read `m_a = <expr>` / `m_b = <expr>` assignments from spec-file text."""
    out: dict[str, ModelExpr] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rhs = line.partition("=")
        key = key.strip()
        if not sep or key not in ("m_a", "m_b"):
            raise ValueError(f"line {lineno}: expected 'm_a = <expr>' or 'm_b = <expr>', got {raw!r}")
        out[key] = parse(rhs)
    return out


def load_model_file(path: str) -> dict[str, ModelExpr]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model_file(fh.read())
