"""Text syntax for exponential polynomials.

Grammar (whitespace insensitive)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*      # '/' needs a constant divisor
    factor := ('-'|'+') factor | atom ('^' INT)?
    atom   := INT | 'x' | 'xi' | 'exp' '(' expr ')' | '(' expr ')'

Rationals are written with '/' (``3/2``), powers must be nonnegative
integers, and the argument of ``exp`` must be linear in the variables with
rational coefficients, e.g. ``3/2*x^2*exp(-x) - 1`` or ``exp(x+2+xi)``.
The variable ``xi`` is only allowed when parsing bivariate expressions.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .constants import Constant
from .errors import ParseError
from .exppoly import BivariateExpPoly, ExpPoly

_TOKEN = re.compile(r"\s*(?:(\d+)|(x(?:i)?|exp)|([()+\-*/^])|(\S))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    text = text.strip()
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.group(4):
            raise ParseError(f"unexpected character at position {pos}: {text[pos:pos + 10]!r}")
        if m.group(1):
            tokens.append(m.group(1))
        elif m.group(2):
            tokens.append(m.group(2))
        else:
            tokens.append(m.group(3))
        pos = m.end()
    return tokens


class _Parser:
    """Recursive-descent parser producing BivariateExpPoly values."""

    def __init__(self, tokens: list[str], allow_xi: bool):
        self.tokens = tokens
        self.pos = 0
        self.allow_xi = allow_xi

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, tok: str):
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}")

    def parse(self) -> BivariateExpPoly:
        value = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input at token {self.peek()!r}")
        return value

    def expr(self) -> BivariateExpPoly:
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.next()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> BivariateExpPoly:
        value = self.factor()
        while self.peek() in ("*", "/"):
            op = self.next()
            rhs = self.factor()
            if op == "*":
                value = _biv_mul(value, rhs)
            else:
                c = _as_constant(rhs)
                if c is None:
                    raise ParseError("division is only defined by constants")
                if c.is_zero():
                    raise ZeroDivisionError("zero divisor")
                value = value * c.inverse()
        return value

    def factor(self) -> BivariateExpPoly:
        tok = self.peek()
        if tok in ("+", "-"):
            self.next()
            value = self.factor()
            return value if tok == "+" else -value
        value = self.atom()
        if self.peek() == "^":
            self.next()
            exp_tok = self.next()
            if not exp_tok.isdigit():
                raise ParseError(f"exponent must be a nonnegative integer, got {exp_tok!r}")
            power = int(exp_tok)
            result = _biv_const(1)
            for _ in range(power):
                result = _biv_mul(result, value)
            return result
        return value

    def atom(self) -> BivariateExpPoly:
        tok = self.next()
        if tok.isdigit():
            return _biv_const(Fraction(int(tok)))
        if tok == "x":
            return BivariateExpPoly.tensor(ExpPoly.x(), ExpPoly.one())
        if tok == "xi":
            if not self.allow_xi:
                raise ParseError("variable 'xi' is not allowed here")
            return BivariateExpPoly.tensor(ExpPoly.one(), ExpPoly.x())
        if tok == "exp":
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return _exp_of(arg)
        if tok == "(":
            value = self.expr()
            self.expect(")")
            return value
        raise ParseError(f"unexpected token {tok!r}")


def _biv_const(c) -> BivariateExpPoly:
    return BivariateExpPoly.tensor(ExpPoly.const(c), ExpPoly.one())


def _as_constant(value: BivariateExpPoly) -> Constant | None:
    pairs = value.pairs()
    if not pairs:
        return Constant.zero()
    if len(pairs) == 1:
        f, g = pairs[0]
        if g == ExpPoly.one():
            return f.as_constant()
    return None


def _biv_mul(a: BivariateExpPoly, b: BivariateExpPoly) -> BivariateExpPoly:
    total = BivariateExpPoly.zero()
    for fa, ga in a.pairs():
        for fb, gb in b.pairs():
            total = total + BivariateExpPoly.tensor(fa * fb, ga * gb)
    return total


def _exp_of(arg: BivariateExpPoly) -> BivariateExpPoly:
    """exp of a linear form a*x + b*xi + q with rational coefficients."""
    xfreq = Fraction(0)
    yfreq = Fraction(0)
    offset = Fraction(0)
    for f, g in arg.pairs():
        for gfreq, gpow, gc in g.terms():
            if gfreq != 0:
                raise ParseError("exp argument must be linear in x and xi")
            for ffreq, fpow, fc in f.terms():
                if ffreq != 0:
                    raise ParseError("exp argument must be linear in x and xi")
                c = (fc * gc).as_rational()
                if c is None:
                    raise ParseError("exp argument must have rational coefficients")
                if fpow == 0 and gpow == 0:
                    offset += c
                elif fpow == 1 and gpow == 0:
                    xfreq += c
                elif fpow == 0 and gpow == 1:
                    yfreq += c
                else:
                    raise ParseError("exp argument must be linear in x and xi")
    xpart = ExpPoly.monomial(xfreq, 0, Constant.e_power(offset))
    ypart = ExpPoly.monomial(yfreq, 0)
    return BivariateExpPoly.tensor(xpart, ypart)


def parse_bivariate(text: str) -> BivariateExpPoly:
    """Parse an expression in x and xi into a BivariateExpPoly."""
    return _Parser(_tokenize(text), allow_xi=True).parse()


def parse_exppoly(text: str) -> ExpPoly:
    """Parse an expression in x alone into an ExpPoly."""
    value = _Parser(_tokenize(text), allow_xi=False).parse()
    total = ExpPoly.zero()
    for f, g in value.pairs():
        c = g.as_constant()
        assert c is not None  # xi was rejected during parsing
        total = total + f * c
    return total


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational literal {text!r}") from exc
