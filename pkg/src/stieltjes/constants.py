"""Exact scalar field built from the group algebra of (Q, +).

A scalar is a quotient of two finite sums ``sum_q c_q * e^q`` with rational
exponents ``q`` and rational coefficients ``c_q``.  The symbols ``e^q`` are
treated as formally linearly independent over Q, which gives a decidable zero
test that is sound for the real number e.  Fractions are kept fully reduced,
so structural equality coincides with field equality.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .errors import ParseError

Gadict = dict  # Fraction exponent -> Fraction coefficient, zeros never stored


def _ga_normalize(d: Gadict) -> Gadict:
    return {q: c for q, c in d.items() if c != 0}


def _ga_add(a: Gadict, b: Gadict) -> Gadict:
    out = dict(a)
    for q, c in b.items():
        s = out.get(q, Fraction(0)) + c
        if s:
            out[q] = s
        else:
            out.pop(q, None)
    return out


def _ga_neg(a: Gadict) -> Gadict:
    return {q: -c for q, c in a.items()}


def _ga_mul(a: Gadict, b: Gadict) -> Gadict:
    if not a or not b:
        return {}
    # integer exponent grid: int keys hash much faster than Fractions
    n = 1
    for d in (a, b):
        for q in d:
            n = lcm(n, q.denominator)
    ia = [(int(q * n), c) for q, c in a.items()]
    ib = [(int(q * n), c) for q, c in b.items()]
    out: dict[int, Fraction] = {}
    for qa, ca in ia:
        for qb, cb in ib:
            q = qa + qb
            s = out.get(q, 0) + ca * cb
            if s:
                out[q] = s
            else:
                out.pop(q, None)
    return {Fraction(q, n): c for q, c in out.items()}


def _ga_scale(a: Gadict, c: Fraction) -> Gadict:
    if not c:
        return {}
    return {q: cq * c for q, cq in a.items()}


def _ga_shift(a: Gadict, s: Fraction) -> Gadict:
    return {q + s: c for q, c in a.items()}


# -- integer-exponent polynomial helpers used for gcd reduction ------------
#
# Exponents are scaled to a common integer grid and shifted so that the
# constant term is nonzero; on that grid the elements are ordinary univariate
# polynomials and a primitive pseudo-remainder sequence over Z computes the
# gcd without fraction blowup.


def _grid(*elems: Gadict) -> int:
    n = 1
    for d in elems:
        for q in d:
            n = lcm(n, q.denominator)
    return n


def _to_poly(d: Gadict, n: int) -> tuple[dict[int, Fraction], Fraction]:
    """Return (integer-exponent dict, shift) with minimal exponent zero."""
    if not d:
        return {}, Fraction(0)
    shift = min(d)
    return {int((q - shift) * n): c for q, c in d.items()}, shift


def _poly_divmod(a: dict[int, Fraction], b: dict[int, Fraction]):
    quot: dict[int, Fraction] = {}
    rem = dict(a)
    db = max(b)
    lb = b[db]
    while rem and max(rem) >= db:
        dr = max(rem)
        f = rem[dr] / lb
        quot[dr - db] = f
        for k, c in b.items():
            s = rem.get(dr - db + k, Fraction(0)) - f * c
            if s:
                rem[dr - db + k] = s
            else:
                rem.pop(dr - db + k, None)
    return quot, rem


def _int_primitive(p: dict[int, int]) -> dict[int, int]:
    if not p:
        return p
    g = 0
    for c in p.values():
        g = gcd(g, c)
    if p[max(p)] < 0:
        g = -g
    return {k: c // g for k, c in p.items()}


def _int_prem(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    """Pseudo-remainder of a by b over Z."""
    db = max(b)
    lb = b[db]
    rem = dict(a)
    while rem and max(rem) >= db:
        dr = max(rem)
        lr = rem[dr]
        # lb * rem - lr * x^{dr-db} * b kills the leading term
        out: dict[int, int] = {}
        for k, c in rem.items():
            out[k] = lb * c
        for k, c in b.items():
            kk = dr - db + k
            s = out.get(kk, 0) - lr * c
            if s:
                out[kk] = s
            else:
                out.pop(kk, None)
        rem = out
    return rem


def _poly_gcd(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    """Monic gcd over Q, computed by a primitive PRS over Z."""
    def to_int(p):
        denom = 1
        for c in p.values():
            denom = lcm(denom, c.denominator)
        return _int_primitive({k: int(c * denom) for k, c in p.items()})

    pa, pb = to_int(a), to_int(b)
    while pb:
        pa, pb = pb, _int_primitive(_int_prem(pa, pb))
    if not pa:
        return {}
    lead = pa[max(pa)]
    return {k: Fraction(c, lead) for k, c in pa.items()}


def _ga_reduce(num: Gadict, den: Gadict) -> tuple[Gadict, Gadict]:
    """Cancel the gcd of numerator and denominator."""
    if not num:
        return {}, {Fraction(0): Fraction(1)}
    # a single-term factor is cancelled by the exponent anchoring alone
    if len(num) == 1 or len(den) == 1:
        return num, den
    n = _grid(num, den)
    pn, sn = _to_poly(num, n)
    pd, sd = _to_poly(den, n)
    g = _poly_gcd(pn, pd)
    if g and max(g) > 0:
        qn, rn = _poly_divmod(pn, g)
        qd, rd = _poly_divmod(pd, g)
        assert not rn and not rd
        pn, pd = qn, qd
    num = {Fraction(k, n) + sn: c for k, c in pn.items()}
    den = {Fraction(k, n) + sd: c for k, c in pd.items()}
    return num, den


class Constant:
    """An element of the scalar field, kept in canonical reduced form.

    Canonical form: the fraction is reduced, the denominator's smallest
    exponent is zero and its leading (largest-exponent) coefficient is one.
    """

    __slots__ = ("_num", "_den")

    def __init__(self, num: Gadict, den: Gadict | None = None, _reduced: bool = False):
        num = _ga_normalize(dict(num))
        den = _ga_normalize(dict(den)) if den is not None else {Fraction(0): Fraction(1)}
        if not den:
            raise ZeroDivisionError("zero divisor")
        if not _reduced:
            num, den = _ga_reduce(num, den)
        if num:
            shift = -min(den)
            if shift:
                num = _ga_shift(num, shift)
                den = _ga_shift(den, shift)
            lead = den[max(den)]
            if lead != 1:
                num = _ga_scale(num, 1 / lead)
                den = _ga_scale(den, 1 / lead)
        else:
            den = {Fraction(0): Fraction(1)}
        self._num = tuple(sorted(num.items(), reverse=True))
        self._den = tuple(sorted(den.items(), reverse=True))

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "Constant":
        return cls({})

    @classmethod
    def one(cls) -> "Constant":
        return cls({Fraction(0): Fraction(1)})

    @classmethod
    def from_rational(cls, q) -> "Constant":
        return cls({Fraction(0): Fraction(q)})

    @classmethod
    def e_power(cls, q, coeff=1) -> "Constant":
        """The scalar ``coeff * e^q``."""
        return cls({Fraction(q): Fraction(coeff)})

    # -- views ------------------------------------------------------------

    @property
    def num(self) -> Gadict:
        return dict(self._num)

    @property
    def den(self) -> Gadict:
        return dict(self._den)

    def is_zero(self) -> bool:
        return not self._num

    def is_one(self) -> bool:
        return self == _ONE

    def as_rational(self) -> Fraction | None:
        """The value as a Fraction, or None if it involves e-symbols."""
        if not self._num:
            return Fraction(0)
        if self._den == ((Fraction(0), Fraction(1)),) and len(self._num) == 1:
            q, c = self._num[0]
            if q == 0:
                return c
        return None

    def as_monomial(self) -> tuple[Fraction, Fraction] | None:
        """Return (exponent, coefficient) if the value is ``c * e^q``."""
        if len(self._num) == 1 and self._den == ((Fraction(0), Fraction(1)),):
            q, c = self._num[0]
            return q, c
        return None

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, Constant):
            return other
        if isinstance(other, (int, Fraction)):
            return Constant.from_rational(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self._num:
            return other
        if not other._num:
            return self
        if self._den == other._den:
            # common case (e.g. matrix rows over one determinant)
            return Constant(_ga_add(self.num, other.num), self.den)
        num = _ga_add(_ga_mul(self.num, other.den), _ga_mul(other.num, self.den))
        return Constant(num, _ga_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Constant(_ga_neg(self.num), self.den, _reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self._num or not other._num:
            return _ZERO
        # inputs are reduced; cross-cancel so the product needs no gcd
        n1, d2 = _ga_reduce(self.num, other.den)
        n2, d1 = _ga_reduce(other.num, self.den)
        return Constant(_ga_mul(n1, n2), _ga_mul(d1, d2), _reduced=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("zero divisor")
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def inverse(self) -> "Constant":
        if self.is_zero():
            raise ZeroDivisionError("zero divisor")
        return Constant(self.den, self.num, _reduced=True)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self):
        return hash((self._num, self._den))

    # -- rendering --------------------------------------------------------

    @staticmethod
    def _ga_text(terms) -> str:
        parts = []
        for q, c in terms:
            if q == 0:
                piece = str(c)
            elif c == 1:
                piece = f"exp({q})"
            elif c == -1:
                piece = f"-exp({q})"
            else:
                piece = f"{c}*exp({q})"
            if parts:
                parts.append(f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}")
            else:
                parts.append(piece)
        return "".join(parts) if parts else "0"

    def to_text(self) -> str:
        num = self._ga_text(self._num)
        if self._den == ((Fraction(0), Fraction(1)),):
            return num
        return f"({num})/({self._ga_text(self._den)})"

    @staticmethod
    def _ga_latex(terms) -> str:
        parts = []
        for q, c in terms:
            if q == 0:
                piece = _frac_latex(c)
            elif abs(c) == 1:
                piece = ("-" if c < 0 else "") + f"e^{{{q}}}"
            else:
                piece = f"{_frac_latex(c)} e^{{{q}}}"
            if parts and not piece.startswith("-"):
                parts.append("+" + piece)
            else:
                parts.append(piece)
        return "".join(parts) if parts else "0"

    def to_latex(self) -> str:
        num = self._ga_latex(self._num)
        if self._den == ((Fraction(0), Fraction(1)),):
            return num
        return rf"\frac{{{num}}}{{{self._ga_latex(self._den)}}}"

    def __repr__(self):
        return f"Constant({self.to_text()})"

    def __str__(self):
        return self.to_text()

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "num": {str(q): str(c) for q, c in self._num},
            "den": {str(q): str(c) for q, c in self._den},
        }

    @classmethod
    def from_json(cls, data: dict) -> "Constant":
        try:
            num = {Fraction(q): Fraction(c) for q, c in data["num"].items()}
            den = {Fraction(q): Fraction(c) for q, c in data["den"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad constant document: {exc}") from exc
        return cls(num, den)


def _frac_latex(c: Fraction) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    sign = "-" if c < 0 else ""
    return rf"{sign}\tfrac{{{abs(c.numerator)}}}{{{c.denominator}}}"


def const_arith(a: Constant, b: Constant, kind: str) -> Constant:
    """Field arithmetic dispatch: kind is ``add``, ``mul`` or ``div``."""
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown kind {kind!r}")


_ONE = Constant({Fraction(0): Fraction(1)})
_ZERO = Constant({})
