"""Exponential polynomials: the computable function algebra of the solver.

An ``ExpPoly`` is a finite sum ``sum c_{l,n} * x^n * exp(l*x)`` with rational
frequencies ``l`` and ``Constant`` coefficients.  The class is closed under
addition, multiplication, differentiation, integration from a rational point
and evaluation at rational points, which is everything the operator ring and
the extraction step need.

``BivariateExpPoly`` represents finite sums ``sum f_i(x) * g_i(xi)``; it is
stored with the ``xi`` factor split into monomials so equality is structural.
"""

from __future__ import annotations

from fractions import Fraction

from .constants import Constant

# A monomial key for the second tensor factor: (frequency, power).
Monomial = tuple[Fraction, int]


def _coerce_constant(c) -> Constant | None:
    if isinstance(c, Constant):
        return c
    if isinstance(c, (int, Fraction)):
        return Constant.from_rational(c)
    return None


class ExpPoly:
    """A univariate exponential polynomial in canonical form."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[Fraction, list[Constant]] | None = None):
        clean: dict[Fraction, tuple[Constant, ...]] = {}
        for freq, coeffs in (terms or {}).items():
            coeffs = list(coeffs)
            while coeffs and coeffs[-1].is_zero():
                coeffs.pop()
            if coeffs:
                clean[Fraction(freq)] = tuple(coeffs)
        self._terms = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "ExpPoly":
        return cls()

    @classmethod
    def one(cls) -> "ExpPoly":
        return cls.const(1)

    @classmethod
    def x(cls) -> "ExpPoly":
        return cls.monomial(0, 1)

    @classmethod
    def const(cls, c) -> "ExpPoly":
        c = _coerce_constant(c)
        return cls({Fraction(0): [c]})

    @classmethod
    def exponential(cls, freq) -> "ExpPoly":
        return cls.monomial(freq, 0)

    @classmethod
    def monomial(cls, freq, power: int, coeff=1) -> "ExpPoly":
        c = _coerce_constant(coeff)
        coeffs = [Constant.zero()] * power + [c]
        return cls({Fraction(freq): coeffs})

    # -- views ------------------------------------------------------------

    def terms(self):
        """Iterate (frequency, power, coefficient) over nonzero terms."""
        for freq in sorted(self._terms):
            for power, c in enumerate(self._terms[freq]):
                if not c.is_zero():
                    yield freq, power, c

    def coefficient(self, freq, power: int) -> Constant:
        coeffs = self._terms.get(Fraction(freq), ())
        if power < len(coeffs):
            return coeffs[power]
        return Constant.zero()

    def is_zero(self) -> bool:
        return not self._terms

    def as_constant(self) -> Constant | None:
        """The value as a Constant if it has no x-dependence, else None."""
        if not self._terms:
            return Constant.zero()
        if set(self._terms) == {Fraction(0)} and len(self._terms[Fraction(0)]) == 1:
            return self._terms[Fraction(0)][0]
        return None

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        out: dict[Fraction, list[Constant]] = {
            f: list(cs) for f, cs in self._terms.items()
        }
        for freq, coeffs in other._terms.items():
            cur = out.setdefault(freq, [])
            for i, c in enumerate(coeffs):
                if i < len(cur):
                    cur[i] = cur[i] + c
                else:
                    cur.append(c)
        return ExpPoly(out)

    def __neg__(self):
        return ExpPoly({f: [-c for c in cs] for f, cs in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            out: dict[Fraction, list[Constant]] = {}
            for f1, cs1 in self._terms.items():
                for f2, cs2 in other._terms.items():
                    freq = f1 + f2
                    cur = out.setdefault(freq, [])
                    need = len(cs1) + len(cs2) - 1
                    while len(cur) < need:
                        cur.append(Constant.zero())
                    for i, c1 in enumerate(cs1):
                        if c1.is_zero():
                            continue
                        for j, c2 in enumerate(cs2):
                            cur[i + j] = cur[i + j] + c1 * c2
            return ExpPoly(out)
        c = _coerce_constant(other)
        if c is None:
            return NotImplemented
        return ExpPoly({f: [ci * c for ci in cs] for f, cs in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(sorted(self._terms.items())))

    # -- calculus ---------------------------------------------------------

    def derive(self, times: int = 1) -> "ExpPoly":
        """The derivative: d/dx(x^n e^{lx}) = n x^{n-1} e^{lx} + l x^n e^{lx}."""
        result = self
        for _ in range(times):
            out: dict[Fraction, list[Constant]] = {}
            for freq, coeffs in result._terms.items():
                cur = out.setdefault(freq, [Constant.zero()] * len(coeffs))
                for n, c in enumerate(coeffs):
                    if c.is_zero():
                        continue
                    if n >= 1:
                        cur[n - 1] = cur[n - 1] + c * n
                    if freq:
                        cur[n] = cur[n] + c * freq
            result = ExpPoly(out)
        return result

    def antiderivative(self) -> "ExpPoly":
        out = ExpPoly.zero()
        for freq, power, c in self.terms():
            if freq == 0:
                out = out + ExpPoly.monomial(0, power + 1, c / Fraction(power + 1))
            else:
                # int x^n e^{lx} = x^n e^{lx}/l - (n/l) int x^{n-1} e^{lx}
                n, acc = power, ExpPoly.zero()
                coeff = c / freq
                while n >= 0:
                    acc = acc + ExpPoly.monomial(freq, n, coeff)
                    coeff = coeff * Fraction(-n, 1) / freq
                    n -= 1
                out = out + acc
        return out

    def integrate_from(self, a) -> "ExpPoly":
        """The antiderivative F with F(a) = 0."""
        F = self.antiderivative()
        return F - ExpPoly.const(F.eval_at(a))

    def eval_at(self, q) -> Constant:
        q = Fraction(q)
        total = Constant.zero()
        for freq, power, c in self.terms():
            total = total + c * Constant.e_power(freq * q, Fraction(q) ** power if power else 1)
        return total

    # -- rendering --------------------------------------------------------

    def to_text(self) -> str:
        parts = []
        for freq, power, c in self.terms():
            parts.append(_term_text(c, power, freq, "x"))
        if not parts:
            return "0"
        text = parts[0]
        for piece in parts[1:]:
            text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return text

    def to_latex(self) -> str:
        parts = []
        for freq, power, c in self.terms():
            parts.append(_term_latex(c, power, freq, "x"))
        if not parts:
            return "0"
        out = parts[0]
        for piece in parts[1:]:
            out += piece if piece.startswith("-") else "+" + piece
        return out

    def __repr__(self):
        return f"ExpPoly({self.to_text()})"

    def __str__(self):
        return self.to_text()


def _term_text(c: Constant, power: int, freq: Fraction, var: str, ypower: int = 0,
                yfreq: Fraction = Fraction(0), yvar: str = "xi") -> str:
    """Render ``c * var^power * yvar^ypower * exp(freq*var + yfreq*yvar)``."""
    factors = []
    mono = c.as_monomial()
    offset = Fraction(0)
    if mono is not None:
        offset, coeff = mono
        sign = "-" if coeff < 0 else ""
        coeff = abs(coeff)
        if coeff != 1 or (power == 0 and ypower == 0 and freq == 0 and yfreq == 0 and offset == 0):
            factors.append(str(coeff))
    else:
        sign = ""
        factors.append(f"({c.to_text()})")
    if power:
        factors.append(var if power == 1 else f"{var}^{power}")
    if ypower:
        factors.append(yvar if ypower == 1 else f"{yvar}^{ypower}")
    arg = _linear_text(freq, var, yfreq, yvar, offset)
    if arg:
        factors.append(f"exp({arg})")
    return sign + "*".join(factors)


def _linear_text(freq, var, yfreq, yvar, offset) -> str:
    pieces = []
    for coeff, name in ((freq, var), (yfreq, yvar)):
        if not coeff:
            continue
        if coeff == 1:
            term = name
        elif coeff == -1:
            term = f"-{name}"
        else:
            term = f"{coeff}*{name}"
        pieces.append(term)
    if offset:
        pieces.append(str(offset))
    if not pieces:
        return ""
    text = pieces[0]
    for p in pieces[1:]:
        text += p if p.startswith("-") else f"+{p}"
    return text


def _term_latex(c: Constant, power: int, freq: Fraction, var: str, ypower: int = 0,
                 yfreq: Fraction = Fraction(0), yvar: str = r"\xi") -> str:
    mono = c.as_monomial()
    factors = []
    offset = Fraction(0)
    if mono is not None:
        offset, coeff = mono
        sign = "-" if coeff < 0 else ""
        coeff = abs(coeff)
        if coeff != 1 or (power == 0 and ypower == 0 and freq == 0 and yfreq == 0 and offset == 0):
            factors.append(_frac_latex(coeff))
    else:
        sign = ""
        factors.append(rf"\left({c.to_latex()}\right)")
    if power:
        factors.append(var if power == 1 else f"{var}^{{{power}}}")
    if ypower:
        factors.append(yvar if ypower == 1 else f"{yvar}^{{{ypower}}}")
    arg = _linear_latex(freq, var, yfreq, yvar, offset)
    if arg:
        factors.append(f"e^{{{arg}}}")
    return sign + " ".join(factors)


def _linear_latex(freq, var, yfreq, yvar, offset) -> str:
    pieces = []
    for coeff, name in ((freq, var), (yfreq, yvar)):
        if not coeff:
            continue
        if coeff == 1:
            term = name
        elif coeff == -1:
            term = f"-{name}"
        else:
            term = f"{_frac_latex(coeff)}{name}"
        pieces.append(term)
    if offset:
        pieces.append(_frac_latex(offset))
    if not pieces:
        return ""
    text = pieces[0]
    for p in pieces[1:]:
        text += p if p.startswith("-") else f"+{p}"
    return text


def _frac_latex(c: Fraction) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    sign = "-" if c < 0 else ""
    return rf"{sign}\tfrac{{{abs(c.numerator)}}}{{{c.denominator}}}"


class BivariateExpPoly:
    """A finite sum of tensor products f(x) * g(xi).

    The second factor is split into monomials ``xi^n exp(nu*xi)`` so that the
    representation is canonical: ``_terms`` maps each monomial to its ExpPoly
    coefficient in x.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[Monomial, ExpPoly] | None = None):
        self._terms = {
            key: f for key, f in (terms or {}).items() if not f.is_zero()
        }

    @classmethod
    def zero(cls) -> "BivariateExpPoly":
        return cls()

    @classmethod
    def tensor(cls, f: ExpPoly, g: ExpPoly) -> "BivariateExpPoly":
        out: dict[Monomial, ExpPoly] = {}
        for freq, power, c in g.terms():
            key = (freq, power)
            cur = out.get(key, ExpPoly.zero())
            out[key] = cur + f * c
        return cls(out)

    @classmethod
    def from_pairs(cls, pairs) -> "BivariateExpPoly":
        total = cls.zero()
        for f, g in pairs:
            total = total + cls.tensor(f, g)
        return total

    def pairs(self) -> list[tuple[ExpPoly, ExpPoly]]:
        """The canonical (x-factor, xi-monomial) decomposition."""
        out = []
        for (freq, power) in sorted(self._terms):
            out.append((self._terms[(freq, power)], ExpPoly.monomial(freq, power)))
        return out

    def is_zero(self) -> bool:
        return not self._terms

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, BivariateExpPoly):
            return NotImplemented
        out = dict(self._terms)
        for key, f in other._terms.items():
            out[key] = out.get(key, ExpPoly.zero()) + f
        return BivariateExpPoly(out)

    def __neg__(self):
        return BivariateExpPoly({k: -f for k, f in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, BivariateExpPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        c = _coerce_constant(other)
        if c is None:
            return NotImplemented
        return BivariateExpPoly({k: f * c for k, f in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BivariateExpPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(sorted(self._terms.items())))

    # -- partial calculus on the tensor factors ----------------------------

    def dx(self) -> "BivariateExpPoly":
        return BivariateExpPoly({k: f.derive() for k, f in self._terms.items()})

    def dy(self) -> "BivariateExpPoly":
        total = BivariateExpPoly.zero()
        for (freq, power), f in self._terms.items():
            mono = ExpPoly.monomial(freq, power)
            total = total + BivariateExpPoly.tensor(f, mono.derive())
        return total

    def ix(self, a) -> "BivariateExpPoly":
        return BivariateExpPoly({k: f.integrate_from(a) for k, f in self._terms.items()})

    def iy(self, a) -> "BivariateExpPoly":
        total = BivariateExpPoly.zero()
        for (freq, power), f in self._terms.items():
            mono = ExpPoly.monomial(freq, power)
            total = total + BivariateExpPoly.tensor(f, mono.integrate_from(a))
        return total

    def eval_at(self, x, xi) -> Constant:
        xi = Fraction(xi)
        total = Constant.zero()
        for (freq, power), f in self._terms.items():
            factor = Constant.e_power(freq * xi, Fraction(xi) ** power if power else 1)
            total = total + f.eval_at(x) * factor
        return total

    # -- rendering --------------------------------------------------------

    def to_text(self) -> str:
        parts = []
        for (yfreq, ypower) in sorted(self._terms):
            f = self._terms[(yfreq, ypower)]
            for freq, power, c in f.terms():
                parts.append(_term_text(c, power, freq, "x", ypower, yfreq, "xi"))
        if not parts:
            return "0"
        text = parts[0]
        for piece in parts[1:]:
            text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return text

    def to_latex(self) -> str:
        parts = []
        for (yfreq, ypower) in sorted(self._terms):
            f = self._terms[(yfreq, ypower)]
            for freq, power, c in f.terms():
                parts.append(_term_latex(c, power, freq, "x", ypower, yfreq, r"\xi"))
        if not parts:
            return "0"
        out = parts[0]
        for piece in parts[1:]:
            out += piece if piece.startswith("-") else "+" + piece
        return out

    def __repr__(self):
        return f"BivariateExpPoly({self.to_text()})"


def derive(f: ExpPoly) -> ExpPoly:
    return f.derive()


def integrate_from(f: ExpPoly, a) -> ExpPoly:
    return f.integrate_from(a)


def eval_at(f: ExpPoly, q) -> Constant:
    return f.eval_at(q)


def bivariate_ops(h: BivariateExpPoly, which: str, a=None) -> BivariateExpPoly:
    """Apply a partial operation to a tensor product: dx, dy, ix or iy."""
    if which == "dx":
        return h.dx()
    if which == "dy":
        return h.dy()
    if which == "ix":
        return h.ix(a)
    if which == "iy":
        return h.iy(a)
    raise ValueError(f"unknown operation {which!r}")
