"""The unified integro-differential operator ring.

Normal-form elements are sums of four kinds of terms, each with an ExpPoly
left coefficient ``f`` and rational points::

    D(i, f)        = f*d^i           differential part (i = 0 is multiplication)
    I(a, f, g)     = f*int_a*g       integral with basepoint a and right factor g
    L(p, i, f)     = f*<p>*d^i       local boundary term, <p> evaluates at p
    G(p, a, f, g)  = f*<p>*int_a*g   global boundary term

Right factors ``g`` are kept as monic monomials ``x^n exp(nu*x)``; their
scalar coefficients are folded into the left factor, so equality is
structural equality of the four part dictionaries.  Global terms are
presentation sugar (``f <p> int_a g = f int_a g - f int_p g``); ring products
always return the canonical global-free form, which is unique, while
``to_standard`` rebuilds the single-basepoint presentation with globals.

Multiplication is composition (``(u*v)(h) = u(v(h))``) and is computed by a
terminating rewrite of term pairs.  The key single-step rules are::

    d*f        -> f*d + f'
    d*int_a    -> 1
    int_a f d  -> f - int_a f' - f(a)*<a>
    int_a f int_b -> F*int_b - int_a*F          with F = int_a f
    <p>*f      -> f(p)*<p>,  <p><q> -> <q>,  d^k <p> -> 0 (k >= 1)
    <p>*int_a  -> global term,  <p>*int_p -> 0
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import ParseError
from .exppoly import ExpPoly, Monomial, _coerce_constant
from .parsing import parse_exppoly

# Part dictionaries: keys identify a term, values are left ExpPoly factors.
DiffKey = int                                   # derivative order
IntKey = tuple[Fraction, Monomial]              # (basepoint, right monomial)
LocalKey = tuple[Fraction, int]                 # (point, derivative order)
GlobalKey = tuple[Fraction, Fraction, Monomial]  # (point, basepoint, monomial)


def _mono(key: Monomial) -> ExpPoly:
    freq, power = key
    return ExpPoly.monomial(freq, power)


def _merge(target: dict, key, value: ExpPoly):
    cur = target.get(key)
    total = value if cur is None else cur + value
    if total.is_zero():
        target.pop(key, None)
    else:
        target[key] = total


class Operator:
    """A normal-form element of the unified operator ring."""

    __slots__ = ("_diff", "_integ", "_local", "_global")

    def __init__(self, diff=None, integ=None, local=None, glob=None):
        self._diff: dict[DiffKey, ExpPoly] = {}
        self._integ: dict[IntKey, ExpPoly] = {}
        self._local: dict[LocalKey, ExpPoly] = {}
        self._global: dict[GlobalKey, ExpPoly] = {}
        for i, f in (diff or {}).items():
            if not f.is_zero():
                self._diff[int(i)] = f
        for (a, mono), f in (integ or {}).items():
            if not f.is_zero():
                self._integ[(Fraction(a), mono)] = f
        for (p, i), f in (local or {}).items():
            if not f.is_zero():
                self._local[(Fraction(p), int(i))] = f
        for (p, a, mono), f in (glob or {}).items():
            if Fraction(p) != Fraction(a) and not f.is_zero():
                self._global[(Fraction(p), Fraction(a), mono)] = f

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls) -> "Operator":
        return cls()

    @classmethod
    def identity(cls) -> "Operator":
        return cls.multiplication(ExpPoly.one())

    @classmethod
    def derivative(cls, order: int = 1, coeff: ExpPoly | None = None) -> "Operator":
        return cls(diff={order: coeff if coeff is not None else ExpPoly.one()})

    @classmethod
    def multiplication(cls, f: ExpPoly) -> "Operator":
        return cls(diff={0: f})

    @classmethod
    def integral(cls, basepoint, left: ExpPoly | None = None,
                 right: ExpPoly | None = None) -> "Operator":
        """The term ``left * int_basepoint * right``."""
        left = left if left is not None else ExpPoly.one()
        right = right if right is not None else ExpPoly.one()
        integ: dict[IntKey, ExpPoly] = {}
        for freq, power, c in right.terms():
            _merge(integ, (Fraction(basepoint), (freq, power)), left * c)
        return cls(integ=integ)

    @classmethod
    def evaluation(cls, point, order: int = 0, left: ExpPoly | None = None) -> "Operator":
        """The term ``left * <point> * d^order``."""
        left = left if left is not None else ExpPoly.one()
        return cls(local={(Fraction(point), order): left})

    @classmethod
    def global_term(cls, point, basepoint, left: ExpPoly | None = None,
                    integrand: ExpPoly | None = None) -> "Operator":
        """The term ``left * <point> * int_basepoint * integrand``."""
        left = left if left is not None else ExpPoly.one()
        integrand = integrand if integrand is not None else ExpPoly.one()
        glob: dict[GlobalKey, ExpPoly] = {}
        for freq, power, c in integrand.terms():
            _merge(glob, (Fraction(point), Fraction(basepoint), (freq, power)), left * c)
        return cls(glob=glob)

    # -- views --------------------------------------------------------------

    @property
    def diff_part(self) -> dict[DiffKey, ExpPoly]:
        return dict(self._diff)

    @property
    def integral_part(self) -> list[tuple[Fraction, ExpPoly, ExpPoly]]:
        return [(a, f, _mono(m)) for (a, m), f in sorted(self._integ.items())]

    @property
    def local_boundary(self) -> list[tuple[ExpPoly, Fraction, int]]:
        return [(f, p, i) for (p, i), f in sorted(self._local.items())]

    @property
    def global_boundary(self) -> list[tuple[ExpPoly, Fraction, Fraction, ExpPoly]]:
        return [(f, p, a, _mono(m)) for (p, a, m), f in sorted(self._global.items())]

    def is_zero(self) -> bool:
        return not (self._diff or self._integ or self._local or self._global)

    def order(self) -> int:
        return max(self._diff) if self._diff else 0

    def is_differential(self) -> bool:
        return not (self._integ or self._local or self._global)

    def is_equitable(self) -> bool:
        return not self._global

    def basepoints(self) -> set[Fraction]:
        points = {a for (a, _m) in self._integ}
        points.update(a for (_p, a, _m) in self._global)
        return points

    def boundary_points(self) -> set[Fraction]:
        points = {p for (p, _i) in self._local}
        points.update(p for (p, _a, _m) in self._global)
        return points

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return (self._diff == other._diff and self._integ == other._integ
                and self._local == other._local and self._global == other._global)

    def __hash__(self):
        return hash((
            tuple(sorted(self._diff.items())),
            tuple(sorted(self._integ.items())),
            tuple(sorted(self._local.items())),
            tuple(sorted(self._global.items())),
        ))

    # -- module structure -----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        diff, integ = dict(self._diff), dict(self._integ)
        local, glob = dict(self._local), dict(self._global)
        for i, f in other._diff.items():
            _merge(diff, i, f)
        for key, f in other._integ.items():
            _merge(integ, key, f)
        for key, f in other._local.items():
            _merge(local, key, f)
        for key, f in other._global.items():
            _merge(glob, key, f)
        return Operator(diff, integ, local, glob)

    def __neg__(self):
        return Operator(
            {k: -f for k, f in self._diff.items()},
            {k: -f for k, f in self._integ.items()},
            {k: -f for k, f in self._local.items()},
            {k: -f for k, f in self._global.items()},
        )

    def __sub__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return self + (-other)

    def left_mul(self, f: ExpPoly) -> "Operator":
        """Multiply every term's left coefficient by the function f."""
        if f.is_zero():
            return Operator.zero()
        return Operator(
            {k: f * g for k, g in self._diff.items()},
            {k: f * g for k, g in self._integ.items()},
            {k: f * g for k, g in self._local.items()},
            {k: f * g for k, g in self._global.items()},
        )

    def __mul__(self, other):
        # Products are returned in the canonical global-free normal form:
        # <q>*int_a pairs and int_a - int_q pairs present the same element,
        # so composition results are normalized through the equitable
        # translation to make normal forms unique (and hence associative).
        if isinstance(other, Operator):
            total = Operator.zero()
            for t1 in self._terms():
                for t2 in other._terms():
                    total = total + _mul_terms(t1, t2)
            return total.to_equitable()
        f = _as_exppoly(other)
        if f is None:
            return NotImplemented
        return self * Operator.multiplication(f)

    def __rmul__(self, other):
        f = _as_exppoly(other)
        if f is None:
            return NotImplemented
        return Operator.multiplication(f) * self

    def __pow__(self, n: int):
        result = Operator.identity()
        for _ in range(n):
            result = result * self
        return result

    # -- term iteration -------------------------------------------------------

    def _terms(self):
        for i in sorted(self._diff):
            yield ("D", i, self._diff[i])
        for (a, m) in sorted(self._integ):
            yield ("I", a, self._integ[(a, m)], m)
        for (p, i) in sorted(self._local):
            yield ("L", p, i, self._local[(p, i)])
        for (p, a, m) in sorted(self._global):
            yield ("G", p, a, self._global[(p, a, m)], m)

    # -- action on functions ----------------------------------------------------

    def apply(self, h: ExpPoly) -> ExpPoly:
        total = ExpPoly.zero()
        for i, f in self._diff.items():
            total = total + f * h.derive(i)
        for (a, m), f in self._integ.items():
            total = total + f * (_mono(m) * h).integrate_from(a)
        for (p, i), f in self._local.items():
            total = total + f * h.derive(i).eval_at(p)
        for (p, a, m), f in self._global.items():
            total = total + f * (_mono(m) * h).integrate_from(a).eval_at(p)
        return total

    # -- translation between standard and equitable form ------------------------

    def to_equitable(self) -> "Operator":
        """Eliminate global terms: f*<p>*int_a*g = f*int_a*g - f*int_p*g."""
        out = Operator(self._diff, self._integ, self._local)
        for (p, a, m), f in self._global.items():
            out = out + Operator(integ={(a, m): f}) - Operator(integ={(p, m): f})
        return out

    def to_standard(self, basepoint) -> "Operator":
        """Move every integral to the distinguished basepoint:
        f*int_a*g = f*int_e*g - f*<a>*int_e*g."""
        e = Fraction(basepoint)
        out = Operator(self._diff, local=self._local)
        for (a, m), f in self._integ.items():
            out = out + Operator(integ={(e, m): f})
            if a != e:
                out = out - Operator(glob={(a, e, m): f})
        for (p, a, m), f in self._global.items():
            out = out + Operator(glob={(p, e, m): f})
            if a != e:
                out = out - Operator(glob={(a, e, m): f})
        return out

    # -- rendering ----------------------------------------------------------------

    def to_text(self) -> str:
        parts = []
        for term in self._terms():
            parts.append(_term_to_text(term))
        if not parts:
            return "0"
        text = parts[0]
        for piece in parts[1:]:
            text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return text

    def to_latex(self) -> str:
        parts = []
        for term in self._terms():
            parts.append(_term_to_latex(term))
        if not parts:
            return "0"
        out = parts[0]
        for piece in parts[1:]:
            out += piece if piece.startswith("-") else " + " + piece
        return out

    def __repr__(self):
        return f"Operator({self.to_text()})"

    def __str__(self):
        return self.to_text()

    # -- serialization -------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "diff": [
                {"order": i, "coeff": f.to_text()}
                for i, f in sorted(self._diff.items())
            ],
            "integral": [
                {"basepoint": str(a), "left": f.to_text(), "right": _mono(m).to_text()}
                for (a, m), f in sorted(self._integ.items())
            ],
            "local": [
                {"point": str(p), "order": i, "left": f.to_text()}
                for (p, i), f in sorted(self._local.items())
            ],
            "global": [
                {"point": str(p), "basepoint": str(a), "left": f.to_text(),
                 "integrand": _mono(m).to_text()}
                for (p, a, m), f in sorted(self._global.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Operator":
        try:
            out = cls.zero()
            for entry in data.get("diff", ()):
                out = out + cls.derivative(int(entry["order"]), parse_exppoly(entry["coeff"]))
            for entry in data.get("integral", ()):
                out = out + cls.integral(Fraction(entry["basepoint"]),
                                         parse_exppoly(entry["left"]),
                                         parse_exppoly(entry["right"]))
            for entry in data.get("local", ()):
                out = out + cls.evaluation(Fraction(entry["point"]), int(entry["order"]),
                                           parse_exppoly(entry["left"]))
            for entry in data.get("global", ()):
                out = out + cls.global_term(Fraction(entry["point"]), Fraction(entry["basepoint"]),
                                            parse_exppoly(entry["left"]),
                                            parse_exppoly(entry["integrand"]))
            return out
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad operator document: {exc}") from exc


def _as_exppoly(value) -> ExpPoly | None:
    if isinstance(value, ExpPoly):
        return value
    c = _coerce_constant(value)
    if c is not None:
        return ExpPoly.const(c)
    return None


# -- composition of normal-form terms ----------------------------------------


def _expand_diff_after_mult(order: int, g: ExpPoly) -> Operator:
    """d^order composed with multiplication by g, in normal form (Leibniz)."""
    total = Operator.zero()
    for k in range(order + 1):
        coeff = g.derive(order - k) * Fraction(comb(order, k))
        total = total + Operator.derivative(k, coeff)
    return total


def _diff_after_term(order: int, term) -> Operator:
    """d^order composed with a single normal-form term."""
    kind = term[0]
    if kind == "D":
        _, j, p = term
        total = Operator.zero()
        for k in range(order + 1):
            coeff = p.derive(order - k) * Fraction(comb(order, k))
            total = total + Operator.derivative(k + j, coeff)
        return total
    if kind == "I":
        _, a, p, m = term
        total = Operator.zero()
        for k in range(order + 1):
            coeff = p.derive(order - k) * Fraction(comb(order, k))
            if k == 0:
                total = total + Operator(integ={(a, m): coeff})
            else:
                # d^k int_a g = d^{k-1} g  (one derivative cancels the integral)
                total = total + _expand_diff_after_mult(k - 1, _mono(m)).left_mul(coeff)
        return total
    if kind == "L":
        _, q, i, p = term
        if order == 0:
            return Operator(local={(q, i): p})
        # d <q> = 0: only the k = 0 Leibniz summand survives
        return Operator(local={(q, i): p.derive(order)})
    _, q, a, p, m = term
    if order == 0:
        return Operator(glob={(q, a, m): p})
    return Operator(glob={(q, a, m): p.derive(order)})


def _int_diff(a: Fraction, q: ExpPoly, j: int) -> Operator:
    """int_a * q * d^j in normal form."""
    if j == 0:
        return Operator.integral(a, ExpPoly.one(), q)
    # int_a q d = q - int_a q' - q(a) <a>
    head = Operator.multiplication(q) - Operator.integral(a, ExpPoly.one(), q.derive())
    head = head - Operator.evaluation(a, 0, ExpPoly.const(q.eval_at(a)))
    if j == 1:
        return head
    return head * Operator.derivative(j - 1)


def _int_after_term(a: Fraction, g: ExpPoly, term) -> Operator:
    """int_a * g composed with a single normal-form term."""
    kind = term[0]
    if kind == "D":
        _, j, p = term
        return _int_diff(a, g * p, j)
    if kind == "I":
        _, b, p, m = term
        F = (g * p).integrate_from(a)
        return Operator.integral(b, F, _mono(m)) - Operator.integral(a, ExpPoly.one(), F * _mono(m))
    if kind == "L":
        _, q, i, p = term
        F = (g * p).integrate_from(a)
        return Operator(local={(q, i): F})
    _, q, b, p, m = term
    F = (g * p).integrate_from(a)
    return Operator(glob={(q, b, m): F})


def _absorb_evaluation(point: Fraction, op: Operator) -> Operator:
    """Compose <point> with a normal-form operator from the left."""
    glob: dict[GlobalKey, ExpPoly] = {}
    local: dict[LocalKey, ExpPoly] = {}
    for i, f in op._diff.items():
        _merge(local, (point, i), ExpPoly.const(f.eval_at(point)))
    for (a, m), f in op._integ.items():
        if point != a:
            _merge(glob, (point, a, m), ExpPoly.const(f.eval_at(point)))
    for (p, i), f in op._local.items():
        _merge(local, (p, i), ExpPoly.const(f.eval_at(point)))
    for (p, a, m), f in op._global.items():
        _merge(glob, (p, a, m), ExpPoly.const(f.eval_at(point)))
    return Operator(local=local, glob=glob)


def _mul_terms(t1, t2) -> Operator:
    kind = t1[0]
    if kind == "D":
        _, i, f = t1
        return _diff_after_term(i, t2).left_mul(f)
    if kind == "I":
        _, a, f, m = t1
        return _int_after_term(a, _mono(m), t2).left_mul(f)
    if kind == "L":
        _, p, i, f = t1
        inner = _diff_after_term(i, t2)
        return _absorb_evaluation(p, inner).left_mul(f)
    _, p, a, f, m = t1
    inner = _int_after_term(a, _mono(m), t2)
    return _absorb_evaluation(p, inner).left_mul(f)


# -- function-style aliases ----------------------------------------------------


def op_add(u: Operator, v: Operator) -> Operator:
    return u + v


def op_mul(u: Operator, v: Operator) -> Operator:
    return u * v


def apply(u: Operator, h: ExpPoly) -> ExpPoly:
    return u.apply(h)


def to_equitable(u: Operator) -> Operator:
    return u.to_equitable()


def to_standard(u: Operator, basepoint) -> Operator:
    return u.to_standard(basepoint)


# -- rendering helpers ---------------------------------------------------------


def _left_text(f: ExpPoly) -> str:
    if f == ExpPoly.one():
        return ""
    if f == -ExpPoly.one():
        return "-"
    text = f.to_text()
    if ("+" in text.strip("+-") or " - " in text or "*" in text or "/" in text
            or text.lstrip("-").count("x") > 1):
        return f"({text})"
    return text


def _term_to_text(term) -> str:
    kind = term[0]
    if kind == "D":
        _, i, f = term
        head = _left_text(f)
        if i == 0:
            return f.to_text() if not head else head
        dpart = "D" if i == 1 else f"D^{i}"
        return f"{head}{dpart}" if head else dpart
    if kind == "I":
        _, a, f, m = term
        head = _left_text(f)
        g = _mono(m)
        tail = "" if g == ExpPoly.one() else f"*{g.to_text()}"
        return f"{head}int[{a}]{tail}" if head else f"int[{a}]{tail}"
    if kind == "L":
        _, p, i, f = term
        head = _left_text(f)
        dpart = "" if i == 0 else ("*D" if i == 1 else f"*D^{i}")
        return f"{head}ev[{p}]{dpart}" if head else f"ev[{p}]{dpart}"
    _, p, a, f, m = term
    head = _left_text(f)
    g = _mono(m)
    tail = "" if g == ExpPoly.one() else f"*{g.to_text()}"
    return f"{head}ev[{p}]*int[{a}]{tail}" if head else f"ev[{p}]*int[{a}]{tail}"


def _left_latex(f: ExpPoly) -> str:
    if f == ExpPoly.one():
        return ""
    if f == -ExpPoly.one():
        return "-"
    text = f.to_latex()
    if "+" in text.strip("+-") or "-" in text[1:]:
        return rf"\left({text}\right)"
    return text


def _term_to_latex(term) -> str:
    kind = term[0]
    if kind == "D":
        _, i, f = term
        head = _left_latex(f)
        if i == 0:
            return f.to_latex() if not head else head
        dpart = r"\partial" if i == 1 else rf"\partial^{{{i}}}"
        return f"{head}{dpart}"
    if kind == "I":
        _, a, f, m = term
        head = _left_latex(f)
        g = _mono(m)
        tail = "" if g == ExpPoly.one() else rf"\,{g.to_latex()}"
        return head + rf"{{\textstyle\int_{{{a}}}}}" + tail
    if kind == "L":
        _, p, i, f = term
        head = _left_latex(f)
        dpart = "" if i == 0 else (r"\partial" if i == 1 else rf"\partial^{{{i}}}")
        return head + rf"\lfloor {p} \rfloor" + dpart
    _, p, a, f, m = term
    head = _left_latex(f)
    g = _mono(m)
    tail = "" if g == ExpPoly.one() else rf"\,{g.to_latex()}"
    return head + rf"\lfloor {p} \rfloor{{\textstyle\int_{{{a}}}}}" + tail
