"""Green's functions: piecewise bivariate kernels plus Dirac terms.

An equitable-form operator (no global boundary terms) is read off into a
kernel ``g(x, xi)`` as follows.  Every integral term ``f int_a g`` turns into
``f(x) g(xi)`` on the region ``a <= xi <= x`` and ``-f(x) g(xi)`` on
``x <= xi <= a``; collecting over the intervals between breakpoints gives
2(m-1) case branches.  A local boundary term ``f <p> d^i`` becomes the
distribution ``(-1)^i f(x) delta^(i)(xi - p)`` and a differential term
``f d^i`` becomes the diagonal distribution ``(-1)^i f(x) delta^(i)(x - xi)``.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .constants import Constant
from .errors import DegenerateDomainError, NotEquitableError, ParseError
from .exppoly import BivariateExpPoly, ExpPoly, _coerce_constant
from .operators import Operator
from .parsing import parse_bivariate, parse_exppoly, parse_rational

REGION_LOWER = "xi<=x"
REGION_UPPER = "x<=xi"
_XI_LATEX = r"\xi"


def _shift_text(var: str, p) -> str:
    p = Fraction(p)
    if p == 0:
        return var
    return f"{var} - {p}" if p > 0 else f"{var} + {-p}"


class GreensFunction:
    """Breakpoints, 2(m-1) branch functions, and distributional terms.

    ``branches[(i, region)]`` is the kernel on ``xi`` in the i-th breakpoint
    interval (1-based) and the given region relative to the diagonal.
    ``dirac`` holds (point, order, coeff) for ``(-1)^order coeff(x)
    delta^(order)(xi - point)``; ``diagonal`` holds (order, coeff) for
    ``(-1)^order coeff(x) delta^(order)(x - xi)``.
    """

    __slots__ = ("breakpoints", "_branches", "dirac", "diagonal")

    def __init__(self, breakpoints, branches, dirac=(), diagonal=()):
        pts = sorted({Fraction(p) for p in breakpoints})
        if len(pts) < 2:
            raise DegenerateDomainError("degenerate domain: supply explicit interval")
        self.breakpoints = tuple(pts)
        self._branches: dict[tuple[int, str], BivariateExpPoly] = {}
        for i in range(1, len(pts)):
            for region in (REGION_LOWER, REGION_UPPER):
                self._branches[(i, region)] = branches.get(
                    (i, region), BivariateExpPoly.zero())
        self.dirac = tuple(sorted(
            ((Fraction(p), int(i), c) for p, i, c in dirac if not c.is_zero()),
            key=lambda t: (t[0], t[1]),
        ))
        self.diagonal = tuple(sorted(
            ((int(i), c) for i, c in diagonal if not c.is_zero()),
            key=lambda t: t[0],
        ))
        for p, _i, _c in self.dirac:
            if p not in self.breakpoints:
                raise ValueError(f"dirac point {p} is not a breakpoint")

    # -- structure ----------------------------------------------------------

    @property
    def interval_count(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def branch_count(self) -> int:
        return 2 * self.interval_count

    def branch(self, i: int, region: str) -> BivariateExpPoly:
        return self._branches[(i, region)]

    def has_distributional_part(self) -> bool:
        return bool(self.dirac or self.diagonal)

    def dirac_orders(self) -> set[tuple[Fraction, int]]:
        return {(p, i) for p, i, _c in self.dirac}

    def scale(self, c) -> "GreensFunction":
        c = _coerce_constant(c)
        return GreensFunction(
            self.breakpoints,
            {key: b * c for key, b in self._branches.items()},
            [(p, i, f * c) for p, i, f in self.dirac],
            [(i, f * c) for i, f in self.diagonal],
        )

    def __eq__(self, other):
        if not isinstance(other, GreensFunction):
            return NotImplemented
        return (self.breakpoints == other.breakpoints
                and self._branches == other._branches
                and self.dirac == other.dirac
                and self.diagonal == other.diagonal)

    def __repr__(self):
        return f"GreensFunction(breakpoints={[str(p) for p in self.breakpoints]})"

    # -- pointwise readout ----------------------------------------------------

    def eval_functional(self, x, xi) -> Constant:
        """Evaluate the functional part at a rational point.

        The interval is selected by xi (ties at interior breakpoints go to
        the left interval) and the diagonal tie xi = x uses the lower region.
        """
        x, xi = Fraction(x), Fraction(xi)
        lo, hi = self.breakpoints[0], self.breakpoints[-1]
        if not (lo <= x <= hi and lo <= xi <= hi):
            raise ValueError("point outside the domain of the Green's function")
        idx = 1
        for i in range(1, len(self.breakpoints)):
            idx = i
            if xi <= self.breakpoints[i]:
                break
        region = REGION_LOWER if xi <= x else REGION_UPPER
        return self._branches[(idx, region)].eval_at(x, xi)

    # -- integral action --------------------------------------------------------

    def apply_to(self, f: ExpPoly) -> ExpPoly:
        """Integrate the kernel against f and add distributional contributions.

        The result must be one smooth function on the whole domain (true for
        kernels extracted from operators); otherwise a ValueError is raised.
        """
        candidates = []
        m = len(self.breakpoints)
        extra = ExpPoly.zero()
        for p, i, coeff in self.dirac:
            extra = extra + coeff * f.derive(i).eval_at(p)
        for i, coeff in self.diagonal:
            extra = extra + coeff * f.derive(i)
        for cell in range(1, m):
            total = ExpPoly.zero()
            for i in range(1, m):
                p_lo, p_hi = self.breakpoints[i - 1], self.breakpoints[i]
                if i < cell:
                    total = total + _strip_integral(
                        self.branch(i, REGION_LOWER), f, p_lo, p_hi)
                elif i > cell:
                    total = total + _strip_integral(
                        self.branch(i, REGION_UPPER), f, p_lo, p_hi)
                else:
                    for A, B in self.branch(i, REGION_LOWER).pairs():
                        total = total + A * (B * f).integrate_from(p_lo)
                    for A, B in self.branch(i, REGION_UPPER).pairs():
                        anti = (B * f).integrate_from(p_lo)
                        total = total + A * (
                            ExpPoly.const(anti.eval_at(p_hi)) - anti)
            candidates.append(total + extra)
        first = candidates[0]
        for other in candidates[1:]:
            if other != first:
                raise ValueError("kernel is not smooth across breakpoints")
        return first

    # -- rendering ---------------------------------------------------------------

    def case_rows(self):
        """(lower, upper, region, term) rows of the case table."""
        rows = []
        for i in range(1, len(self.breakpoints)):
            for region in (REGION_LOWER, REGION_UPPER):
                rows.append((self.breakpoints[i - 1], self.breakpoints[i],
                             region, self._branches[(i, region)]))
        return rows

    def to_text(self) -> str:
        lines = []
        for lo, hi, region, term in self.case_rows():
            cond = f"{lo} <= xi <= {hi}, " + ("xi <= x" if region == REGION_LOWER else "x <= xi")
            lines.append(f"{cond}: {term.to_text()}")
        for p, i, coeff in self.dirac:
            sign = "-" if i % 2 else ""
            prime = "'" * i
            lines.append(f"dirac: {sign}({coeff.to_text()}) * delta{prime}({_shift_text('xi', p)})")
        for i, coeff in self.diagonal:
            sign = "-" if i % 2 else ""
            prime = "'" * i
            lines.append(f"diagonal: {sign}({coeff.to_text()}) * delta{prime}(x - xi)")
        return "\n".join(lines)

    def to_latex(self) -> str:
        lines = [r"\begin{array}{|l|l|}", r"\hline", r"\text{Case} & \text{Term}\\\hline"]
        for lo, hi, region, term in self.case_rows():
            cond = (rf"{lo} \le \xi \le {hi},\ \xi \le x" if region == REGION_LOWER
                    else rf"{lo} \le \xi \le {hi},\ x \le \xi")
            lines.append(rf"{cond} & {term.to_latex()}\\\hline")
        lines.append(r"\end{array}")
        if self.dirac or self.diagonal:
            parts = []
            for p, i, coeff in self.dirac:
                sign = "-" if i % 2 else "+"
                deriv = "" if i == 0 else (rf"^{{({i})}}" if i > 1 else "'")
                parts.append(
                    rf"{sign}\left({coeff.to_latex()}\right)"
                    rf"\,\delta{deriv}({_shift_text(_XI_LATEX, p)})")
            for i, coeff in self.diagonal:
                sign = "-" if i % 2 else "+"
                deriv = "" if i == 0 else (rf"^{{({i})}}" if i > 1 else "'")
                parts.append(
                    rf"{sign}\left({coeff.to_latex()}\right)\,\delta{deriv}(x-\xi)")
            joined = "".join(parts).lstrip("+")
            lines.append(r"\text{distributional part: } " + joined)
        return "\n".join(lines)

    # -- serialization --------------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "breakpoints": [str(p) for p in self.breakpoints],
            "branches": [
                {"interval": i, "region": region, "term": self._branches[(i, region)].to_text()}
                for (i, region) in sorted(self._branches)
            ],
            "dirac": [
                {"point": str(p), "order": i, "coeff": c.to_text()}
                for p, i, c in self.dirac
            ],
            "diagonal": [
                {"order": i, "coeff": c.to_text()}
                for i, c in self.diagonal
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "GreensFunction":
        try:
            breakpoints = [parse_rational(p) for p in data["breakpoints"]]
            branches = {
                (int(entry["interval"]), str(entry["region"])): parse_bivariate(entry["term"])
                for entry in data.get("branches", ())
            }
            dirac = [
                (parse_rational(entry["point"]), int(entry["order"]),
                 parse_exppoly(entry["coeff"]))
                for entry in data.get("dirac", ())
            ]
            diagonal = [
                (int(entry["order"]), parse_exppoly(entry["coeff"]))
                for entry in data.get("diagonal", ())
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad Green's function document: {exc}") from exc
        return cls(breakpoints, branches, dirac, diagonal)

    @classmethod
    def from_json(cls, text: str) -> "GreensFunction":
        return cls.from_json_dict(json.loads(text))


def _strip_integral(branch: BivariateExpPoly, f: ExpPoly, lo: Fraction, hi: Fraction) -> ExpPoly:
    """int_lo^hi branch(x, xi) f(xi) dxi as a function of x."""
    total = ExpPoly.zero()
    for A, B in branch.pairs():
        value = (B * f).integrate_from(lo).eval_at(hi)
        total = total + A * value
    return total


def extract(op: Operator, interval=None) -> GreensFunction:
    """Read off the Green's function of an equitable-form operator.

    Breakpoints are the integral basepoints and local boundary points of the
    operator, plus the endpoints of ``interval`` when given.  On the interval
    ``[p_i, p_{i+1}]`` the lower branch collects the terms with basepoint
    ``<= p_i`` and the upper branch the negated terms with basepoint
    ``>= p_{i+1}``.
    """
    if not op.is_equitable():
        raise NotEquitableError("operator not in equitable form")
    points: set[Fraction] = set(op.basepoints())
    points.update(op.boundary_points())
    if interval is not None:
        a, b = interval
        points.add(Fraction(a))
        points.add(Fraction(b))
    if len(points) < 2:
        raise DegenerateDomainError("degenerate domain: supply explicit interval")
    breakpoints = sorted(points)
    branches: dict[tuple[int, str], BivariateExpPoly] = {}
    integral_terms = op.integral_part
    for i in range(1, len(breakpoints)):
        lower = BivariateExpPoly.zero()
        upper = BivariateExpPoly.zero()
        for a, left, right in integral_terms:
            if a <= breakpoints[i - 1]:
                lower = lower + BivariateExpPoly.tensor(left, right)
            if a >= breakpoints[i]:
                upper = upper - BivariateExpPoly.tensor(left, right)
        branches[(i, REGION_LOWER)] = lower
        branches[(i, REGION_UPPER)] = upper
    dirac = [(p, i, f) for f, p, i in op.local_boundary]
    diagonal = [(i, f) for i, f in sorted(op.diff_part.items())]
    return GreensFunction(breakpoints, branches, dirac, diagonal)


def eval_functional(g: GreensFunction, x, xi) -> Constant:
    return g.eval_functional(x, xi)


def apply_greens(g: GreensFunction, f: ExpPoly) -> ExpPoly:
    return g.apply_to(f)


def render(g: GreensFunction, fmt: str) -> str:
    """Render the case table: fmt is ``latex``, ``json`` or ``text``."""
    if fmt == "latex":
        return g.to_latex()
    if fmt == "json":
        return g.to_json()
    if fmt == "text":
        return g.to_text()
    raise ValueError(f"unknown format {fmt!r}")
