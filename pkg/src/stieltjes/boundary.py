"""Stieltjes boundary problems and the Green's operator construction.

A problem is a monic differential operator ``T`` of order ``n`` together with
``n`` boundary conditions, each a sum of point evaluations of derivatives and
definite integrals against weight functions.  For a regular problem the
Green's operator is ``G = (1 - P) * T_inv`` where ``T_inv`` is the
variation-of-constants right inverse and ``P`` projects onto ker T along the
space of admissible functions.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .constants import Constant
from .errors import (
    FundamentalSystemError,
    NotRegularError,
    ParseError,
    WronskianError,
)
from .exppoly import ExpPoly, _coerce_constant
from .linalg import mat_det, mat_from_rows, mat_inv, left_kernel
from .operators import Operator
from .parsing import parse_exppoly, parse_rational


class StieltjesCondition:
    """A boundary functional: local point evaluations plus definite integrals.

    ``local_terms`` holds (point, derivative order, coefficient) triples and
    ``global_terms`` holds (lower, upper, integrand) triples standing for
    ``int_lower^upper integrand(t) u(t) dt``.
    """

    __slots__ = ("local_terms", "global_terms")

    def __init__(self, local_terms=(), global_terms=()):
        merged_local: dict[tuple[Fraction, int], Constant] = {}
        for point, order, coeff in local_terms:
            key = (Fraction(point), int(order))
            coeff = _coerce_constant(coeff)
            cur = merged_local.get(key, Constant.zero()) + coeff
            if cur.is_zero():
                merged_local.pop(key, None)
            else:
                merged_local[key] = cur
        merged_global: dict[tuple[Fraction, Fraction], ExpPoly] = {}
        for lower, upper, integrand in global_terms:
            key = (Fraction(lower), Fraction(upper))
            cur = merged_global.get(key, ExpPoly.zero()) + integrand
            if cur.is_zero():
                merged_global.pop(key, None)
            else:
                merged_global[key] = cur
        self.local_terms = tuple(
            (p, i, merged_local[(p, i)]) for p, i in sorted(merged_local)
        )
        self.global_terms = tuple(
            (a, b, merged_global[(a, b)]) for a, b in sorted(merged_global)
        )

    def evaluation_points(self) -> set[Fraction]:
        points = {p for p, _i, _c in self.local_terms}
        for a, b, _w in self.global_terms:
            points.add(a)
            points.add(b)
        return points

    def max_local_order(self) -> int:
        return max((i for _p, i, _c in self.local_terms), default=-1)

    def is_local(self) -> bool:
        return not self.global_terms

    def apply(self, u: ExpPoly) -> Constant:
        total = Constant.zero()
        for p, i, c in self.local_terms:
            total = total + c * u.derive(i).eval_at(p)
        for a, b, w in self.global_terms:
            total = total + (w * u).integrate_from(a).eval_at(b)
        return total

    def as_operator(self) -> Operator:
        out = Operator.zero()
        for p, i, c in self.local_terms:
            out = out + Operator.evaluation(p, i, ExpPoly.const(c))
        for a, b, w in self.global_terms:
            out = out + Operator.global_term(b, a, ExpPoly.one(), w)
        return out

    def __eq__(self, other):
        if not isinstance(other, StieltjesCondition):
            return NotImplemented
        return (self.local_terms == other.local_terms
                and self.global_terms == other.global_terms)

    def __repr__(self):
        return f"StieltjesCondition({self.as_operator().to_text()})"

    def to_json(self) -> dict:
        return {
            "local": [
                {"point": str(p), "order": i, "coeff": c.to_text()}
                for p, i, c in self.local_terms
            ],
            "global": [
                {"lower": str(a), "upper": str(b), "integrand": w.to_text()}
                for a, b, w in self.global_terms
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StieltjesCondition":
        try:
            local = [
                (parse_rational(entry["point"]), int(entry["order"]),
                 Constant.from_rational(parse_rational(entry["coeff"])))
                for entry in data.get("local", ())
            ]
            glob = [
                (parse_rational(entry["lower"]), parse_rational(entry["upper"]),
                 parse_exppoly(entry["integrand"]))
                for entry in data.get("global", ())
            ]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad condition document: {exc}") from exc
        return cls(local, glob)


class FundamentalSystem:
    """A basis of ker T with its Wronskian data.

    ``d`` is the Wronskian determinant (must be an exponential monomial so it
    can be inverted inside the coefficient algebra) and ``cofactors[j]`` is
    the determinant of the Wronskian matrix with column j replaced by the
    last unit vector.
    """

    __slots__ = ("u", "d", "cofactors")

    def __init__(self, u):
        u = tuple(u)
        if not u:
            raise FundamentalSystemError("fundamental system must be supplied")
        n = len(u)
        w = [[u[j].derive(i) for j in range(n)] for i in range(n)]
        self.u = u
        self.d = _exp_det(w)
        if self.d.is_zero() or _monomial_inverse(self.d) is None:
            raise WronskianError("Wronskian not invertible in coefficient algebra")
        cofactors = []
        for j in range(n):
            wj = [[w[i][k] if k != j else (ExpPoly.one() if i == n - 1 else ExpPoly.zero())
                   for k in range(n)] for i in range(n)]
            cofactors.append(_exp_det(wj))
        self.cofactors = tuple(cofactors)

    @property
    def size(self) -> int:
        return len(self.u)

    def ratios(self) -> tuple[ExpPoly, ...]:
        """The quotients cofactor_j / d."""
        inv = _monomial_inverse(self.d)
        return tuple(dj * inv for dj in self.cofactors)


def _exp_det(rows: list[list[ExpPoly]]) -> ExpPoly:
    """Determinant over the (commutative) function algebra, by expansion."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = ExpPoly.zero()
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = rows[0][j] * _exp_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _monomial_inverse(f: ExpPoly) -> ExpPoly | None:
    """Invert c*x^0*exp(l*x); None when f is not such a monomial."""
    terms = list(f.terms())
    if len(terms) != 1:
        return None
    freq, power, c = terms[0]
    if power != 0:
        return None
    return ExpPoly.monomial(-freq, 0, c.inverse())


def _rational_roots(coeffs: list[Fraction]) -> list[Fraction] | None:
    """All roots (with multiplicity) of a monic rational polynomial, or None
    when it does not split over Q."""
    roots: list[Fraction] = []
    while coeffs[0] == 0 and len(coeffs) > 1:
        roots.append(Fraction(0))
        coeffs = coeffs[1:]
    while len(coeffs) > 1:
        denom = 1
        for c in coeffs:
            denom = denom * c.denominator // _gcd(denom, c.denominator)
        ints = [int(c * denom) for c in coeffs]
        lead, const = ints[-1], ints[0]
        if const == 0:
            root = Fraction(0)
        else:
            root = next(
                (Fraction(p, q)
                 for q in _divisors(abs(lead)) for p in _signed_divisors(abs(const))
                 if _poly_eval(coeffs, Fraction(p, q)) == 0),
                None,
            )
            if root is None:
                return None
        roots.append(root)
        coeffs = _deflate(coeffs, root)
    return roots


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _signed_divisors(n: int) -> list[int]:
    divs = _divisors(n)
    return [d for pair in zip(divs, [-d for d in divs]) for d in pair]


def _poly_eval(coeffs: list[Fraction], x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * x + c
    return total


def _deflate(coeffs: list[Fraction], root: Fraction) -> list[Fraction]:
    """Synthetic division by (x - root); the remainder must vanish."""
    n = len(coeffs) - 1
    out = [Fraction(0)] * n
    carry = coeffs[-1]
    for i in range(n - 1, -1, -1):
        out[i] = carry
        carry = coeffs[i] + carry * root
    assert carry == 0
    return out


def fundamental_system(T: Operator) -> FundamentalSystem:
    """Compute a basis of ker T for constant rational coefficients.

    A root r of multiplicity k contributes x^j exp(r x), j < k.  Roots are
    listed in descending order.  Raises FundamentalSystemError when the
    coefficients are non-constant or the characteristic polynomial does not
    split over Q.
    """
    if not T.is_differential():
        raise FundamentalSystemError("fundamental system must be supplied")
    n = T.order()
    if n == 0:
        raise FundamentalSystemError("fundamental system must be supplied")
    coeffs = []
    for i in range(n + 1):
        c = T.diff_part.get(i, ExpPoly.zero()).as_constant()
        q = c.as_rational() if c is not None else None
        if q is None:
            raise FundamentalSystemError("fundamental system must be supplied")
        coeffs.append(q)
    if coeffs[-1] != 1:
        raise FundamentalSystemError("fundamental system must be supplied")
    roots = _rational_roots(coeffs)
    if roots is None:
        raise FundamentalSystemError("fundamental system must be supplied")
    multiplicity: dict[Fraction, int] = {}
    for r in roots:
        multiplicity[r] = multiplicity.get(r, 0) + 1
    u = []
    for r in sorted(multiplicity, reverse=True):
        for j in range(multiplicity[r]):
            u.append(ExpPoly.monomial(r, j))
    return FundamentalSystem(u)


class BoundaryProblem:
    """A monic differential operator of order n with n boundary conditions."""

    __slots__ = ("T", "conditions", "_fs")

    def __init__(self, T: Operator, conditions, basis=None):
        if not T.is_differential():
            raise ValueError("operator must be purely differential")
        n = T.order()
        if T.diff_part.get(n) != ExpPoly.one():
            raise ValueError("operator must be monic")
        conditions = tuple(conditions)
        if len(conditions) != n:
            raise ValueError(f"expected {n} conditions, got {len(conditions)}")
        self.T = T
        self.conditions = conditions
        if basis is not None and not isinstance(basis, FundamentalSystem):
            basis = FundamentalSystem(basis)
        self._fs = basis

    @property
    def order(self) -> int:
        return self.T.order()

    def system(self) -> FundamentalSystem:
        if self._fs is None:
            self._fs = fundamental_system(self.T)
        return self._fs

    def evaluation_points(self) -> set[Fraction]:
        points: set[Fraction] = set()
        for cond in self.conditions:
            points.update(cond.evaluation_points())
        return points

    def point_count(self) -> int:
        """Number of distinct evaluation points of the given condition basis."""
        return len(self.evaluation_points())

    def is_well_posed(self) -> bool:
        """True when every derivative order of the given basis is below n."""
        return all(c.max_local_order() < self.order for c in self.conditions)

    def is_local(self) -> bool:
        return all(c.is_local() for c in self.conditions)


def evaluation_matrix(conditions, fs: FundamentalSystem):
    """The matrix (beta_i(u_j)) deciding regularity."""
    return mat_from_rows(
        [[cond.apply(uj) for uj in fs.u] for cond in conditions]
    )


def is_regular(problem: BoundaryProblem) -> bool:
    m = evaluation_matrix(problem.conditions, problem.system())
    return not mat_det(m).is_zero()


def fundamental_right_inverse(fs: FundamentalSystem, basepoint) -> Operator:
    """Variation of constants: sum_j u_j int_b (cofactor_j / d)."""
    out = Operator.zero()
    for uj, ratio in zip(fs.u, fs.ratios()):
        out = out + Operator.integral(basepoint, uj, ratio)
    return out


def fri_residues(fs: FundamentalSystem, k: int) -> list[ExpPoly]:
    """The functions rho_1..rho_k with rho_j = (1/d) sum u_i^{(j-1)} cof_i."""
    inv = _monomial_inverse(fs.d)
    out = []
    for j in range(1, k + 1):
        total = ExpPoly.zero()
        for ui, cof in zip(fs.u, fs.cofactors):
            total = total + ui.derive(j - 1) * cof
        out.append(total * inv)
    return out


def fri_derivative(fs: FundamentalSystem, k: int, basepoint):
    """The closed form of d^k composed with the fundamental right inverse:
    sum_j u_j^{(k)} int_b (cof_j/d) + sum_{j<=k} d^{k-j} rho_j.

    Returns (operator, [rho_1, ..., rho_k]).
    """
    out = Operator.zero()
    for uj, ratio in zip(fs.u, fs.ratios()):
        out = out + Operator.integral(basepoint, uj.derive(k), ratio)
    residues = fri_residues(fs, k)
    for j, rho in enumerate(residues, start=1):
        # d^{k-j} * rho expanded by Leibniz into normal form
        order = k - j
        for m in range(order + 1):
            out = out + Operator.derivative(m, rho.derive(order - m) * Fraction(comb(order, m)))
    return out, residues


def projector(conditions, fs: FundamentalSystem) -> Operator:
    """The projector onto ker T along the admissible space:
    P = sum_{j,i} u_j (M^{-1})_{j,i} beta_i with M the evaluation matrix."""
    m = evaluation_matrix(conditions, fs)
    try:
        minv = mat_inv(m)
    except ValueError:
        raise NotRegularError("boundary problem not regular", matrix=m) from None
    out = Operator.zero()
    for j, uj in enumerate(fs.u):
        for i, cond in enumerate(conditions):
            scale = minv[j][i]
            if scale.is_zero():
                continue
            out = out + cond.as_operator().left_mul(uj * scale)
    # canonical global-free form, so that P * P == P structurally
    return out.to_equitable()


def greens_operator(problem: BoundaryProblem, basepoint=None) -> Operator:
    """The Green's operator G = (1 - P) T_inv of a regular problem.

    The integral basepoint defaults to the smallest evaluation point of the
    problem, which keeps the extracted Green's function free of spurious
    case branches.
    """
    fs = problem.system()
    if basepoint is None:
        points = problem.evaluation_points()
        basepoint = min(points) if points else Fraction(0)
    fri = fundamental_right_inverse(fs, basepoint)
    p = projector(problem.conditions, fs)
    # presented in standard form at the chosen basepoint
    return (fri - p * fri).to_standard(basepoint)


def kernel_relations(fs: FundamentalSystem, a, b):
    """The extended evaluation matrix of all derivative values at a and b,
    and a basis of its left kernel (the relations forced on ker T)."""
    n = fs.size
    rows = []
    for point in (Fraction(a), Fraction(b)):
        for i in range(n):
            rows.append([uj.derive(i).eval_at(point) for uj in fs.u])
    matrix = mat_from_rows(rows)
    return matrix, left_kernel(matrix)
