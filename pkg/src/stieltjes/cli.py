"""Command-line front end: solve, verify and kernel subcommands.

Problem documents are JSON::

    {"operator": {"coeffs": ["0", "0", "1"]},          # from order 0 upward
     "conditions": [{"local": [{"point": "0", "order": 0, "coeff": "1"}],
                     "global": [{"lower": "0", "upper": "1", "integrand": "x"}]}],
     "fundamental_system": ["exp(x)", "exp(-x)"]}      # optional

Exit codes: 0 success, 2 malformed input, 3 irregular problem, 4 unsupported
operator (no computable fundamental system or bad Wronskian).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .boundary import (
    BoundaryProblem,
    StieltjesCondition,
    greens_operator,
    kernel_relations,
)
from .constants import Constant
from .errors import (
    DegenerateDomainError,
    FundamentalSystemError,
    NotRegularError,
    ParseError,
    WronskianError,
)
from .exppoly import ExpPoly
from .greens import GreensFunction, extract
from .operators import Operator
from .parsing import parse_exppoly, parse_rational

DEFAULT_TEST_FUNCTIONS = ("1", "x", "x^2", "exp(x)", "x*exp(-x)")


@dataclass
class ProblemSpec:
    """A parsed problem document plus the command-line options."""

    problem: BoundaryProblem
    basepoint: Fraction | None = None
    interval: tuple[Fraction, Fraction] | None = None
    fmt: str = "text"
    verify: bool = True
    test_functions: tuple[str, ...] = DEFAULT_TEST_FUNCTIONS


@dataclass
class VerificationReport:
    """Exact residuals of the defining properties on test functions."""

    regular: bool
    test_functions: list[str] = field(default_factory=list)
    operator_residuals: dict = field(default_factory=dict)   # f -> T(Gf) - f
    condition_residuals: dict = field(default_factory=dict)  # f -> [beta_i(Gf)]
    agreement: bool = True
    branch_count: int = 0
    breakpoints: list[str] = field(default_factory=list)
    dirac_terms: list[str] = field(default_factory=list)
    diagonal_terms: list[str] = field(default_factory=list)

    def all_zero(self) -> bool:
        return (self.regular and self.agreement
                and all(r == "0" for r in self.operator_residuals.values())
                and all(all(r == "0" for r in rs)
                        for rs in self.condition_residuals.values()))

    def to_json_dict(self) -> dict:
        return {
            "regular": self.regular,
            "test_functions": self.test_functions,
            "operator_residuals": self.operator_residuals,
            "condition_residuals": self.condition_residuals,
            "operator_function_agreement": self.agreement,
            "branch_count": self.branch_count,
            "breakpoints": self.breakpoints,
            "dirac_terms": self.dirac_terms,
            "diagonal_terms": self.diagonal_terms,
            "verified": self.all_zero(),
        }

    def to_text(self) -> str:
        lines = [f"regular: {self.regular}"]
        for f in self.test_functions:
            lines.append(f"T(G f) - f for f = {f}: {self.operator_residuals[f]}")
            for i, r in enumerate(self.condition_residuals[f], start=1):
                lines.append(f"condition {i} of G f for f = {f}: {r}")
        lines.append(f"operator/function agreement: {self.agreement}")
        lines.append(f"branch count: {self.branch_count}")
        lines.append(f"breakpoints: {', '.join(self.breakpoints)}")
        if self.dirac_terms:
            lines.append("distributional part: " + "; ".join(self.dirac_terms))
        else:
            lines.append("distributional part: none")
        lines.append(f"verified: {self.all_zero()}")
        return "\n".join(lines)


def parse_problem(data: dict) -> BoundaryProblem:
    if not isinstance(data, dict):
        raise ParseError("problem document must be a JSON object")
    try:
        coeff_strings = data["operator"]["coeffs"]
        condition_docs = data["conditions"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing field: {exc}") from exc
    if not isinstance(coeff_strings, list) or not coeff_strings:
        raise ParseError("operator.coeffs must be a nonempty list")
    coeffs = [parse_exppoly(s) for s in coeff_strings]
    if coeffs[-1] != ExpPoly.one():
        raise ParseError("leading coefficient must be 1")
    T = Operator.zero()
    for i, c in enumerate(coeffs):
        T = T + Operator.derivative(i, c)
    conditions = [StieltjesCondition.from_json(doc) for doc in condition_docs]
    basis = None
    if data.get("fundamental_system"):
        basis = [parse_exppoly(s) for s in data["fundamental_system"]]
    try:
        return BoundaryProblem(T, conditions, basis=basis)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def solve_problem(problem: BoundaryProblem, basepoint=None, interval=None):
    """Run the full pipeline: Green's operator, equitable form, extraction."""
    G = greens_operator(problem, basepoint=basepoint)
    Geq = G.to_equitable()
    gf = extract(Geq, interval=interval)
    return G, Geq, gf


def verify_problem(problem: BoundaryProblem, G: Operator, gf: GreensFunction,
                   test_functions=DEFAULT_TEST_FUNCTIONS) -> VerificationReport:
    report = VerificationReport(regular=True, test_functions=list(test_functions))
    report.branch_count = gf.branch_count
    report.breakpoints = [str(p) for p in gf.breakpoints]
    report.dirac_terms = [
        f"order {i} at {p}: {c.to_text()}" for p, i, c in gf.dirac
    ]
    report.diagonal_terms = [f"order {i}: {c.to_text()}" for i, c in gf.diagonal]
    for text in test_functions:
        f = parse_exppoly(text)
        u = G.apply(f)
        report.operator_residuals[text] = (problem.T.apply(u) - f).to_text()
        report.condition_residuals[text] = [
            ExpPoly.const(cond.apply(u)).to_text() for cond in problem.conditions
        ]
        if gf.apply_to(f) != u:
            report.agreement = False
    return report


def _matrix_text(matrix) -> str:
    return "\n".join(
        "[" + ", ".join(entry.to_text() for entry in row) + "]" for row in matrix
    )


def _read_spec(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read problem document: {exc}") from exc


def _spec_from_args(args) -> ProblemSpec:
    data = _read_spec(args.spec)
    problem = parse_problem(data)
    basepoint = parse_rational(args.basepoint) if args.basepoint is not None else None
    interval = None
    if args.interval is not None:
        pieces = args.interval.split(",")
        if len(pieces) != 2:
            raise ParseError("interval must be given as a,b")
        interval = (parse_rational(pieces[0]), parse_rational(pieces[1]))
        if interval[0] >= interval[1]:
            raise ParseError("interval must satisfy a < b")
    test_functions = DEFAULT_TEST_FUNCTIONS
    if getattr(args, "test_functions", None):
        test_functions = tuple(s.strip() for s in args.test_functions.split(",") if s.strip())
        for text in test_functions:
            parse_exppoly(text)
    return ProblemSpec(
        problem=problem,
        basepoint=basepoint,
        interval=interval,
        fmt=getattr(args, "format", "text"),
        verify=not getattr(args, "no_verify", False),
        test_functions=test_functions,
    )


def _cmd_solve(args) -> int:
    spec = _spec_from_args(args)
    G, Geq, gf = solve_problem(spec.problem, spec.basepoint, spec.interval)
    report = None
    if spec.verify:
        report = verify_problem(spec.problem, G, gf, spec.test_functions)
        if not report.all_zero():
            print("verification failed; refusing to print the result", file=sys.stderr)
            print(report.to_text(), file=sys.stderr)
            return 1
    if spec.fmt == "json":
        doc = {
            "operator": G.to_json(),
            "equitable_operator": Geq.to_json(),
            "greens_function": gf.to_json_dict(),
        }
        if report is not None:
            doc["report"] = report.to_json_dict()
        print(json.dumps(doc, sort_keys=True, indent=2))
    elif spec.fmt == "latex":
        print("% Green's operator")
        print(G.to_latex())
        print("% equitable form")
        print(Geq.to_latex())
        print("% Green's function")
        print(gf.to_latex())
    else:
        print("Green's operator:")
        print("  " + G.to_text())
        print("equitable form:")
        print("  " + Geq.to_text())
        print("Green's function:")
        for line in gf.to_text().splitlines():
            print("  " + line)
        if report is not None:
            print("verification:")
            for line in report.to_text().splitlines():
                print("  " + line)
    return 0


def _cmd_verify(args) -> int:
    spec = _spec_from_args(args)
    G, _Geq, gf = solve_problem(spec.problem, spec.basepoint, spec.interval)
    report = verify_problem(spec.problem, G, gf, spec.test_functions)
    if spec.fmt == "json":
        print(json.dumps(report.to_json_dict(), sort_keys=True, indent=2))
    else:
        print(report.to_text())
    return 0 if report.all_zero() else 1


def _relation_text(vector, points, n) -> str:
    """Render a kernel vector as a relation between boundary values."""
    def functional(k: int) -> str:
        point, order = points[k // n], k % n
        primes = "'" * order if order <= 3 else f"^({order})"
        return f"u{primes}({point})"

    positive, negative = [], []
    for k, c in enumerate(vector):
        if c.is_zero():
            continue
        target, value = (positive, c) if _is_positive(c) else (negative, -c)
        text = functional(k)
        if not value.is_one():
            text = f"({value.to_text()})*{text}"
        target.append(text)
    left = " + ".join(positive) if positive else "0"
    right = " + ".join(negative) if negative else "0"
    return f"{left} = {right}"


def _is_positive(c: Constant) -> bool:
    q = c.as_rational()
    if q is not None:
        return q > 0
    mono = c.as_monomial()
    if mono is not None:
        return mono[1] > 0
    return True


def _cmd_kernel(args) -> int:
    data = _read_spec(args.spec)
    problem = parse_problem(data)
    a = parse_rational(args.a)
    b = parse_rational(args.b)
    fs = problem.system()
    matrix, basis = kernel_relations(fs, a, b)
    n = fs.size
    if getattr(args, "format", "text") == "json":
        doc = {
            "matrix": [[entry.to_text() for entry in row] for row in matrix],
            "kernel_basis": [[entry.to_text() for entry in vec] for vec in basis],
            "relations": [_relation_text(vec, (a, b), n) for vec in basis],
        }
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print("extended evaluation matrix:")
        print(_matrix_text(matrix))
        print("relations:")
        for vec in basis:
            print("  " + _relation_text(vec, (a, b), n))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stieltjes",
        description="Exact Green's operators and Green's functions for "
                    "Stieltjes boundary problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("spec", help="problem JSON path, or - for stdin")
        p.add_argument("--basepoint", help="integral basepoint override (rational)")
        p.add_argument("--interval", help="explicit domain a,b added to the breakpoints")
        p.add_argument("--format", choices=("text", "json", "latex"), default="text")
        p.add_argument("--test-functions", dest="test_functions",
                       help="comma-separated forcing functions used for verification")

    solve = sub.add_parser("solve", help="compute operator, equitable form and kernel")
    common(solve)
    solve.add_argument("--no-verify", dest="no_verify", action="store_true",
                       help="skip the verification pass")
    verify = sub.add_parser("verify", help="report defining-property residuals")
    common(verify)
    kernel = sub.add_parser("kernel", help="extended evaluation matrix relations")
    kernel.add_argument("spec", help="problem JSON path, or - for stdin")
    kernel.add_argument("a", help="first evaluation point")
    kernel.add_argument("b", help="second evaluation point")
    kernel.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"solve": _cmd_solve, "verify": _cmd_verify, "kernel": _cmd_kernel}
    try:
        return handlers[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NotRegularError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.matrix is not None:
            print("evaluation matrix:", file=sys.stderr)
            print(_matrix_text(exc.matrix), file=sys.stderr)
        return 3
    except (FundamentalSystemError, WronskianError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DegenerateDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
