import random
from fractions import Fraction as F

import pytest

from conftest import (
    forcing_functions,
    four_point_problem,
    intro_problem,
    nonlocal_problem,
    random_regular_problem,
)

from stieltjes import (
    BivariateExpPoly,
    Constant,
    DegenerateDomainError,
    ExpPoly,
    GreensFunction,
    NotEquitableError,
    Operator,
    apply_greens,
    eval_functional,
    extract,
    greens_operator,
    parse_bivariate,
    parse_exppoly,
    render,
    to_equitable,
)
from stieltjes.greens import REGION_LOWER, REGION_UPPER

X = ExpPoly.x()
ONE = ExpPoly.one()


def intro_function() -> GreensFunction:
    return extract(to_equitable(greens_operator(intro_problem())))


class TestExtract:
    def test_intro_branches(self):
        g = intro_function()
        assert g.breakpoints == (F(0), F(1))
        assert g.branch(1, REGION_LOWER) == parse_bivariate("(x-1)*xi")
        assert g.branch(1, REGION_UPPER) == parse_bivariate("x*(xi-1)")
        assert not g.dirac and not g.diagonal

    def test_four_point_rows(self):
        g = extract(to_equitable(greens_operator(four_point_problem())))
        expected = {
            (1, REGION_LOWER): "3/4*x*xi - 5/8*xi",
            (1, REGION_UPPER): "3/4*x*xi + 3/8*xi - x",
            (2, REGION_LOWER): "3/2*x*xi - 5/4*xi - 1/4*x + 5/24",
            (2, REGION_UPPER): "3/2*x*xi - 1/4*xi - 5/4*x + 5/24",
            (3, REGION_LOWER): "3/4*x*xi - 9/8*xi + 1/4*x + 1/8",
            (3, REGION_UPPER): "3/4*x*xi - 1/8*xi - 3/4*x + 1/8",
        }
        assert g.breakpoints == (F(0), F(1, 3), F(2, 3), F(1))
        for key, text in expected.items():
            assert g.branch(*key) == parse_bivariate(text)
        assert not g.has_distributional_part()

    def test_zero_operator_with_interval(self):
        g = extract(Operator.zero(), interval=(0, 1))
        assert g.breakpoints == (F(0), F(1))
        assert g.branch(1, REGION_LOWER).is_zero()
        assert g.branch(1, REGION_UPPER).is_zero()
        assert not g.dirac

    def test_global_terms_rejected(self):
        op = Operator.global_term(1, 0, X, ONE)
        with pytest.raises(NotEquitableError, match="equitable"):
            extract(op)

    def test_single_point_needs_interval(self):
        op = Operator.integral(0, X, ONE)
        with pytest.raises(DegenerateDomainError, match="explicit interval"):
            extract(op)
        g = extract(op, interval=(0, 1))
        assert g.branch(1, REGION_LOWER) == BivariateExpPoly.tensor(X, ONE)
        assert g.branch(1, REGION_UPPER).is_zero()

    def test_dirac_terms_from_local_boundary(self):
        op = (Operator.integral(0) - Operator.integral(1)
              + Operator.evaluation(1, 2, X * 3))
        g = extract(op)
        assert g.dirac == ((F(1), 2, X * 3),)
        assert g.dirac_orders() == {(F(1), 2)}

    def test_diagonal_terms_from_diff_part(self):
        op = Operator.integral(0) - Operator.integral(1) + Operator.derivative(1, X)
        g = extract(op)
        assert g.diagonal == ((1, X),)


class TestEvalFunctional:
    def test_intro_points(self):
        g = intro_function()
        assert eval_functional(g, F(3, 4), F(1, 2)) == Constant.from_rational(F(-1, 8))
        # diagonal tie picks the lower branch
        assert eval_functional(g, F(1, 2), F(1, 2)) == Constant.from_rational(F(-1, 4))

    def test_four_point_row(self):
        g = extract(to_equitable(greens_operator(four_point_problem())))
        assert eval_functional(g, 1, F(1, 2)) == Constant.from_rational(F(1, 12))

    def test_interior_breakpoint_ties_left(self):
        g = extract(to_equitable(greens_operator(four_point_problem())))
        # xi = 1/3 evaluates through interval [0, 1/3]
        lower = g.branch(1, REGION_LOWER).eval_at(1, F(1, 3))
        assert eval_functional(g, 1, F(1, 3)) == lower

    def test_out_of_domain(self):
        g = intro_function()
        with pytest.raises(ValueError, match="domain"):
            eval_functional(g, 2, F(1, 2))
        with pytest.raises(ValueError, match="domain"):
            eval_functional(g, F(1, 2), -1)

    def test_intro_symmetry_spot_check(self):
        g = intro_function()
        rng = random.Random(19)
        for _ in range(12):
            x = F(rng.randint(0, 8), 8)
            xi = F(rng.randint(0, 8), 8)
            assert eval_functional(g, x, xi) == eval_functional(g, xi, x)


class TestApplyGreens:
    def test_intro_unit_forcing(self):
        g = intro_function()
        u = apply_greens(g, ONE)
        assert u == parse_exppoly("1/2*x^2 - 1/2*x")

    def test_pure_integral_term(self):
        op = Operator.integral(0, X, X)
        g = extract(op, interval=(0, 1))
        for f in (ONE, X):
            assert apply_greens(g, f) == op.apply(f)

    def test_variation_of_constants_kernel(self):
        op = Operator.integral(0, X) - Operator.integral(0, ONE, X)
        g = extract(op, interval=(0, 1))
        assert apply_greens(g, X) == parse_exppoly("1/6*x^3")

    def test_zero_forcing(self):
        g = extract(to_equitable(greens_operator(nonlocal_problem())))
        assert apply_greens(g, ExpPoly.zero()).is_zero()

    def test_dirac_contributions(self):
        # kernel delta'(xi-1) alone: picks out -(-f'(1)) = f'(1) scaled by coeff
        op = (Operator.integral(0) - Operator.integral(1)
              + Operator.evaluation(1, 1, X))
        g = extract(op)
        f = parse_exppoly("x^2")
        assert apply_greens(g, f) == op.apply(f)

    def test_diagonal_contributions(self):
        op = Operator.integral(0) - Operator.integral(1) + Operator.derivative(1, X)
        g = extract(op)
        f = parse_exppoly("exp(x)")
        assert apply_greens(g, f) == op.apply(f)

    def test_agreement_randomized(self):
        rng = random.Random(59)
        for _ in range(6):
            prob = random_regular_problem(rng)
            G = greens_operator(prob)
            g = extract(to_equitable(G))
            for f in forcing_functions():
                assert apply_greens(g, f) == G.apply(f)


class TestStructure:
    def test_branch_count(self):
        assert intro_function().branch_count == 2
        g4 = extract(to_equitable(greens_operator(four_point_problem())))
        assert g4.branch_count == 6

    def test_breakpoints_subset_of_evaluation_points(self):
        rng = random.Random(61)
        for _ in range(6):
            prob = random_regular_problem(rng)
            g = extract(to_equitable(greens_operator(prob)))
            assert set(g.breakpoints) <= prob.evaluation_points()
            assert g.branch_count == 2 * (len(g.breakpoints) - 1)

    def test_well_posed_has_no_distributional_part(self):
        rng = random.Random(67)
        seen = 0
        for _ in range(12):
            prob = random_regular_problem(rng)
            if not prob.is_well_posed():
                continue
            seen += 1
            g = extract(to_equitable(greens_operator(prob)))
            assert not g.dirac
        assert seen >= 2

    def test_regular_problems_have_no_diagonal_part(self):
        rng = random.Random(71)
        for _ in range(8):
            prob = random_regular_problem(rng)
            eq = to_equitable(greens_operator(prob))
            assert not eq.diff_part
            g = extract(eq)
            assert not g.diagonal

    def test_dirac_points_match_local_boundary(self):
        prob = nonlocal_problem()
        eq = to_equitable(greens_operator(prob))
        g = extract(eq)
        local_orders = {(p, i) for _f, p, i in eq.local_boundary}
        assert g.dirac_orders() == local_orders

    def test_scale(self):
        g = intro_function()
        doubled = g.scale(2)
        assert doubled.branch(1, REGION_LOWER) == g.branch(1, REGION_LOWER) * Constant.from_rational(2)


class TestRender:
    def test_latex_two_cases(self):
        g = intro_function()
        out = render(g, "latex")
        assert out.count(r"\le \xi \le") == 2
        assert r"\xi \le x" in out and r"x \le \xi" in out

    def test_four_point_six_rows(self):
        g = extract(to_equitable(greens_operator(four_point_problem())))
        out = render(g, "latex")
        assert out.count(r"\le \xi \le") == 6

    def test_distributional_section(self):
        g = extract(to_equitable(greens_operator(nonlocal_problem())))
        out = render(g, "latex")
        assert r"\delta" in out and r"\delta'" in out

    def test_json_roundtrip(self):
        for prob in (intro_problem(), four_point_problem(), nonlocal_problem()):
            g = extract(to_equitable(greens_operator(prob)))
            assert GreensFunction.from_json(render(g, "json")) == g

    def test_text_rows(self):
        out = render(intro_function(), "text")
        assert "0 <= xi <= 1, xi <= x" in out

    def test_unknown_format(self):
        with pytest.raises(ValueError, match="format"):
            render(intro_function(), "html")


def test_interval_extends_breakpoints():
    g = extract(to_equitable(greens_operator(intro_problem())), interval=(-1, 2))
    assert g.breakpoints == (F(-1), F(0), F(1), F(2))
    assert g.branch_count == 6
    # outer branches still integrate correctly
    G = greens_operator(intro_problem())
    for f in forcing_functions():
        assert apply_greens(g, f) == G.apply(f)
