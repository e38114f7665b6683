import json

import pytest
from numpy.testing import assert_allclose

from daesvr.errors import ValidationError
from daesvr.highprec import solve_interpolant
from daesvr.schema import load_problem
from daesvr.solver import SolverConfig

OSCILLATOR = json.dumps(
    {
        "unknowns": 2,
        "domain": {"lo": 0.0, "hi": 1.0},
        "equations": [
            {
                "terms": [
                    {"coeff": 1, "op": "deriv", "order": 1, "target": 0},
                    {"coeff": -1, "op": "identity", "target": 1},
                ],
                "rhs": 0,
            },
            {
                "terms": [
                    {"coeff": 1, "op": "identity", "target": 0},
                    {"coeff": 1, "op": "deriv", "order": 1, "target": 1},
                ],
                "rhs": 0,
            },
        ],
        "side_conditions": [
            {"target": 0, "point": 0.0, "value": 0.0},
            {"target": 1, "point": 0.0, "value": 1.0},
        ],
        "exact": ["sin(t)", "cos(t)"],
    }
)

PROBES = (0.2, 0.4, 0.6, 0.8, 1.0)


@pytest.fixture(scope="module")
def coarse():
    return solve_interpolant(load_problem(OSCILLATOR), SolverConfig(m=6), digits=40)


@pytest.fixture(scope="module")
def fine():
    return solve_interpolant(load_problem(OSCILLATOR), SolverConfig(m=10), digits=40)


class TestInterval:
    def test_coarse_accuracy(self, coarse):
        errs = [coarse.errors_at(u, t)[0] for u in range(2) for t in PROBES]
        assert max(errs) <= 1e-6

    def test_fine_accuracy(self, fine):
        errs = [fine.errors_at(u, t)[0] for u in range(2) for t in PROBES]
        assert max(errs) <= 1e-12

    def test_refinement_improves_every_probe(self, coarse, fine):
        for u in range(2):
            for t in PROBES:
                assert fine.errors_at(u, t)[0] < coarse.errors_at(u, t)[0]

    def test_square_system_residual_is_tiny(self, coarse):
        # the collocation equations are solved exactly at working precision,
        # far below anything double arithmetic could represent as nonzero
        assert coarse.residual_inf <= 1e-35

    def test_evaluate_is_float_of_mp(self, coarse):
        got = coarse.evaluate(0, 0.4)
        assert got == float(coarse.evaluate_mp(0, 0.4))

    def test_errors_are_consistent(self, fine):
        import math

        abs_err, rel_err = fine.errors_at(0, 0.6)
        assert_allclose(rel_err, abs_err / abs(math.sin(0.6)), rtol=1e-7)

    def test_block_size_interval(self, coarse):
        assert coarse.d_x is None
        assert coarse.d_t == 7
        assert coarse.block == 7


class TestRectangle:
    def test_small_rectangle_solve(self):
        p = load_problem("example5")
        model = solve_interpolant(p, SolverConfig(m=4), digits=30)
        assert model.block == model.d_x * model.d_t == 4 * 6
        worst = 0.0
        for u in range(3):
            for pt in ((0.02, 0.02), (0.1, 0.1), (-0.3, 0.5)):
                worst = max(worst, model.errors_at(u, pt)[0])
        assert worst <= 1e-6


class TestRejections:
    def test_nonlinear_problems_stay_on_double_path(self):
        with pytest.raises(ValidationError, match="linear"):
            solve_interpolant(load_problem("example4"), SolverConfig(m=6))

    @pytest.mark.parametrize("name", ["example2", "example3"])
    def test_fractional_terms_rejected(self, name):
        with pytest.raises(ValidationError, match="identity and derivative"):
            solve_interpolant(load_problem(name), SolverConfig(m=8))

    def test_digits_floor(self):
        with pytest.raises(ValidationError, match="at least 15"):
            solve_interpolant(load_problem(OSCILLATOR), SolverConfig(m=6), digits=10)

    def test_unbalanced_degree_rejected(self):
        # forcing extra basis functions breaks the square count
        with pytest.raises(ValidationError, match="counts balance"):
            solve_interpolant(load_problem(OSCILLATOR), SolverConfig(m=6, degree=9))

    def test_missing_exact_reported_at_error_time(self):
        bare = json.loads(OSCILLATOR)
        del bare["exact"]
        model = solve_interpolant(load_problem(json.dumps(bare)), SolverConfig(m=6))
        assert model.evaluate(0, 0.5) == pytest.approx(0.479425538604, abs=1e-6)
        with pytest.raises(ValidationError, match="exact"):
            model.errors_at(0, 0.5)
