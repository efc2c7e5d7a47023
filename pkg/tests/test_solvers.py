import numpy as np
import pytest

from avesor import (
    DomainError,
    Matrix,
    NoConvergentOmegaError,
    NumericalBreakdownError,
    SolverSettings,
    factorization_count,
    gen_ex41,
    gen_ex42,
    generalized_newton,
    nu_estimate,
    omega_aopt,
    omega_opt,
    residual,
    sor_like,
    sweep_optimal,
    tnorm,
    tridiag,
)


@pytest.fixture(scope="module")
def ex41_1000():
    problem = gen_ex41(1000)
    nu = nu_estimate(problem.A).nu
    return problem, nu


@pytest.fixture(scope="module")
def ex42_8():
    problem = gen_ex42(8)
    nu = nu_estimate(problem.A).nu
    return problem, nu


class TestResidual:
    def test_zero_at_generated_solution(self):
        problem = gen_ex41(50)
        assert residual(problem.A, problem.b, problem.x_star) <= 1e-12

    def test_identity_zero_case(self):
        assert residual(Matrix.identity(2), np.zeros(2), np.zeros(2)) == 0.0

    def test_hand_built_two_by_two(self):
        A = tridiag(2, -1.0, 8.0, -1.0)
        xs = np.array([-1.0, 1.0])
        b = np.array([-10.0, 8.0])
        assert residual(A, b, xs) == 0.0

    def test_dimension_mismatch(self):
        from avesor import InvalidDimensionError

        with pytest.raises(InvalidDimensionError):
            residual(Matrix.identity(3), np.zeros(3), np.zeros(2))


class TestSorLike:
    def test_optimal_parameter_iteration_count(self, ex41_1000):
        problem, nu = ex41_1000
        report = sor_like(problem, SolverSettings(omega=omega_opt(nu)))
        assert report.converged
        assert report.iterations == 12
        assert report.residual_history[-1] <= 1e-8

    def test_approximate_optimal_iteration_count(self, ex41_1000):
        problem, nu = ex41_1000
        report = sor_like(problem, SolverSettings(omega=omega_aopt(nu)))
        assert report.converged
        assert report.iterations == 20

    def test_zero_problem_fixed_point(self):
        A = tridiag(5, -1.0, 8.0, -1.0)
        from avesor import AveProblem

        problem = AveProblem(A, np.zeros(5), x_star=np.zeros(5))
        report = sor_like(problem, SolverSettings(omega=0.9))
        assert report.converged
        assert report.iterations == 0
        np.testing.assert_array_equal(report.solution, np.zeros(5))

    def test_history_lengths(self, ex42_8):
        problem, nu = ex42_8
        report = sor_like(problem, SolverSettings(omega=1.0))
        assert len(report.residual_history) == report.iterations + 1
        assert len(report.error_norm_history) == report.iterations + 1

    def test_converged_solution_residual(self, ex42_8):
        problem, _ = ex42_8
        report = sor_like(problem, SolverSettings(omega=0.9))
        assert residual(problem.A, problem.b, report.solution) <= 1e-8

    def test_factor_once(self, ex41_1000):
        problem, _ = ex41_1000
        before = factorization_count()
        sor_like(problem, SolverSettings(omega=1.0))
        assert factorization_count() == before + 1

    def test_factor_once_generic_path(self):
        problem = gen_ex42(3)  # dense, order 9
        before = factorization_count()
        sor_like(problem, SolverSettings(omega=1.0))
        assert factorization_count() == before + 1

    def test_divergent_omega_reports_not_converged(self, ex41_1000):
        problem, _ = ex41_1000
        report = sor_like(problem, SolverSettings(omega=1.9, max_iter=40))
        assert not report.converged
        assert report.iterations == 40

    def test_breakdown_raises_with_step_index(self):
        # ||A^-1|| = 10 violates the solvability regime and the iterates
        # overflow; the tridiagonal kernel must report the step
        from avesor import AveProblem

        A = tridiag(100, 0.0, 0.1, 0.0)
        problem = AveProblem(A, np.ones(100))
        with pytest.raises(NumericalBreakdownError, match="step"):
            sor_like(problem, SolverSettings(omega=1.5, max_iter=2000))

    def test_breakdown_raises_on_generic_path(self):
        from avesor import AveProblem

        problem = AveProblem(Matrix(np.diag([0.1] * 5)), np.ones(5))
        with pytest.raises(NumericalBreakdownError, match="step"):
            sor_like(problem, SolverSettings(omega=1.5, max_iter=2000))

    def test_warm_start_at_solution(self):
        problem = gen_ex41(50)
        settings = SolverSettings(omega=0.9, x0=problem.x_star, y0=np.abs(problem.x_star))
        report = sor_like(problem, settings)
        assert report.converged
        assert report.iterations == 0
        np.testing.assert_array_equal(report.solution, problem.x_star)

    def test_warm_start_near_solution_converges_fast(self):
        problem = gen_ex41(50)
        x0 = problem.x_star + 1e-6
        cold = sor_like(problem, SolverSettings(omega=0.9))
        warm = sor_like(problem, SolverSettings(omega=0.9, x0=x0, y0=np.abs(x0)))
        assert warm.converged
        assert warm.iterations < cold.iterations

    def test_omega_validation(self, ex41_1000):
        problem, _ = ex41_1000
        with pytest.raises(DomainError):
            sor_like(problem, SolverSettings(omega=2.5))
        with pytest.raises(DomainError):
            sor_like(problem, SolverSettings())
        with pytest.raises(DomainError):
            sor_like(problem, SolverSettings(omega=1.0, tol=-1.0))
        with pytest.raises(DomainError):
            sor_like(problem, SolverSettings(omega=1.0, max_iter=0))


class TestRegionGuarantee:
    def test_every_interior_omega_converges(self):
        # contraction norm < 1 inside the region guarantees convergence,
        # though arbitrarily slowly near the endpoints; sample the middle
        from avesor import convergent_region

        problem = gen_ex41(50)
        nu = nu_estimate(problem.A).nu
        region = convergent_region(nu)
        pad = 0.1 * region.width
        for omega in np.linspace(region.lo + pad, region.hi - pad, 9):
            report = sor_like(problem, SolverSettings(omega=float(omega), max_iter=3000))
            assert report.converged, f"omega={omega} did not converge"


class TestErrorNormTracking:
    def test_monotone_decrease_at_both_parameters(self):
        problem = gen_ex41(100)
        nu = nu_estimate(problem.A).nu
        for omega in (omega_opt(nu), omega_aopt(nu)):
            report = sor_like(problem, SolverSettings(omega=omega))
            errs = report.error_norm_history
            assert np.all(np.diff(errs) < 0)

    def test_contraction_rate_bound(self):
        problem = gen_ex41(100)
        nu = nu_estimate(problem.A).nu
        omega = omega_aopt(nu)
        report = sor_like(problem, SolverSettings(omega=omega))
        errs = report.error_norm_history
        bound = tnorm(nu, omega)
        assert np.all(errs[1:] <= bound * errs[:-1] + 1e-12)

    def test_no_error_history_without_known_solution(self):
        from avesor import AveProblem

        A = tridiag(6, -1.0, 8.0, -1.0)
        problem = AveProblem(A, np.ones(6))
        report = sor_like(problem, SolverSettings(omega=1.0))
        assert report.error_norm_history is None


class TestGeneralizedNewton:
    def test_ex41_two_steps(self, ex41_1000):
        problem, _ = ex41_1000
        report = generalized_newton(problem, SolverSettings())
        assert report.converged
        assert report.iterations == 2
        assert report.residual_history[-1] <= 1e-12

    def test_ex42_two_steps(self, ex42_8):
        problem, _ = ex42_8
        report = generalized_newton(problem, SolverSettings())
        assert report.converged
        assert report.iterations == 2

    def test_zero_problem(self):
        from avesor import AveProblem

        A = tridiag(4, -1.0, 8.0, -1.0)
        problem = AveProblem(A, np.zeros(4), x_star=np.zeros(4))
        report = generalized_newton(problem, SolverSettings())
        assert report.converged
        assert report.iterations <= 1

    def test_solution_matches_known_answer(self):
        for problem in (gen_ex41(200), gen_ex42(8)):
            report = generalized_newton(problem, SolverSettings())
            np.testing.assert_allclose(report.solution, problem.x_star, atol=1e-10)

    def test_refactors_each_step(self, ex42_8):
        problem, _ = ex42_8
        before = factorization_count()
        report = generalized_newton(problem, SolverSettings())
        assert factorization_count() == before + report.iterations


class TestSweep:
    def test_singleton_grid(self, ex41_1000):
        problem, nu = ex41_1000
        w = omega_opt(nu)
        omega_no, report = sweep_optimal(problem, [w], SolverSettings())
        assert omega_no == w
        assert report.iterations == 12

    def test_full_grid_matches_published_optimum(self, ex41_1000):
        problem, _ = ex41_1000
        grid = np.arange(0.001, 2.0, 0.001)
        omega_no, report = sweep_optimal(problem, grid, SolverSettings())
        assert report.iterations == 12
        assert abs(omega_no - 0.994) < 5e-4

    def test_ex42_m8_full_grid(self, ex42_8):
        problem, nu = ex42_8
        grid = np.arange(0.001, 2.0, 0.001)
        omega_no, report = sweep_optimal(problem, grid, SolverSettings())
        opt_report = sor_like(problem, SolverSettings(omega=omega_opt(nu)))
        assert report.iterations == 13
        assert report.iterations == opt_report.iterations
        assert abs(omega_no - 0.991) < 5e-4

    def test_factors_once_for_whole_sweep(self, ex41_1000):
        problem, _ = ex41_1000
        before = factorization_count()
        sweep_optimal(problem, np.arange(0.5, 1.5, 0.1), SolverSettings())
        assert factorization_count() == before + 1

    def test_no_convergent_omega(self):
        problem = gen_ex41(30)
        with pytest.raises(NoConvergentOmegaError):
            sweep_optimal(problem, [1.9, 1.95], SolverSettings(max_iter=3))

    def test_grid_validation(self, ex41_1000):
        problem, _ = ex41_1000
        with pytest.raises(DomainError):
            sweep_optimal(problem, [], SolverSettings())
        with pytest.raises(DomainError):
            sweep_optimal(problem, [0.5, 2.0], SolverSettings())
