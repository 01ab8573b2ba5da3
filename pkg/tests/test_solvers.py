import numpy as np
import pytest

from egtan.instances import AffineOperator, VIInstance, make_bilinear
from egtan.measures import natural_residual
from egtan.solvers import (
    InnerSolveError,
    ReferenceSolveError,
    SolverConfig,
    StepSizeError,
    best_iterate_index,
    eg_run,
    eg_step,
    pp_run,
    pp_step,
    rate_report_eg,
    rate_report_pp,
    solve_reference,
    trajectory_to_json,
    write_trajectory_csv,
)
from egtan.sets import Box, NonnegativeOrthant, WholeSpace
from tests.test_instances import bilinear_spec


def scalar_identity_instance():
    return VIInstance.create(AffineOperator.create(np.eye(1), np.zeros(1)), WholeSpace(1))


def zero_operator_instance(n=2):
    op = AffineOperator.create(np.zeros((n, n)), np.zeros(n))
    return VIInstance.create(op, Box(np.zeros(n), np.full(n, 10.0)))


def random_monotone_instance(rng, n=4, mu=0.2):
    raw = rng.standard_normal((n, n))
    M = raw - raw.T + mu * np.eye(n)
    op = AffineOperator.create(M, rng.standard_normal(n))
    return VIInstance.create(op, NonnegativeOrthant(n))


class TestEgStep:
    def test_scalar_closed_form(self):
        inst = scalar_identity_instance()
        z_half, z_next = eg_step(inst, 0.5, np.array([1.0]))
        assert z_half[0] == pytest.approx(0.5, abs=1e-15)
        assert z_next[0] == pytest.approx(0.75, abs=1e-15)

    def test_zero_operator_fixed_point(self):
        inst = zero_operator_instance()
        z = np.array([1.0, 2.0])
        z_half, z_next = eg_step(inst, 0.3, z)
        np.testing.assert_array_equal(z_half, z)
        np.testing.assert_array_equal(z_next, z)

    def test_published_trajectory(self):
        inst = make_bilinear(bilinear_spec([[1.0, 2.0], [1.0, 1.0]], [1, 1], [1, 1]))
        z0 = np.array([0.3108455, 0.4825575, 0.4621875, 0.5768655])
        _, z1 = eg_step(inst, 0.1, z0)
        _, z2 = eg_step(inst, 0.1, z1)
        np.testing.assert_allclose(z1, [0.24923465, 0.47967569, 0.43497808, 0.57458145], rtol=0, atol=1e-7)
        np.testing.assert_allclose(z2, [0.19396855, 0.48164918, 0.40193211, 0.56061753], rtol=0, atol=1e-7)


class TestEgRun:
    def test_zero_steps(self):
        inst = zero_operator_instance()
        traj = eg_run(inst, SolverConfig(eta=0.1, T=0), np.ones(2))
        assert len(traj) == 1
        np.testing.assert_array_equal(traj.iterates[0], np.ones(2))

    def test_constant_for_zero_operator(self):
        inst = zero_operator_instance()
        traj = eg_run(inst, SolverConfig(eta=0.1, T=5), np.ones(2))
        for z in traj.iterates:
            np.testing.assert_array_equal(z, np.ones(2))

    def test_published_gap_trajectory(self):
        inst = make_bilinear(
            bilinear_spec([[-0.21025101, 0.22360196], [0.40667685, -0.2922158]], [0, 0], [0, 0])
        )
        z0 = np.array([0.53095379, 0.29084076, 0.62132986, 0.49440498])
        traj = eg_run(inst, SolverConfig(eta=0.1, T=2), z0)
        np.testing.assert_allclose(
            traj.iterates[1], [0.53290086, 0.28009156, 0.62151204, 0.4981395], rtol=0, atol=1e-7
        )
        np.testing.assert_allclose(
            traj.iterates[2], [0.5347502, 0.26947398, 0.62122195, 0.50222691], rtol=0, atol=1e-7
        )

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        inst = random_monotone_instance(rng)
        z0 = rng.uniform(0, 1, 4)
        eta = 0.5 / inst.operator.lipschitz
        a = eg_run(inst, SolverConfig(eta=eta, T=50), z0)
        b = eg_run(inst, SolverConfig(eta=eta, T=50), z0)
        for za, zb in zip(a.iterates, b.iterates):
            assert np.array_equal(za, zb)

    def test_iterates_stay_feasible(self):
        rng = np.random.default_rng(2)
        inst = random_monotone_instance(rng)
        traj = eg_run(inst, SolverConfig(eta=0.5 / inst.operator.lipschitz, T=50), rng.uniform(0, 1, 4))
        for z in traj.iterates:
            assert inst.set.infeasibility(z) <= 1e-9

    def test_unconstrained_operator_norm_monotone(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            raw = rng.standard_normal((4, 4))
            op = AffineOperator.create(raw - raw.T + 0.1 * np.eye(4), rng.standard_normal(4))
            inst = VIInstance.create(op, WholeSpace(4))
            traj = eg_run(
                inst, SolverConfig(eta=0.8 / op.lipschitz, T=60), rng.standard_normal(4)
            )
            norms = [np.linalg.norm(F) for F in traj.operator_values]
            for a, b in zip(norms, norms[1:]):
                assert b <= a + 1e-10

    def test_large_step_warns_and_strict_raises(self):
        inst = scalar_identity_instance()
        with pytest.warns(UserWarning, match="eta"):
            eg_run(inst, SolverConfig(eta=2.0, T=1), np.array([1.0]))
        with pytest.raises(StepSizeError):
            eg_run(inst, SolverConfig(eta=2.0, T=1), np.array([1.0]), strict=True)


class TestPpStep:
    def test_contraction_precondition(self):
        inst = scalar_identity_instance()
        with pytest.raises(StepSizeError):
            pp_step(inst, 1.0, np.array([1.0]))

    def test_scalar_fixed_point(self):
        inst = scalar_identity_instance()
        z1 = pp_step(inst, 0.5, np.array([1.0]), inner_tol=1e-14)
        assert z1[0] == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_orthant_fixed_point_matches_bisection_oracle(self):
        # F(z) = z - 2 on the orthant from z0 = 0: per coordinate w solves
        # w = max(0, -0.5 (w - 2))
        n = 3
        op = AffineOperator.create(np.eye(n), np.full(n, -2.0))
        inst = VIInstance.create(op, NonnegativeOrthant(n))
        got = pp_step(inst, 0.5, np.zeros(n), inner_tol=1e-14)

        def oracle():
            lo, hi = 0.0, 10.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid - max(0.0, -0.5 * (mid - 2.0)) > 0:
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)

        w = oracle()
        np.testing.assert_allclose(got, np.full(n, w), rtol=0, atol=1e-10)

    def test_inner_budget_error_carries_residual(self):
        inst = scalar_identity_instance()
        with pytest.raises(InnerSolveError) as err:
            pp_step(inst, 0.9, np.array([1.0]), inner_tol=1e-30, inner_max=5)
        assert err.value.residual > 0


class TestPpRun:
    def test_zero_steps_and_zero_operator(self):
        inst = zero_operator_instance()
        assert len(pp_run(inst, SolverConfig(eta=0.1, T=0), np.ones(2))) == 1
        traj = pp_run(inst, SolverConfig(eta=0.1, T=4), np.ones(2))
        for z in traj.iterates:
            np.testing.assert_array_equal(z, np.ones(2))

    def test_consecutive_distances_monotone(self):
        rng = np.random.default_rng(3)
        inst = random_monotone_instance(rng)
        eta = 0.5 / inst.operator.lipschitz
        traj = pp_run(inst, SolverConfig(eta=eta, T=50), rng.uniform(0, 1, 4))
        steps = [np.linalg.norm(a - b) for a, b in zip(traj.iterates, traj.iterates[1:])]
        for a, b in zip(steps, steps[1:]):
            assert b <= a + 1e-9

    def test_nonexpansive_on_pairs(self):
        rng = np.random.default_rng(4)
        inst = random_monotone_instance(rng)
        eta = 0.5 / inst.operator.lipschitz
        for _ in range(20):
            z, zh = rng.uniform(0, 2, 4), rng.uniform(0, 2, 4)
            w = pp_step(inst, eta, z)
            wh = pp_step(inst, eta, zh)
            assert np.linalg.norm(w - wh) <= np.linalg.norm(z - zh) + 1e-8


class TestSolveReference:
    def test_origin_solution(self):
        inst = make_bilinear(bilinear_spec(np.array([[1.0, 2.0], [3.0, 4.0]]), [0, 0], [0, 0], lo=-5.0, hi=5.0))
        z = solve_reference(inst, eta=0.1)
        assert natural_residual(inst, z) <= 1e-11

    def test_strongly_monotone_projected_target(self):
        q = np.array([2.0, -3.0, 1.0])
        op = AffineOperator.create(np.eye(3), -q)  # F(z) = z - q
        inst = VIInstance.create(op, NonnegativeOrthant(3))
        z = solve_reference(inst, eta=0.5)
        np.testing.assert_allclose(z, np.maximum(q, 0.0), rtol=0, atol=1e-10)

    def test_counterexample_reference_matches_long_run_oracle(self):
        # frozen from a dedicated 1e5-step plain-numpy EG loop started at the
        # published point (residual 8.9e-16 there); the solution set is a
        # segment, so the start must match for the comparison to make sense
        inst = make_bilinear(bilinear_spec([[1.0, 2.0], [1.0, 1.0]], [1, 1], [1, 1]))
        z0 = np.array([0.3108455, 0.4825575, 0.4621875, 0.5768655])
        z = solve_reference(inst, eta=0.1, z0=z0)
        oracle = np.array([0.0, 1.0, 0.33167168030075256, 0.6683283196992464])
        np.testing.assert_allclose(z, oracle, rtol=0, atol=1e-8)

    def test_budget_error_carries_best_residual(self):
        inst = make_bilinear(bilinear_spec([[1.0, 2.0], [1.0, 1.0]], [1, 1], [1, 1]))
        with pytest.raises(ReferenceSolveError) as err:
            solve_reference(inst, eta=0.1, tol=1e-16, max_iter=50)
        assert err.value.best_residual > 0


class TestRateReports:
    def test_zero_operator_all_slack_nonnegative(self):
        inst = zero_operator_instance()
        traj = eg_run(inst, SolverConfig(eta=0.1, T=5), np.ones(2))
        report = rate_report_eg(traj, np.ones(2))
        assert report.passed
        traj = pp_run(inst, SolverConfig(eta=0.1, T=5), np.ones(2))
        assert rate_report_pp(traj, np.ones(2)).passed

    def test_eg_random_monotone_instance(self):
        rng = np.random.default_rng(5)
        inst = random_monotone_instance(rng)
        eta = 0.5 / inst.operator.lipschitz
        z0 = rng.uniform(0, 1, 4)
        z_star = solve_reference(inst, eta=eta)
        traj = eg_run(inst, SolverConfig(eta=eta, T=200), z0)
        report = rate_report_eg(traj, z_star, gap_stride=10)
        assert report.worst_slack >= -1e-8

    def test_eg_strongly_monotone_linear_rate_rows(self):
        op = AffineOperator.create(np.eye(2), np.array([-1.0, -2.0]))  # gamma = L = 1
        inst = VIInstance.create(op, NonnegativeOrthant(2))
        z_star = solve_reference(inst, eta=0.5)
        traj = eg_run(inst, SolverConfig(eta=0.5, T=60), np.array([3.0, 0.0]))
        report = rate_report_eg(traj, z_star, gap_stride=5)
        assert "strongly_monotone_linear_rate" in report.checks
        assert "gap_bounds_distance" in report.checks
        assert report.worst_slack >= -1e-8

    def test_pp_random_monotone_instance(self):
        rng = np.random.default_rng(6)
        inst = random_monotone_instance(rng)
        eta = 0.5 / inst.operator.lipschitz
        z_star = solve_reference(inst, eta=eta)
        traj = pp_run(inst, SolverConfig(eta=eta, T=50), rng.uniform(0, 1, 4))
        report = rate_report_pp(traj, z_star, gap_stride=5)
        assert report.worst_slack >= -1e-7

    def test_missing_half_iterates_rejected(self):
        inst = zero_operator_instance()
        traj = pp_run(inst, SolverConfig(eta=0.1, T=2), np.ones(2))
        with pytest.raises(ValueError, match="half iterates"):
            rate_report_eg(traj, np.ones(2))

    def test_rate_report_requires_small_step(self):
        inst = scalar_identity_instance()
        with pytest.warns(UserWarning):
            traj = eg_run(inst, SolverConfig(eta=2.0, T=2), np.array([1.0]))
        with pytest.raises(StepSizeError):
            rate_report_eg(traj, np.zeros(1))


class TestBestIterateIndex:
    def test_constant_trajectory(self):
        inst = zero_operator_instance()
        traj = eg_run(inst, SolverConfig(eta=0.1, T=5), np.ones(2))
        assert best_iterate_index(traj, "natural-residual") == 0

    def test_strictly_decreasing_series(self):
        op = AffineOperator.create(0.5 * np.eye(1), np.zeros(1))
        inst = VIInstance.create(op, WholeSpace(1))
        traj = eg_run(inst, SolverConfig(eta=0.5, T=10), np.array([4.0]))
        assert best_iterate_index(traj, "natural-residual") == 10

    def test_published_nonmonotone_series_picks_middle(self):
        inst = make_bilinear(bilinear_spec([[1.0, 2.0], [1.0, 1.0]], [1, 1], [1, 1]))
        z0 = np.array([0.3108455, 0.4825575, 0.4621875, 0.5768655])
        traj = eg_run(inst, SolverConfig(eta=0.1, T=2), z0)
        assert best_iterate_index(traj, "natural-residual") == 1

    def test_unknown_measure(self):
        inst = zero_operator_instance()
        traj = eg_run(inst, SolverConfig(eta=0.1, T=1), np.ones(2))
        with pytest.raises(KeyError):
            best_iterate_index(traj, "no-such-measure")


class TestExport:
    def test_csv_and_json(self, tmp_path):
        inst = zero_operator_instance()
        traj = eg_run(inst, SolverConfig(eta=0.1, T=2), np.ones(2))
        p = tmp_path / "trajectory.csv"
        with open(p, "w", newline="") as fh:
            write_trajectory_csv(fh, traj)
        lines = p.read_text().strip().splitlines()
        assert lines[0] == "k,z0,z1,zhalf0,zhalf1"
        assert len(lines) == 4
        blob = trajectory_to_json(traj)
        assert blob["config"]["T"] == 2
        assert len(blob["iterates"]) == 3
        assert len(blob["half_iterates"]) == 2

    def test_pp_trajectory_export_has_no_half_columns(self, tmp_path):
        inst = zero_operator_instance()
        traj = pp_run(inst, SolverConfig(eta=0.1, T=2), np.ones(2))
        p = tmp_path / "trajectory.csv"
        with open(p, "w", newline="") as fh:
            write_trajectory_csv(fh, traj)
        assert p.read_text().splitlines()[0] == "k,z0,z1"
        assert trajectory_to_json(traj)["half_iterates"] is None


class TestStartValidation:
    def test_infeasible_start_rejected(self):
        inst = zero_operator_instance()
        bad = np.array([-1.0, 0.5])
        with pytest.raises(ValueError, match="infeasible"):
            eg_run(inst, SolverConfig(eta=0.1, T=1), bad)
        with pytest.raises(ValueError, match="infeasible"):
            pp_run(inst, SolverConfig(eta=0.1, T=1), bad)
