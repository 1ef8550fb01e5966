import numpy as np
import pytest

import lassorand as lr
from oracles import lasso_oracle_objective, orthonormal_lasso


def random_dataset(rng, n, p, beta=None, sigma=1.0):
    X = rng.standard_normal((n, p))
    y = sigma * rng.standard_normal(n)
    if beta is not None:
        y = y + X @ beta
    return lr.Dataset(y, X, tuple(f"x{j}" for j in range(p)))


class TestDataset:
    def test_basic_construction(self):
        ds = lr.Dataset([1.0, 2.0], [[1.0], [2.0]], ("a",))
        assert ds.n == 2 and ds.p == 1

    def test_shares_float64_arrays(self):
        X = np.random.default_rng(0).standard_normal((5, 2))
        ds = lr.Dataset(np.zeros(5), X, ("a", "b"))
        assert ds.X is X

    @pytest.mark.parametrize(
        "y, X, names",
        [
            ([1.0], [[1.0]], ("a",)),  # n < 2
            ([1.0, 2.0], [[1.0], [np.nan]], ("a",)),  # non-finite
            ([1.0, np.inf], [[1.0], [2.0]], ("a",)),
            ([1.0, 2.0], [[1.0, 2.0], [3.0, 4.0]], ("a", "a")),  # dup names
            ([1.0, 2.0], [[1.0], [2.0]], ("a", "b")),  # label count
            ([1.0, 2.0, 3.0], [[1.0], [2.0]], ("a",)),  # length mismatch
        ],
    )
    def test_invalid_inputs(self, y, X, names):
        with pytest.raises(ValueError):
            lr.Dataset(y, X, names)


class TestStandardize:
    def test_symmetric_three_point_column(self):
        ds = lr.Dataset([0.0, 0.0, 0.0], [[1.0], [2.0], [3.0]], ("a",))
        out, tx = lr.standardize(ds)
        np.testing.assert_allclose(out.X[:, 0], [-1.0, 0.0, 1.0], atol=1e-12)
        assert tx.column_sd[0] == pytest.approx(1.0)

    def test_idempotent_on_standardized_data(self):
        rng = np.random.default_rng(1)
        ds, _ = lr.standardize(random_dataset(rng, 30, 4))
        again, _ = lr.standardize(ds)
        np.testing.assert_allclose(again.X, ds.X, atol=1e-10)
        np.testing.assert_allclose(again.y, ds.y, atol=1e-10)

    def test_constant_column_is_named(self):
        X = np.column_stack([np.ones(5) * 5.0, np.arange(5.0)])
        ds = lr.Dataset(np.zeros(5), X, ("const", "ok"))
        with pytest.raises(lr.ConstantColumnError, match="const"):
            lr.standardize(ds)

    def test_moments_after_transform(self):
        rng = np.random.default_rng(2)
        out, _ = lr.standardize(random_dataset(rng, 50, 6))
        np.testing.assert_allclose(out.X.mean(axis=0), 0.0, atol=1e-10)
        np.testing.assert_allclose(out.X.std(axis=0, ddof=1), 1.0, atol=1e-10)
        assert abs(out.y.mean()) < 1e-10

    def test_scaling_power_of_two_is_exact(self):
        rng = np.random.default_rng(3)
        ds = random_dataset(rng, 25, 5, beta=np.array([1.0, 0.5, 0, 0, 0]))
        X2 = ds.X.copy()
        X2[:, 1] *= 4.0
        scaled = lr.Dataset(ds.y, X2, ds.names)
        a, _ = lr.standardize(ds)
        b, _ = lr.standardize(scaled)
        assert np.array_equal(a.X, b.X)

    def test_scaling_equivariance_of_ranking(self):
        rng = np.random.default_rng(4)
        ds = random_dataset(rng, 40, 6, beta=np.array([1.5, -1.0, 0.6, 0, 0, 0]))
        X2 = ds.X.copy()
        X2[:, 0] *= 3.7
        std_a, _ = lr.standardize(ds)
        std_b, _ = lr.standardize(lr.Dataset(ds.y, X2, ds.names))
        lam = 0.3 * lr.lambda_max(std_a)
        fit_a = lr.fit_lasso(std_a, lam)
        fit_b = lr.fit_lasso(std_b, lam)
        assert [j for j, _ in fit_a.ranked] == [j for j, _ in fit_b.ranked]


class TestSoftThreshold:
    @pytest.mark.parametrize(
        "z, gamma, expected", [(3.0, 1.0, 2.0), (-0.5, 1.0, 0.0), (-3.0, 1.0, -2.0)]
    )
    def test_definition(self, z, gamma, expected):
        assert lr.soft_threshold(z, gamma) == expected

    def test_negative_gamma_rejected(self):
        with pytest.raises(ValueError):
            lr.soft_threshold(1.0, -0.1)

    def test_odd_and_nonexpansive(self):
        rng = np.random.default_rng(5)
        z = rng.standard_normal(500) * 3
        z2 = rng.standard_normal(500) * 3
        for gamma in (0.0, 0.3, 1.7):
            s = lr.soft_threshold(z, gamma)
            np.testing.assert_allclose(lr.soft_threshold(-z, gamma), -s, atol=1e-15)
            assert np.all(
                np.abs(s - lr.soft_threshold(z2, gamma)) <= np.abs(z - z2) + 1e-15
            )


class TestFitLasso:
    def test_all_zero_at_lambda_max(self):
        rng = np.random.default_rng(6)
        std, _ = lr.standardize(random_dataset(rng, 30, 8, beta=np.r_[2.0, np.zeros(7)]))
        lmax = lr.lambda_max(std)
        for lam in (lmax, 1.5 * lmax):
            fit = lr.fit_lasso(std, lam)
            assert np.count_nonzero(fit.beta) == 0
            assert fit.ranked == ()

    def test_ols_at_lambda_zero(self):
        rng = np.random.default_rng(7)
        std, _ = lr.standardize(random_dataset(rng, 40, 5, beta=np.r_[1.0, np.zeros(4)]))
        fit = lr.fit_lasso(std, 0.0, tol=1e-12, max_iter=50_000)
        expected, *_ = np.linalg.lstsq(std.X, std.y, rcond=None)
        np.testing.assert_allclose(fit.beta, expected, atol=1e-9)

    def test_orthonormal_design_matches_soft_threshold(self):
        rng = np.random.default_rng(8)
        Q, _ = np.linalg.qr(rng.standard_normal((30, 6)))
        y = rng.standard_normal(30)
        ds = lr.Dataset(y, Q, tuple(f"q{j}" for j in range(6)))
        weights = np.array([1.0, 1.0, 0.5, 2.0, 1.0, 1.0])
        for lam in (0.05, 0.3, 1.0):
            fit = lr.fit_lasso(ds, lam, weights=weights, tol=1e-12, max_iter=50_000)
            np.testing.assert_allclose(
                fit.beta, orthonormal_lasso(Q, y, lam, weights), atol=1e-9
            )

    def test_negative_weight_rejected(self):
        rng = np.random.default_rng(9)
        std, _ = lr.standardize(random_dataset(rng, 20, 3))
        with pytest.raises(ValueError):
            lr.fit_lasso(std, 1.0, weights=np.array([1.0, -1.0, 1.0]))

    def test_ranked_is_sorted_and_complete(self):
        rng = np.random.default_rng(10)
        std, _ = lr.standardize(
            random_dataset(rng, 60, 10, beta=np.r_[2.0, -1.5, 1.0, np.zeros(7)])
        )
        fit = lr.fit_lasso(std, 0.1 * lr.lambda_max(std))
        mags = [m for _, m in fit.ranked]
        assert mags == sorted(mags, reverse=True)
        assert {j for j, _ in fit.ranked} == set(np.flatnonzero(fit.beta))

    def test_nonconvergence_flagged(self):
        rng = np.random.default_rng(11)
        std, _ = lr.standardize(random_dataset(rng, 30, 40))
        fit = lr.fit_lasso(std, 1e-4 * lr.lambda_max(std), max_iter=2)
        assert not fit.converged
        assert fit.iterations == 2

    def test_objective_nonincreasing_across_sweeps(self):
        rng = np.random.default_rng(12)
        std, _ = lr.standardize(
            random_dataset(rng, 20, 10, beta=np.r_[1.0, -0.5, np.zeros(8)])
        )
        lam = 0.05 * lr.lambda_max(std)
        objs = []
        for sweeps in range(1, 25):
            fit = lr.fit_lasso(std, lam, max_iter=sweeps)
            objs.append(lr.lasso_objective(std, fit.beta, lam))
        diffs = np.diff(objs)
        assert np.all(diffs <= 1e-10)

    def test_solver_matches_sign_enumeration_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            p = int(rng.integers(1, 4))
            std, _ = lr.standardize(random_dataset(rng, 20, p))
            lam = float(rng.uniform(0, 1.1) * lr.lambda_max(std))
            fit = lr.fit_lasso(std, lam, tol=1e-10, max_iter=100_000)
            got = lr.lasso_objective(std, fit.beta, lam)
            want = lasso_oracle_objective(std.X, std.y, lam)
            assert got == pytest.approx(want, abs=1e-8)


class TestLambdaMax:
    def test_orthogonal_response_gives_zero(self):
        X = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        y = np.zeros(4)
        ds = lr.Dataset(y, X, ("a", "b"))
        assert lr.lambda_max(ds) == 0.0

    def test_single_column_definition(self):
        X = np.array([[2.0], [0.0], [-2.0]])
        y = np.array([1.0, 0.0, -1.0])  # X'y = 4
        assert lr.lambda_max(lr.Dataset(y, X, ("a",))) == pytest.approx(4.0)

    def test_weighted_maximum(self):
        # inner products (4, 6), weights (1, 3) -> max(4/1, 6/3) = 4
        X = np.array([[2.0, 0.0], [2.0, 0.0], [0.0, 3.0], [0.0, 3.0]])
        y = np.ones(4)
        ds = lr.Dataset(y, X, ("a", "b"))
        assert X[:, 0] @ y == pytest.approx(4.0)
        assert X[:, 1] @ y == pytest.approx(6.0)
        assert lr.lambda_max(ds, weights=np.array([1.0, 3.0])) == pytest.approx(4.0)

    def test_all_unpenalized_rejected(self):
        rng = np.random.default_rng(14)
        std, _ = lr.standardize(random_dataset(rng, 10, 2))
        with pytest.raises(ValueError):
            lr.lambda_max(std, weights=np.zeros(2))

    def test_zero_weight_columns_absorbed_first(self):
        # At lambda >= lambda_max the forced column carries the fit and
        # every penalized coefficient must be exactly zero.
        rng = np.random.default_rng(15)
        std, _ = lr.standardize(random_dataset(rng, 40, 4, beta=np.array([2.0, 0, 0, 0])))
        w = np.array([0.0, 1.0, 1.0, 1.0])
        lmax = lr.lambda_max(std, weights=w)
        fit = lr.fit_lasso(std, lmax * 1.0001, weights=w)
        assert fit.beta[0] != 0.0
        assert np.all(fit.beta[1:] == 0.0)


class TestLambdaGrid:
    def test_three_point_grid(self):
        np.testing.assert_allclose(lr.lambda_grid(1.0, 3, 0.01), [1.0, 0.1, 0.01])

    def test_first_element_exact(self):
        lmax = 0.123456789
        assert lr.lambda_grid(lmax, 50, 1e-3)[0] == lmax

    def test_constant_adjacent_ratio(self):
        g = lr.lambda_grid(1.0, 100, 1e-3)
        ratios = g[1:] / g[:-1]
        assert np.ptp(ratios) < 1e-12

    @pytest.mark.parametrize("args", [(0.0, 10, 0.1), (1.0, 1, 0.1), (1.0, 10, 1.5)])
    def test_degenerate_inputs(self, args):
        with pytest.raises(ValueError):
            lr.lambda_grid(*args)


class TestKktCheck:
    def test_all_zero_fit_at_lambda_max(self):
        rng = np.random.default_rng(16)
        std, _ = lr.standardize(random_dataset(rng, 30, 5, beta=np.r_[1.0, np.zeros(4)]))
        fit = lr.fit_lasso(std, lr.lambda_max(std))
        assert lr.kkt_check(fit, std, 1e-8).passed

    def test_ols_fit_at_zero(self):
        rng = np.random.default_rng(17)
        std, _ = lr.standardize(random_dataset(rng, 40, 4))
        fit = lr.fit_lasso(std, 0.0, tol=1e-13, max_iter=100_000)
        assert lr.kkt_check(fit, std, 1e-6).passed

    def test_perturbed_coordinate_is_localized(self):
        rng = np.random.default_rng(18)
        std, _ = lr.standardize(
            random_dataset(rng, 30, 3, beta=np.array([1.5, -1.0, 0.5]))
        )
        lam = 0.1 * lr.lambda_max(std)
        fit = lr.fit_lasso(std, lam, tol=1e-12, max_iter=50_000)
        active = [j for j, _ in fit.ranked]
        target = active[0]
        bad_beta = fit.beta.copy()
        bad_beta[target] += 0.1
        import dataclasses

        bad = dataclasses.replace(fit, beta=bad_beta)
        report = lr.kkt_check(bad, std, 1e-6)
        assert not report.passed
        assert report.worst_index == target
        # hand-computed gradient disturbance: col_ss * 0.1 perturbation
        col_ss = std.X[:, target] @ std.X[:, target]
        assert report.worst_violation == pytest.approx(0.1 * col_ss, rel=1e-6)

    def test_path_fits_pass_kkt_along_grid(self):
        rng = np.random.default_rng(19)
        std, _ = lr.standardize(
            random_dataset(rng, 25, 8, beta=np.r_[1.0, -0.7, np.zeros(6)])
        )
        grid = lr.lambda_grid(lr.lambda_max(std), 12, 1e-2)
        for lam in grid:
            fit = lr.fit_lasso(std, lam, tol=1e-10, max_iter=100_000)
            assert lr.kkt_check(fit, std, 1e-6).passed


class TestMarginalCorrelation:
    def test_column_equal_to_response(self):
        rng = np.random.default_rng(20)
        x = rng.standard_normal(30)
        X = np.column_stack([x, rng.standard_normal(30)])
        ds = lr.Dataset(x, X, ("same", "other"))
        corr = lr.marginal_correlation(ds)
        assert corr[0] == pytest.approx(1.0)

    def test_constant_column_is_nan(self):
        ds = lr.Dataset(
            [1.0, 2.0, 3.0], np.column_stack([np.ones(3), np.arange(3.0)]), ("c", "x")
        )
        corr = lr.marginal_correlation(ds)
        assert np.isnan(corr[0]) and corr[1] == pytest.approx(1.0)

    def test_needs_three_rows(self):
        with pytest.raises(ValueError):
            lr.marginal_correlation(lr.Dataset([1.0, 2.0], [[1.0], [2.0]], ("a",)))
