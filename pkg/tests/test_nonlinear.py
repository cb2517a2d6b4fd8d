"""Newton root-finder and partial-pivot LU solver."""

import numpy as np
import pytest

from ieldtm.errors import NewtonFailureError, SingularMatrixError
from ieldtm.nonlinear import NewtonConfig, lu_solve, newton_solve


class TestLuSolve:
    def test_identity(self):
        b = np.array([3.0, -1.0, 4.0])
        np.testing.assert_array_equal(lu_solve(np.eye(3), b), b)

    def test_diagonal(self):
        x = lu_solve(np.diag([2.0, 4.0]), np.array([2.0, 8.0]))
        np.testing.assert_allclose(x, [1.0, 2.0])

    def test_pivoting_required(self):
        # Zero leading pivot forces a row swap.
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(lu_solve(A, np.array([5.0, 7.0])), [7.0, 5.0])

    def test_singular_raises(self):
        A = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularMatrixError):
            lu_solve(A, np.array([1.0, 1.0]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            lu_solve(np.eye(3), np.ones(2))

    def test_random_well_conditioned_systems(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            n = int(rng.integers(1, 9))
            # Diagonal dominance keeps the condition number modest.
            A = rng.normal(size=(n, n)) + n * np.eye(n)
            x0 = rng.normal(size=n)
            b = A @ x0
            x = lu_solve(A, b)
            norm_bound = (np.abs(A).sum(axis=1).max() * np.abs(x).max()
                          + np.abs(b).max())
            assert np.abs(A @ x - b).max() <= 1e-10 * norm_bound
            assert np.abs(x - x0).max() <= 1e-8 * max(1.0, np.abs(x0).max())


class TestNewtonSolve:
    def test_affine(self):
        root, iters = newton_solve(lambda y: y - 1.0, np.array([0.0]))
        assert root[0] == pytest.approx(1.0)
        # One correction plus one polish pass that confirms the floor.
        assert iters <= 2

    def test_quadratic(self):
        root, iters = newton_solve(lambda y: y ** 2 - 4.0, np.array([3.0]))
        assert root[0] == pytest.approx(2.0, abs=1e-10)
        assert iters <= 6

    def test_already_converged_guess(self):
        root, iters = newton_solve(lambda y: y - 1.0, np.array([1.0]))
        assert root[0] == 1.0
        assert iters == 0

    def test_coupled_system(self):
        def residual(y):
            return np.array([y[0] ** 2 + y[1] ** 2 - 2.0, y[0] - y[1]])

        root, _ = newton_solve(residual, np.array([2.0, 0.5]))
        np.testing.assert_allclose(root, [1.0, 1.0], atol=1e-10)

    def test_failure_reported(self):
        # No real root: residual cannot reach zero.
        cfg = NewtonConfig(max_iters=5)
        with pytest.raises(NewtonFailureError):
            newton_solve(lambda y: y ** 2 + 1.0, np.array([1.0]), cfg)

    def test_damping_recovers_overshoot(self):
        # Steep residual where a full Newton step overshoots badly.
        def residual(y):
            return np.arctan(y) * 10.0

        root, _ = newton_solve(residual, np.array([20.0]))
        assert abs(root[0]) <= 1e-10

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            NewtonConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            NewtonConfig(max_iters=0)
