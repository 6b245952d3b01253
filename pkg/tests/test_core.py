import numpy as np
import pytest

from sqcflow import catalog
from sqcflow.core import (DomainSpec, DomainViolation, FunctionOracle,
                          InvalidParameter, NonPositiveSequence, Trajectory,
                          as_point, finite_difference_gradient,
                          fit_decay_exponent, fit_linear_rate, grad_zero_tol)
from sqcflow.sampling import NestedSampler, sample_points


class TestFiniteDifferenceGradient:
    def test_quadratic_exact(self):
        entry = catalog.strongly_convex_quadratic(2, 1.0, 1.0)
        fd = finite_difference_gradient(entry.oracle, [1.0, 0.0], step=1e-5)
        np.testing.assert_allclose(fd, [1.0, 0.0], atol=1e-8)

    def test_stationary_point(self):
        entry = catalog.sin_quadratic()
        fd = finite_difference_gradient(entry.oracle, [0.0], step=1e-6)
        assert abs(fd[0]) < 1e-8

    def test_sqrt_against_hand_derivative(self):
        entry = catalog.sqrt_norm(1, 1.0)
        fd = finite_difference_gradient(entry.oracle, [0.25], step=1e-6)
        # d/dx sqrt(x) = 1/(2 sqrt(x)) = 1 at x = 0.25
        np.testing.assert_allclose(fd, [1.0], atol=1e-6)
        np.testing.assert_allclose(fd, entry.oracle.grad(np.array([0.25])),
                                   atol=1e-6)

    def test_domain_violation(self):
        entry = catalog.sqrt_norm(2, 1.0)
        boundary = np.array([1.0, 0.0])
        with pytest.raises(DomainViolation):
            finite_difference_gradient(entry.oracle, boundary, step=1e-5)

    def test_bad_step(self):
        entry = catalog.sin_quadratic()
        with pytest.raises(InvalidParameter):
            finite_difference_gradient(entry.oracle, [0.0], step=0.0)


class TestFitLinearRate:
    def test_exact_geometric(self):
        assert fit_linear_rate([1.0, 0.5, 0.25, 0.125]) == pytest.approx(0.5)

    def test_constant(self):
        assert fit_linear_rate([1.0, 1.0, 1.0]) == pytest.approx(1.0)

    def test_noisy_geometric(self):
        rng = np.random.default_rng(5)
        vals = 0.9 ** np.arange(50) * (1 + 0.01 * (2 * rng.random(50) - 1))
        assert fit_linear_rate(vals) == pytest.approx(0.9, abs=0.01)

    @pytest.mark.parametrize("scale", [1e-8, 0.5, 3.0, 1e7])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_scale_invariance(self, scale, seed):
        rng = np.random.default_rng(seed)
        vals = np.exp(-0.3 * np.arange(20)) * (1 + 0.05 * rng.random(20))
        assert fit_linear_rate(scale * vals) == pytest.approx(
            fit_linear_rate(vals), rel=1e-12)

    def test_nonpositive_rejected(self):
        with pytest.raises(NonPositiveSequence):
            fit_linear_rate([1.0, 0.0, 0.5])

    def test_too_short(self):
        with pytest.raises(InvalidParameter):
            fit_linear_rate([1.0, 0.5])

    def test_decay_exponent(self):
        t = np.linspace(0.0, 3.0, 40)
        assert fit_decay_exponent(t, np.exp(-2.0 * t)) == pytest.approx(2.0)


class TestPointsAndDomains:
    def test_as_point_rejects_nan(self):
        with pytest.raises(InvalidParameter):
            as_point([1.0, np.nan])

    def test_as_point_dim(self):
        with pytest.raises(InvalidParameter):
            as_point([1.0, 2.0], dim=3)

    def test_ball_membership(self):
        d = DomainSpec.ball([0.0, 0.0], 1.0)
        assert d.contains(np.array([0.5, 0.5]))
        assert not d.contains(np.array([1.0, 1.0]))

    def test_box_membership(self):
        d = DomainSpec.box([-1.0, 0.0], [1.0, 2.0])
        assert d.contains(np.array([0.0, 1.0]))
        assert not d.contains(np.array([0.0, -0.5]))

    def test_predicate_restricts(self):
        d = DomainSpec.box([-1.0], [1.0], predicate=lambda x: x[0] > 0)
        assert d.contains(np.array([0.5]))
        assert not d.contains(np.array([-0.5]))

    def test_invalid_shapes(self):
        with pytest.raises(InvalidParameter):
            DomainSpec.ball([0.0], -1.0)
        with pytest.raises(InvalidParameter):
            DomainSpec.box([1.0], [0.0])

    def test_trajectory_needs_increasing_times(self):
        with pytest.raises(InvalidParameter):
            Trajectory(times=[0.0, 0.0], states=np.zeros((2, 1)),
                       h_values=np.zeros(2), grad_norms=np.zeros(2))


def _interior_points(entry, n=100):
    dom = entry.oracle.domain
    pts = sample_points(dom, entry.oracle.dim, 3 * n, NestedSampler(11))
    if dom.kind == "ball":
        pts = dom.center + 0.9 * (pts - dom.center)
        pts = pts[np.linalg.norm(pts, axis=1) > 1e-2]
    return pts[:n]


class TestOracleInvariants:
    @pytest.mark.parametrize("name", sorted(catalog.default_catalog()))
    def test_gradient_matches_finite_differences(self, name):
        entry = catalog.default_catalog()[name]
        for x in _interior_points(entry):
            g = np.asarray(entry.oracle.grad(x))
            fd = finite_difference_gradient(entry.oracle, x, step=1e-6)
            assert np.linalg.norm(g - fd) <= 1e-4 * (1 + np.linalg.norm(g))

    @pytest.mark.parametrize("name", sorted(catalog.default_catalog()))
    def test_gradient_dimension(self, name):
        entry = catalog.default_catalog()[name]
        x = _interior_points(entry, n=1)[0]
        assert np.asarray(entry.oracle.grad(x)).shape == (entry.oracle.dim,)

    def test_minimizer_gradient_is_zero(self):
        for name, entry in catalog.default_catalog().items():
            x_bar = entry.oracle.known_minimizer
            if x_bar is None or name.startswith("sqrt_norm"):
                continue  # sqrt norm is nonsmooth at its minimizer
            g = np.asarray(entry.oracle.grad(x_bar))
            assert np.linalg.norm(g) <= grad_zero_tol(x_bar)

    def test_oracles_are_deterministic(self):
        entry = catalog.default_catalog()["sin_quadratic"]
        x = np.array([1.234])
        assert entry.oracle.value(x) == entry.oracle.value(x.copy())
        assert np.array_equal(entry.oracle.grad(x), entry.oracle.grad(x.copy()))

    def test_invalid_oracle_params(self):
        with pytest.raises(InvalidParameter):
            FunctionOracle(dim=0, value=lambda x: 0.0, grad=lambda x: x)
        with pytest.raises(InvalidParameter):
            FunctionOracle(dim=1, value=lambda x: 0.0, grad=lambda x: x,
                           known_modulus=-1.0)
