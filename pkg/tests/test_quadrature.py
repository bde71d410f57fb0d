import numpy as np
import pytest

from exthyp.errors import QuadratureError
from exthyp.quadrature import QuadratureResult, integrate_batch, integrate_interval


def test_smooth_integrand_single_panel():
    res = integrate_interval(lambda x: np.exp(x), 0.0, 1.0, tol=1e-12)
    np.testing.assert_allclose(res.value, np.e - 1.0, rtol=1e-14)
    assert res.converged
    assert res.evaluations == 15  # one Gauss-Kronrod panel suffices


def test_polynomial_is_exact():
    # Kronrod-15 integrates polynomials up to degree 22 exactly
    res = integrate_interval(lambda x: x**10, -1.0, 2.0, tol=1e-12)
    np.testing.assert_allclose(res.value, (2.0**11 + 1.0) / 11.0, rtol=1e-15)
    assert res.evaluations == 15


def test_complex_integrand():
    res = integrate_interval(lambda x: 1.0 / (x + 1j), 0.0, 1.0, tol=1e-12)
    np.testing.assert_allclose(res.value, np.log((1.0 + 1j) / 1j), atol=1e-13)


def test_kink_with_breakpoint_is_cheap():
    f = lambda x: np.abs(x - 0.5)
    free = integrate_interval(f, 0.0, 1.0, tol=1e-12)
    hinted = integrate_interval(f, 0.0, 1.0, tol=1e-12, breakpoints=(0.5,))
    np.testing.assert_allclose(free.value, 0.25, atol=1e-12)
    np.testing.assert_allclose(hinted.value, 0.25, atol=1e-15)
    assert hinted.evaluations == 30  # exactly one panel per side
    assert hinted.evaluations < free.evaluations


def test_breakpoints_outside_range_are_ignored():
    res = integrate_interval(lambda x: x, 0.0, 1.0, tol=1e-12, breakpoints=(-1.0, 2.0))
    assert res.evaluations == 15


def test_integrable_endpoint_singularity():
    res = integrate_interval(lambda x: 1.0 / np.sqrt(x), 1e-8, 1.0, tol=1e-10)
    np.testing.assert_allclose(res.value, 2.0 * (1.0 - 1e-4), rtol=1e-10)
    assert res.converged


def test_sharp_peak_terminates_within_global_budget():
    # near-delta spike: per-interval refinement alone would chase rounding
    # noise around the peak forever; the global error budget must stop it
    eps = 1e-6
    f = lambda x: eps / (x * x + eps * eps)
    res = integrate_interval(f, -1.0, 1.0, tol=1e-9, breakpoints=(0.0,))
    np.testing.assert_allclose(res.value, 2.0 * np.arctan(1.0 / eps), rtol=1e-9)
    assert res.converged
    assert res.error_estimate <= 1e-9 * 1.01


def test_error_estimate_bounds_true_error():
    rng = np.random.default_rng(6)
    for _ in range(10):
        a, w, c = rng.uniform(0.5, 3.0), rng.uniform(0.1, 2.0), rng.uniform(-1, 1)
        f = lambda x: a * np.cos(w * x + c) / (1.0 + x * x)
        res = integrate_interval(f, -2.0, 3.0, tol=1e-10)
        fine = integrate_interval(f, -2.0, 3.0, tol=1e-14)
        assert abs(res.value - fine.value) <= max(res.error_estimate, 1e-13)


def test_batch_shares_refinement_across_rows():
    z = np.array([0.5, 1.0, 2.0])

    def f(x):
        return np.exp(-z[:, None] * x[None, :] ** 2)

    values, err, evals, converged = integrate_batch(f, 0.0, 1.0, tol=1e-12)
    assert values.shape == (3,)
    assert converged
    from scipy.special import erf

    expect = np.sqrt(np.pi / z) * erf(np.sqrt(z)) / 2.0
    np.testing.assert_allclose(values, expect, rtol=1e-12)


def test_nonfinite_integrand_raises():
    with pytest.raises(QuadratureError):
        integrate_interval(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)


def test_reversed_limits_flip_the_sign():
    fwd = integrate_interval(lambda x: np.exp(x), 0.0, 1.0)
    rev = integrate_interval(lambda x: np.exp(x), 1.0, 0.0)
    np.testing.assert_allclose(rev.value, -fwd.value, rtol=1e-14)


def test_nonfinite_limits_raise():
    with pytest.raises(QuadratureError):
        integrate_interval(lambda x: x, 0.0, np.inf)


def test_unconverged_flag_when_budget_exhausted():
    # genuinely rough integrand with a tiny interval cap
    f = lambda x: np.sin(1.0 / (x + 1e-3))
    res = integrate_interval(f, 0.0, 1.0, tol=1e-14, max_intervals=8)
    assert not res.converged


def test_result_validation():
    with pytest.raises(QuadratureError):
        QuadratureResult(1.0, -1.0, 10)
    with pytest.raises(QuadratureError):
        QuadratureResult(1.0, np.nan, 10)
    with pytest.raises(QuadratureError):
        QuadratureResult(1.0, 0.0, -1)
