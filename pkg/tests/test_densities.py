"""Density variants, branch conventions, pole locations, chart pullback."""

import numpy as np
import pytest

from exthyp.densities import (
    DensityVariant,
    density,
    flattened_eps,
    flattened_eps_denominator_roots,
    flattened_exact,
    klein_eps,
    klein_eps_radial,
    klein_exact,
    klein_radial,
    lower_edge_power,
    mu_eps,
    poles_in_xn,
)
from exthyp.errors import GeometryError, SingularEvaluationError
from exthyp.geometry import Model, ModelPoint, cayley_coords, cayley_jacobian_factor


def test_lower_edge_power_branch():
    # negative reals take argument -pi, not +pi
    np.testing.assert_allclose(lower_edge_power(-1.0, 0.5), -1j, atol=1e-15)
    np.testing.assert_allclose(lower_edge_power(-4.0, -0.5), 0.5j, atol=1e-15)
    # elsewhere it is the principal power
    for w in (2.0, 1.0 + 1j, -1.0 + 0.1j, -1.0 - 0.1j):
        np.testing.assert_allclose(
            lower_edge_power(w, -1.5), np.power(complex(w), -1.5), rtol=1e-14
        )
    with pytest.raises(SingularEvaluationError):
        lower_edge_power(0.0, -1.0)


def test_klein_radial_side_signs():
    # n = 2: Lorentz side carries the factor -i; n = 3: positive real
    v2 = complex(klein_radial(1.5, 2))
    assert v2.real == pytest.approx(0.0, abs=1e-15)
    assert v2.imag < 0.0
    np.testing.assert_allclose(
        complex(klein_radial(2.0, 3)), 1.0 / 9.0, rtol=1e-14
    )
    # hyperbolic side is the ordinary positive density
    assert complex(klein_radial(0.5, 2)).real > 0.0
    with pytest.raises(SingularEvaluationError):
        klein_radial(1.0, 2)


def test_klein_radial_conditioning_near_the_cone():
    # (1-r)(1+r) keeps the relative error at ulp scale where 1-r*r cancels;
    # compare against exact rational arithmetic on representable offsets
    from fractions import Fraction

    for k in range(8, 12):
        h = 2.0**-k
        for r in (1.0 - h, 1.0 + h):
            w = Fraction(r) * Fraction(r) - 1
            mag = float(abs(w)) ** -1.5
            expect = -1j * mag if w > 0 else mag
            np.testing.assert_allclose(
                complex(klein_radial(r, 2)), expect, rtol=5e-15
            )


def test_klein_eps_radial_stays_off_the_cut():
    rng = np.random.default_rng(8)
    r = rng.uniform(0.0, 3.0, size=200)
    for eps in (1e-1, 1e-4, 1e-8):
        w = (1.0 - 1j * eps - r) * (1.0 - 1j * eps + r)
        assert np.all(w.imag < 0.0)
        vals = klein_eps_radial(r, 2, eps)
        assert np.all(np.isfinite(vals))


def test_klein_eps_converges_to_exact_off_the_cone():
    for r in (0.3, 0.9, 1.2, 2.0):
        exact = complex(klein_radial(r, 3))
        approx = complex(klein_eps_radial(r, 3, 1e-9))
        np.testing.assert_allclose(approx, exact, rtol=1e-6)


def test_eps_must_be_positive():
    with pytest.raises(ValueError):
        klein_eps_radial(0.5, 2, -1e-3)
    with pytest.raises(ValueError):
        klein_eps_radial(0.5, 2, 0.0)


def test_flattened_exact_side_signs():
    # Lorentz side x_n > 0: (-x_n)^{-(n+1)/2} on the lower edge
    v2 = complex(flattened_exact(np.array([0.3, 0.5])))
    assert v2.imag < 0.0
    v3 = complex(flattened_exact(np.array([0.1, 0.2, 0.5])))
    assert v3.real > 0.0 and abs(v3.imag) < 1e-14 * v3.real
    with pytest.raises(SingularEvaluationError):
        flattened_exact(np.array([0.1, 0.2, 0.0]))
    with pytest.raises(SingularEvaluationError):
        flattened_exact(np.array([0.0, 0.0, 1.0]))  # inversion center


def test_pullback_consistency():
    # flattened density == Klein density after the chart change, times the
    # Jacobian factor, to near machine precision on generic points
    rng = np.random.default_rng(9)
    for n in (2, 3):
        x = rng.uniform(-1.5, 1.5, size=(1000, n))
        x = x[np.abs(x[:, -1]) > 0.05]
        x = x[np.sum((x - np.eye(n)[-1]) ** 2, axis=1) > 0.01]
        y = cayley_coords(x)
        x = x[np.abs(np.sum(y * y, axis=1) - 1.0) > 1e-6]
        y = cayley_coords(x)
        assert len(x) > 800
        lhs = flattened_exact(x)
        rhs = klein_exact(y) * cayley_jacobian_factor(x)
        rel = np.abs(lhs - rhs) / np.abs(lhs)
        assert rel.max() < 1e-8


def test_regularized_variants_share_the_limit():
    # both flattened regularizations approach the exact density pointwise
    x = np.array([0.4, -0.2, 0.3])
    exact = complex(flattened_exact(x))
    for fn in (flattened_eps, mu_eps):
        seq = [complex(fn(x, 10.0**-k)) for k in range(4, 10)]
        np.testing.assert_allclose(seq[-1], exact, rtol=1e-6)
    assert abs(complex(flattened_eps(x, 1e-9)) - complex(mu_eps(x, 1e-9))) < 1e-6


def test_density_dispatch_checks_chart_and_eps():
    p_klein = ModelPoint((0.3, 0.4), Model.KLEIN)
    p_flat = ModelPoint((0.3, 0.4), Model.FLATTENED)
    with pytest.raises(GeometryError):
        density(p_flat, DensityVariant.KLEIN_EXACT)
    with pytest.raises(ValueError):
        density(p_klein, DensityVariant.KLEIN_EPS)  # eps missing
    with pytest.raises(ValueError):
        density(p_klein, DensityVariant.KLEIN_EXACT, eps=0.1)  # eps forbidden
    v = density(p_klein, DensityVariant.KLEIN_EXACT)
    np.testing.assert_allclose(v, (1.0 - 0.25)**-1.5, rtol=1e-14)


def test_poles_stay_in_the_lower_half_plane():
    # the regularized slice densities must be pole-free on and above the real
    # axis for every eps and every transverse position
    rng = np.random.default_rng(10)
    eps_grid = np.logspace(-4.0, 0.0, 9)
    transverse = rng.uniform(-2.0, 2.0, size=(100, 2))
    violations = 0
    for eps in eps_grid:
        for t in transverse:
            for variant in (DensityVariant.MU_EPS, DensityVariant.FLATTENED_EPS):
                for pole in poles_in_xn(variant, t, eps):
                    if pole.imag >= 0.0:
                        violations += 1
    assert violations == 0


def test_denominator_roots_split_across_half_planes():
    rng = np.random.default_rng(11)
    for _ in range(50):
        t = rng.uniform(-2.0, 2.0, size=2)
        eps = 10.0 ** rng.uniform(-4.0, 0.0)
        lower, upper = flattened_eps_denominator_roots(t, eps)
        assert lower.imag < 0.0 < upper.imag
        assert abs(upper) > 1.0
        # both are genuine roots of q x^2 - (2q + 1) x + q (rho^2 + 1)
        rho_sq = float(np.sum(t * t))
        q = (-eps * eps - 2j * eps) / 4.0
        for r in (lower, upper):
            resid = q * r * r - (2.0 * q + 1.0) * r + q * (rho_sq + 1.0)
            scale = max(abs(q * r * r), abs((2.0 * q + 1.0) * r), 1.0)
            assert abs(resid) < 1e-13 * scale


def test_pole_report_for_exact_and_klein_variants():
    assert poles_in_xn(DensityVariant.FLATTENED_EXACT, (0.3, 0.4)) == (0j,)
    (p,) = poles_in_xn(DensityVariant.MU_EPS, (0.3, 0.4), eps=1e-3)
    np.testing.assert_allclose(p, -1e-3j, atol=1e-18)
    with pytest.raises(GeometryError):
        poles_in_xn(DensityVariant.KLEIN_EPS, (0.3, 0.4), eps=1e-3)


def test_klein_eps_matches_radial_form():
    x = np.array([0.6, 0.8, 0.0])
    np.testing.assert_allclose(
        klein_eps(x, 1e-3), klein_eps_radial(1.0, 3, 1e-3), rtol=1e-14
    )
