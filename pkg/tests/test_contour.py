"""Detour construction, path integration, and branch tracking."""

import numpy as np
import pytest

from exthyp.contour import (
    Arc,
    Contour,
    Line,
    TrackedPower,
    build_contour,
    deformation_check,
    integrate_path,
)
from exthyp.densities import lower_edge_power
from exthyp.errors import ContourError


def test_plain_interval_is_one_line():
    c = build_contour(-1.0, 2.0, ())
    assert len(c.segments) == 1
    assert c.start == -1.0 and c.end == 2.0


def test_detour_geometry():
    c = build_contour(0.0, 2.0, [1.0], delta=0.25)
    kinds = [type(s).__name__ for s in c.segments]
    assert kinds == ["Line", "Arc", "Line"]
    arc = c.segments[1]
    assert arc.center == 1.0 and arc.radius == 0.25
    # upper semicircle, traversed from pi to 0
    t = np.linspace(0.0, 1.0, 33)
    assert np.all(arc.point(t).imag >= -1e-15)
    assert arc.start == pytest.approx(0.75) and arc.end == pytest.approx(1.25)


def test_detour_validation():
    with pytest.raises(ContourError):
        build_contour(0.0, 1.0, [1.5])  # outside
    with pytest.raises(ContourError):
        build_contour(0.0, 1.0, [0.5, 0.5])  # duplicated
    with pytest.raises(ContourError):
        build_contour(0.0, 2.0, [1.0], delta=1.5)  # does not clear endpoints
    with pytest.raises(ContourError):
        build_contour(0.0, 2.0, [0.9, 1.1], delta=0.2)  # overlapping detours
    with pytest.raises(ContourError):
        Contour((Line(0.0, 1.0), Line(2.0, 3.0)))  # endpoints do not chain


def test_simple_pole_over_detour():
    c = build_contour(-1.0, 1.0, [0.0])
    res = integrate_path(lambda z: 1.0 / z, c, tol=1e-12)
    np.testing.assert_allclose(res.value, -1j * np.pi, atol=1e-12)


def test_double_pole_over_detour():
    c = build_contour(-1.0, 1.0, [0.0])
    res = integrate_path(lambda z: 1.0 / (z * z), c, tol=1e-12)
    np.testing.assert_allclose(res.value, -2.0, atol=1e-12)


def test_entire_integrand_ignores_the_detour():
    for delta in (0.05, 0.2, 0.4):
        c = build_contour(0.0, 2.0, [1.0], delta=delta)
        res = integrate_path(np.exp, c, tol=1e-12)
        np.testing.assert_allclose(res.value, np.exp(2.0) - 1.0, rtol=1e-12)


def test_breakpoints_reach_axis_segments():
    # a kink on the straight run: the hint splits the panel so one round
    # of refinement suffices
    c = build_contour(0.0, 2.0, [1.0], delta=0.1)
    hinted = integrate_path(lambda z: np.abs(z - 0.5), c, tol=1e-9, breakpoints=(0.5,))
    free = integrate_path(lambda z: np.abs(z - 0.5), c, tol=1e-9)
    assert hinted.converged
    assert hinted.evaluations < free.evaluations
    np.testing.assert_allclose(hinted.value, free.value, atol=1e-8)


def test_locate_points_on_segments():
    c = build_contour(0.0, 2.0, [1.0], delta=0.25)
    assert c.locate(0.375) == pytest.approx(0.5)
    assert c.locate(1.0 + 0.25j) == pytest.approx(1.5)  # top of the arc
    with pytest.raises(ContourError):
        c.locate(5.0 + 5.0j)


def test_tracked_power_lands_on_the_lower_edge():
    # continue (1 - z^2)^p through the upper detour past z = 1: the result on
    # (1, infinity) must be the arg = -pi branch
    c = build_contour(0.0, 2.0, [1.0])
    tracked = TrackedPower(lambda z: (1.0 - z) * (1.0 + z), -1.5, c)
    got = tracked.value_at(2.0)
    np.testing.assert_allclose(got, lower_edge_power(-3.0, -1.5), rtol=1e-12)
    # total argument drop of the base across the detour is exactly -pi
    np.testing.assert_allclose(
        tracked.final_argument - tracked.start_argument, -np.pi, atol=1e-9
    )


def test_tracked_radial_integral_oracle():
    # int_0^2 r (1 - r^2)^{-3/2} dr, antiderivative (1 - r^2)^{-1/2} continued
    # past the branch point: i/sqrt(3) - 1
    c = build_contour(0.0, 2.0, [1.0])
    tracked = TrackedPower(lambda z: (1.0 - z) * (1.0 + z), -1.5, c)

    class Radial:
        path_aware = True

        def __call__(self, z, t):
            return np.asarray(z, dtype=complex) * tracked(z, t)

    res = integrate_path(Radial(), c, tol=1e-12)
    np.testing.assert_allclose(res.value, -1.0 + 1j / np.sqrt(3.0), atol=1e-10)


def test_tracked_power_rejects_vanishing_base():
    c = build_contour(0.0, 1.0, ())
    with pytest.raises(ContourError):
        TrackedPower(lambda z: z - 0.5, 0.5, c)


def test_deformation_check_accepts_analytic_integrands():
    out = deformation_check(lambda z: 1.0 / z, -1.0, 1.0, [0.0], tol=1e-8)
    assert out.passed
    assert out.spread < 1e-9
    assert len(out.values) == len(out.deltas) == 3


def test_deformation_check_catches_conjugate_pole():
    # 1/conj(z)^2 agrees with 1/z^2 on the axis but is not analytic; its
    # integral depends on the detour radius
    out = deformation_check(
        lambda z: 1.0 / np.conj(z) ** 2, -1.0, 1.0, [0.0], tol=1e-8
    )
    assert not out.passed
    assert out.spread > 1e-2


def test_deformation_check_catches_modulus_integrand():
    out = deformation_check(lambda z: np.abs(z), -1.0, 1.0, [0.0], tol=1e-8)
    assert not out.passed


def test_deformation_check_factory_mode():
    def factory(contour):
        tracked = TrackedPower(lambda z: (1.0 - z) * (1.0 + z), -1.5, contour)

        class Radial:
            path_aware = True

            def __call__(self, z, t):
                return np.asarray(z, dtype=complex) * tracked(z, t)

        return Radial()

    out = deformation_check(factory, 0.0, 2.0, [1.0], tol=1e-8, factory=True)
    assert out.passed
    np.testing.assert_allclose(
        out.values[0], -1.0 + 1j / np.sqrt(3.0), atol=1e-8
    )


def test_arc_validation():
    with pytest.raises(ContourError):
        Arc(0.0, -1.0, 0.0, np.pi)
    with pytest.raises(ContourError):
        Arc(0.0, 1.0, 0.5, 0.5)
