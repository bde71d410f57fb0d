"""Volume densities on the Klein and flattened charts.

Lorentz-side values are boundary values from below (the regularization has
strictly negative imaginary part), so fractional powers of quantities that
turn negative across the light cone carry argument -pi there.
``lower_edge_power`` encodes that rule: principal branch everywhere except on
the negative real axis, where the argument is taken as -pi instead of +pi.
Along the standard upper semicircular detours the continued argument stays in
(-pi, 0], so the rule coincides with analytic continuation; arbitrary paths
should go through ``contour.tracked_power_integrand`` instead.

Naming: ``rho_sq`` is the squared norm of the transverse coordinates
(x_1, ..., x_{n-1}) in the flattened chart, ``xn`` the last coordinate there;
``alpha = rho_sq + (xn - 1)^2`` is the squared distance to the inversion
center e_n.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import GeometryError, SingularEvaluationError
from .geometry import Model, ModelPoint, _check_dim

SINGULAR_TOL = 1e-12


class DensityVariant(Enum):
    KLEIN_EXACT = "klein_exact"
    KLEIN_EPS = "klein_eps"
    FLATTENED_EXACT = "flattened_exact"
    FLATTENED_EPS = "flattened_eps"
    MU_EPS = "mu_eps"

    @property
    def chart(self) -> Model:
        if self in (DensityVariant.KLEIN_EXACT, DensityVariant.KLEIN_EPS):
            return Model.KLEIN
        return Model.FLATTENED

    @property
    def needs_eps(self) -> bool:
        return self in (
            DensityVariant.KLEIN_EPS,
            DensityVariant.FLATTENED_EPS,
            DensityVariant.MU_EPS,
        )


def _check_eps(eps) -> float:
    eps = float(eps)
    if not np.isfinite(eps) or eps <= 0.0:
        raise ValueError(f"regularization parameter must be positive, got {eps}")
    return eps


def lower_edge_power(w, p: float):
    """w**p with the argument of w taken in [-pi, pi) instead of (-pi, pi]."""
    w = np.asarray(w, dtype=complex)
    mag = np.abs(w)
    if np.any(mag == 0.0):
        raise SingularEvaluationError("power evaluated at a zero of its base")
    arg = np.angle(w)
    arg = np.where((w.imag == 0.0) & (w.real < 0.0), -np.pi, arg)
    out = np.exp(p * (np.log(mag) + 1j * arg))
    return complex(out) if out.ndim == 0 else out


def klein_radial(r, n: int):
    """Radial factor (1 - r^2)^{-(n+1)/2}, continued to complex r."""
    _check_dim(n)
    r = np.asarray(r, dtype=complex)
    # (1-r)(1+r) rather than 1-r^2: near r = 1 the difference 1-r is exact,
    # so the relative error stays at ulp scale instead of blowing up with
    # the cancellation; quadrature error estimates rely on that.
    w = (1.0 - r) * (1.0 + r)
    if np.any(np.abs(w) < SINGULAR_TOL):
        raise SingularEvaluationError("evaluation on the light cone |r| = 1")
    return lower_edge_power(w, -(n + 1) / 2)


def klein_exact(x):
    """Density of the Klein chart at real points x of shape (..., n)."""
    x = np.asarray(x, dtype=float)
    _check_dim(x.shape[-1])
    s = np.sum(x * x, axis=-1)
    w = 1.0 - s
    if np.any(np.abs(w) < SINGULAR_TOL):
        raise SingularEvaluationError("evaluation on the light cone |x| = 1")
    return lower_edge_power(w, -(x.shape[-1] + 1) / 2)


def klein_eps_radial(r, n: int, eps: float):
    """Regularized radial factor d (d^2 - r^2)^{-(n+1)/2} with d = 1 - i eps."""
    _check_dim(n)
    eps = _check_eps(eps)
    r = np.asarray(r, dtype=complex)
    d = 1.0 - 1j * eps
    # factored for conditioning near r = 1, like the exact radial factor;
    # for real r >= 0 the imaginary part is -2 eps to rounding, strictly
    # negative: never on the principal cut
    w = (d - r) * (d + r)
    out = d * np.power(w, -(n + 1) / 2)
    return complex(out) if out.ndim == 0 else out


def klein_eps(x, eps: float):
    x = np.asarray(x, dtype=float)
    _check_dim(x.shape[-1])
    return klein_eps_radial(np.sqrt(np.sum(x * x, axis=-1)), x.shape[-1], eps)


def _alpha(rho_sq, xn):
    return np.asarray(rho_sq) + (np.asarray(xn) - 1.0) ** 2


def _check_alpha(alpha) -> None:
    if np.any(np.abs(alpha) < SINGULAR_TOL):
        raise SingularEvaluationError(
            "evaluation at the inversion center e_n of the flattened chart"
        )


def flattened_exact_parts(rho_sq, xn, n: int):
    """Flattened-chart density from rho^2 and the (possibly complex) slice
    coordinate: (-xn)^{-(n+1)/2} / (2 alpha^{(n-1)/2})."""
    _check_dim(n)
    xn = np.asarray(xn, dtype=complex)
    if np.any(np.abs(xn) < SINGULAR_TOL):
        raise SingularEvaluationError("evaluation on the light cone x_n = 0")
    alpha = _alpha(rho_sq, xn)
    _check_alpha(alpha)
    out = lower_edge_power(-xn, -(n + 1) / 2) / (2.0 * alpha ** ((n - 1) / 2))
    return complex(out) if out.ndim == 0 else out


def flattened_exact(x):
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    _check_dim(n)
    return flattened_exact_parts(np.sum(x[..., :-1] ** 2, axis=-1), x[..., -1], n)


def flattened_eps_parts(rho_sq, xn, n: int, eps: float):
    """Pulled-back regularized density at real flattened points.

    The denominator core q * alpha - xn with q = (-eps^2 - 2 i eps)/4 has
    imaginary part -eps * alpha / 2 < 0 for real arguments, so the principal
    branch applies; complex slice coordinates are not supported here.
    """
    _check_dim(n)
    eps = _check_eps(eps)
    rho_sq = np.asarray(rho_sq, dtype=float)
    xn = np.asarray(xn, dtype=float)
    alpha = _alpha(rho_sq, xn)
    _check_alpha(alpha)
    q = (-eps * eps - 2j * eps) / 4.0
    core = q * alpha - xn
    out = (1.0 - 1j * eps) * np.power(core, -(n + 1) / 2) / (
        2.0 * alpha ** ((n - 1) / 2)
    )
    return complex(out) if out.ndim == 0 else out


def flattened_eps(x, eps: float):
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    _check_dim(n)
    return flattened_eps_parts(np.sum(x[..., :-1] ** 2, axis=-1), x[..., -1], n, eps)


def mu_eps_parts(rho_sq, xn, n: int, eps: float):
    """Shifted-pole density (-xn - i eps)^{-(n+1)/2} / (2 alpha^{(n-1)/2}).

    Shares the eps -> 0 limit with the pulled-back form but keeps alpha out of
    the regularized factor, so slice integrals stay elementary.
    """
    _check_dim(n)
    eps = _check_eps(eps)
    rho_sq = np.asarray(rho_sq, dtype=float)
    xn = np.asarray(xn, dtype=float)
    alpha = _alpha(rho_sq, xn)
    _check_alpha(alpha)
    core = -xn - 1j * eps
    out = np.power(core, -(n + 1) / 2) / (2.0 * alpha ** ((n - 1) / 2))
    return complex(out) if out.ndim == 0 else out


def mu_eps(x, eps: float):
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    _check_dim(n)
    return mu_eps_parts(np.sum(x[..., :-1] ** 2, axis=-1), x[..., -1], n, eps)


def density(point: ModelPoint, variant: DensityVariant, *, eps: float | None = None) -> complex:
    """Evaluate a density variant at a chart point, checking chart and eps."""
    if point.model is not variant.chart:
        raise GeometryError(
            f"{variant.value} lives on the {variant.chart.value} chart, "
            f"got a {point.model.value} point"
        )
    if variant.needs_eps:
        if eps is None:
            raise ValueError(f"{variant.value} requires a regularization parameter")
    elif eps is not None:
        raise ValueError(f"{variant.value} does not take a regularization parameter")
    x = point.array()
    if variant is DensityVariant.KLEIN_EXACT:
        return complex(klein_exact(x))
    if variant is DensityVariant.KLEIN_EPS:
        return complex(klein_eps(x, eps))
    if variant is DensityVariant.FLATTENED_EXACT:
        return complex(flattened_exact(x))
    if variant is DensityVariant.FLATTENED_EPS:
        return complex(flattened_eps(x, eps))
    return complex(mu_eps(x, eps))


def flattened_eps_denominator_roots(transverse, eps: float) -> tuple[complex, complex]:
    """Both roots of the pulled-back denominator quadratic in the slice
    coordinate, ordered by imaginary part (lower-half-plane root first).

    q x^2 - (2q + 1) x + q (rho^2 + 1) with q = (-eps^2 - 2 i eps)/4.  The
    product of the roots is rho^2 + 1 > 0, so exactly one root lies in each
    open half-plane; the upper one stays outside the unit disk and never
    approaches the integration axis.
    """
    eps = _check_eps(eps)
    rho_sq = float(np.sum(np.square(np.asarray(transverse, dtype=float))))
    q = (-eps * eps - 2j * eps) / 4.0
    b = -(2.0 * q + 1.0)
    disc = b * b - 4.0 * q * q * (rho_sq + 1.0)
    root = np.sqrt(disc)
    # take the sign that avoids cancellation in -b +/- root, then recover the
    # other root from the product rho^2 + 1 (small eps makes the naive
    # formula lose half the digits of the near-cone root)
    if abs(-b + root) >= abs(-b - root):
        big = (-b + root) / (2.0 * q)
    else:
        big = (-b - root) / (2.0 * q)
    small = (rho_sq + 1.0) / big
    lower, upper = sorted((complex(small), complex(big)), key=lambda z: z.imag)
    return lower, upper


def poles_in_xn(variant: DensityVariant, transverse, eps: float | None = None) -> tuple[complex, ...]:
    """Contour-relevant singularities of a flattened-chart density in the
    slice coordinate, at fixed transverse position.

    Only the poles that pinch the real axis as eps -> 0 are returned; the
    far root of the pulled-back quadratic (upper half-plane, |root| > 1) is
    available via ``flattened_eps_denominator_roots``.
    """
    if variant is DensityVariant.MU_EPS:
        return (-1j * _check_eps(eps),)
    if variant is DensityVariant.FLATTENED_EPS:
        lower, _ = flattened_eps_denominator_roots(transverse, eps)
        return (lower,)
    if variant is DensityVariant.FLATTENED_EXACT:
        return (0j,)
    raise GeometryError(
        f"{variant.value} has no slice-coordinate pole structure to report"
    )
