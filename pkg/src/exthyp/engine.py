"""Volume pipelines.

Three independent routes to the regularized volume of a domain:

* ``mu_contour``: reduce to a one-dimensional integral in the slice
  coordinate (Klein radius, or the last flattened coordinate), then deform
  the integration path around the light-cone crossing with an upper
  semicircular detour.  Uses branch tracking for the half-integer power in
  n = 2 and the locked analytic slice forms on the arc.
* ``mu_eps``: integrate a regularized density on the real domain for a
  geometric schedule of parameters and Richardson-extrapolate to zero.
* ``mu_direct``: ordinary (possibly improper) integration of the exact
  density, for domains that do not cross the light cone.

Agreement of the routes on crossing domains, and of all routes with closed
forms on interior domains, is the core consistency guarantee of the library.

Variant support: Klein-chart families regularize with ``KLEIN_EPS``; boxes
support both flattened regularizations (their limits agree; that equality is
itself a tested claim); wedges only the shifted-pole form, because the
pulled-back form has no stable closed transverse integral there.  The
shifted-pole density is not integrable on unbounded regions, so it is never
offered for Klein-native domains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contour import TrackedPower, build_contour, integrate_path
from .densities import (
    DensityVariant,
    klein_eps_radial,
    klein_radial,
    lower_edge_power,
)
from .domains import (
    Ball3D,
    Box3D,
    Cone3D,
    HolderGraph2D,
    HolderGraph3D,
    Polygon2D,
    Sector2D,
    Wedge3D,
)
from .errors import ContourError, DomainError, GeometryError
from .extrapolate import EpsSchedule, eps_limit, truncation_limit
from .geometry import (
    Isometry,
    IsometryKind,
    Model,
    apply_isometry_coords,
)
from .quadrature import QuadratureResult, integrate_batch, integrate_interval

_KLEIN_DOMAINS = (Sector2D, Polygon2D, Ball3D)


# ---------------------------------------------------------------------------
# slice functions


def _angular_mixed(domain, z: np.ndarray, window: float) -> np.ndarray:
    """Angular measure for mixed real/complex slice nodes: the real formula
    on the axis, the locked continuation on the detour arc."""
    out = np.empty(z.shape, dtype=complex)
    on_axis = z.imag == 0.0
    if np.any(on_axis):
        out[on_axis] = domain.angular_measure(z.real[on_axis])
    off = ~on_axis
    if np.any(off):
        zz = z[off]
        if np.any(np.abs(zz - 1.0) > window * (1.0 + 1e-9)):
            raise ContourError(
                "detour leaves the analyticity window of the slice measure"
            )
        out[off] = domain.angular_measure_locked(zz)
    return out


def _box_transverse(box: Box3D, z: np.ndarray, tol: float):
    """G(z) = int_B dx1 dx2 / (x1^2 + x2^2 + (z-1)^2), closed in x2."""
    a2, b2 = box.x2_range

    def inner(x1: np.ndarray) -> np.ndarray:
        s = np.sqrt(x1[None, :] ** 2 + (z[:, None] - 1.0) ** 2)
        return (np.arctan(b2 / s) - np.arctan(a2 / s)) / s

    values, err, evals, converged = integrate_batch(
        inner, *box.x1_range, tol=tol
    )
    return values, err, evals, converged


def _wedge_transverse(wedge: Wedge3D, z: np.ndarray, tol: float):
    """Transverse integral between the graphs c and c + d*z, closed in x2.

    Vanishes linearly at z = 0, which is what tames the slice pole."""

    def inner(x1: np.ndarray) -> np.ndarray:
        s = np.sqrt(x1[None, :] ** 2 + (z[:, None] - 1.0) ** 2)
        c = np.asarray(wedge.c(x1), dtype=complex)[None, :]
        d = np.asarray(wedge.d(x1), dtype=complex)[None, :]
        hi = c + d * z[:, None]
        return (np.arctan(hi / s) - np.arctan(c / s)) / s

    return integrate_batch(inner, *wedge.x1_range, tol=tol)


def _graph3_transverse(dom: HolderGraph3D, x3: np.ndarray, tol: float):
    g = np.asarray(dom.graph(x3), dtype=float)

    def inner(x1: np.ndarray) -> np.ndarray:
        s = np.sqrt(x1[None, :] ** 2 + (x3[:, None] - 1.0) ** 2)
        return np.arctan(g[:, None] / s) / s

    return integrate_batch(inner, *dom.x1_range, tol=tol)


def _box_transverse_pulled_back(box: Box3D, z: np.ndarray, eps: float, tol: float):
    """Transverse integral of the pulled-back regularized density over the
    box base: int_B dx1 dx2 / ((q*alpha - z)^2 * alpha).  No closed x2 form
    survives the q*alpha coupling, so both transverse directions are numeric
    (batched over the slice nodes)."""
    q = (-eps * eps - 2j * eps) / 4.0
    a2, b2 = box.x2_range
    zz = z[:, None, None]

    def outer(x1: np.ndarray) -> np.ndarray:
        xx1 = x1[None, :, None]

        def inner(x2: np.ndarray) -> np.ndarray:
            alpha = xx1**2 + x2[None, None, :] ** 2 + (zz - 1.0) ** 2
            vals = 1.0 / ((q * alpha - zz) ** 2 * alpha)
            return vals.reshape(-1, x2.size)

        values, _err, _ev, conv = integrate_batch(inner, a2, b2, tol=tol)
        if not conv:
            raise DomainError("transverse integral did not converge")
        return values.reshape(z.size, x1.size)

    return integrate_batch(outer, *box.x1_range, tol=tol)


def _cone_slice(cone: Cone3D, x3: np.ndarray) -> np.ndarray:
    # pi/(2 x3^2) * log(1 + x3^2 / (k^2 (x3-1)^2)); analytic at 0 via log1p
    x3 = np.asarray(x3, dtype=float)
    ratio = x3 * x3 / (cone.k**2 * (x3 - 1.0) ** 2)
    return np.pi * np.log1p(ratio) / (2.0 * x3 * x3) + 0j


def _cone_reduced_slice(k: float, x3: np.ndarray) -> np.ndarray:
    x3 = np.asarray(x3, dtype=float)
    ratio = x3 * x3 / (k**2 * (x3 - 1.0) ** 2)
    return np.log1p(ratio) / (2.0 * x3 * x3)


def _check_variant(domain, variant: DensityVariant | None) -> DensityVariant:
    if isinstance(domain, _KLEIN_DOMAINS):
        allowed = (DensityVariant.KLEIN_EXACT, DensityVariant.KLEIN_EPS)
        default = DensityVariant.KLEIN_EXACT
    elif isinstance(domain, Box3D):
        allowed = (
            DensityVariant.FLATTENED_EXACT,
            DensityVariant.MU_EPS,
            DensityVariant.FLATTENED_EPS,
        )
        default = DensityVariant.FLATTENED_EXACT
    elif isinstance(domain, Wedge3D):
        allowed = (DensityVariant.FLATTENED_EXACT, DensityVariant.MU_EPS)
        default = DensityVariant.FLATTENED_EXACT
    elif isinstance(domain, (Cone3D, HolderGraph2D, HolderGraph3D)):
        allowed = (DensityVariant.FLATTENED_EXACT,)
        default = DensityVariant.FLATTENED_EXACT
    else:
        raise DomainError(f"unsupported domain type {type(domain).__name__}")
    if variant is None:
        return default
    if variant not in allowed:
        raise DomainError(
            f"{type(domain).__name__} supports {[v.value for v in allowed]}, "
            f"got {variant.value}"
        )
    return variant


def _slice_values(domain, z: np.ndarray, variant: DensityVariant,
                  eps: float | None, tol: float) -> np.ndarray:
    """Vectorized transverse integral at slice coordinates z (complex array).

    For Klein-chart domains z is the radius; for flattened-chart domains the
    last coordinate.  Complex nodes are only meaningful for the exact and
    shifted-pole variants, whose locked forms continue analytically.
    """
    z = np.asarray(z, dtype=complex)
    n = domain.n
    if isinstance(domain, _KLEIN_DOMAINS):
        window = domain.analyticity_window()
        f_ang = _angular_mixed(domain, z, window)
        if variant is DensityVariant.KLEIN_EXACT:
            radial = klein_radial(z, n)
        else:
            radial = klein_eps_radial(z, n, eps)
        return f_ang * z ** (n - 1) * radial

    if isinstance(domain, Box3D):
        if variant is DensityVariant.FLATTENED_EPS:
            if np.any(z.imag != 0.0):
                raise DomainError(
                    "the pulled-back regularization is defined on the real axis"
                )
            values, _e, _v, conv = _box_transverse_pulled_back(
                domain, z, eps, tol
            )
            if not conv:
                raise DomainError("transverse integral did not converge")
            return (1.0 - 1j * eps) / 2.0 * values
        values, _e, _v, conv = _box_transverse(domain, z, tol)
        if not conv:
            raise DomainError("transverse integral did not converge")
        if variant is DensityVariant.FLATTENED_EXACT:
            pref = lower_edge_power(-z, -(n + 1) / 2) / 2.0
        else:
            pref = np.power(-z - 1j * eps, -(n + 1) / 2) / 2.0
        return pref * values

    if isinstance(domain, Wedge3D):
        values, _e, _v, conv = _wedge_transverse(domain, z, tol)
        if not conv:
            raise DomainError("transverse integral did not converge")
        if variant is DensityVariant.FLATTENED_EXACT:
            pref = lower_edge_power(-z, -(n + 1) / 2) / 2.0
        else:
            pref = np.power(-z - 1j * eps, -(n + 1) / 2) / 2.0
        return pref * values

    # boundary-touching families: exact density, real positive slice
    # coordinate only
    if np.any((z.imag != 0.0) | (z.real <= 0.0)):
        raise DomainError(
            "touching domains are sliced on the positive real axis only"
        )
    x = z.real
    if isinstance(domain, Cone3D):
        return _cone_slice(domain, x)
    if isinstance(domain, HolderGraph2D):
        g = domain.graph(x)
        val = np.arcsinh(g / np.abs(x - 1.0))
        return lower_edge_power(-z, -1.5) * val / 2.0
    if isinstance(domain, HolderGraph3D):
        values, _e, _v, conv = _graph3_transverse(domain, x, tol)
        if not conv:
            raise DomainError("transverse integral did not converge")
        return lower_edge_power(-z, -2.0) * values / 2.0
    raise DomainError(f"unsupported domain type {type(domain).__name__}")


def slice_integral(domain, z, *, variant: DensityVariant | None = None,
                   eps: float | None = None, tol: float = 1e-10) -> complex:
    """Transverse integral of the chosen density at one slice coordinate."""
    variant = _check_variant(domain, variant)
    if variant.needs_eps and eps is None:
        raise ValueError(f"{variant.value} requires a regularization parameter")
    if not variant.needs_eps and eps is not None:
        raise ValueError(f"{variant.value} does not take a regularization parameter")
    vals = _slice_values(domain, np.asarray([z], dtype=complex), variant, eps, tol)
    return complex(vals[0])


# ---------------------------------------------------------------------------
# pipelines


def _crossing_point(domain) -> float:
    return 1.0 if domain.model is Model.KLEIN else 0.0


def mu_contour(domain, *, tol: float = 1e-10, delta: float | None = None) -> QuadratureResult:
    """Regularized volume via a detoured slice-coordinate integral.

    Domains on one side of the light cone have no singularity inside the
    slice range; they get a straight contour (no detour), so the same route
    stays available for interior-consistency comparisons.
    """
    a, b = domain.slice_range()
    sing = _crossing_point(domain)
    crossing = bool(domain.crosses)
    bps = list(domain.breakpoints())
    if not crossing:
        if domain.model is not Model.KLEIN:
            raise DomainError(
                "touching domains keep their singularity at the slice "
                "endpoint, where no detour fits; use mu_direct"
            )
        if a < sing < b:
            # the slice measure vanishes on a neighbourhood of the light
            # cone (validation rejects tangential contact), so the straight
            # integral is fine; a panel edge at the cone keeps bisection
            # midpoints off the singular radius
            bps.append(sing)
        cont = build_contour(a, b, [])
    else:
        window = domain.analyticity_window()
        gaps = [sing - a, b - sing, window]
        gaps.extend(abs(p - sing) for p in domain.breakpoints())
        clearance = min(gaps)
        if delta is None:
            delta = 0.1 * clearance
        elif not 0.0 < delta < clearance:
            raise ContourError(
                f"detour radius must lie in (0, {clearance:.6g}) for this domain"
            )
        cont = build_contour(a, b, [sing], delta)
    inner_tol = tol / max(1.0, 10.0 * (b - a))

    if crossing and domain.model is Model.KLEIN and domain.n == 2:
        tracked = TrackedPower(lambda w: (1.0 - w) * (1.0 + w), -1.5, cont)
        window_ = window

        class _Integrand:
            path_aware = True

            def __call__(self, z, t):
                z = np.asarray(z, dtype=complex)
                return _angular_mixed(domain, z, window_) * z * tracked(z, t)

        integrand = _Integrand()
    else:
        def integrand(z):
            return _slice_values(
                domain, np.asarray(z, dtype=complex),
                DensityVariant.KLEIN_EXACT if domain.model is Model.KLEIN
                else DensityVariant.FLATTENED_EXACT,
                None, inner_tol,
            )

    return integrate_path(integrand, cont, tol=tol, breakpoints=tuple(bps))


def mu_eps(domain, *, variant: DensityVariant | None = None,
           schedule: EpsSchedule | None = None,
           quad_tol: float | None = None,
           trace: dict | None = None) -> QuadratureResult:
    """Regularized volume via real integrals at positive parameters plus
    extrapolation to zero.

    Pass a dict as ``trace`` to capture the raw integral at each schedule
    point (keyed by the regularization parameter) for reporting.
    """
    if isinstance(domain, _KLEIN_DOMAINS):
        variant = DensityVariant.KLEIN_EPS if variant is None else variant
    elif isinstance(domain, (Box3D, Wedge3D)):
        variant = DensityVariant.MU_EPS if variant is None else variant
    else:
        raise DomainError(
            "the regularized route applies to crossing domains; touching "
            "domains use mu_direct"
        )
    variant = _check_variant(domain, variant)
    if not variant.needs_eps:
        raise DomainError("mu_eps needs a regularized density variant")
    if quad_tol is None:
        quad_tol = 5e-8 if variant is DensityVariant.FLATTENED_EPS else 1e-9
    if schedule is None:
        if variant is DensityVariant.FLATTENED_EPS:
            schedule = EpsSchedule.geometric(count=11)
        else:
            schedule = EpsSchedule.geometric()
    a, b = domain.slice_range()
    bps = set(domain.breakpoints())
    sing = _crossing_point(domain)
    if a < sing < b:
        bps.add(sing)

    def sample(eps: float) -> QuadratureResult:
        def f(z: np.ndarray) -> np.ndarray:
            return _slice_values(
                domain, np.asarray(z, dtype=complex), variant, eps, quad_tol
            )

        res = integrate_interval(f, a, b, tol=quad_tol, breakpoints=tuple(bps))
        if trace is not None:
            trace[eps] = res.value
        return res

    return eps_limit(sample, schedule)


_TRUNCATION_RATIO = 0.5
_TRUNCATION_COUNT = 18


def mu_direct(domain, *, tol: float = 1e-10) -> QuadratureResult:
    """Ordinary integration of the exact density.

    Interior or exterior Klein domains integrate straight through; touching
    flattened families integrate on [tau, delta] and extrapolate tau -> 0,
    refusing domains whose volume provably diverges.
    """
    if getattr(domain, "crosses", False):
        raise DomainError(
            "domain crosses the light cone; use mu_contour or mu_eps"
        )
    a, b = domain.slice_range()
    if isinstance(domain, _KLEIN_DOMAINS):
        def f(r):
            return _slice_values(
                domain, np.asarray(r, dtype=complex),
                DensityVariant.KLEIN_EXACT, None, tol,
            )

        bps = list(domain.breakpoints())
        sing = _crossing_point(domain)
        if a < sing < b:
            # zero measure around the cone; see mu_contour
            bps.append(sing)
        return integrate_interval(f, a, b, tol=tol, breakpoints=tuple(bps))
    if isinstance(domain, (Box3D, Wedge3D)):
        raise DomainError("slab domains always cross; use mu_contour or mu_eps")
    if isinstance(domain, Cone3D):
        def f(x3):
            return _cone_slice(domain, np.asarray(x3, dtype=float))

        return integrate_interval(f, a, b, tol=tol)

    s = domain.convergence_exponent
    if s <= 0.0:
        raise DomainError(
            f"volume diverges (tail exponent {s:.3g} <= 0); "
            "classify it with divergence_profile instead"
        )

    def f(x):
        return _slice_values(
            domain, np.asarray(x, dtype=complex),
            DensityVariant.FLATTENED_EXACT, None, tol,
        )

    cutoffs = [b * _TRUNCATION_RATIO ** j for j in range(1, _TRUNCATION_COUNT + 1)]
    partial = {}
    total = QuadratureResult(0j, 0.0, 0)
    upper = b
    acc = 0j
    err = 0.0
    evals = 0
    converged = True
    for tau in cutoffs:
        piece = integrate_interval(f, tau, upper, tol=tol)
        acc += piece.value
        err += piece.error_estimate
        evals += piece.evaluations
        converged = converged and piece.converged
        partial[tau] = QuadratureResult(acc, err, evals, converged)
        upper = tau
    del total
    res = truncation_limit(lambda tau: partial[tau], cutoffs)
    if res.divergence_suspected:
        raise DomainError("truncation sequence diverges; domain volume is infinite")
    return res


def cone_reduced_volume(k: float, delta: float, *, tol: float = 1e-12) -> QuadratureResult:
    """Volume profile of the cone with the angular factor removed:
    int_0^delta log(1 + x3^2/(k^2 (x3-1)^2)) / (2 x3^2) dx3,
    whose leading small-delta behavior is delta / (2 k^2)."""
    cone = Cone3D(k, delta)

    def f(x3):
        return _cone_reduced_slice(cone.k, x3) + 0j

    return integrate_interval(f, 0.0, delta, tol=tol)


# ---------------------------------------------------------------------------
# invariance and additivity


def transform_domain(iso: Isometry, domain):
    """Image of a domain under an isometry, staying inside the same family.

    Projective maps send Klein-chart lines to lines, so polygons map to
    polygons by mapping vertices.  Balls only stay balls under orthogonal
    maps; boxes and wedges only transform under the chart reflections.
    """
    if isinstance(domain, Polygon2D):
        verts = apply_isometry_coords(
            iso, np.asarray(domain.vertices, dtype=float), Model.KLEIN
        )
        return Polygon2D(tuple(map(tuple, verts)))
    if isinstance(domain, Sector2D):
        m = iso.matrix
        if iso.kind is IsometryKind.LORENTZ:
            spatial = m[1:, 1:]
            is_rotation = (
                np.allclose(m[0, 1:], 0.0, atol=1e-12)
                and np.allclose(m[1:, 0], 0.0, atol=1e-12)
                and abs(m[0, 0] - 1.0) < 1e-12
                and np.allclose(spatial @ spatial.T, np.eye(iso.n), atol=1e-12)
            )
            if not is_rotation:
                raise GeometryError(
                    "sectors are stored by opening angle and radius; only "
                    "rotations and reflections keep that description"
                )
        return Sector2D(domain.theta, domain.radius)
    if isinstance(domain, Ball3D):
        if iso.kind is IsometryKind.LORENTZ:
            m = iso.matrix
            rotational = (
                np.allclose(m[0, 1:], 0.0, atol=1e-12)
                and np.allclose(m[1:, 0], 0.0, atol=1e-12)
                and abs(m[0, 0] - 1.0) < 1e-12
            )
            if not rotational:
                raise GeometryError("boosts do not map balls to balls")
            center = tuple(m[1:, 1:] @ np.asarray(domain.center))
        else:
            center = tuple(iso.matrix @ np.asarray(domain.center))
        return Ball3D(center, domain.radius)
    if isinstance(domain, Box3D):
        if iso.kind is not IsometryKind.REFLECTION:
            raise GeometryError("boxes transform under chart reflections only")
        diag = np.diag(iso.matrix)
        x1, x2 = domain.x1_range, domain.x2_range
        if diag[0] < 0:
            x1 = (-x1[1], -x1[0])
        if diag[1] < 0:
            x2 = (-x2[1], -x2[0])
        return Box3D(x1, x2, domain.delta)
    if isinstance(domain, Wedge3D):
        if iso.kind is not IsometryKind.REFLECTION:
            raise GeometryError("wedges transform under chart reflections only")
        diag = np.diag(iso.matrix)
        if diag[1] < 0:
            raise GeometryError(
                "reflecting the x2 axis exchanges the wedge pair; map x1 only"
            )
        a, b = domain.x1_range
        if diag[0] < 0:
            flip = [(-1.0) ** i for i in range(5)]
            c = tuple(f * c_ for f, c_ in zip(flip, domain.c_coeffs))
            d = tuple(f * d_ for f, d_ in zip(flip, domain.d_coeffs))
            return Wedge3D((-b, -a), c, d, domain.delta)
        return Wedge3D((a, b), domain.c_coeffs, domain.d_coeffs, domain.delta)
    raise DomainError(f"no isometry action implemented for {type(domain).__name__}")


@dataclass(frozen=True)
class InvarianceCheck:
    original: QuadratureResult
    mapped: QuadratureResult
    deviation: float


@dataclass(frozen=True)
class AdditivityCheck:
    whole: QuadratureResult
    parts: tuple[QuadratureResult, ...]
    deviation: float


def _run_pipeline(domain, pipeline: str, tol: float) -> QuadratureResult:
    if pipeline == "contour":
        return mu_contour(domain, tol=tol)
    if pipeline == "eps":
        return mu_eps(domain, quad_tol=tol)
    if pipeline == "direct":
        return mu_direct(domain, tol=tol)
    raise ValueError(f"unknown pipeline {pipeline!r}")


def invariance_check(domain, iso: Isometry, *, pipeline: str = "contour",
                     tol: float = 1e-10) -> InvarianceCheck:
    """Volume of a domain and of its isometric image, plus their distance."""
    mapped = transform_domain(iso, domain)
    r0 = _run_pipeline(domain, pipeline, tol)
    r1 = _run_pipeline(mapped, pipeline, tol)
    return InvarianceCheck(r0, r1, abs(r0.value - r1.value))


def additivity_check(whole, parts, *, pipeline: str = "contour",
                     tol: float = 1e-10) -> AdditivityCheck:
    """Volume of a domain against the sum over an essentially disjoint split."""
    total = _run_pipeline(whole, pipeline, tol)
    rs = tuple(_run_pipeline(p, pipeline, tol) for p in parts)
    dev = abs(total.value - sum(r.value for r in rs))
    return AdditivityCheck(total, rs, dev)
