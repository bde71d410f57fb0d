"""Piecewise contours in the complex plane and integration along them.

A contour is a chain of line segments and circular arcs with matching
endpoints.  ``build_contour`` produces the standard deformation of a real
interval: straight runs along the axis with upper semicircular detours
(angle pi -> 0) around each listed singularity.

``TrackedPower`` continues a fractional power of an analytic base function
along a contour by sampling the base's argument densely enough that
consecutive samples differ by at most pi/4, then unwrapping.  That makes the
branch choice independent of how the principal argument happens to jump.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContourError
from .quadrature import QuadratureResult, integrate_interval

CONNECT_TOL = 1e-12
# refinement targets for argument tracking
_STEP_GOAL = np.pi / 4
_STEP_FAIL = np.pi / 2


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    def point(self, t):
        t = np.asarray(t)
        return self.start + (self.end - self.start) * t

    def derivative(self, t):
        t = np.asarray(t)
        return np.full(t.shape, self.end - self.start, dtype=complex)

    @property
    def length(self) -> float:
        return abs(self.end - self.start)


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    angle_start: float
    angle_end: float

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ContourError("arc radius must be positive")
        if self.angle_start == self.angle_end:
            raise ContourError("arc must subtend a nonzero angle")

    def point(self, t):
        t = np.asarray(t)
        ang = self.angle_start + (self.angle_end - self.angle_start) * t
        return self.center + self.radius * np.exp(1j * ang)

    def derivative(self, t):
        t = np.asarray(t)
        ang = self.angle_start + (self.angle_end - self.angle_start) * t
        span = self.angle_end - self.angle_start
        return 1j * span * self.radius * np.exp(1j * ang)

    @property
    def start(self) -> complex:
        return complex(self.point(0.0))

    @property
    def end(self) -> complex:
        return complex(self.point(1.0))

    @property
    def length(self) -> float:
        return self.radius * abs(self.angle_end - self.angle_start)


@dataclass(frozen=True)
class Contour:
    """Connected chain of segments; global parameter t runs over [0, len]."""

    segments: tuple

    def __post_init__(self) -> None:
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ContourError("contour needs at least one segment")
        scale = max(1.0, max(abs(s.start) + abs(s.end) for s in segs))
        for prev, cur in zip(segs, segs[1:]):
            if abs(prev.end - cur.start) > CONNECT_TOL * scale:
                raise ContourError(
                    f"segment endpoints do not chain: {prev.end} != {cur.start}"
                )

    @property
    def start(self) -> complex:
        return complex(self.segments[0].start)

    @property
    def end(self) -> complex:
        return complex(self.segments[-1].end)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.floor(t).astype(int), 0, len(self.segments) - 1)
        out = np.empty(t.shape, dtype=complex)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if np.any(mask):
                out[mask] = seg.point(t[mask] - i)
        return out

    def locate(self, z: complex, *, tol: float = 1e-9) -> float:
        """Global parameter of a point on the contour (first match)."""
        z = complex(z)
        for i, seg in enumerate(self.segments):
            if isinstance(seg, Line):
                span = seg.end - seg.start
                if abs(span) == 0:
                    continue
                u = (z - seg.start) / span
                if -tol <= u.real <= 1 + tol and abs(u.imag) * abs(span) <= tol:
                    return i + float(np.clip(u.real, 0.0, 1.0))
            else:
                if abs(abs(z - seg.center) - seg.radius) > tol * max(1.0, seg.radius):
                    continue
                ang = float(np.angle(z - seg.center))
                span = seg.angle_end - seg.angle_start
                for shift in (0.0, 2 * np.pi, -2 * np.pi):
                    u = (ang + shift - seg.angle_start) / span
                    if -tol <= u <= 1 + tol:
                        return i + float(np.clip(u, 0.0, 1.0))
        raise ContourError(f"point {z} does not lie on the contour")


def build_contour(a: float, b: float, singularities, delta: float | None = None) -> Contour:
    """Deform [a, b] around real singular points with upper semicircles.

    The detour radius must clear the endpoints and half the gap between
    neighbouring singularities; by default it is a tenth of that bound.
    """
    a, b = float(a), float(b)
    if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
        raise ContourError("need finite endpoints with a < b")
    sings = sorted(float(s) for s in singularities)
    if len(set(sings)) != len(sings):
        raise ContourError("singular points must be distinct")
    if not sings:
        return Contour((Line(complex(a), complex(b)),))
    if sings[0] <= a or sings[-1] >= b:
        raise ContourError("singular points must lie strictly inside (a, b)")

    clearance = min(
        min(s - a, b - s) for s in sings
    )
    for s0, s1 in zip(sings, sings[1:]):
        clearance = min(clearance, (s1 - s0) / 2.0)
    if delta is None:
        delta = 0.1 * clearance
    else:
        delta = float(delta)
        if delta <= 0:
            raise ContourError("detour radius must be positive")
        if delta >= clearance:
            raise ContourError(
                f"detour radius {delta} does not clear endpoints or "
                f"neighbouring singularities (bound {clearance})"
            )

    drop = 1e-13 * (b - a)
    segments: list = []
    cursor = a
    for s in sings:
        run = Line(complex(cursor), complex(s - delta))
        if run.length > drop:
            segments.append(run)
        segments.append(Arc(complex(s), delta, np.pi, 0.0))
        cursor = s + delta
    tail = Line(complex(cursor), complex(b))
    if tail.length > drop:
        segments.append(tail)
    return Contour(tuple(segments))


def _line_breakpoint_params(seg: Line, breakpoints) -> tuple[float, ...]:
    if seg.start.imag != 0.0 or seg.end.imag != 0.0:
        return ()
    x0, x1 = seg.start.real, seg.end.real
    if x0 == x1:
        return ()
    out = []
    for p in breakpoints:
        u = (float(p) - x0) / (x1 - x0)
        if 0.0 < u < 1.0:
            out.append(u)
    return tuple(out)


def integrate_path(f, contour: Contour, *, tol: float = 1e-9, breakpoints=(),
                   max_intervals=None) -> QuadratureResult:
    """Integrate f along the contour.

    If ``f.path_aware`` is truthy it is called as ``f(z, t)`` with the global
    contour parameter, which branch-tracking integrands need; otherwise as
    ``f(z)``.  ``breakpoints`` are real abscissae used to pre-split segments
    that lie on the real axis.
    """
    aware = bool(getattr(f, "path_aware", False))
    total = 0j
    err = 0.0
    evaluations = 0
    converged = True
    seg_tol = tol / len(contour.segments)
    kwargs = {} if max_intervals is None else {"max_intervals": max_intervals}
    for i, seg in enumerate(contour.segments):
        if aware:
            def g(u, seg=seg, i=i):
                z = seg.point(u)
                return f(z, i + u) * seg.derivative(u)
        else:
            def g(u, seg=seg):
                z = seg.point(u)
                return f(z) * seg.derivative(u)

        bps = _line_breakpoint_params(seg, breakpoints) if isinstance(seg, Line) else ()
        res = integrate_interval(g, 0.0, 1.0, tol=seg_tol, breakpoints=bps, **kwargs)
        total += res.value
        err += res.error_estimate
        evaluations += res.evaluations
        converged = converged and res.converged
    return QuadratureResult(total, err, evaluations, converged)


class TrackedPower:
    """base(z)**exponent with the argument continued along a contour.

    Knots (global parameter, unwrapped argument) are precomputed per segment
    and refined by doubling until adjacent samples differ by at most pi/4.
    If the refinement budget runs out while jumps above pi/2 remain, the base
    is changing too fast (or vanishes nearby) and tracking fails loudly.
    Evaluation snaps the principal argument to the tracked branch, so it is
    exact at the knots and between them wherever the true argument stays
    within half a turn of the interpolant.
    """

    path_aware = True

    def __init__(self, base, exponent: float, contour: Contour, *,
                 initial_samples: int = 65, max_samples: int = 1 << 17):
        self.base = base
        self.exponent = float(exponent)
        self.contour = contour
        t_all: list[np.ndarray] = []
        phi_all: list[np.ndarray] = []
        offset = 0.0
        prev_end: float | None = None
        for i, seg in enumerate(contour.segments):
            m = initial_samples
            while True:
                u = np.linspace(0.0, 1.0, m)
                w = np.asarray(base(seg.point(u)), dtype=complex)
                if np.any(np.abs(w) < 1e-300):
                    raise ContourError("base function vanishes on the contour")
                phi = np.unwrap(np.angle(w))
                step = float(np.max(np.abs(np.diff(phi)))) if m > 1 else 0.0
                if step <= _STEP_GOAL:
                    break
                if m >= max_samples:
                    if step > _STEP_FAIL:
                        raise ContourError(
                            "branch tracking failed: argument jump "
                            f"{step:.3f} rad persists at {m} samples"
                        )
                    break
                m = 2 * m - 1
            if prev_end is not None:
                # same geometric point as the previous segment end: continue
                # that branch instead of restarting from the principal value
                offset = 2 * np.pi * np.round((prev_end - phi[0]) / (2 * np.pi))
            phi = phi + offset
            prev_end = float(phi[-1])
            t_all.append(i + u)
            phi_all.append(phi)
        self._t = np.concatenate(t_all)
        self._phi = np.concatenate(phi_all)

    @property
    def start_argument(self) -> float:
        return float(self._phi[0])

    @property
    def final_argument(self) -> float:
        return float(self._phi[-1])

    def argument_at(self, t):
        return np.interp(np.asarray(t, dtype=float), self._t, self._phi)

    def __call__(self, z, t):
        w = np.asarray(self.base(z), dtype=complex)
        if np.any(np.abs(w) < 1e-300):
            raise ContourError("base function vanishes at an evaluation point")
        ref = self.argument_at(t)
        principal = np.angle(w)
        arg = principal + 2 * np.pi * np.round((ref - principal) / (2 * np.pi))
        out = np.exp(self.exponent * (np.log(np.abs(w)) + 1j * arg))
        return complex(out) if out.ndim == 0 else out

    def value_at(self, z: complex) -> complex:
        t = self.contour.locate(z)
        return complex(self(np.asarray([z]), np.asarray([t]))[0])


def tracked_power_integrand(base, exponent: float, contour: Contour, **kwargs) -> TrackedPower:
    return TrackedPower(base, exponent, contour, **kwargs)


@dataclass(frozen=True)
class DeformationCheck:
    passed: bool
    spread: float
    deltas: tuple[float, ...]
    values: tuple[complex, ...]


def deformation_check(f, a: float, b: float, singularities, *, deltas=None,
                      tol: float = 1e-9, quad_tol: float = 1e-10,
                      factory: bool = False) -> DeformationCheck:
    """Integrate along detours of several radii and compare.

    Consistency across radii is necessary for the integrand to be a branch of
    an analytic function between the contours; a non-analytic integrand such
    as 1/conj(z) produces a radius-dependent answer and fails the check.
    ``factory=True`` means f maps a contour to its integrand (needed when the
    integrand carries contour-bound branch tracking).
    """
    if deltas is None:
        base = build_contour(a, b, singularities)
        arcs = [s.radius for s in base.segments if isinstance(s, Arc)]
        d0 = min(arcs)
        deltas = (d0, d0 / 2.0, d0 / 4.0)
    values = []
    for d in deltas:
        c = build_contour(a, b, singularities, delta=d)
        integrand = f(c) if factory else f
        values.append(integrate_path(integrand, c, tol=quad_tol).value)
    spread = max(
        abs(v - w) for i, v in enumerate(values) for w in values[i + 1:]
    ) if len(values) > 1 else 0.0
    return DeformationCheck(spread <= tol, float(spread), tuple(float(d) for d in deltas), tuple(values))
