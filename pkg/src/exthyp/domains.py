"""Integration domains, their validation and slice geometry.

Klein-chart families (``Sector2D``, ``Polygon2D``, ``Ball3D``) reduce to a
radial integral through an angular measure: the (solid) angle of directions
whose ray meets the domain beyond radius r.  Flattened-chart families
(``Box3D``, ``Wedge3D``, ``Cone3D``, the graph domains) reduce to an integral
over the last coordinate, with the transverse integral in closed or
half-closed form.

Every crossing family also provides a "locked" slice function: the analytic
continuation of the real slice formula valid in a disk around the crossing
point (r = 1, or x_n = 0), which is what contour detours evaluate.
Breakpoints are the radii where the real slice formula switches branches;
transversality validation keeps them away from the crossing point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geometry import Model

TRANSVERSAL_MARGIN = 1e-6
_RADIAL_EDGE_TOL = 1e-12


def _as_range(pair, name: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in pair)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a pair of numbers") from exc
    if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
        raise DomainError(f"{name} must be a finite increasing pair, got {pair}")
    return a, b


# ---------------------------------------------------------------------------
# Klein-chart families


@dataclass(frozen=True)
class Sector2D:
    """Circular sector of opening ``theta`` and radius ``radius`` at the
    origin of the Klein chart (n = 2)."""

    theta: float
    radius: float

    n: int = field(default=2, init=False, repr=False)
    model: Model = field(default=Model.KLEIN, init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.theta <= 2.0 * np.pi:
            raise DomainError(f"opening angle must lie in (0, 2*pi], got {self.theta}")
        if self.radius <= 0.0:
            raise DomainError("sector radius must be positive")
        if abs(self.radius - 1.0) < TRANSVERSAL_MARGIN:
            raise DomainError(
                "sector rim sits on the light cone; move radius away from 1"
            )

    @property
    def crosses(self) -> bool:
        return self.radius > 1.0

    def slice_range(self) -> tuple[float, float]:
        return 0.0, self.radius

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def angular_measure(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(r <= self.radius, self.theta, 0.0)
        return float(out) if out.ndim == 0 else out

    def angular_measure_locked(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, complex(self.theta))
        return complex(out) if out.ndim == 0 else out

    def analyticity_window(self) -> float:
        return min(abs(self.radius - 1.0), 1.0)


def _edge_records(vertices: np.ndarray):
    """Per-edge angular data: (sign, foot distance, psi1, psi2, |a|, |b|).

    Edges collinear with the origin subtend no angle and are skipped.
    """
    records = []
    m = len(vertices)
    scale = float(np.max(np.abs(vertices))) or 1.0
    for i in range(m):
        a = vertices[i]
        b = vertices[(i + 1) % m]
        t_dir = b - a
        length = float(np.hypot(*t_dir))
        if length < 1e-12 * scale:
            raise DomainError(f"repeated or coincident vertices near index {i}")
        normal = np.array([t_dir[1], -t_dir[0]]) / length
        d_signed = float(a @ normal)
        if abs(d_signed) < _RADIAL_EDGE_TOL * scale:
            continue
        if d_signed < 0:
            normal = -normal
        d = abs(d_signed)
        tangent = np.array([-normal[1], normal[0]])
        t_a, t_b = float(a @ tangent), float(b @ tangent)
        psi_a, psi_b = np.arctan2(t_a, d), np.arctan2(t_b, d)
        sign = 1.0 if t_b > t_a else -1.0
        records.append(
            (sign, d, min(psi_a, psi_b), max(psi_a, psi_b),
             float(np.hypot(*a)), float(np.hypot(*b)))
        )
    return records


def _segments_properly_cross(p, q, r, s) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(p, q, r), orient(p, q, s)
    d3, d4 = orient(r, s, p), orient(r, s, q)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


@dataclass(frozen=True)
class Polygon2D:
    """Simple polygon in the Klein chart (n = 2), stored counterclockwise."""

    vertices: tuple[tuple[float, float], ...]

    n: int = field(default=2, init=False, repr=False)
    model: Model = field(default=Model.KLEIN, init=False, repr=False)

    def __post_init__(self) -> None:
        try:
            arr = np.asarray(
                [(float(x), float(y)) for x, y in self.vertices], dtype=float
            )
        except (TypeError, ValueError) as exc:
            raise DomainError("vertices must be pairs of numbers") from exc
        if len(arr) < 3:
            raise DomainError("polygon needs at least three vertices")
        if not np.all(np.isfinite(arr)):
            raise DomainError("vertices must be finite")
        area2 = float(
            np.sum(arr[:, 0] * np.roll(arr[:, 1], -1) - np.roll(arr[:, 0], -1) * arr[:, 1])
        )
        if abs(area2) < 1e-14:
            raise DomainError("polygon is degenerate (zero area)")
        if area2 < 0:
            arr = arr[::-1].copy()
        m = len(arr)
        for i in range(m):
            for j in range(i + 1, m):
                if j == i or (j + 1) % m == i or (i + 1) % m == j:
                    continue
                if _segments_properly_cross(arr[i], arr[(i + 1) % m], arr[j], arr[(j + 1) % m]):
                    raise DomainError("polygon edges intersect; must be simple")
        object.__setattr__(
            self, "vertices", tuple((float(x), float(y)) for x, y in arr)
        )
        object.__setattr__(self, "_edges", tuple(_edge_records(arr)))
        bps = self._raw_breakpoints()
        gap = min(abs(b - 1.0) for b in bps) if bps else 1.0
        if gap < TRANSVERSAL_MARGIN:
            # covers vertices on the cone and edges tangent to it; both break
            # the transversality the slice formulas rely on
            raise DomainError(
                "polygon boundary touches or grazes the light cone "
                f"(nearest breakpoint {gap:.2e} from radius 1)"
            )

    def _raw_breakpoints(self) -> tuple[float, ...]:
        pts: list[float] = []
        for sign, d, psi1, psi2, ra, rb in self._edges:
            pts.extend((ra, rb))
            if psi1 < 0.0 < psi2:
                pts.append(d)
        pts = sorted(p for p in pts if p > 1e-12)
        out: list[float] = []
        for p in pts:
            if not out or p - out[-1] > 1e-12:
                out.append(p)
        return tuple(out)

    def breakpoints(self) -> tuple[float, ...]:
        return self._raw_breakpoints()

    @property
    def max_radius(self) -> float:
        return max(float(np.hypot(*v)) for v in self.vertices)

    @property
    def crosses(self) -> bool:
        return bool(self.angular_measure(1.0) > 1e-12)

    def slice_range(self) -> tuple[float, float]:
        return 0.0, self.max_radius

    def angular_measure(self, r):
        """Angle measure of directions whose ray meets the polygon past r."""
        r = np.asarray(r, dtype=float)
        total = np.zeros(r.shape)
        for sign, d, psi1, psi2, _, _ in self._edges:
            full = psi2 - psi1
            with np.errstate(invalid="ignore"):
                beta = np.arccos(np.clip(d / np.maximum(r, 1e-300), -1.0, 1.0))
            overlap = np.clip(np.minimum(psi2, beta) - np.maximum(psi1, -beta), 0.0, None)
            overlap = np.where(r <= d, 0.0, overlap)
            total += sign * (full - overlap)
        out = np.clip(total, 0.0, None)
        return float(out) if out.ndim == 0 else out

    def _locked_terms(self, r0: float = 1.0):
        const = 0.0
        terms: list[tuple[float, float]] = []
        for sign, d, psi1, psi2, _, _ in self._edges:
            full = psi2 - psi1
            if r0 <= d:
                const += sign * full
                continue
            beta0 = float(np.arccos(d / r0))
            if min(psi2, beta0) - max(psi1, -beta0) <= 0.0:
                const += sign * full
                continue
            cst, coef = full, 0.0
            if beta0 < psi2:
                coef -= 1.0
            else:
                cst -= psi2
            if beta0 < -psi1:
                coef -= 1.0
            else:
                cst += psi1
            const += sign * cst
            if coef != 0.0:
                terms.append((sign * coef, d))
        return const, tuple(terms)

    def angular_measure_locked(self, z):
        """Analytic continuation of the slice measure near the crossing
        radius; valid while |z - 1| stays below ``analyticity_window``."""
        const, terms = self._locked_terms()
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, complex(const))
        for coef, d in terms:
            out = out + coef * np.arccos(d / z)
        return complex(out) if out.ndim == 0 else out

    def analyticity_window(self) -> float:
        bps = self._raw_breakpoints()
        gaps = [abs(b - 1.0) for b in bps] or [1.0]
        return min(min(gaps), 1.0)


@dataclass(frozen=True)
class Ball3D:
    """Euclidean ball in the Klein chart (n = 3)."""

    center: tuple[float, float, float]
    radius: float

    n: int = field(default=3, init=False, repr=False)
    model: Model = field(default=Model.KLEIN, init=False, repr=False)

    def __post_init__(self) -> None:
        try:
            c = tuple(float(v) for v in self.center)
        except (TypeError, ValueError) as exc:
            raise DomainError("center must be a triple of numbers") from exc
        if len(c) != 3 or not all(np.isfinite(c)):
            raise DomainError("center must be a finite triple")
        object.__setattr__(self, "center", c)
        if self.radius <= 0:
            raise DomainError("ball radius must be positive")
        for b in self.breakpoints():
            if abs(b - 1.0) < TRANSVERSAL_MARGIN:
                raise DomainError(
                    "ball boundary is tangent to the light cone; "
                    "move center or radius"
                )

    @property
    def center_distance(self) -> float:
        return float(np.hypot(np.hypot(self.center[0], self.center[1]), self.center[2]))

    def breakpoints(self) -> tuple[float, ...]:
        m = self.center_distance
        if m < 1e-12:
            return (self.radius,)
        return tuple(sorted({abs(m - self.radius), m + self.radius}))

    @property
    def crosses(self) -> bool:
        m = self.center_distance
        return abs(m - self.radius) < 1.0 < m + self.radius

    def slice_range(self) -> tuple[float, float]:
        m = self.center_distance
        return max(0.0, m - self.radius), m + self.radius

    def angular_measure(self, r):
        """Solid angle of directions meeting the ball at radius r."""
        m, R = self.center_distance, self.radius
        r = np.asarray(r, dtype=float)
        if m < 1e-12:
            out = np.where(r <= R, 4.0 * np.pi, 0.0)
            return float(out) if out.ndim == 0 else out
        out = np.zeros(r.shape)
        out = np.where(r <= R - m, 4.0 * np.pi, out)
        mid = (np.abs(m - R) < r) & (r < m + R)
        with np.errstate(divide="ignore", invalid="ignore"):
            cos_t = (m * m + r * r - R * R) / (2.0 * m * r)
        out = np.where(mid, 2.0 * np.pi * (1.0 - cos_t), out)
        return float(out) if out.ndim == 0 else out

    def angular_measure_locked(self, z):
        m, R = self.center_distance, self.radius
        if not self.crosses:
            raise DomainError("locked slice exists only for crossing balls")
        z = np.asarray(z, dtype=complex)
        out = 2.0 * np.pi * (1.0 - (m * m + z * z - R * R) / (2.0 * m * z))
        return complex(out) if out.ndim == 0 else out

    def analyticity_window(self) -> float:
        return min(abs(b - 1.0) for b in self.breakpoints())


# ---------------------------------------------------------------------------
# flattened-chart families


@dataclass(frozen=True)
class Box3D:
    """Product box B x [-delta, delta] in the flattened chart (n = 3)."""

    x1_range: tuple[float, float]
    x2_range: tuple[float, float]
    delta: float

    n: int = field(default=3, init=False, repr=False)
    model: Model = field(default=Model.FLATTENED, init=False, repr=False)
    crosses: bool = field(default=True, init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "x1_range", _as_range(self.x1_range, "x1_range"))
        object.__setattr__(self, "x2_range", _as_range(self.x2_range, "x2_range"))
        if not 0.0 < self.delta < 1.0:
            raise DomainError("slab half-height must lie in (0, 1)")

    def slice_range(self) -> tuple[float, float]:
        return -self.delta, self.delta

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def analyticity_window(self) -> float:
        # transverse factor is analytic in the slice coordinate until the
        # shifted distance x1^2 + (z-1)^2 can vanish, i.e. |z - 1| ~ 1
        return min(self.delta, 0.9)


@dataclass(frozen=True)
class Wedge3D:
    """Signed wedge between the graphs x2 = c(x1) and x2 = c(x1) + d(x1) x3.

    The slice integral runs x2 from c to c + d*x3, which reverses orientation
    for x3 < 0: the object is the difference of the upper and lower wedge
    volumes, the configuration whose regularized volume stays finite even
    though each half diverges.
    """

    x1_range: tuple[float, float]
    c_coeffs: tuple[float, ...]
    d_coeffs: tuple[float, ...]
    delta: float

    n: int = field(default=3, init=False, repr=False)
    model: Model = field(default=Model.FLATTENED, init=False, repr=False)
    crosses: bool = field(default=True, init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "x1_range", _as_range(self.x1_range, "x1_range"))
        for name in ("c_coeffs", "d_coeffs"):
            coeffs = tuple(float(c) for c in getattr(self, name))
            if not coeffs or len(coeffs) > 5:
                raise DomainError(f"{name} must have 1 to 5 entries (degree <= 4)")
            if not all(np.isfinite(coeffs)):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, coeffs)
        if not 0.0 < self.delta < 1.0:
            raise DomainError("slab half-height must lie in (0, 1)")

    def c(self, x1):
        return np.polynomial.polynomial.polyval(x1, self.c_coeffs)

    def d(self, x1):
        return np.polynomial.polynomial.polyval(x1, self.d_coeffs)

    def slice_range(self) -> tuple[float, float]:
        return -self.delta, self.delta

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def analyticity_window(self) -> float:
        return min(self.delta, 0.9)


@dataclass(frozen=True)
class Cone3D:
    """Solid cone rho <= x3 / k, 0 < x3 <= delta, touching the light cone
    at its apex only (n = 3).  The regularized volume is a convergent
    ordinary integral; no detour is needed or possible."""

    k: float
    delta: float

    n: int = field(default=3, init=False, repr=False)
    model: Model = field(default=Model.FLATTENED, init=False, repr=False)
    crosses: bool = field(default=False, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.k <= 0:
            raise DomainError("cone slope must be positive")
        if not 0.0 < self.delta < 1.0:
            raise DomainError("cone height must lie in (0, 1)")

    def slice_range(self) -> tuple[float, float]:
        return 0.0, self.delta

    def breakpoints(self) -> tuple[float, ...]:
        return ()


@dataclass(frozen=True)
class HolderGraph2D:
    """Region between the light cone x2 = 0 and the graph x1 = C * x2^beta,
    0 < x2 <= delta, in the flattened chart (n = 2)."""

    beta: float
    coefficient: float
    delta: float

    n: int = field(default=2, init=False, repr=False)
    model: Model = field(default=Model.FLATTENED, init=False, repr=False)
    crosses: bool = field(default=False, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise DomainError("graph exponent must be positive")
        if self.coefficient <= 0:
            raise DomainError("graph coefficient must be positive")
        if not 0.0 < self.delta < 1.0:
            raise DomainError("graph height must lie in (0, 1)")

    def graph(self, x2):
        return self.coefficient * np.asarray(x2, dtype=float) ** self.beta

    def slice_range(self) -> tuple[float, float]:
        return 0.0, self.delta

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    @property
    def convergence_exponent(self) -> float:
        """Tail exponent s of the slice integrand x2^{s - 1}: finite volume
        exactly when s > 0."""
        return self.beta - 0.5


@dataclass(frozen=True)
class HolderGraph3D:
    """Region 0 <= x2 <= g(x3) over x1 in a range, 0 < x3 <= delta (n = 3).

    g(x3) = C * x3^{1 + alpha}, or -x3 / log(x3) when ``log_profile`` is set
    (the borderline width whose volume diverges like log(log(1/tau))).
    """

    alpha: float
    coefficient: float
    x1_range: tuple[float, float]
    delta: float
    log_profile: bool = False

    n: int = field(default=3, init=False, repr=False)
    model: Model = field(default=Model.FLATTENED, init=False, repr=False)
    crosses: bool = field(default=False, init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "x1_range", _as_range(self.x1_range, "x1_range"))
        if not self.log_profile:
            if self.alpha <= -1.0:
                raise DomainError("width exponent must exceed -1")
            if self.coefficient <= 0:
                raise DomainError("width coefficient must be positive")
        if not 0.0 < self.delta < 1.0:
            raise DomainError("graph height must lie in (0, 1)")

    def graph(self, x3):
        x3 = np.asarray(x3, dtype=float)
        if self.log_profile:
            return -x3 / np.log(x3)
        return self.coefficient * x3 ** (1.0 + self.alpha)

    def slice_range(self) -> tuple[float, float]:
        return 0.0, self.delta

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    @property
    def convergence_exponent(self) -> float:
        if self.log_profile:
            return 0.0
        return self.alpha


# ---------------------------------------------------------------------------
# splitting helpers for additivity checks


def split_sector(sector: Sector2D, fraction: float = 0.5) -> tuple[Sector2D, Sector2D]:
    if not 0.0 < fraction < 1.0:
        raise DomainError("split fraction must lie in (0, 1)")
    t1 = sector.theta * fraction
    return (
        Sector2D(t1, sector.radius),
        Sector2D(sector.theta - t1, sector.radius),
    )


def split_box(box: Box3D, x1_cut: float) -> tuple[Box3D, Box3D]:
    a, b = box.x1_range
    if not a < x1_cut < b:
        raise DomainError("cut must lie inside the box range")
    return (
        Box3D((a, x1_cut), box.x2_range, box.delta),
        Box3D((x1_cut, b), box.x2_range, box.delta),
    )


def _clip_convex(vertices: np.ndarray, point: np.ndarray, normal: np.ndarray) -> list:
    """Sutherland-Hodgman clip of a convex polygon by normal.(x - point) >= 0."""
    out: list[np.ndarray] = []
    m = len(vertices)
    val = (vertices - point) @ normal
    for i in range(m):
        j = (i + 1) % m
        vi, vj = val[i], val[j]
        if vi >= 0:
            out.append(vertices[i])
        if (vi > 0 > vj) or (vi < 0 < vj):
            t = vi / (vi - vj)
            out.append(vertices[i] + t * (vertices[j] - vertices[i]))
    return out


def split_polygon(poly: Polygon2D, point, direction) -> tuple[Polygon2D, Polygon2D]:
    """Split a convex polygon by the line through ``point`` along
    ``direction``; both halves must be nondegenerate."""
    verts = np.asarray(poly.vertices, dtype=float)
    hull_sign = None
    m = len(verts)
    for i in range(m):
        a, b, c = verts[i], verts[(i + 1) % m], verts[(i + 2) % m]
        cr = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(cr) < 1e-14:
            continue
        if hull_sign is None:
            hull_sign = np.sign(cr)
        elif np.sign(cr) != hull_sign:
            raise DomainError("splitting is implemented for convex polygons only")
    point = np.asarray(point, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if np.hypot(*direction) < 1e-12:
        raise DomainError("split direction must be nonzero")
    normal = np.array([-direction[1], direction[0]]) / np.hypot(*direction)
    scale = float(np.max(np.abs(verts))) or 1.0

    def dedupe(pts: list) -> list:
        # a cut through a vertex emits that vertex twice
        out: list[np.ndarray] = []
        for p in pts:
            if not out or np.hypot(*(p - out[-1])) > 1e-9 * scale:
                out.append(p)
        if len(out) > 1 and np.hypot(*(out[0] - out[-1])) <= 1e-9 * scale:
            out.pop()
        return out

    left = dedupe(_clip_convex(verts, point, normal))
    right = dedupe(_clip_convex(verts, point, -normal))
    if len(left) < 3 or len(right) < 3:
        raise DomainError("split line misses the polygon interior")
    return Polygon2D(tuple(map(tuple, left))), Polygon2D(tuple(map(tuple, right)))
