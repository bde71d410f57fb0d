"""Charts, points and isometries for the projectivized Minkowski models.

Three charts are used throughout:

* ``AMBIENT``: homogeneous coordinates (x0, ..., xn) carrying the quadratic
  form -x0^2 + x1^2 + ... + xn^2.
* ``KLEIN``: the affine chart x0 = 1.  The open unit ball is the hyperbolic
  part, the exterior is the Lorentz part, the unit sphere is the light cone.
* ``FLATTENED``: the image of the Klein chart under the inversion about e_n
  (center e_n, radius sqrt(2)).  The light cone becomes the hyperplane
  x_n = 0 with the hyperbolic part below it.

Only dimensions n = 2 and n = 3 are supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError, GeometryError, SingularEvaluationError

LORENTZ_TOL = 1e-12
PROJECTIVE_TOL = 1e-12
CLASSIFY_TOL = 1e-12
# inversion center exclusion radius: the chart change is singular at e_n
E_N_EXCLUSION = 1e-9

SUPPORTED_DIMS = (2, 3)


class Model(Enum):
    AMBIENT = "ambient"
    KLEIN = "klein"
    FLATTENED = "flattened"


class Region(Enum):
    HYPERBOLIC = "hyperbolic"
    LIGHT_CONE = "light_cone"
    LORENTZ = "lorentz"


def _check_dim(n: int) -> None:
    if n not in SUPPORTED_DIMS:
        raise DimensionError(f"dimension must be one of {SUPPORTED_DIMS}, got {n}")


@dataclass(frozen=True)
class ModelPoint:
    """A point in one of the charts; ``coords`` has length n (n+1 for AMBIENT)."""

    coords: tuple[float, ...]
    model: Model

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        _check_dim(self.dim)

    @property
    def dim(self) -> int:
        k = len(self.coords)
        return k - 1 if self.model is Model.AMBIENT else k

    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


def minkowski_inner(u, v) -> np.ndarray | float:
    """Bilinear form -u0*v0 + u1*v1 + ... on ambient coordinate arrays."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != v.shape[-1]:
        raise DimensionError("operands must have the same ambient dimension")
    prod = u * v
    out = np.sum(prod[..., 1:], axis=-1) - prod[..., 0]
    return float(out) if out.ndim == 0 else out


def cayley_coords(x) -> np.ndarray:
    """Inversion about e_n, exchanging the Klein and flattened charts.

    Acts on chart coordinate arrays of shape (..., n).  An involution; raises
    within ``E_N_EXCLUSION`` of the center e_n, where the map blows up.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    _check_dim(n)
    shifted_last = x[..., -1] - 1.0
    alpha = np.sum(x[..., :-1] ** 2, axis=-1) + shifted_last**2
    if np.any(alpha < E_N_EXCLUSION**2):
        raise SingularEvaluationError(
            "chart change is singular at e_n (inversion center)"
        )
    y = np.empty_like(x)
    y[..., :-1] = 2.0 * x[..., :-1] / alpha[..., None]
    y[..., -1] = 2.0 * shifted_last / alpha + 1.0
    return y


def cayley_jacobian_factor(x) -> np.ndarray | float:
    """|det D(cayley)| = (2 / |x - e_n|^2)^n, the volume distortion factor."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    _check_dim(n)
    shifted_last = x[..., -1] - 1.0
    alpha = np.sum(x[..., :-1] ** 2, axis=-1) + shifted_last**2
    if np.any(alpha < E_N_EXCLUSION**2):
        raise SingularEvaluationError(
            "chart change is singular at e_n (inversion center)"
        )
    out = (2.0 / alpha) ** n
    return float(out) if out.ndim == 0 else out


def cayley(point: ModelPoint) -> ModelPoint:
    """Chart change on points; KLEIN <-> FLATTENED."""
    if point.model is Model.AMBIENT:
        raise GeometryError("chart change acts on KLEIN or FLATTENED points")
    target = Model.FLATTENED if point.model is Model.KLEIN else Model.KLEIN
    y = cayley_coords(point.array())
    return ModelPoint(tuple(y), target)


def classify(point: ModelPoint) -> Region:
    """Which side of the light cone a point lies on."""
    x = point.array()
    if point.model is Model.KLEIN:
        gap = float(np.sum(x**2)) - 1.0
    elif point.model is Model.FLATTENED:
        gap = float(x[-1])
    else:
        q = float(minkowski_inner(x, x))
        gap = q / max(1.0, float(np.sum(x**2)))
    if abs(gap) <= CLASSIFY_TOL:
        return Region.LIGHT_CONE
    return Region.HYPERBOLIC if gap < 0 else Region.LORENTZ


def axis_coordinate_map(r):
    """Moebius normalization r -> (r - 1) / (r + 1) of a radial coordinate.

    Sends the light-cone radius 1 to 0, the origin to -1 and infinity to 1;
    strictly increasing on r >= 0.
    """
    r = np.asarray(r, dtype=float)
    out = (r - 1.0) / (r + 1.0)
    return float(out) if out.ndim == 0 else out


def axis_coordinate_inverse(u):
    u = np.asarray(u, dtype=float)
    if np.any(u >= 1.0) or np.any(u < -1.0):
        raise GeometryError("normalized radial coordinate must lie in [-1, 1)")
    out = (1.0 + u) / (1.0 - u)
    return float(out) if out.ndim == 0 else out


class IsometryKind(Enum):
    LORENTZ = "lorentz"
    REFLECTION = "reflection"


@dataclass(frozen=True, eq=False)
class Isometry:
    """A light-cone-preserving map.

    LORENTZ: an (n+1) x (n+1) matrix A with A^T J A = J acting projectively.
    REFLECTION: an n x n diagonal sign matrix flipping chart axes other than
    the last one; such maps commute with the chart change because they are
    orthogonal and fix e_n, so they act by the same formula in both charts.
    """

    matrix: np.ndarray
    kind: IsometryKind
    n: int

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        _check_dim(self.n)
        if self.kind is IsometryKind.LORENTZ:
            if m.shape != (self.n + 1, self.n + 1):
                raise GeometryError(
                    f"Lorentz matrix must be {(self.n + 1, self.n + 1)}, got {m.shape}"
                )
            j = np.diag([-1.0] + [1.0] * self.n)
            defect = np.max(np.abs(m.T @ j @ m - j))
            if defect > LORENTZ_TOL:
                raise GeometryError(
                    f"matrix violates A^T J A = J by {defect:.3e} (tol {LORENTZ_TOL})"
                )
        else:
            if m.shape != (self.n, self.n):
                raise GeometryError(
                    f"reflection matrix must be {(self.n, self.n)}, got {m.shape}"
                )
            diag = np.diag(m)
            if np.any(m != np.diag(diag)) or not np.all(np.isin(diag, (-1.0, 1.0))):
                raise GeometryError("reflection must be a diagonal sign matrix")
            if diag[-1] != 1.0:
                raise GeometryError("reflections must fix the last chart axis")


def lorentz_isometry(matrix) -> Isometry:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise GeometryError("isometry matrix must be square")
    return Isometry(m, IsometryKind.LORENTZ, m.shape[0] - 1)


def reflection_isometry(axis: int, n: int) -> Isometry:
    """Reflection x_axis -> -x_axis (0-based; the last axis is not allowed)."""
    _check_dim(n)
    if not 0 <= axis < n - 1:
        raise GeometryError(f"reflection axis must be in [0, {n - 2}], got {axis}")
    m = np.eye(n)
    m[axis, axis] = -1.0
    return Isometry(m, IsometryKind.REFLECTION, n)


def boost(t: float, n: int, axis: int = 0) -> Isometry:
    """Hyperbolic rotation of rapidity t in the (x0, x_{axis+1}) ambient plane."""
    _check_dim(n)
    if not 0 <= axis < n:
        raise GeometryError(f"boost axis must be in [0, {n - 1}], got {axis}")
    m = np.eye(n + 1)
    c, s = np.cosh(t), np.sinh(t)
    i = axis + 1
    m[0, 0] = c
    m[0, i] = s
    m[i, 0] = s
    m[i, i] = c
    return Isometry(m, IsometryKind.LORENTZ, n)


def rotation(angle: float, n: int, plane: tuple[int, int] = (0, 1)) -> Isometry:
    """Euclidean rotation in a spatial coordinate plane (0-based chart axes)."""
    _check_dim(n)
    i, j = plane
    if not (0 <= i < n and 0 <= j < n and i != j):
        raise GeometryError(f"rotation plane {plane} invalid for dimension {n}")
    m = np.eye(n + 1)
    c, s = np.cos(angle), np.sin(angle)
    a, b = i + 1, j + 1
    m[a, a] = c
    m[a, b] = -s
    m[b, a] = s
    m[b, b] = c
    return Isometry(m, IsometryKind.LORENTZ, n)


def _projective_action(matrix: np.ndarray, x: np.ndarray) -> np.ndarray:
    lift = np.concatenate([np.ones(x.shape[:-1] + (1,)), x], axis=-1)
    w = lift @ matrix.T
    w0 = w[..., 0]
    if np.any(np.abs(w0) < PROJECTIVE_TOL):
        raise GeometryError("image lies at projective infinity")
    return w[..., 1:] / w0[..., None]


def apply_isometry_coords(iso: Isometry, x, model: Model) -> np.ndarray:
    """Apply an isometry to coordinate arrays of shape (..., n) in a chart."""
    x = np.asarray(x, dtype=float)
    if iso.kind is IsometryKind.REFLECTION:
        if model is Model.AMBIENT:
            block = np.eye(iso.n + 1)
            block[1:, 1:] = iso.matrix
            return x @ block.T
        return x @ iso.matrix.T
    if model is Model.AMBIENT:
        return x @ iso.matrix.T
    if model is Model.KLEIN:
        return _projective_action(iso.matrix, x)
    # flattened chart: conjugate the projective action by the chart change
    return cayley_coords(_projective_action(iso.matrix, cayley_coords(x)))


def apply_isometry(iso: Isometry, point: ModelPoint) -> ModelPoint:
    expected = point.dim
    if iso.n != expected:
        raise DimensionError(
            f"isometry dimension {iso.n} does not match point dimension {expected}"
        )
    y = apply_isometry_coords(iso, point.array(), point.model)
    return ModelPoint(tuple(y), point.model)
