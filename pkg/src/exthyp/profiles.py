"""Classification of boundary-touching volume growth.

For a domain touching the light cone at a single point, the volume of the
part above height tau either converges as tau -> 0 or diverges at one of the
characteristic speeds: a power of 1/tau, log(1/tau), or log(log(1/tau)).
This module measures which, from the increments of the truncated volume over
a dyadic cutoff ladder.

The classifier works on the increments D_j = V(tau_{j+1}, tau_j) rather than
the truncated volumes themselves, because the increment of each model has a
clean signature: a power law gives log D_j linear in log tau_j, a log gives
constant increments (the power law with exponent zero), and an iterated log
gives increments decaying like 1 / log(1/tau_j).  Models are fitted over the
deepest rung window and compared by relative residual; a winner must beat
the runner-up by a factor of two or the result is flagged ambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .domains import Cone3D, HolderGraph2D, HolderGraph3D
from .engine import _cone_slice, _graph3_transverse
from .errors import DomainError
from .quadrature import integrate_interval

_LOG2 = float(np.log(2.0))
# |fitted log-log slope| below this reads as exponent zero
_FLAT_SLOPE = 0.02
_WIN_FACTOR = 2.0
_MIN_CUTOFF = 1e-12


class ProfileClass(Enum):
    CONVERGENT = "convergent"
    POWER = "power"
    LOG = "log"
    LOG_LOG = "log-log"


@dataclass(frozen=True)
class DivergenceProfile:
    """Fitted growth of the truncated volume V(tau) as tau -> 0.

    ``amplitude`` multiplies the class's canonical comparison function:
    tau^exponent for the remaining tail of a convergent profile,
    tau^(-exponent) for a power divergence, log(1/tau) and log(log(1/tau))
    for the slow classes (``exponent`` is None there).  ``residuals`` maps
    each candidate model to its relative RMS misfit on the window.
    """

    classification: ProfileClass
    exponent: float | None
    amplitude: float
    ambiguous: bool
    cutoffs: tuple[float, ...]
    increments: tuple[float, ...]
    residuals: dict[str, float]
    window: int
    evaluations: int = 0

    @property
    def diverges(self) -> bool:
        return self.classification is not ProfileClass.CONVERGENT

    @property
    def values(self) -> tuple[float, ...]:
        """Truncated integrals I(tau_j) down from the top rung (I = 0 there),
        monotone nondecreasing since the integrand is positive."""
        out = [0.0]
        for d in self.increments:
            out.append(out[-1] + d)
        return tuple(out)

    @property
    def fit_residual(self) -> float:
        key = "log-log" if self.classification is ProfileClass.LOG_LOG else "power"
        return self.residuals[key]

    def fitted_values(self) -> tuple[float, ...]:
        """Winning model's prediction of I(tau) on the ladder, with the
        integration constant calibrated on the fit window."""
        taus = np.asarray(self.cutoffs)
        vals = np.asarray(self.values)
        sl = slice(len(taus) - 1 - self.window, len(taus) - 1)
        if self.classification is ProfileClass.POWER:
            shape = self.amplitude * taus ** -self.exponent
        elif self.classification is ProfileClass.CONVERGENT:
            shape = -self.amplitude * taus**self.exponent
        elif self.classification is ProfileClass.LOG:
            shape = self.amplitude * np.log(1.0 / taus)
        else:
            shape = self.amplitude * np.log(np.log(1.0 / taus))
        offset = float(np.mean(vals[sl] - shape[sl]))
        return tuple(float(v) for v in shape + offset)


def log_reduced_integrand(x):
    """The slow-divergence model integrand 1 / (x log(1/x)), whose truncated
    integral has the antiderivative -log(log(1/x)) and grows like
    log(log(1/tau))."""
    x = np.asarray(x, dtype=float)
    return 1.0 / (x * np.log(1.0 / x))


def _profile_integrand(domain):
    """Real positive slice profile of the exact density near the touching
    point.  The density's constant phase on the positive side is dropped;
    only the magnitude matters for growth classification."""
    if isinstance(domain, HolderGraph2D):
        def f(x: np.ndarray) -> np.ndarray:
            x = np.asarray(x, dtype=float)
            g = np.asarray(domain.graph(x), dtype=float)
            return np.power(x, -1.5) * np.arcsinh(g / (1.0 - x)) / 2.0

        return f
    if isinstance(domain, HolderGraph3D):
        def f(x: np.ndarray) -> np.ndarray:
            x = np.asarray(x, dtype=float)
            values, _e, _v, conv = _graph3_transverse(domain, x, 1e-12)
            if not conv:
                raise DomainError("transverse integral did not converge")
            return values.real / (2.0 * x * x)

        return f
    if isinstance(domain, Cone3D):
        def f(x: np.ndarray) -> np.ndarray:
            return _cone_slice(domain, np.asarray(x, dtype=float)).real

        return f
    raise DomainError(
        f"no touching-point profile for {type(domain).__name__}"
    )


def profile_increments(f, delta: float, *, levels: int = 38, tol: float = 1e-10):
    """Increments of int f over the dyadic ladder tau_j = delta * 2^-j.

    Returns ``(cutoffs, increments, evaluations)`` with ``cutoffs[j]``
    = delta * 2^-j for j = 0..levels and increments[j] the integral over
    [cutoffs[j+1], cutoffs[j]].  Each increment is integrated twice: a coarse
    pass to learn its scale, then a pass at ``tol`` relative to that scale.
    """
    if not 0.0 < delta:
        raise ValueError("delta must be positive")
    if levels < 3:
        raise ValueError("need at least three ladder levels")
    cutoffs = [delta * 0.5**j for j in range(levels + 1)]
    if cutoffs[-1] <= _MIN_CUTOFF:
        raise ValueError(
            f"deepest cutoff {cutoffs[-1]:.3g} below {_MIN_CUTOFF:.0e}; "
            "fewer levels or a larger delta"
        )
    increments = []
    evaluations = 0
    for j in range(levels):
        a, b = cutoffs[j + 1], cutoffs[j]
        coarse = integrate_interval(f, a, b, tol=1.0)
        scale = max(abs(coarse.value), np.finfo(float).tiny)
        fine = integrate_interval(f, a, b, tol=tol * scale)
        evaluations += coarse.evaluations + fine.evaluations
        val = fine.value.real
        if val <= 0.0:
            raise DomainError(
                "profile increments must be positive; the slice magnitude "
                f"integrated to {val:.3g} on [{a:.3g}, {b:.3g}]"
            )
        increments.append(val)
    return tuple(cutoffs), tuple(increments), evaluations


def _rel_rms(data: np.ndarray, model: np.ndarray) -> float:
    return float(np.sqrt(np.mean(((data - model) / data) ** 2)))


def classify_increments(cutoffs, increments, *, window: int = 8) -> DivergenceProfile:
    """Fit growth models to ladder increments and pick the best.

    ``cutoffs`` has one more entry than ``increments``; both ordered from the
    shallowest rung down, as produced by ``profile_increments``.
    """
    cutoffs = tuple(float(c) for c in cutoffs)
    increments = tuple(float(d) for d in increments)
    if len(cutoffs) != len(increments) + 1:
        raise ValueError("need exactly one more cutoff than increments")
    if window < 4:
        raise ValueError("window too small to compare models")
    if len(increments) < window:
        raise ValueError(f"need at least {window} increments")
    if any(d <= 0.0 for d in increments):
        raise ValueError("increments must be positive")
    ratios = np.asarray(cutoffs[1:]) / np.asarray(cutoffs[:-1])
    if not np.allclose(ratios, 0.5, rtol=1e-9):
        raise ValueError("cutoff ladder must halve at every rung")

    taus = np.asarray(cutoffs[:-1][-window:])
    lower = np.asarray(cutoffs[1:][-window:])
    deltas = np.asarray(increments[-window:])

    # free-exponent power model, log-space least squares; a log divergence
    # is this model's exponent-zero case
    lt, ld = np.log(taus), np.log(deltas)
    slope, intercept = np.polyfit(lt, ld, 1)
    power_pred = np.exp(intercept + slope * lt)
    r_power = _rel_rms(deltas, power_pred)

    # iterated-log model: increments proportional to the exact increments of
    # log(log(1/tau)) on the same rungs
    g = np.log(np.log(1.0 / lower)) - np.log(np.log(1.0 / taus))
    c_ll = float(np.dot(deltas, g) / np.dot(g, g))
    r_ll = _rel_rms(deltas, c_ll * g)

    residuals = {"power": r_power, "log-log": r_ll}
    ambiguous = not (
        min(r_power, r_ll) * _WIN_FACTOR <= max(r_power, r_ll)
    )

    if r_ll < r_power:
        return DivergenceProfile(
            ProfileClass.LOG_LOG, None, c_ll, ambiguous,
            cutoffs, increments, residuals, window,
        )

    c_inc = float(np.exp(intercept))
    p = float(slope)
    if abs(p) < _FLAT_SLOPE:
        return DivergenceProfile(
            ProfileClass.LOG, None, c_inc / _LOG2, ambiguous,
            cutoffs, increments, residuals, window,
        )
    if p > 0.0:
        # increments shrink: what remains below tau is c tau^p / (1 - 2^-p)
        amp = c_inc / (1.0 - 0.5**p)
        return DivergenceProfile(
            ProfileClass.CONVERGENT, p, amp, ambiguous,
            cutoffs, increments, residuals, window,
        )
    s = -p
    amp = c_inc / (2.0**s - 1.0)
    return DivergenceProfile(
        ProfileClass.POWER, s, amp, ambiguous,
        cutoffs, increments, residuals, window,
    )


def divergence_profile(domain, *, levels: int = 38, window: int = 8,
                       tol: float = 1e-10) -> DivergenceProfile:
    """Measure how the volume of a touching domain grows toward the boundary
    contact point and classify the growth."""
    if getattr(domain, "crosses", False):
        raise DomainError(
            "domain crosses the light cone; growth profiles describe "
            "boundary-touching domains"
        )
    f = _profile_integrand(domain)
    cutoffs, increments, evaluations = profile_increments(
        f, domain.delta, levels=levels, tol=tol
    )
    fitted = classify_increments(cutoffs, increments, window=window)
    return DivergenceProfile(
        fitted.classification, fitted.exponent, fitted.amplitude,
        fitted.ambiguous, fitted.cutoffs, fitted.increments,
        fitted.residuals, fitted.window, evaluations,
    )
