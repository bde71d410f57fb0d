"""Limits of regularized families along geometric parameter schedules.

Two accelerators, matched to how the data behaves:

* ``eps_limit``: Richardson extrapolation.  The regularized integrals here
  admit expansions in integer powers of the parameter, which a geometric
  schedule with fixed ratio annihilates column by column.  Exact (up to
  rounding) for polynomial data of degree <= order.
* ``truncation_limit``: iterated Aitken.  Cutoff integrals of endpoint-power
  integrands converge like tau^s with s unknown; Aitken eliminates a
  geometric mode of unknown ratio per round.

Both accept samplers returning either plain complex values or
``QuadratureResult`` (inner quadrature noise then feeds the error estimate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import QuadratureResult

_RATIO_TOL = 1e-9


@dataclass(frozen=True)
class EpsSchedule:
    """Strictly decreasing geometric parameter values plus a table depth."""

    values: tuple[float, ...]
    order: int = 4

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.order < 1:
            raise ValueError("extrapolation order must be at least 1")
        if len(vals) < self.order + 2:
            raise ValueError(
                f"need at least order + 2 = {self.order + 2} values, got {len(vals)}"
            )
        if any(v <= 0 for v in vals):
            raise ValueError("schedule values must be positive")
        ratio = vals[1] / vals[0]
        if not 0 < ratio < 1:
            raise ValueError("schedule must be strictly decreasing")
        for a, b in zip(vals, vals[1:]):
            if abs(b / a - ratio) > _RATIO_TOL * ratio:
                raise ValueError("schedule must be geometric with a fixed ratio")

    @property
    def ratio(self) -> float:
        return self.values[1] / self.values[0]

    @classmethod
    def geometric(cls, start: float = 0.1, ratio: float = 0.5, count: int = 13,
                  order: int = 4) -> "EpsSchedule":
        if not 0 < ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        values = tuple(start * ratio**k for k in range(count))
        return cls(values, order)


def _collect(sample, params):
    values = []
    evaluations = 0
    noise = 0.0
    inner_converged = True
    for p in params:
        out = sample(p)
        if isinstance(out, QuadratureResult):
            values.append(out.value)
            evaluations += out.evaluations
            noise = max(noise, out.error_estimate)
            inner_converged = inner_converged and out.converged
        else:
            values.append(complex(out))
            evaluations += 1
    return np.asarray(values, dtype=complex), evaluations, noise, inner_converged


def _diverging(values: np.ndarray, window: int) -> bool:
    """True when both the values and their increments keep growing."""
    if len(values) < window + 1:
        return False
    mags = np.abs(values[-(window + 1):])
    diffs = np.abs(np.diff(values))[-window:]
    return bool(np.all(np.diff(mags) > 0) and np.all(np.diff(diffs) >= 0))


def richardson_table(values, ratio: float, order: int) -> list[np.ndarray]:
    """Triangular elimination of powers ratio^j; column j has len(values) - j
    entries.  Column 0 is the input."""
    cols = [np.asarray(values, dtype=complex)]
    for j in range(1, order + 1):
        r = ratio**j
        prev = cols[-1]
        cols.append((prev[1:] - r * prev[:-1]) / (1.0 - r))
    return cols


def eps_limit(sample, schedule: EpsSchedule | None = None, *,
              divergence_window: int = 3) -> QuadratureResult:
    """Extrapolate sample(eps) to eps -> 0 along the schedule."""
    if schedule is None:
        schedule = EpsSchedule.geometric()
    values, evaluations, noise, inner_ok = _collect(sample, schedule.values)
    cols = richardson_table(values, schedule.ratio, schedule.order)
    final = cols[-1]
    limit = complex(final[-1])
    extrap_err = abs(final[-1] - final[-2]) + abs(final[-1] - cols[-2][-1])
    # worst-case noise amplification across the table
    amp = 1.0
    for j in range(1, schedule.order + 1):
        r = schedule.ratio**j
        amp *= (1.0 + r) / (1.0 - r)
    suspected = _diverging(values, divergence_window)
    return QuadratureResult(
        limit,
        float(extrap_err + amp * noise),
        evaluations,
        converged=inner_ok and not suspected,
        divergence_suspected=suspected,
    )


def _aitken_pass(seq: np.ndarray) -> np.ndarray:
    d2 = seq[2:] - 2.0 * seq[1:-1] + seq[:-2]
    scale = np.maximum(np.abs(seq[2:]), 1.0)
    out = seq[2:].copy()
    # a vanishing second difference means the tail already settled; keep it
    safe = np.abs(d2) > 1e3 * np.finfo(float).eps * scale
    out[safe] = seq[2:][safe] - (seq[2:] - seq[1:-1])[safe] ** 2 / d2[safe]
    return out


def truncation_limit(sample, cutoffs, *, rounds: int = 3,
                     divergence_window: int = 3) -> QuadratureResult:
    """Extrapolate sample(tau) to tau -> 0 over geometric cutoffs.

    Each Aitken round removes one geometric error mode of unknown ratio, so
    endpoint tails c tau^s converge without knowing s.  Divergent inputs are
    flagged, not silently extrapolated.
    """
    cutoffs = tuple(float(t) for t in cutoffs)
    if len(cutoffs) < 2 * rounds + 2:
        raise ValueError(
            f"need at least {2 * rounds + 2} cutoffs for {rounds} rounds"
        )
    ratio = cutoffs[1] / cutoffs[0]
    if not 0 < ratio < 1:
        raise ValueError("cutoffs must decrease strictly")
    for a, b in zip(cutoffs, cutoffs[1:]):
        if abs(b / a - ratio) > _RATIO_TOL * ratio:
            raise ValueError("cutoffs must be geometric with a fixed ratio")
    values, evaluations, noise, inner_ok = _collect(sample, cutoffs)
    suspected = _diverging(values, divergence_window)
    seq = values
    prev_tail = complex(values[-1])
    for _ in range(rounds):
        if len(seq) < 3:
            break
        prev_tail = complex(seq[-1])
        seq = _aitken_pass(seq)
    limit = complex(seq[-1])
    extrap_err = abs(seq[-1] - seq[-2]) if len(seq) > 1 else abs(limit - prev_tail)
    extrap_err = max(extrap_err, abs(limit - prev_tail) * 1e-3)
    return QuadratureResult(
        limit,
        float(extrap_err + 10.0 * noise),
        evaluations,
        converged=inner_ok and not suspected,
        divergence_suspected=suspected,
    )
