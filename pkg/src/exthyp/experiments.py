"""Named experiments behind the CLI, each returning a structured Report.

Every experiment has a fixed parameter schema with defaults; unknown keys or
malformed values raise ConfigError so the CLI can exit with a usage error.
Numerical tolerances exposed here are agreement tolerances between pipelines
or against closed forms; internal quadrature targets are fixed constants two
to four orders tighter.
"""

from __future__ import annotations

import numpy as np

from . import __version__
from .contour import build_contour, deformation_check, integrate_path, tracked_power_integrand
from .densities import DensityVariant, density, lower_edge_power
from .domains import (
    Box3D,
    Cone3D,
    HolderGraph2D,
    HolderGraph3D,
    Polygon2D,
    Sector2D,
    Wedge3D,
    split_box,
    split_polygon,
    split_sector,
)
from .engine import (
    additivity_check,
    cone_reduced_volume,
    invariance_check,
    mu_contour,
    mu_direct,
    mu_eps,
)
from .errors import ConfigError
from .geometry import ModelPoint, boost, reflection_isometry, rotation
from .profiles import (
    ProfileClass,
    classify_increments,
    divergence_profile,
    log_reduced_integrand,
    profile_increments,
)
from .quadrature import integrate_interval
from .reports import Report, checked_row, flag_row, info_row, window_row

# the crossing triangle, its median split point, and the slab box used by the
# invariance and additivity experiments; vertices clear the unit circle and
# all radial breakpoints by a safe margin
TRIANGLE = ((-0.55, -0.25), (1.45, 0.15), (0.25, 1.35))
TRIANGLE_SPLIT_POINT = (0.45, -0.05)
TRIANGLE_SPLIT_DIRECTION = (-0.2, 1.4)
BOX = ((-0.4, 0.5), (-0.3, 0.6), 0.4)
WEDGE = ((0.0, 0.5), (0.25, 0.0, 0.125), (0.5, 0.25), 0.3)


def sector_closed_form(theta: float, radius: float) -> complex:
    """mu of a sector from the continued antiderivative of the radial form:
    theta * ((1 - R^2)^{-1/2} - 1) with the lower-edge branch past R = 1."""
    w = lower_edge_power((1.0 - radius) * (1.0 + radius), -0.5)
    return theta * (w - 1.0)


# ---------------------------------------------------------------------------
# parameter handling


def _float(v) -> float:
    try:
        out = float(v)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"expected a number, got {v!r}") from e
    if not np.isfinite(out):
        raise ConfigError(f"expected a finite number, got {v!r}")
    return out


def _pos_float(v) -> float:
    out = _float(v)
    if out <= 0.0:
        raise ConfigError(f"expected a positive number, got {v!r}")
    return out


def _float_list(v) -> tuple[float, ...]:
    if isinstance(v, (int, float)):
        return (_float(v),)
    try:
        items = list(v)
    except TypeError as e:
        raise ConfigError(f"expected a list of numbers, got {v!r}") from e
    if not items:
        raise ConfigError("expected a non-empty list of numbers")
    return tuple(_float(x) for x in items)


def _pair(v) -> tuple[float, float]:
    out = _float_list(v)
    if len(out) != 2:
        raise ConfigError(f"expected a pair of numbers, got {v!r}")
    return out


def _str(v) -> str:
    if not isinstance(v, str):
        raise ConfigError(f"expected a string, got {v!r}")
    return v


def resolve_parameters(tag: str, *sources: dict) -> dict:
    """Merge defaults with config-file and flag values (later wins; None
    means not provided) and validate against the experiment's schema."""
    if tag not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ConfigError(f"unknown experiment {tag!r}; known: {known}")
    schema = EXPERIMENTS[tag]["schema"]
    merged = {k: default for k, (default, _convert) in schema.items()}
    for source in sources:
        for key, value in source.items():
            if key not in schema:
                raise ConfigError(
                    f"unknown parameter {key!r} for experiment {tag!r}"
                )
            if value is None:
                continue
            try:
                merged[key] = schema[key][1](value)
            except ConfigError as e:
                raise ConfigError(f"parameter {key!r}: {e}") from None
    return merged


def _echo(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, tuple):
            out[k] = [float(x) for x in v]
        elif isinstance(v, float):
            out[k] = float(v)
        else:
            out[k] = v
    return out


# ---------------------------------------------------------------------------
# experiments


def run_equivalence(p: dict) -> Report:
    """Contour route against the regularized route, sector and box."""
    tol = p["tol"]
    sector = Sector2D(p["theta"], p["radius"])
    box = Box3D(p["box_x1"], p["box_x2"], p["box_delta"])
    rows = []
    series = {}
    evals = 0

    sc = mu_contour(sector, tol=1e-10)
    trace: dict[float, complex] = {}
    se = mu_eps(sector, trace=trace)
    evals += sc.evaluations + se.evaluations
    rows.append(info_row("sector_contour", sc.value))
    rows.append(info_row("sector_eps_limit", se.value))
    rows.append(checked_row(
        "sector_pipelines", se.value, sc.value, tol,
        "regularized limit vs detoured contour",
    ))
    rows.append(checked_row(
        "sector_closed_form", sc.value, sector_closed_form(p["theta"], p["radius"]),
        tol, "theta * ((1 - R^2)^(-1/2) - 1), continued",
    ))
    series["eps_trace"] = {
        "columns": ["eps", "re", "im"],
        "rows": [[e, trace[e].real, trace[e].imag]
                 for e in sorted(trace, reverse=True)],
    }

    bc = mu_contour(box, tol=1e-10)
    btrace: dict[float, complex] = {}
    be = mu_eps(box, trace=btrace)
    evals += bc.evaluations + be.evaluations
    rows.append(info_row("box_contour", bc.value))
    rows.append(info_row("box_eps_limit", be.value))
    rows.append(checked_row("box_pipelines", be.value, bc.value, tol))
    series["box_eps_trace"] = {
        "columns": ["eps", "re", "im"],
        "rows": [[e, btrace[e].real, btrace[e].imag]
                 for e in sorted(btrace, reverse=True)],
    }
    return Report("equivalence", __version__, _echo(p), tuple(rows), series, evals)


def run_variants(p: dict) -> Report:
    """The two flattened-chart regularizations must share a limit."""
    tol = p["tol"]
    box = Box3D(p["box_x1"], p["box_x2"], p["box_delta"])
    rows = []
    shifted = mu_eps(box, variant=DensityVariant.MU_EPS)
    pulled = mu_eps(box, variant=DensityVariant.FLATTENED_EPS)
    rows.append(info_row("box_shifted_pole", shifted.value))
    rows.append(info_row("box_pulled_back", pulled.value))
    rows.append(checked_row(
        "box_variants", pulled.value, shifted.value, tol,
        "pulled-back regularization vs shifted-pole regularization",
    ))
    w = Wedge3D(*WEDGE)
    wc = mu_contour(w, tol=1e-10)
    we = mu_eps(w, variant=DensityVariant.MU_EPS)
    rows.append(info_row("wedge_contour", wc.value))
    rows.append(info_row("wedge_shifted_pole", we.value))
    rows.append(checked_row("wedge_pipelines", we.value, wc.value, tol))
    evals = shifted.evaluations + pulled.evaluations + wc.evaluations + we.evaluations
    return Report("variants", __version__, _echo(p), tuple(rows), {}, evals)


def _threshold_rows(tag, grid, make_domain, expected, rows, series, tol_exp):
    evals = 0
    for value in grid:
        dom = make_domain(value)
        prof = divergence_profile(dom)
        evals += prof.evaluations
        name = f"{tag}={value:g}"
        want_class, want_exp = expected(value)
        detail = f"classified {prof.classification.value}"
        if prof.exponent is not None:
            detail += f", exponent {prof.exponent:.6g}"
        ok = prof.classification is want_class and not prof.ambiguous
        rows.append(flag_row(f"{name} class", ok, detail))
        if want_exp is not None:
            if prof.exponent is None:
                rows.append(flag_row(
                    f"{name} exponent", False,
                    "no exponent fitted for a power-family case",
                ))
            else:
                rows.append(checked_row(
                    f"{name} exponent", prof.exponent, want_exp,
                    tol_exp * want_exp, "fitted vs leading-order exponent",
                ))
        taus = prof.cutoffs
        vals = prof.values
        fits = prof.fitted_values()
        series[name] = {
            "columns": ["tau", "value", "fit"],
            "rows": [[taus[i], vals[i], fits[i]] for i in range(len(taus))],
        }
    return evals


def run_reg2d(p: dict) -> Report:
    """Graph-domain volume growth across the flat-slope threshold in 2D."""
    rows: list = []
    series: dict = {}

    def expected(beta):
        if beta > 0.5:
            return ProfileClass.CONVERGENT, beta - 0.5
        if beta < 0.5:
            return ProfileClass.POWER, 0.5 - beta
        return ProfileClass.LOG, None

    evals = _threshold_rows(
        "beta", p["beta"],
        lambda b: HolderGraph2D(b, p["coefficient"], p["delta"]),
        expected, rows, series, p["exponent_rtol"],
    )
    return Report("reg2d", __version__, _echo(p), tuple(rows), series, evals)


def run_reg3d(p: dict) -> Report:
    """Graph-domain volume growth across the derivative threshold in 3D."""
    rows: list = []
    series: dict = {}

    def expected(alpha):
        if alpha > 0.0:
            return ProfileClass.CONVERGENT, alpha
        if alpha < 0.0:
            return ProfileClass.POWER, -alpha
        return ProfileClass.LOG, None

    evals = _threshold_rows(
        "alpha", p["alpha"],
        lambda a: HolderGraph3D(a, p["coefficient"], p["x1_range"], p["delta"]),
        expected, rows, series, p["exponent_rtol"],
    )
    return Report("reg3d", __version__, _echo(p), tuple(rows), series, evals)


def run_logexample(p: dict) -> Report:
    """The slowest divergence: graph -x3/log(x3), growing like log log."""
    rows: list = []
    series: dict = {}
    dom = HolderGraph3D(
        None, p["coefficient"], p["x1_range"], p["delta"], log_profile=True
    )
    prof = divergence_profile(dom)
    evals = prof.evaluations
    rows.append(flag_row(
        "classification",
        prof.classification is ProfileClass.LOG_LOG and not prof.ambiguous,
        f"classified {prof.classification.value}, "
        f"residuals {prof.residuals['power']:.2e} (power) vs "
        f"{prof.residuals['log-log']:.2e} (log-log)",
    ))
    taus, vals, fits = prof.cutoffs, prof.values, prof.fitted_values()
    series["profile"] = {
        "columns": ["tau", "value", "fit"],
        "rows": [[taus[i], vals[i], fits[i]] for i in range(len(taus))],
    }

    # the model integrand 1/(x log(1/x)) has antiderivative -log(log(1/x));
    # check the truncated integral from exp(-e) against it
    tau0 = float(np.exp(-np.e))
    delta = p["delta"]
    ref = float(np.log(np.log(1.0 / tau0)) - np.log(np.log(1.0 / delta)))
    got = integrate_interval(
        lambda x: log_reduced_integrand(x) + 0j, tau0, delta, tol=1e-12
    )
    evals += got.evaluations
    rows.append(checked_row(
        "reduced_truncated_integral", got.value.real, ref, p["tol"],
        "int of 1/(x log(1/x)) over [exp(-e), delta] vs antiderivative",
    ))
    cut, inc, ev = profile_increments(log_reduced_integrand, delta, levels=30)
    evals += ev
    model = classify_increments(cut, inc)
    rows.append(flag_row(
        "reduced_classification",
        model.classification is ProfileClass.LOG_LOG and not model.ambiguous,
        f"model integrand classified {model.classification.value}, "
        f"amplitude {model.amplitude:.6g}",
    ))
    return Report("logexample", __version__, _echo(p), tuple(rows), series, evals)


def run_cone(p: dict) -> Report:
    """Touching cone: finite volume with the predicted leading term."""
    k, delta = p["k"], p["delta"]
    rows: list = []
    reduced = cone_reduced_volume(k, delta)
    ratio = reduced.value.real * 2.0 * k * k / delta
    rows.append(info_row("reduced_volume", reduced.value.real))
    rows.append(window_row(
        "leading_ratio", ratio, p["window_lo"], p["window_hi"],
        "reduced volume over delta/(2 k^2)",
    ))
    vol = mu_direct(Cone3D(k, delta), tol=1e-12)
    rows.append(info_row(
        "volume", vol.value, "exact density, angular factor included"
    ))
    levels = 20
    cut, inc, ev = profile_increments(
        lambda x: np.log1p(x * x / (k * k * (x - 1.0) ** 2)) / (2.0 * x * x) + 0j,
        delta, levels=levels,
    )
    cums = [0.0]
    for d in inc:
        cums.append(cums[-1] + d)
    series = {"profile": {
        "columns": ["tau", "value"],
        "rows": [[cut[i], cums[i]] for i in range(levels + 1)],
    }}
    evals = reduced.evaluations + vol.evaluations + ev
    return Report("cone", __version__, _echo(p), tuple(rows), series, evals)


def run_invariance(p: dict) -> Report:
    """Volumes before and after isometries, including a crossing boost."""
    rows: list = []
    evals = 0
    tri = Polygon2D(TRIANGLE)

    chk = invariance_check(tri, boost(p["boost_t"], 2), tol=1e-10)
    evals += chk.original.evaluations + chk.mapped.evaluations
    rows.append(info_row("triangle_mu", chk.original.value))
    rows.append(info_row("triangle_boost_mu", chk.mapped.value))
    rows.append(checked_row(
        "triangle_boost_deviation", chk.deviation, 0.0, p["tol_boost"],
        f"Lorentz boost t={p['boost_t']:g}",
    ))

    chk = invariance_check(tri, rotation(np.pi / 4.0, 2), tol=1e-10)
    evals += chk.original.evaluations + chk.mapped.evaluations
    rows.append(checked_row(
        "triangle_rotation_deviation", chk.deviation, 0.0, p["tol_rotation"],
        "rotation by pi/4",
    ))

    box = Box3D(*BOX)
    chk = invariance_check(box, reflection_isometry(0, 3), tol=1e-10)
    evals += chk.original.evaluations + chk.mapped.evaluations
    rows.append(info_row("box_mu", chk.original.value))
    rows.append(checked_row(
        "box_reflection_deviation", chk.deviation, 0.0, p["tol_box"],
        "x1 sign flip",
    ))
    return Report("invariance", __version__, _echo(p), tuple(rows), {}, evals)


def run_additivity(p: dict) -> Report:
    """Split domains: the parts must sum to the whole."""
    rows: list = []
    evals = 0

    sector = Sector2D(2.0 * np.pi, np.sqrt(2.0))
    chk = additivity_check(sector, split_sector(sector, 0.5), tol=1e-11)
    evals += chk.whole.evaluations + sum(r.evaluations for r in chk.parts)
    rows.append(checked_row(
        "sector_split_deviation", chk.deviation, 0.0, p["tol_sector"],
        "full sector against two half sectors",
    ))

    tri = Polygon2D(TRIANGLE)
    halves = split_polygon(tri, TRIANGLE_SPLIT_POINT, TRIANGLE_SPLIT_DIRECTION)
    chk = additivity_check(tri, halves, tol=1e-10)
    evals += chk.whole.evaluations + sum(r.evaluations for r in chk.parts)
    rows.append(checked_row(
        "triangle_split_deviation", chk.deviation, 0.0, p["tol_polygon"],
        "median cut through a crossing triangle",
    ))

    box = Box3D(*BOX)
    cut = 0.5 * (BOX[0][0] + BOX[0][1])
    chk = additivity_check(box, split_box(box, cut), tol=1e-10)
    evals += chk.whole.evaluations + sum(r.evaluations for r in chk.parts)
    rows.append(checked_row(
        "box_split_deviation", chk.deviation, 0.0, p["tol_box"],
        "box halved at the x1 midpoint",
    ))
    return Report("additivity", __version__, _echo(p), tuple(rows), {}, evals)


_VARIANTS = {v.value: v for v in DensityVariant}


def run_density_eval(p: dict) -> Report:
    """Evaluate one density variant at one point (diagnostic)."""
    name = p["variant"]
    if name not in _VARIANTS:
        raise ConfigError(
            f"unknown variant {name!r}; known: {', '.join(sorted(_VARIANTS))}"
        )
    variant = _VARIANTS[name]
    coords = p["point"]
    point = ModelPoint(coords, variant.chart)
    eps = p["eps"]
    if variant.needs_eps and eps is None:
        raise ConfigError(f"variant {name!r} requires eps")
    if not variant.needs_eps and eps is not None:
        raise ConfigError(f"variant {name!r} does not take eps")
    value = density(point, variant, eps=eps)
    rows = (info_row("density", value, f"{name} at {list(coords)}"),)
    return Report("density-eval", __version__, _echo(p), rows, {}, 1)


def _contour_integrand(name: str, a: float, b: float, singularities):
    """Model integrand, whether it needs a per-contour factory, and its
    closed form over the detour from a to b."""
    s0 = singularities[0]

    if name == "pole":
        return (lambda z: 1.0 / (z - s0)), False, complex(
            np.log((b - s0) / (s0 - a)) - 1j * np.pi
        )
    if name == "pole-squared":
        return (lambda z: 1.0 / (z - s0) ** 2), False, complex(
            1.0 / (a - s0) - 1.0 / (b - s0)
        )
    if name == "half-power-radial":
        # r (1 - r^2)^(-3/2), the radial slice kernel; antiderivative
        # (1 - r^2)^(-1/2)
        def w(r):
            return (1.0 - r) * (1.0 + r)

        def factory(contour):
            tracked = tracked_power_integrand(w, -1.5, contour)

            class _Radial:
                path_aware = True

                def __call__(self, z, t):
                    return np.asarray(z, dtype=complex) * tracked(z, t)

            return _Radial()

        def antiderivative(x: float) -> complex:
            # continued (1 - r^2)^(-1/2), lower-edge branch past r = 1
            if abs(abs(x) - 1.0) < 1e-12:
                raise ConfigError("endpoints of half-power-radial must avoid 1")
            if x > 1.0:
                return lower_edge_power(w(x), -0.5)
            return complex((1.0 - x * x) ** -0.5)

        return factory, True, antiderivative(b) - antiderivative(a)
    raise ConfigError(
        "unknown integrand "
        f"{name!r}; known: half-power-radial, pole, pole-squared"
    )


def run_contour_eval(p: dict) -> Report:
    """Integrate a model integrand along the standard detour and check it
    against its closed form and against detour-radius independence."""
    a, b = p["a"], p["b"]
    sings = p["singularities"]
    if not all(a < s < b for s in sings):
        raise ConfigError("singularities must lie strictly inside (a, b)")
    name = p["integrand"]
    if name == "half-power-radial" and not any(
        abs(s - 1.0) < 1e-12 for s in sings
    ):
        raise ConfigError("half-power-radial needs its singularity at 1")
    f, needs_factory, reference = _contour_integrand(name, a, b, sings)

    contour = build_contour(a, b, sings, p["delta"])
    integrand = f(contour) if needs_factory else f
    res = integrate_path(integrand, contour, tol=1e-12)
    rows = [
        checked_row("contour_integral", res.value, reference, p["tol"],
                    f"{name} along the detour"),
    ]
    chk = deformation_check(f, a, b, sings, factory=needs_factory)
    rows.append(flag_row(
        "deformation_stable", chk.passed,
        f"spread {chk.spread:.3e} across radii {list(chk.deltas)}",
    ))
    return Report(
        "contour-eval", __version__, _echo(p), tuple(rows), {}, res.evaluations
    )


EXPERIMENTS = {
    "equivalence": {
        "run": run_equivalence,
        "help": "contour pipeline vs regularized limit on a sector and a box",
        "schema": {
            "theta": (2.0 * np.pi, _pos_float),
            "radius": (float(np.sqrt(2.0)), _pos_float),
            "tol": (1e-3, _pos_float),
            "box_x1": (BOX[0], _pair),
            "box_x2": (BOX[1], _pair),
            "box_delta": (BOX[2], _pos_float),
        },
    },
    "variants": {
        "run": run_variants,
        "help": "the two flattened-chart regularizations agree (box, wedge)",
        "schema": {
            "tol": (1e-3, _pos_float),
            "box_x1": (BOX[0], _pair),
            "box_x2": (BOX[1], _pair),
            "box_delta": (BOX[2], _pos_float),
        },
    },
    "reg2d": {
        "run": run_reg2d,
        "help": "2D graph-domain growth classification across beta = 1/2",
        "schema": {
            "beta": ((0.3, 0.4, 0.5, 0.6, 0.7), _float_list),
            "coefficient": (1.0, _pos_float),
            "delta": (0.5, _pos_float),
            "exponent_rtol": (0.05, _pos_float),
        },
    },
    "reg3d": {
        "run": run_reg3d,
        "help": "3D graph-domain growth classification across alpha = 0",
        "schema": {
            "alpha": ((-0.2, 0.0, 0.2, 0.4), _float_list),
            "coefficient": (1.0, _pos_float),
            "delta": (0.5, _pos_float),
            "x1_range": ((-0.5, 0.5), _pair),
            "exponent_rtol": (0.05, _pos_float),
        },
    },
    "logexample": {
        "run": run_logexample,
        "help": "log-log growth of the -x3/log(x3) graph domain",
        "schema": {
            "coefficient": (1.0, _pos_float),
            "delta": (0.5, _pos_float),
            "x1_range": ((-0.5, 0.5), _pair),
            "tol": (1e-6, _pos_float),
        },
    },
    "cone": {
        "run": run_cone,
        "help": "touching cone volume and its leading-order ratio",
        "schema": {
            "k": (1.0, _pos_float),
            "delta": (1e-3, _pos_float),
            "window_lo": (0.98, _pos_float),
            "window_hi": (1.02, _pos_float),
        },
    },
    "invariance": {
        "run": run_invariance,
        "help": "volume invariance under boost, rotation, and reflection",
        "schema": {
            "boost_t": (0.5, _float),
            "tol_boost": (1e-5, _pos_float),
            "tol_rotation": (1e-8, _pos_float),
            "tol_box": (1e-6, _pos_float),
        },
    },
    "additivity": {
        "run": run_additivity,
        "help": "split domains: parts sum to the whole",
        "schema": {
            "tol_sector": (1e-8, _pos_float),
            "tol_polygon": (1e-6, _pos_float),
            "tol_box": (1e-6, _pos_float),
        },
    },
    "density-eval": {
        "run": run_density_eval,
        "help": "evaluate a density variant at a point",
        "schema": {
            "variant": ("klein_exact", _str),
            "point": ((0.5, 0.0), _float_list),
            "eps": (None, _pos_float),
        },
    },
    "contour-eval": {
        "run": run_contour_eval,
        "help": "model integrand along the standard detour vs closed form",
        "schema": {
            "a": (-1.0, _float),
            "b": (1.0, _float),
            "singularities": ((0.0,), _float_list),
            "delta": (None, _pos_float),
            "integrand": ("pole", _str),
            "tol": (1e-9, _pos_float),
        },
    },
}


def run_experiment(tag: str, parameters: dict) -> Report:
    if tag not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ConfigError(f"unknown experiment {tag!r}; known: {known}")
    return EXPERIMENTS[tag]["run"](parameters)
