"""Experiment registry, parameter resolution, and runner smoke checks."""

import numpy as np
import pytest

from exthyp.errors import ConfigError
from exthyp.experiments import (
    EXPERIMENTS,
    resolve_parameters,
    run_experiment,
    sector_closed_form,
)
from exthyp.reports import Report

TAGS = {
    "equivalence", "variants", "reg2d", "reg3d", "logexample",
    "cone", "invariance", "additivity", "density-eval", "contour-eval",
}


def test_registry_tags_and_shape():
    assert set(EXPERIMENTS) == TAGS
    for tag, entry in EXPERIMENTS.items():
        assert callable(entry["run"])
        assert entry["help"]
        for key, spec in entry["schema"].items():
            default, convert = spec
            assert callable(convert)
            if default is not None:
                # defaults must survive their own converter unchanged
                assert convert(default) == default, (tag, key)


def test_resolve_parameters_precedence():
    base = resolve_parameters("cone")
    assert base["k"] == 1.0 and base["delta"] == 1e-3
    merged = resolve_parameters("cone", {"k": 2.0}, {"k": None, "delta": 0.01})
    assert merged["k"] == 2.0  # None in a later source leaves the value alone
    assert merged["delta"] == 0.01
    merged = resolve_parameters("cone", {"k": 2.0}, {"k": 3.0})
    assert merged["k"] == 3.0


def test_resolve_parameters_errors_name_the_field():
    with pytest.raises(ConfigError, match="unknown experiment 'nope'"):
        resolve_parameters("nope")
    with pytest.raises(ConfigError, match="unknown parameter 'zeta'"):
        resolve_parameters("cone", {"zeta": 1.0})
    with pytest.raises(ConfigError, match="parameter 'delta'"):
        resolve_parameters("cone", {"delta": -1.0})
    with pytest.raises(ConfigError, match="parameter 'box_x1'"):
        resolve_parameters("equivalence", {"box_x1": (1.0, 2.0, 3.0)})


def test_run_experiment_rejects_unknown_tag():
    with pytest.raises(ConfigError, match="unknown experiment"):
        run_experiment("nope", {})


def _run(tag, **overrides):
    params = resolve_parameters(tag, overrides)
    report = run_experiment(tag, params)
    assert isinstance(report, Report)
    assert report.experiment == tag
    assert report.evaluations > 0
    return report


def test_equivalence_runner():
    rep = _run("equivalence")
    assert rep.passed
    assert set(rep.series) == {"eps_trace", "box_eps_trace"}
    assert all(len(r) == 3 for r in rep.series["eps_trace"]["rows"])
    by_name = {r.name: r for r in rep.rows}
    want = sector_closed_form(2.0 * np.pi, float(np.sqrt(2.0)))
    np.testing.assert_allclose(
        complex(by_name["sector_contour"].value), want, atol=1e-8
    )


def test_variants_runner():
    rep = _run("variants")
    assert rep.passed
    names = [r.name for r in rep.rows]
    assert "box_variants" in names and "wedge_pipelines" in names


def test_reg2d_runner_single_point():
    rep = _run("reg2d", beta=(0.4,))
    assert rep.passed
    names = [r.name for r in rep.rows]
    assert names == ["beta=0.4 class", "beta=0.4 exponent"]
    assert "beta=0.4" in rep.series


def test_reg3d_runner_single_point():
    rep = _run("reg3d", alpha=(0.2,))
    assert rep.passed
    assert [r.name for r in rep.rows] == ["alpha=0.2 class", "alpha=0.2 exponent"]


def test_logexample_runner():
    rep = _run("logexample")
    assert rep.passed
    by_name = {r.name: r for r in rep.rows}
    assert by_name["classification"].passed is True
    row = by_name["reduced_truncated_integral"]
    expect = np.log(np.log(1.0 / np.exp(-np.e))) - np.log(np.log(2.0))
    np.testing.assert_allclose(float(row.value), expect, rtol=1e-9)


def test_cone_runner():
    rep = _run("cone")
    assert rep.passed
    by_name = {r.name: r for r in rep.rows}
    assert 0.98 <= float(by_name["leading_ratio"].value) <= 1.02
    assert "profile" in rep.series


def test_cone_runner_can_fail():
    rep = _run("cone", window_lo=1.5, window_hi=2.0)
    assert not rep.passed


def test_invariance_runner():
    rep = _run("invariance")
    assert rep.passed
    names = [r.name for r in rep.rows]
    assert "triangle_boost_deviation" in names
    assert "box_reflection_deviation" in names


def test_additivity_runner():
    rep = _run("additivity")
    assert rep.passed
    assert len([r for r in rep.rows if r.passed is not None]) == 3


def test_density_eval_runner():
    rep = _run("density-eval")
    assert rep.passed
    row = rep.rows[0]
    np.testing.assert_allclose(complex(row.value), (1.0 - 0.25) ** -1.5)

    rep = _run("density-eval", variant="klein_eps", eps=1e-3)
    assert rep.passed


def test_density_eval_eps_handling():
    with pytest.raises(ConfigError, match="requires eps"):
        _run("density-eval", variant="klein_eps")
    with pytest.raises(ConfigError, match="does not take eps"):
        _run("density-eval", variant="klein_exact", eps=1e-3)
    with pytest.raises(ConfigError, match="unknown variant"):
        _run("density-eval", variant="imaginary")


def test_contour_eval_runner():
    rep = _run("contour-eval")
    assert rep.passed
    np.testing.assert_allclose(
        complex(rep.rows[0].value), -1j * np.pi, atol=1e-10
    )

    rep = _run("contour-eval", integrand="half-power-radial",
               a=0.0, b=2.0, singularities=(1.0,))
    assert rep.passed
    np.testing.assert_allclose(
        complex(rep.rows[0].value), -1.0 + 1j / np.sqrt(3.0), atol=1e-8
    )


def test_contour_eval_validation():
    with pytest.raises(ConfigError, match="strictly inside"):
        _run("contour-eval", singularities=(2.0,))
    with pytest.raises(ConfigError, match="unknown integrand"):
        _run("contour-eval", integrand="cube")
    with pytest.raises(ConfigError, match="singularity at 1"):
        _run("contour-eval", integrand="half-power-radial",
             a=0.0, b=2.0, singularities=(0.5,))


def test_parameter_echo_round_trips():
    for tag in ("equivalence", "reg3d", "density-eval", "contour-eval"):
        params = resolve_parameters(tag)
        rep = run_experiment(tag, params)
        again = resolve_parameters(tag, rep.payload()["parameters"])
        assert again == params, tag
