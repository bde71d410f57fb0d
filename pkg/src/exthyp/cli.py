"""Command-line interface: one subcommand per experiment.

Parameters come from an optional JSON config file plus per-experiment flags;
flags override the file, the file overrides built-in defaults.  Reports are
byte-stable for identical inputs and version, so wall-clock timing is printed
to stderr only.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or configuration
error, 3 numerical or internal error (a report with the failure is still
emitted when possible).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .errors import ConfigError, ExtHypError
from .experiments import EXPERIMENTS, resolve_parameters, run_experiment
from .reports import Report, emit_plot_data, flag_row, to_csv, to_json

_CONFIG_KEYS = {"experiment", "parameters", "output"}
_FORMATS = ("json", "csv")


def _flag_name(key: str) -> str:
    return "--" + key.replace("_", "-")


def _add_schema_flags(parser: argparse.ArgumentParser, schema: dict) -> None:
    from .experiments import _float, _float_list, _pair, _pos_float, _str

    for key, (_default, convert) in schema.items():
        flag = _flag_name(key)
        if convert is _float_list:
            parser.add_argument(flag, dest=key, type=float, nargs="+", default=None)
        elif convert is _pair:
            parser.add_argument(flag, dest=key, type=float, nargs=2, default=None)
        elif convert is _str:
            parser.add_argument(flag, dest=key, type=str, default=None)
        else:
            parser.add_argument(flag, dest=key, type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exthyp",
        description=(
            "volumes of domains crossing the hyperbolic-space boundary: "
            "contour, regularized-limit, and direct pipelines with "
            "divergence profiling"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="experiment", required=True)
    for tag in EXPERIMENTS:
        p = sub.add_parser(tag, help=EXPERIMENTS[tag]["help"])
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--output", default=None, help="report file (default stdout)")
        p.add_argument("--format", default=None, choices=_FORMATS,
                       help="report format (default json)")
        p.add_argument("--plot-data", default=None, metavar="SERIES",
                       help="emit a tab-separated series table")
        p.add_argument("--plot-path", default=None, metavar="FILE",
                       help="where the series table goes (required with --plot-data)")
        _add_schema_flags(p, EXPERIMENTS[tag]["schema"])
    return parser


def _load_config(path: str, tag: str) -> tuple[dict, dict]:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path!r} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(
            f"unknown config keys: {', '.join(sorted(unknown))}; "
            f"allowed: {', '.join(sorted(_CONFIG_KEYS))}"
        )
    if "experiment" in raw and raw["experiment"] != tag:
        raise ConfigError(
            f"config is for experiment {raw['experiment']!r}, "
            f"but the {tag!r} subcommand was invoked"
        )
    parameters = raw.get("parameters", {})
    if not isinstance(parameters, dict):
        raise ConfigError("config 'parameters' must be an object")
    output = raw.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("config 'output' must be an object")
    unknown = set(output) - {"path", "format"}
    if unknown:
        raise ConfigError(
            f"unknown output keys: {', '.join(sorted(unknown))}"
        )
    fmt = output.get("format")
    if fmt is not None and fmt not in _FORMATS:
        raise ConfigError(f"output format must be one of {_FORMATS}, got {fmt!r}")
    return parameters, output


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit(report: Report, fmt: str, path: str | None) -> None:
    _write(to_json(report) if fmt == "json" else to_csv(report), path)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    tag = args.experiment
    schema = EXPERIMENTS[tag]["schema"]

    try:
        file_params: dict = {}
        output_cfg: dict = {}
        if args.config is not None:
            file_params, output_cfg = _load_config(args.config, tag)
        flag_params = {k: getattr(args, k) for k in schema}
        params = resolve_parameters(tag, file_params, flag_params)
        fmt = args.format or output_cfg.get("format") or "json"
        out_path = args.output or output_cfg.get("path")
        if args.plot_data is not None and args.plot_path is None:
            raise ConfigError("--plot-data requires --plot-path")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2

    started = time.perf_counter()
    try:
        report = run_experiment(tag, params)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ExtHypError as e:
        report = Report(
            tag, __version__, {k: v for k, v in params.items()},
            (flag_row("error", False, f"{type(e).__name__}: {e}"),),
        )
        _emit(report, fmt, out_path)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except Exception as e:  # noqa: BLE001  anything else is an internal error
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    finally:
        elapsed = time.perf_counter() - started
        print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)

    try:
        _emit(report, fmt, out_path)
        if args.plot_data is not None:
            _write(emit_plot_data(report, args.plot_data), args.plot_path)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"cannot write output: {e}", file=sys.stderr)
        return 3

    return 0 if report.passed else 1
