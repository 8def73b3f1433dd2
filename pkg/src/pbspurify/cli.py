"""Command-line front end writing plot-ready CSV.

Subcommands::

    pbspurify ideal-curve   --f-min 0.5 --f-max 1 --steps 51
    pbspurify cascade       --rounds 3 --eta 0.01 --loss-placement before --f0 1
    pbspurify mode-mismatch --tau-bounds 0.2,0.4,0.6,0.8 --grid 21 --policy strict
    pbspurify bandwidth     --omega-min 0.1 --omega-max 5 --steps 50

Every subcommand also takes ``--config file.json`` (keys are flag names with
underscores) and ``--out path``.  Flags override the config file.
Exit codes: 0 ok, 2 configuration error, 3 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Callable, Sequence

import numpy as np

from .mismatch import AcceptancePolicy, SearchConfig, fig4_curve
from .sector_model import (
    CascadeConfig,
    LossPlacement,
    PairEnsemble,
    SectorDistribution,
    bandwidth_to_efficiency,
    cascade,
    iterate_fidelity,
    purify_fidelity,
)
from .temporal import WavePacketConvention, default_convention

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


class NumericDegeneracy(ArithmeticError):
    pass


def fmt(x: Any) -> str:
    """12 significant digits, locale independent."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".12g")


def _float_list(text: str | Sequence[float]) -> list[float]:
    if isinstance(text, str):
        try:
            return [float(t) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad number list {text!r}") from exc
    return [float(t) for t in text]


def _grid(lo: float, hi: float, steps: int) -> list[float]:
    return [float(v) for v in np.linspace(lo, hi, steps)]


def _check_range(name: str, lo: float, hi: float, steps: int, lo_min: float | None = None,
                 hi_max: float | None = None, open_low: bool = False) -> None:
    if steps < 2:
        raise ConfigError(f"steps must be >= 2, got {steps}")
    if not lo < hi:
        raise ConfigError(f"{name}_min must be < {name}_max")
    if lo_min is not None and (lo <= lo_min if open_low else lo < lo_min):
        raise ConfigError(f"{name}_min out of range: {lo}")
    if hi_max is not None and hi > hi_max:
        raise ConfigError(f"{name}_max out of range: {hi}")


def run_ideal_curve(p: dict) -> list[list[str]]:
    _check_range("f", p["f_min"], p["f_max"], p["steps"], lo_min=0.0, hi_max=1.0)
    rows = [["f", "f_prime"]]
    for f in _grid(p["f_min"], p["f_max"], p["steps"]):
        rows.append([fmt(f), fmt(purify_fidelity(f))])
    return rows


def run_cascade(p: dict) -> list[list[str]]:
    try:
        config = CascadeConfig(
            rounds=p["rounds"],
            eta=p["eta"],
            loss_placement=LossPlacement(p["loss_placement"]),
            initial=PairEnsemble(SectorDistribution.two_photon(), p["f0"]),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    trace = cascade(config)
    rows = [["round", "p0", "p1", "p2", "f", "p2_norm", "effective_fidelity"]]
    for n, rec in enumerate(trace.records, start=1):
        if math.isnan(rec.p2_norm):
            raise NumericDegeneracy(f"total sector mass underflowed to zero at round {n}")
        eff = iterate_fidelity(config.initial.fidelity, n) * rec.p2_norm
        s = rec.sectors
        rows.append([fmt(n), fmt(s.p0), fmt(s.p1), fmt(s.p2), fmt(rec.fidelity),
                     fmt(rec.p2_norm), fmt(eff)])
    return rows


def run_mode_mismatch(p: dict) -> list[list[str]]:
    _check_range("f", p["f_min"], p["f_max"], p["steps"], lo_min=0.0, hi_max=1.0)
    tau_bounds = _float_list(p["tau_bounds"])
    if not tau_bounds or any(not t >= 0 for t in tau_bounds):
        raise ConfigError("tau_bounds must be a non-empty list of non-negative numbers")
    try:
        search = SearchConfig(tau_bounds[0], samples=p["samples"], seed=p["seed"], grid=p["grid"])
        policy = AcceptancePolicy(p["policy"])
        conv = WavePacketConvention(p["sigma"]) if p["sigma"] is not None else default_convention()
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    table = fig4_curve(_grid(p["f_min"], p["f_max"], p["steps"]), tau_bounds, search, policy,
                       conv, workers=p["workers"])
    rows = [["tau_bound", "f", "min_f_prime", "argmin_tau1", "argmin_tau2"]]
    for r in table:
        rows.append([fmt(r.tau_bound), fmt(r.f), fmt(r.min_f_prime), fmt(r.argmin_tau1),
                     fmt(r.argmin_tau2)])
    return rows


def run_bandwidth(p: dict) -> list[list[str]]:
    _check_range("omega", p["omega_min"], p["omega_max"], p["steps"], lo_min=0.0, open_low=True)
    rows = [["omega", "eta"]]
    for omega in _grid(p["omega_min"], p["omega_max"], p["steps"]):
        rows.append([fmt(omega), fmt(bandwidth_to_efficiency(omega))])
    return rows


# name -> (runner, {param: (type, default)})
SUBCOMMANDS: dict[str, tuple[Callable[[dict], list[list[str]]], dict[str, tuple[Any, Any]]]] = {
    "ideal-curve": (run_ideal_curve, {
        "f_min": (float, 0.5), "f_max": (float, 1.0), "steps": (int, 51),
    }),
    "cascade": (run_cascade, {
        "rounds": (int, 3), "eta": (float, 0.01), "loss_placement": (str, "before"),
        "f0": (float, 1.0),
    }),
    "mode-mismatch": (run_mode_mismatch, {
        "f_min": (float, 0.5), "f_max": (float, 1.0), "steps": (int, 11),
        "tau_bounds": (str, "0.2,0.4,0.6,0.8"), "samples": (int, 1000), "grid": (int, None),
        "seed": (int, 0), "policy": (str, "strict"), "sigma": (float, None),
        "workers": (int, None),
    }),
    "bandwidth": (run_bandwidth, {
        "omega_min": (float, 0.1), "omega_max": (float, 5.0), "steps": (int, 50),
    }),
}

_CHOICES = {
    "loss_placement": [p.value for p in LossPlacement],
    "policy": [p.value for p in AcceptancePolicy],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbspurify", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, params) in SUBCOMMANDS.items():
        sp = sub.add_parser(name)
        for key, (typ, default) in params.items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None,
                            choices=_CHOICES.get(key),
                            help=f"default: {default}")
        sp.add_argument("--config", help="JSON file with parameter values")
        sp.add_argument("--out", help="output CSV path (default: stdout)")
    return parser


def _coerce(key: str, typ: Any, value: Any) -> Any:
    if value is None:
        return None
    if key == "tau_bounds" and isinstance(value, list):
        return ",".join(repr(float(v)) for v in value)
    if typ is int and (isinstance(value, bool) or not float(value).is_integer()):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    try:
        value = typ(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    if key in _CHOICES and value not in _CHOICES[key]:
        raise ConfigError(f"{key} must be one of {_CHOICES[key]}, got {value!r}")
    return value


def resolve_params(command: str, args: argparse.Namespace) -> tuple[dict, str | None]:
    """Merge defaults, the JSON config file and explicit flags (in that order)."""
    _, params = SUBCOMMANDS[command]
    resolved = {k: d for k, (_, d) in params.items()}
    out = args.out
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(data) - set(params) - {"out"}
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        for key, value in data.items():
            if key == "out":
                out = out or value
            else:
                resolved[key] = _coerce(key, params[key][0], value)
    for key in params:
        value = getattr(args, key)
        if value is not None:
            resolved[key] = value
    return resolved, out


def render_csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    runner, _ = SUBCOMMANDS[args.command]
    try:
        params, out = resolve_params(args.command, args)
        text = render_csv(runner(params))
    except ConfigError as exc:
        print(f"pbspurify: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericDegeneracy, ZeroDivisionError) as exc:
        print(f"pbspurify: numeric degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
