"""Batch front end: config ingestion, experiment orchestration, CSV emission.

Experiments map 1:1 to subcommands (bands, density, entropy, certify,
compare).  Configs are INI-style text with [block], [perturbation] and
[experiment] sections; see the README for the exact grammar.  Outputs are
deterministic for a fixed config and seed: floats are written with 17
significant digits and metadata headers carry no timestamps.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bands import admissible_intervals, band_edges
from .certify import (
    check_diagonal_products,
    check_floquet_bound,
    check_harmonic_hypotheses,
    check_w_summability,
)
from .coefficients import PerturbationSpec, make_model, periodic_block
from .errors import JostspecError, ValidationError
from .measures import density_curve, entropy_integral

EXPERIMENTS = ("bands", "density", "entropy", "certify", "compare")

_BLOCK_KEYS = ("q", "a", "b")
_PERT_KEYS = ("kind", "alpha", "beta", "c", "s", "gamma", "target", "l2_admissible")
_EXPERIMENT_KEYS = (
    "N",
    "N_list",
    "interval",
    "grid_points",
    "method",
    "quad_order",
    "margin",
    "tol",
    "seed",
    "precision",
    "n_grid",
)


@dataclass
class RunConfig:
    """Validated run parameters for one experiment."""

    experiment: str
    block: object
    pert: PerturbationSpec
    params: dict
    seed: int


def _fmt(x):
    return format(float(x), ".17g")


def _float_list(text):
    parts = [p for chunk in text.split(",") for p in chunk.split()]
    return [float(p) for p in parts]


def _int_list(text):
    return [int(round(x)) for x in _float_list(text)]


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"expected a boolean, got {text!r}")


def _read_config(path, overrides):
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    read = parser.read(path)
    if not read:
        raise ValidationError(f"config file {path} is unreadable")
    for item in overrides or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ValidationError(f"override must look like section.key=value: {item!r}")
        target, value = item.split("=", 1)
        section, key = target.split(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)
    for section in parser.sections():
        if section not in ("block", "perturbation", "experiment"):
            raise ValidationError(f"unknown config section [{section}]")
    return parser


def _parse_block(parser):
    if not parser.has_section("block"):
        raise ValidationError("config must contain a [block] section")
    sec = parser["block"]
    for key in sec:
        if key not in _BLOCK_KEYS:
            raise ValidationError(f"unknown key {key!r} in [block]")
    try:
        q = int(sec.get("q", "1"))
        a = _float_list(sec.get("a", "1.0"))
        b = _float_list(sec.get("b", "0.0"))
    except ValueError as exc:
        raise ValidationError(f"bad [block] value: {exc}") from exc
    return periodic_block(q, a, b)


def _parse_pert(parser):
    if not parser.has_section("perturbation"):
        return PerturbationSpec.zero()
    sec = parser["perturbation"]
    for key in sec:
        if key not in _PERT_KEYS:
            raise ValidationError(f"unknown key {key!r} in [perturbation]")
    kind = sec.get("kind", "zero")
    try:
        if kind == "zero":
            return PerturbationSpec.zero()
        if kind == "finite_list":
            alpha = _float_list(sec.get("alpha", "")) if sec.get("alpha") else []
            beta = _float_list(sec.get("beta", "")) if sec.get("beta") else []
            return PerturbationSpec.finite(alpha=alpha, beta=beta)
        if kind == "power_decay_oscillatory":
            return PerturbationSpec.power(
                c=float(sec.get("c", "1.0")),
                s=float(sec.get("s", "0.5")),
                gamma=float(sec.get("gamma")),
                target=sec.get("target", "b"),
                l2_admissible=_parse_bool(sec.get("l2_admissible", "false")),
            )
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad [perturbation] value: {exc}") from exc
    raise ValidationError(f"unknown perturbation kind {kind!r}")


def _parse_experiment_params(parser, experiment, seed_cli):
    params = {
        "N": 20,
        "N_list": [10, 20, 40, 80],
        "interval": "auto",
        "grid_points": 200,
        "method": "key_formula",
        "quad_order": 64,
        "margin": 0.1,
        "tol": 1e-5,
        "seed": 0,
        "precision": "double",
        "n_grid": [16, 32, 64, 128],
    }
    if parser.has_section("experiment"):
        sec = parser["experiment"]
        for key in sec:
            if key not in _EXPERIMENT_KEYS:
                raise ValidationError(f"unknown key {key!r} in [experiment]")
        try:
            if "N" in sec:
                params["N"] = int(sec["N"])
            if "N_list" in sec:
                params["N_list"] = _int_list(sec["N_list"])
            if "interval" in sec:
                text = sec["interval"].strip()
                params["interval"] = text if text == "auto" else tuple(_float_list(text))
            if "grid_points" in sec:
                params["grid_points"] = int(sec["grid_points"])
            if "method" in sec:
                params["method"] = sec["method"].strip()
            if "quad_order" in sec:
                params["quad_order"] = int(sec["quad_order"])
            if "margin" in sec:
                params["margin"] = float(sec["margin"])
            if "tol" in sec:
                params["tol"] = float(sec["tol"])
            if "seed" in sec:
                params["seed"] = int(sec["seed"])
            if "precision" in sec:
                params["precision"] = sec["precision"].strip()
        except ValueError as exc:
            raise ValidationError(f"bad [experiment] value: {exc}") from exc
        if "n_grid" in sec:
            params["n_grid"] = _int_list(sec["n_grid"])
    if params["precision"] not in ("double", "extended"):
        raise ValidationError("precision must be double or extended")
    if params["method"] not in ("key_formula", "oracle", "both"):
        raise ValidationError(f"unknown density method {params['method']!r}")
    if isinstance(params["interval"], tuple) and len(params["interval"]) != 2:
        raise ValidationError("interval must be 'auto' or two numbers")
    if seed_cli is not None:
        params["seed"] = int(seed_cli)
    return params


def load_config(config_path, overrides, experiment, seed_cli=None) -> RunConfig:
    parser = _read_config(config_path, overrides)
    block = _parse_block(parser)
    pert = _parse_pert(parser)
    params = _parse_experiment_params(parser, experiment, seed_cli)
    return RunConfig(
        experiment=experiment,
        block=block,
        pert=pert,
        params=params,
        seed=params["seed"],
    )


def _resolve_interval(cfg, model):
    spec = cfg.params["interval"]
    if spec == "auto":
        intervals = admissible_intervals(cfg.block, margin=cfg.params["margin"])
        return max(intervals, key=lambda i: i.width)
    lo, hi = spec
    if not lo < hi:
        raise ValidationError("interval bounds must satisfy lo < hi")
    from .bands import AdmissibleInterval, interval_constants

    eps_i, c_i = interval_constants(cfg.block, (lo, hi))
    return AdmissibleInterval(lo, hi, eps_i, c_i, cfg.params["margin"])


def _meta_lines(cfg, model, extra=None):
    lines = [
        f"# jostspec={__version__} experiment={cfg.experiment} model={model.fingerprint()} seed={cfg.seed}",
        f"# q={cfg.block.q} a={','.join(_fmt(x) for x in cfg.block.a_bg)} "
        f"b={','.join(_fmt(x) for x in cfg.block.b_bg)} pert={cfg.pert.kind}",
    ]
    if extra:
        lines.append("# " + extra)
    return lines


def _run_bands(cfg, model, threads):
    bs = band_edges(cfg.block)
    rows = [["lo", "hi"]]
    for lo, hi in bs.bands:
        rows.append([_fmt(lo), _fmt(hi)])
    return rows, _meta_lines(cfg, model), 0


def _run_density(cfg, model, threads):
    p = cfg.params
    interval = _resolve_interval(cfg, model)
    n = p["N"]
    extra = f"N={n} interval=[{_fmt(interval.lo)},{_fmt(interval.hi)}] method={p['method']}"
    key = density_curve(
        model,
        n,
        interval,
        p["grid_points"],
        method="key_formula",
        precision=p["precision"],
        workers=threads,
    )
    if p["method"] == "key_formula":
        rows = [["E", "value"]]
        for e, v in zip(key.grid, key.values):
            rows.append([_fmt(e), _fmt(v)])
        return rows, _meta_lines(cfg, model, extra), 0
    oracle = density_curve(
        model, n, interval, p["grid_points"], method="oracle", workers=threads
    )
    if p["method"] == "oracle":
        rows = [["E", "value"]]
        for e, v in zip(oracle.grid, oracle.values):
            rows.append([_fmt(e), _fmt(v)])
        return rows, _meta_lines(cfg, model, extra), 0
    rows = [["E", "value", "value_oracle", "rel_err"]]
    for e, v, w in zip(key.grid, key.values, oracle.values):
        rel = abs(v - w) / max(abs(v), 1e-300)
        rows.append([_fmt(e), _fmt(v), _fmt(w), _fmt(rel)])
    return rows, _meta_lines(cfg, model, extra), 0


def _run_compare(cfg, model, threads):
    p = cfg.params
    interval = _resolve_interval(cfg, model)
    n = p["N"]
    grid = np.linspace(interval.lo, interval.hi, p["grid_points"])
    key = density_curve(
        model, n, interval, p["grid_points"], method="key_formula", workers=threads
    )
    oracle = density_curve(
        model, n, interval, p["grid_points"], method="oracle", workers=threads
    )
    rows = [["E", "density_key", "density_oracle", "rel_err"]]
    worst = 0.0
    for e, v, w in zip(grid, key.values, oracle.values):
        rel = abs(v - w) / max(abs(v), 1e-300)
        worst = max(worst, rel)
        rows.append([_fmt(e), _fmt(v), _fmt(w), _fmt(rel)])
    extra = f"N={n} interval=[{_fmt(interval.lo)},{_fmt(interval.hi)}] max_rel_err={_fmt(worst)} tol={_fmt(p['tol'])}"
    code = 0 if worst < p["tol"] else 3
    return rows, _meta_lines(cfg, model, extra), code


def _run_entropy(cfg, model, threads):
    p = cfg.params
    interval = _resolve_interval(cfg, model)
    rows = [["N", "I_lo", "I_hi", "value", "quad_order"]]
    for n in p["N_list"]:
        for order in (p["quad_order"], 2 * p["quad_order"]):
            val = entropy_integral(model, n, interval, quad_order=order, precision=p["precision"])
            rows.append([str(n), _fmt(interval.lo), _fmt(interval.hi), _fmt(val), str(order)])
    extra = f"interval=[{_fmt(interval.lo)},{_fmt(interval.hi)}]"
    return rows, _meta_lines(cfg, model, extra), 0


def _run_certify(cfg, model, threads):
    p = cfg.params
    interval = _resolve_interval(cfg, model)
    zeta = complex(interval.midpoint(), 0.5 * interval.eps_I)
    reports = [
        check_floquet_bound(cfg.block, interval),
        check_w_summability(model, zeta, p["n_grid"]),
        check_diagonal_products(model, interval, seed=cfg.seed),
        check_harmonic_hypotheses(model, p["N"], interval),
    ]
    rows = [["name", "passed", "constant_name", "constant_value", "worst_E", "worst_y"]]
    any_failed = False
    for rep in reports:
        any_failed = any_failed or not rep.passed
        worst_e = rep.worst_case.get("E", "")
        worst_y = rep.worst_case.get("y", "")
        for cname, cval in rep.measured.items():
            if isinstance(cval, (list, tuple)):
                continue
            rows.append(
                [
                    rep.name,
                    str(rep.passed).lower(),
                    cname,
                    _fmt(cval),
                    _fmt(worst_e) if worst_e != "" else "",
                    _fmt(worst_y) if worst_y != "" else "",
                ]
            )
    extra = f"N={p['N']} interval=[{_fmt(interval.lo)},{_fmt(interval.hi)}] eps_I={_fmt(interval.eps_I)}"
    return rows, _meta_lines(cfg, model, extra), 3 if any_failed else 0


_RUNNERS = {
    "bands": _run_bands,
    "density": _run_density,
    "entropy": _run_entropy,
    "certify": _run_certify,
    "compare": _run_compare,
}


def run(config_path, overrides=None, experiment=None, out_dir=".", threads=1, seed=None):
    """Execute one experiment; returns the process exit code.

    Output CSVs are assembled fully in memory and written only on success,
    so validation failures (exit 2) leave no files behind.
    """
    try:
        if experiment not in EXPERIMENTS:
            raise ValidationError(f"unknown experiment {experiment!r}")
        cfg = load_config(config_path, overrides, experiment, seed_cli=seed)
        model = make_model(cfg.block, cfg.pert)
        rows, meta, code = _RUNNERS[experiment](cfg, model, max(1, int(threads)))
    except JostspecError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 2

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{experiment}.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in meta:
            fh.write(line + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")
    return code


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="jostspec",
        description="Spectral experiments for perturbed periodic Jacobi operators.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="path to an INI config file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="section.key=value",
        help="override a config entry (repeatable)",
    )
    parser.add_argument("--out", default=".", help="output directory (default: .)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)
    code = run(
        args.config,
        overrides=args.overrides,
        experiment=args.experiment,
        out_dir=args.out,
        threads=args.threads,
        seed=args.seed,
    )
    return code


if __name__ == "__main__":
    raise SystemExit(main())
