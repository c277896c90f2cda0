"""Command-line entry point: ``vbkreg <subcommand> [options]``.

Subcommands
-----------
fit              fit VB and NW estimators to an ``x,y`` CSV over a grid
simulate         Monte Carlo RMSE table for a built-in or JSON scenario
mse-points       Monte Carlo MSE at fixed evaluation points
bias-check       bias against bandwidth, with the fitted log-log slope
clt-check        normal-limit check of the scaled estimation error
expansion-check  quadrature vs. series for the kernel-smoothing integrals
theory-report    bias coefficient, variance and optimal bandwidth per scenario

Results go to files (CSV per point, JSON summary) and a short table to
standard output; errors go to standard error with exit status 1.  Outputs
contain no timestamps or thread counts, so a fixed ``--seed`` gives
byte-identical files for any ``VBKREG_THREADS``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .clipping import ClipSpec, clip_alpha
from .estimators import BandwidthPlan, Sample, nw_estimate, pilot_alpha, vb_estimate
from .kernels import KERNEL_IDS
from .simulate import (
    BUILTIN_SCENARIOS,
    Distribution,
    PUBLISHED_RMSE,
    ScenarioConfig,
    bias_curve,
    builtin_scenario,
    clt_check,
    default_nw_grid,
    mc_mse_points,
    mc_rmse,
    nw_cv_bandwidth,
    scenario_model,
)
from .theory import (
    TrueModel,
    asymptotic_variance,
    expansion_check,
    optimal_bandwidth,
    residual_slope,
    theta_coefficient,
)

SUBCOMMANDS = ("fit", "simulate", "mse-points", "bias-check", "clt-check", "expansion-check", "theory-report")

# reduced-scale defaults; --full-scale restores the published n=5000, N=250
REDUCED_N = 2000
REDUCED_REPS = 40
REDUCED_SWEEP = (500, 1000, 2000)

# keys a JSON config may carry besides the scenario keys of ScenarioConfig.to_dict
_COMMAND_KEYS = {"scenario", "sweep_n", "points", "t", "h_grid", "estimator", "design", "region", "reg_ids"}


class CLIError(Exception):
    """User-facing error; reported on stderr with exit status 1."""


@dataclass
class RunConfig:
    """Parsed invocation: subcommand, paths and the merged override map."""

    subcommand: str
    input_path: Path | None = None
    output_path: Path | None = None
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise CLIError(f"unknown subcommand {self.subcommand!r}")


# ---------------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------------


def load_sample_csv(path) -> Sample:
    """Read a two-column ``x,y`` CSV with header, keeping row order.

    Errors name the offending line (the header is line 1).
    """
    path = Path(path)
    if not path.is_file():
        raise CLIError(f"{path}: no such file")
    xs, ys = [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CLIError(f"{path}: empty file")
        header = [h.strip().lower() for h in header]
        if len(header) > 2:
            raise CLIError(f"{path}: line 1: unexpected column {header[2]!r}")
        if header != ["x", "y"]:
            raise CLIError(f"{path}: line 1: header must be 'x,y', got {','.join(header)!r}")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) > 2:
                raise CLIError(f"{path}: line {line}: unexpected column (got {len(row)} fields)")
            if len(row) < 2:
                raise CLIError(f"{path}: line {line}: expected 2 fields, got {len(row)}")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                raise CLIError(f"{path}: line {line}: non-numeric value in {row!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise CLIError(f"{path}: line {line}: non-finite value in {row!r}")
            xs.append(x)
            ys.append(y)
    if not xs:
        raise CLIError(f"{path}: no data rows")
    return Sample(np.array(xs), np.array(ys))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    """CSV with header; floats in shortest round-trip form."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True, allow_nan=False) + "\n")


def _outputs(cfg: RunConfig, default_stem: str) -> tuple[Path, Path]:
    """``(csv, json)`` paths from ``--output`` (a stem; a .csv/.json suffix is dropped)."""
    out = cfg.output_path if cfg.output_path is not None else Path(default_stem)
    if out.suffix in (".csv", ".json"):
        out = out.with_suffix("")
    return out.with_name(out.name + ".csv"), out.with_name(out.name + ".json")


def _check_writable(path: Path) -> None:
    parent = path.parent if str(path.parent) else Path(".")
    if parent.exists() and not parent.is_dir():
        raise CLIError(f"{path}: parent is not a directory")
    try:
        parent.mkdir(parents=True, exist_ok=True)
        with path.open("a"):
            pass
    except OSError as exc:
        raise CLIError(f"{path}: not writable ({exc.strerror or exc})") from None


# ---------------------------------------------------------------------------
# argument parsing and config merging
# ---------------------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _int_list(text: str) -> list[int]:
    vals = _float_list(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vbkreg", description="Variable-bandwidth kernel regression tools.")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file of overrides (unknown keys rejected)")
    common.add_argument("--output", "-o", type=Path, help="output path or stem")
    common.add_argument("--input", "-i", type=Path, help="input CSV with header x,y")
    common.add_argument("--seed", type=int)
    common.add_argument("--n", type=int, help="sample size")
    common.add_argument("--reps", type=int, help="Monte Carlo replications")
    common.add_argument("--h1", type=float, help="pilot bandwidth")
    common.add_argument("--h2", type=float, help="final VB bandwidth")
    common.add_argument("--h-nw", type=float, help="fixed NW bandwidth (default: LOO-CV)")
    common.add_argument("--clip-c", type=float)
    common.add_argument("--clip-t0", type=float)
    common.add_argument("--kernel", choices=KERNEL_IDS)
    common.add_argument("--grid", type=_float_list, help="comma-separated evaluation points or bandwidths")
    common.add_argument("--t", type=float, help="evaluation point")
    common.add_argument("--full-scale", action="store_true", help="published sizes (slow)")

    sub.add_parser("fit", parents=[common], help="fit both estimators to a CSV sample").add_argument(
        "--grid-size", type=int, default=200, help="points in the default grid"
    )
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo RMSE table")
    p.add_argument("scenario", nargs="?", help=f"built-in id: {', '.join(BUILTIN_SCENARIOS)}")
    p.add_argument("--sweep-n", type=_int_list, help="comma-separated sample sizes")
    p = sub.add_parser("mse-points", parents=[common], help="Monte Carlo MSE at fixed points")
    p.add_argument("scenario", nargs="?", default=None)
    p.add_argument("--reg-ids", type=_int_list)
    for name in ("bias-check", "clt-check", "expansion-check", "theory-report"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--reg-id", type=int, choices=(1, 2, 3))
        p.add_argument("--x-dist", type=str, help="e.g. 'student_t(4)' or 'normal(0,1)'")
        if name in ("bias-check", "clt-check"):
            p.add_argument("--estimator", choices=("ideal_vb", "nw", "true_vb"))
        if name == "bias-check":
            p.add_argument("--design", choices=("random", "quantile"))
            p.add_argument("--noise-scale", type=float)
        if name == "clt-check":
            p.add_argument("--eps-dist", type=str)
        if name == "theory-report":
            p.add_argument("--region", type=_float_list, help="a,b")
    return parser


_FLAG_KEYS = {
    "seed": "seed",
    "n": "n",
    "reps": "reps",
    "h1": "h1",
    "h2": "h2",
    "h_nw": "h_nw",
    "clip_c": "clip_c",
    "clip_t0": "clip_t0",
    "kernel": "kernel",
    "grid": "grid",
    "t": "t",
    "scenario": "scenario",
    "sweep_n": "sweep_n",
    "reg_ids": "reg_ids",
    "reg_id": "reg_id",
    "x_dist": "x_dist",
    "eps_dist": "eps_dist",
    "estimator": "estimator",
    "design": "design",
    "noise_scale": "noise_scale",
    "region": "region",
    "grid_size": "grid_size",
}


def _load_config(path: Path) -> dict:
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise CLIError(f"{path}: no such config file") from None
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise CLIError(f"{path}: config must be a JSON object")
    allowed = set(ScenarioConfig().to_dict()) | _COMMAND_KEYS | {"h_nw"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise CLIError(f"{path}: unknown config keys {unknown}")
    if "h_grid" in data and "grid" not in data:
        data["grid"] = data.pop("h_grid")
    if "points" in data and "grid" not in data:
        data["grid"] = data.pop("points")
    return data


def parse_run_config(argv=None) -> tuple[RunConfig, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    overrides = _load_config(args.config) if args.config is not None else {}
    for attr, key in _FLAG_KEYS.items():
        val = getattr(args, attr, None)
        if val is not None:
            overrides[key] = val
    overrides["full_scale"] = bool(args.full_scale)
    return RunConfig(args.subcommand, args.input, args.output, overrides), args


def _clip(ov: dict) -> ClipSpec:
    base = ClipSpec()
    return ClipSpec(c=float(ov.get("clip_c", base.c)), t0=float(ov.get("clip_t0", base.t0)))


def _scenario(ov: dict, default_name: str | None) -> tuple[ScenarioConfig, dict]:
    """Built-in scenario (if named) with config and flag overrides applied."""
    name = ov.get("scenario", default_name)
    if name is not None:
        try:
            cfg, extras = builtin_scenario(name)
        except ValueError as exc:
            raise CLIError(str(exc)) from None
    else:
        cfg, extras = ScenarioConfig(name="custom"), {}
    if not ov.get("full_scale"):
        cfg = replace(cfg, n=REDUCED_N, reps=REDUCED_REPS)
        if "sweep_n" in extras:
            extras["sweep_n"] = REDUCED_SWEEP
    keys = set(ScenarioConfig().to_dict())
    data = {k: v for k, v in ov.items() if k in keys}
    try:
        cfg = ScenarioConfig.from_dict(data, base=cfg)
    except (TypeError, ValueError) as exc:
        raise CLIError(str(exc)) from None
    if "sweep_n" in ov:
        extras["sweep_n"] = tuple(int(v) for v in ov["sweep_n"])
    if "grid" in ov:
        extras["points"] = tuple(float(v) for v in ov["grid"])
    if "reg_ids" in ov:
        extras["reg_ids"] = tuple(int(v) for v in ov["reg_ids"])
    return cfg, extras


def _model(ov: dict, reg_id: int, x_dist: str, eps: str | None = None, noise: float = 0.3) -> TrueModel:
    x = ov.get("x_dist", x_dist)
    e = ov.get("eps_dist", eps if eps is not None else "uniform(-0.5, 0.5)")
    try:
        cfg = ScenarioConfig(
            reg_id=int(ov.get("reg_id", reg_id)),
            x_dist=Distribution.parse(x) if isinstance(x, str) else x,
            eps_dist=Distribution.parse(e) if isinstance(e, str) else e,
            noise_scale=float(ov.get("noise_scale", noise)),
        )
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    return scenario_model(cfg), cfg


def _print_table(title: str, header, rows) -> None:
    widths = [max(len(str(h)), 12) for h in header]
    print(title)
    print("  ".join(str(h).rjust(w) for h, w in zip(header, widths)))
    for row in rows:
        cells = [f"{v:.6g}" if isinstance(v, float) else str(v) for v in row]
        print("  ".join(c.rjust(w) for c, w in zip(cells, widths)))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def run_fit(cfg: RunConfig) -> int:
    """Fit the two-stage VB and NW estimators over a grid and write a CSV."""
    if cfg.input_path is None:
        raise CLIError("fit needs --input")
    ov = cfg.overrides
    out = cfg.output_path if cfg.output_path is not None else Path("fit.csv")
    _check_writable(out)
    sample = load_sample_csv(cfg.input_path)
    if "grid" in ov:
        grid = np.asarray(ov["grid"], dtype=float)
    else:
        size = int(ov.get("grid_size", 200))
        if size < 1:
            raise CLIError("--grid-size must be positive")
        grid = np.linspace(sample.x.min(), sample.x.max(), size)
    plan = BandwidthPlan.default(sample.n)
    try:
        plan = BandwidthPlan(float(ov.get("h1", plan.h1)), float(ov.get("h2", plan.h2)))
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    kernel = ov.get("kernel", "tricube")
    clip = _clip(ov)
    alpha = pilot_alpha(sample, plan.h1, kernel, clip)
    vk = vb_estimate(sample, grid, plan.h2, kernel, alpha)
    if "h_nw" in ov:
        h_nw = float(ov["h_nw"])
    elif sample.n >= 3:
        h_nw = nw_cv_bandwidth(sample, "gaussian_truncated", default_nw_grid(sample))
    else:
        h_nw = plan.h2
    nw = nw_estimate(sample, grid, h_nw, "gaussian_truncated")
    rows = zip(grid, vk.value, nw.value, vk.ok, nw.ok)
    write_csv(out, ("t", "vkre", "nwe", "vkre_ok", "nwe_ok"), rows)
    print(f"n={sample.n} h1={plan.h1:.6g} h2={plan.h2:.6g} h_nw={h_nw:.6g} points={grid.size} -> {out}")
    return 0


def run_scenario_table(cfg: RunConfig) -> int:
    """Monte Carlo RMSE of NWE and VKRE for a scenario (or an n sweep)."""
    ov = cfg.overrides
    scen, extras = _scenario(ov, None)
    if "scenario" not in ov and ov.get("name") is None and "reg_id" not in ov:
        raise CLIError(f"simulate needs a scenario id ({', '.join(BUILTIN_SCENARIOS)}) or --config")
    if "points" in extras and "sweep_n" not in extras:
        raise CLIError(f"{scen.name} is a fixed-point table; use mse-points")
    csv_path, json_path = _outputs(cfg, scen.name or "simulate")
    _check_writable(csv_path)
    _check_writable(json_path)
    sizes = extras.get("sweep_n", (scen.n,))
    runs = []
    for n in sizes:
        c = scen if n == scen.n else replace(scen, n=int(n))
        try:
            runs.append(mc_rmse(c))
        except (RuntimeError, ValueError) as exc:
            raise CLIError(f"{scen.name} n={n}: {exc}") from None
    rows = [(r.scenario.name, r.scenario.n, r.scenario.reps, r.nwe_rmse, r.vkre_rmse) for r in runs]
    write_csv(csv_path, ("scenario", "n", "reps", "nwe_rmse", "vkre_rmse"), rows)
    summary = {"runs": [r.to_dict() for r in runs]}
    if scen.name in PUBLISHED_RMSE:
        summary["published"] = {"nwe_rmse": PUBLISHED_RMSE[scen.name][0], "vkre_rmse": PUBLISHED_RMSE[scen.name][1]}
    write_json(json_path, summary)
    _print_table(
        f"{scen.name}  reps={scen.reps}  x~{scen.x_dist}  eps~{scen.eps_dist}",
        ("n", "NWE", "VKRE"),
        [(r.scenario.n, r.nwe_rmse, r.vkre_rmse) for r in runs],
    )
    return 0


def run_mse_points(cfg: RunConfig) -> int:
    """Monte Carlo MSE at the table's evaluation points for each regression curve."""
    ov = cfg.overrides
    scen, extras = _scenario(ov, "table4")
    points = extras.get("points")
    if points is None:
        raise CLIError("no evaluation points; pass --grid or choose table4..table7")
    reg_ids = extras.get("reg_ids", (scen.reg_id,))
    if "reg_id" in ov:
        reg_ids = (int(ov["reg_id"]),)
    csv_path, json_path = _outputs(cfg, scen.name or "mse-points")
    _check_writable(csv_path)
    _check_writable(json_path)
    rows, summary = [], {"runs": []}
    for reg in reg_ids:
        try:
            rep = mc_mse_points(replace(scen, reg_id=int(reg)), points)
        except (RuntimeError, ValueError) as exc:
            raise CLIError(f"reg {reg}: {exc}") from None
        pp = rep.per_point_mse
        for i in range(len(pp["t"])):
            rows.append((reg, pp["t"][i], pp["truth"][i], pp["nwe_mse"][i], pp["vkre_mse"][i]))
        summary["runs"].append(rep.to_dict())
    write_csv(csv_path, ("reg_id", "t", "truth", "nwe_mse", "vkre_mse"), rows)
    write_json(json_path, summary)
    _print_table(
        f"{scen.name}  n={scen.n}  reps={scen.reps}", ("reg", "t", "NWE", "VKRE"), [(r[0], r[1], r[3], r[4]) for r in rows]
    )
    return 0


def run_bias_check(cfg: RunConfig) -> int:
    """Bias over a bandwidth grid; defaults to the noiseless normal-design sine model."""
    ov = cfg.overrides
    noise = float(ov.get("noise_scale", 0.0))
    model, mcfg = _model(ov, 1, "normal(0, 1)", noise=noise)
    grid = ov.get("grid", [0.5, 0.35, 0.25, 0.18, 0.12])
    t = float(ov.get("t", 1.0))
    csv_path, json_path = _outputs(cfg, "bias-check")
    _check_writable(csv_path)
    try:
        curve = bias_curve(
            model,
            mcfg.x_dist,
            t,
            grid,
            int(ov.get("n", 20000)),
            int(ov.get("reps", 1)),
            int(ov.get("seed", 20240601)),
            ov.get("estimator", "ideal_vb"),
            eps_dist=mcfg.eps_dist,
            noise_scale=noise,
            design=ov.get("design", "quantile"),
            kernel=ov.get("kernel", "tricube"),
            clip=_clip(ov),
        )
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    rows = list(zip(curve.h, curve.bias, curve.se, curve.usable))
    write_csv(csv_path, ("h", "bias", "se", "usable"), rows)
    write_json(json_path, {"model": model.name, "t": t, "slope": curve.slope, "h": curve.h, "bias": curve.bias})
    _print_table(f"{model.name} t={t}  slope={curve.slope:.4f}", ("h", "bias"), [(r[0], r[1]) for r in rows])
    return 0


def run_clt_check(cfg: RunConfig) -> int:
    """Normal-limit check on the standard T(4) scenario at ``t = 1``."""
    ov = cfg.overrides
    model, mcfg = _model(ov, 2, "student_t(4)")
    n = int(ov.get("n", 4000))
    h = float(ov.get("h2", BandwidthPlan.default(n).h2))
    _, json_path = _outputs(cfg, "clt-check")
    _check_writable(json_path)
    try:
        res = clt_check(
            model,
            mcfg.x_dist,
            mcfg.eps_dist,
            float(ov.get("t", 1.0)),
            n,
            h,
            int(ov.get("reps", 500)),
            int(ov.get("seed", 12345)),
            ov.get("estimator", "ideal_vb"),
            noise_scale=mcfg.noise_scale,
            kernel=ov.get("kernel", "tricube"),
            clip=_clip(ov),
            h1=ov.get("h1"),
        )
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    res["model"] = model.name
    write_json(json_path, res)
    _print_table("clt-check", ("statistic", "value"), [(k, res[k]) for k in ("var_ratio", "ks_stat", "ks_crit_1pct", "mean_z", "centre")])
    return 0


def run_expansion_check(cfg: RunConfig) -> int:
    """Quadrature against series for ``K`` and ``K^2``; eta = N(0,1) density, xi = alpha(q)."""
    ov = cfg.overrides
    model, _ = _model(ov, 2, "student_t(4)")
    clip = _clip(ov)
    kernel = ov.get("kernel", "tricube")
    t = float(ov.get("t", 1.0))
    grid = ov.get("grid", [0.4, 0.2, 0.1, 0.05])

    def eta(s):
        return np.exp(-0.5 * np.square(s)) / math.sqrt(2.0 * math.pi)

    def xi(s):
        return clip_alpha(clip, model.q(s))

    csv_path, json_path = _outputs(cfg, "expansion-check")
    _check_writable(csv_path)
    rows, slopes = [], {}
    try:
        for squared in (False, True):
            reps = [expansion_check(eta, xi, t, float(h), kernel, squared=squared) for h in grid]
            label = "K2" if squared else "K"
            slopes[label] = residual_slope(reps)
            rows += [(label, r.h, r.lhs, r.series, r.residual) for r in reps]
    except (ValueError, RuntimeError) as exc:
        raise CLIError(str(exc)) from None
    write_csv(csv_path, ("variant", "h", "lhs", "series", "residual"), rows)
    write_json(json_path, {"model": model.name, "t": t, "residual_slope": slopes})
    _print_table(f"{model.name} t={t}", ("variant", "slope"), list(slopes.items()))
    return 0


def run_theory_report(cfg: RunConfig) -> int:
    """theta, asymptotic variance and h2* for each RMSE-table scenario."""
    ov = cfg.overrides
    t = float(ov.get("t", 1.0))
    region = tuple(ov.get("region", (0.6, 1.4)))
    if len(region) != 2 or not region[0] < region[1]:
        raise CLIError("--region must be 'a,b' with a < b")
    clip = _clip(ov)
    kernel = ov.get("kernel", "tricube")
    names = [ov["scenario"]] if "scenario" in ov else [k for k in BUILTIN_SCENARIOS if k.startswith(("table1", "table2"))]
    _, json_path = _outputs(cfg, "theory-report")
    _check_writable(json_path)
    report, rows = {}, []
    for name in names:
        scen, _ = _scenario({**ov, "scenario": name, "full_scale": True}, None)
        model = scenario_model(scen)
        entry = {"model": model.name, "t": t, "region": region, "n": scen.n}
        try:
            entry["theta"] = float(theta_coefficient(model, t, kernel=kernel))
            entry["variance"] = float(asymptotic_variance(model, t, kernel))
            entry["h_opt"] = optimal_bandwidth(model, kernel, scen.n, region, clip=clip)
        except (ValueError, RuntimeError) as exc:
            raise CLIError(f"{name}: {exc}") from None
        entry["h2_rule"] = BandwidthPlan.default(scen.n).h2
        report[name] = entry
        rows.append((name, entry["theta"], entry["variance"], entry["h_opt"]))
    write_json(json_path, report)
    _print_table(f"t={t} region={region}", ("scenario", "theta", "variance", "h_opt"), rows)
    return 0


_RUNNERS = {
    "fit": run_fit,
    "simulate": run_scenario_table,
    "mse-points": run_mse_points,
    "bias-check": run_bias_check,
    "clt-check": run_clt_check,
    "expansion-check": run_expansion_check,
    "theory-report": run_theory_report,
}


def main(argv=None) -> int:
    try:
        cfg, _ = parse_run_config(argv)
        return _RUNNERS[cfg.subcommand](cfg)
    except CLIError as exc:
        print(f"vbkreg: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"vbkreg: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
