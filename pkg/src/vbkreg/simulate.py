"""Seeded Monte Carlo experiments comparing VB regression with Nadaraya-Watson.

Replication ``j`` of a run draws from its own generator, derived from
``(seed, j)`` with :class:`numpy.random.SeedSequence`, so results do not
depend on execution order or on the number of worker threads.
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .clipping import ClipSpec
from .estimators import (
    BandwidthPlan,
    Sample,
    ideal_vb_estimate,
    nw_estimate,
    true_vb_estimate,
)
from .kernels import get_kernel
from .theory import TrueModel, asymptotic_variance, theta_coefficient

__all__ = [
    "Distribution",
    "draw",
    "rep_rng",
    "regression_function",
    "responses",
    "ScenarioConfig",
    "MCReport",
    "BiasCurve",
    "gen_regression_sample",
    "scenario_model",
    "rmse",
    "default_nw_grid",
    "nw_cv_bandwidth",
    "mc_rmse",
    "mc_mse_points",
    "bias_curve",
    "bias_slope",
    "clt_check",
    "worker_count",
    "BUILTIN_SCENARIOS",
    "builtin_scenario",
]


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------

_KINDS = {"uniform": 2, "normal": 2, "student_t": 1, "cauchy": 2}
_ALIASES = {"u": "uniform", "unif": "uniform", "n": "normal", "norm": "normal", "t": "student_t"}


@dataclass(frozen=True)
class Distribution:
    """Design or error distribution.

    ``uniform(a, b)``, ``normal(mu, sd)``, ``student_t(df)`` or
    ``cauchy(loc, scale)``.
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if kind not in _KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if len(self.params) != _KINDS[kind]:
            raise ValueError(f"{kind} takes {_KINDS[kind]} parameter(s), got {len(self.params)}")
        p = self.params
        if kind == "uniform" and not p[1] > p[0]:
            raise ValueError("uniform needs b > a")
        if kind in ("normal", "cauchy") and not p[1] > 0:
            raise ValueError(f"{kind} scale must be positive")
        if kind == "student_t" and not (p[0] >= 1 and p[0] == int(p[0])):
            raise ValueError("student_t df must be an integer >= 1")

    @classmethod
    def uniform(cls, a, b):
        return cls("uniform", (a, b))

    @classmethod
    def normal(cls, mu=0.0, sd=1.0):
        return cls("normal", (mu, sd))

    @classmethod
    def student_t(cls, df):
        return cls("student_t", (df,))

    @classmethod
    def cauchy(cls, loc=0.0, scale=1.0):
        return cls("cauchy", (loc, scale))

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        """Parse ``'kind(p1, p2)'`` or ``'U[a,b]'`` notation."""
        m = re.fullmatch(r"\s*([A-Za-z_]+)\s*[\(\[]\s*([^\)\]]*)[\)\]]\s*", text)
        if not m:
            raise ValueError(f"cannot parse distribution {text!r}")
        params = tuple(float(v) for v in m.group(2).split(",") if v.strip())
        return cls(m.group(1).lower(), params)

    def __str__(self):
        return f"{self.kind}({', '.join(repr(p) for p in self.params)})"

    @property
    def frozen(self):
        """The matching ``scipy.stats`` frozen distribution (for densities and quantiles)."""
        p = self.params
        if self.kind == "uniform":
            return stats.uniform(loc=p[0], scale=p[1] - p[0])
        if self.kind == "normal":
            return stats.norm(loc=p[0], scale=p[1])
        if self.kind == "student_t":
            return stats.t(df=p[0])
        return stats.cauchy(loc=p[0], scale=p[1])

    def pdf(self, x):
        return self.frozen.pdf(x)

    @property
    def variance(self) -> float:
        return float(self.frozen.var())


def draw(dist: Distribution, rng: np.random.Generator, size=None):
    """Variates of ``dist``.

    Student t is built as ``Z / sqrt(V / df)`` with ``V`` a sum of ``df``
    squared normals; Cauchy by inversion, ``loc + scale tan(pi (U - 1/2))``.
    """
    p = dist.params
    if dist.kind == "uniform":
        return p[0] + (p[1] - p[0]) * rng.random(size)
    if dist.kind == "normal":
        return p[0] + p[1] * rng.standard_normal(size)
    if dist.kind == "student_t":
        df = int(p[0])
        z = rng.standard_normal(size)
        shape = (df,) if size is None else (df,) + tuple(np.atleast_1d(size))
        v = np.sum(rng.standard_normal(shape) ** 2, axis=0)
        return z / np.sqrt(v / df)
    return p[0] + p[1] * np.tan(np.pi * (rng.random(size) - 0.5))


def rep_rng(seed: int, rep_index: int) -> np.random.Generator:
    """Independent generator for replication ``rep_index`` of run ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(rep_index),))))


# ---------------------------------------------------------------------------
# regression scenarios
# ---------------------------------------------------------------------------

_REGRESSIONS: dict[int, tuple[Callable, Callable]] = {
    1: (lambda x: 2.0 + np.sin(0.75 * x), lambda x: 0.75 * np.cos(0.75 * x)),
    2: (lambda x: 1.0 / (1.0 + x * x), lambda x: -2.0 * x / (1.0 + x * x) ** 2),
    3: (lambda x: np.log(np.abs(x)), lambda x: 1.0 / x),
}


def regression_function(reg_id: int) -> tuple[Callable, Callable]:
    """``(r, r')`` for built-in curve 1 (2 + sin 0.75x), 2 (1/(1+x^2)) or 3 (log|x|)."""
    try:
        return _REGRESSIONS[int(reg_id)]
    except (KeyError, ValueError):
        raise ValueError(f"reg_id must be 1, 2 or 3, got {reg_id!r}") from None


def responses(r: Callable, x, eps, noise_scale: float = 0.3):
    """``Y = r(X) + noise_scale * eps``."""
    return r(np.asarray(x, dtype=float)) + noise_scale * np.asarray(eps, dtype=float)


def _config_default_clip():
    return ClipSpec()


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation design.

    ``plan`` of ``None`` means the default rule ``h1 = 0.6 n^(-1/7)``,
    ``h2 = n^(-1/9)/4``.  ``regression`` overrides ``reg_id`` with a custom
    curve (library only, not serialized).
    """

    reg_id: int = 2
    x_dist: Distribution = field(default_factory=lambda: Distribution.student_t(4))
    eps_dist: Distribution = field(default_factory=lambda: Distribution.uniform(-0.5, 0.5))
    noise_scale: float = 0.3
    n: int = 5000
    reps: int = 250
    seed: int = 20240601
    plan: BandwidthPlan | None = None
    clip: ClipSpec = field(default_factory=_config_default_clip)
    kernel: str = "tricube"
    nw_kernel: str = "gaussian_truncated"
    nw_grid_size: int = 20
    name: str = ""
    regression: Callable | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.n < 10:
            raise ValueError("n must be at least 10")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.regression is None:
            regression_function(self.reg_id)
        get_kernel(self.kernel)
        get_kernel(self.nw_kernel)

    @property
    def bandwidths(self) -> BandwidthPlan:
        return self.plan if self.plan is not None else BandwidthPlan.default(self.n)

    @property
    def r(self) -> Callable:
        return self.regression if self.regression is not None else regression_function(self.reg_id)[0]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "reg_id": self.reg_id,
            "x_dist": str(self.x_dist),
            "eps_dist": str(self.eps_dist),
            "noise_scale": self.noise_scale,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "h1": self.bandwidths.h1,
            "h2": self.bandwidths.h2,
            "clip_c": self.clip.c,
            "clip_t0": self.clip.t0,
            "kernel": self.kernel,
            "nw_kernel": self.nw_kernel,
            "nw_grid_size": self.nw_grid_size,
        }

    @classmethod
    def from_dict(cls, data: dict, base: "ScenarioConfig | None" = None) -> "ScenarioConfig":
        """Build from JSON-style keys (those of :meth:`to_dict`); unknown keys are rejected."""
        allowed = set(cls().to_dict())
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        cfg = base if base is not None else cls()
        kw = {}
        for key in ("name", "reg_id", "noise_scale", "n", "reps", "seed", "kernel", "nw_kernel", "nw_grid_size"):
            if key in data:
                kw[key] = data[key]
        for key in ("x_dist", "eps_dist"):
            if key in data:
                kw[key] = Distribution.parse(data[key]) if isinstance(data[key], str) else data[key]
        if "clip_c" in data or "clip_t0" in data:
            kw["clip"] = ClipSpec(c=data.get("clip_c", cfg.clip.c), t0=data.get("clip_t0", cfg.clip.t0))
        if "h1" in data or "h2" in data:
            n = kw.get("n", cfg.n)
            plan = cfg.plan if cfg.plan is not None else BandwidthPlan.default(n)
            kw["plan"] = BandwidthPlan(data.get("h1", plan.h1), data.get("h2", plan.h2))
        elif "n" in kw and cfg.plan is None:
            kw["plan"] = None
        for key in ("reg_id", "n", "reps", "seed", "nw_grid_size"):
            if key in kw:
                kw[key] = int(kw[key])
        return replace(cfg, **kw)


def gen_regression_sample(cfg: ScenarioConfig, rep_index: int) -> Sample:
    """Sample ``rep_index`` of the scenario; identical for identical ``(seed, rep_index)``."""
    rng = rep_rng(cfg.seed, rep_index)
    x = draw(cfg.x_dist, rng, cfg.n)
    if cfg.regression is None and cfg.reg_id == 3:
        zero = x == 0.0
        while np.any(zero):
            x[zero] = draw(cfg.x_dist, rng, int(zero.sum()))
            zero = x == 0.0
    eps = draw(cfg.eps_dist, rng, cfg.n)
    return Sample(x, responses(cfg.r, x, eps, cfg.noise_scale))


def scenario_model(cfg: ScenarioConfig) -> TrueModel:
    """True density, curve and (homoscedastic) noise variance of a built-in scenario."""
    if cfg.regression is not None:
        raise ValueError("custom regressions have no built-in derivative; build a TrueModel directly")
    r, rp = regression_function(cfg.reg_id)
    var = cfg.noise_scale**2 * cfg.eps_dist.variance
    return TrueModel(
        f=cfg.x_dist.pdf,
        r=r,
        rprime=rp,
        sigma2=lambda t: np.full(np.shape(t), var),
        name=f"reg{cfg.reg_id}/{cfg.x_dist}",
    )


# ---------------------------------------------------------------------------
# error measures and the NW baseline
# ---------------------------------------------------------------------------


def rmse(truth, est, return_excluded: bool = False):
    """Root mean squared deviation over pairs where ``est`` is finite.

    NaN estimates (flagged points) are dropped pairwise.

    Raises
    ------
    ValueError
        On length mismatch or when every pair is excluded.
    """
    truth = np.asarray(truth, dtype=float).ravel()
    est = np.asarray(est, dtype=float).ravel()
    if truth.shape != est.shape:
        raise ValueError("truth and est lengths differ")
    keep = np.isfinite(est)
    if not keep.any():
        raise ValueError("every estimate is flagged; RMSE undefined")
    value = float(np.sqrt(np.mean((truth[keep] - est[keep]) ** 2)))
    excluded = int(keep.size - keep.sum())
    return (value, excluded) if return_excluded else value


def default_nw_grid(sample: Sample, size: int = 20) -> np.ndarray:
    """Log grid ``[0.05, 2] * scale * n^(-1/5)`` with a robust spread as ``scale``."""
    x = sample.x
    iqr = np.subtract(*np.percentile(x, [75, 25])) / 1.349
    sd = float(np.std(x))
    scale = min(sd, iqr) if iqr > 0 else sd
    if not scale > 0:
        scale = 1.0
    return np.geomspace(0.05, 2.0, size) * scale * sample.n ** (-0.2)


def _loo_scores(sample: Sample, kernel, h_grid, block: int = 256) -> np.ndarray:
    """Mean leave-one-out squared error per bandwidth over non-empty windows.

    Observations are sorted so each block of rows only meets the columns
    inside the kernel support for that bandwidth.
    """
    order = np.argsort(sample.x, kind="stable")
    x, y = sample.x[order], sample.y[order]
    n = x.size
    kernel = get_kernel(kernel)
    T = kernel.support
    sq_err = np.zeros(len(h_grid))
    used = np.zeros(len(h_grid), dtype=np.int64)
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        rows = np.arange(hi - lo)
        for j, h in enumerate(h_grid):
            c0 = int(np.searchsorted(x, x[lo] - T * h, side="left"))
            c1 = int(np.searchsorted(x, x[hi - 1] + T * h, side="right"))
            k = kernel((x[lo:hi, None] - x[None, c0:c1]) / h)
            k[rows, lo - c0 + rows] = 0.0
            den = k.sum(axis=1)
            ok = den / ((n - 1) * h) >= 1e-12
            num = np.einsum("ij,j->i", k, y[c0:c1])
            pred = num[ok] / den[ok]
            sq_err[j] += np.sum((y[lo:hi][ok] - pred) ** 2)
            used[j] += int(ok.sum())
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(used > 0, sq_err / np.maximum(used, 1), np.inf)


def nw_cv_bandwidth(sample: Sample, kernel="gaussian_truncated", h_grid=None) -> float:
    """Grid bandwidth minimizing leave-one-out squared prediction error.

    Points whose leave-one-out window is empty are left out of that
    bandwidth's average; a bandwidth is unusable only when every window is
    empty.  Ties go to the smaller bandwidth.
    """
    kernel = get_kernel(kernel)
    if h_grid is None:
        h_grid = default_nw_grid(sample)
    h_grid = np.asarray(h_grid, dtype=float)
    if h_grid.size == 0:
        raise ValueError("empty bandwidth grid")
    if sample.n < 2:
        raise ValueError("leave-one-out needs at least two observations")
    scores = _loo_scores(sample, kernel, h_grid)
    if not np.any(np.isfinite(scores)):
        raise ValueError("every grid bandwidth leaves all leave-one-out windows empty")
    best = np.min(scores)
    return float(np.min(h_grid[scores == best]))


# ---------------------------------------------------------------------------
# Monte Carlo harness
# ---------------------------------------------------------------------------


def worker_count(threads: int | None = None) -> int:
    """Resolve a worker count; ``None`` reads ``VBKREG_THREADS`` (0 or unset = all CPUs)."""
    if threads is None:
        threads = int(os.environ.get("VBKREG_THREADS", "0") or 0)
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def _map_reps(fn, reps: int, threads: int | None):
    workers = min(worker_count(threads), reps)
    if workers <= 1:
        return [fn(j) for j in range(reps)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(reps)))


@dataclass
class MCReport:
    """Summary of a Monte Carlo run; all averages are over successful replications."""

    scenario: ScenarioConfig
    nwe_rmse: float
    vkre_rmse: float
    per_point_mse: dict | None = None
    per_rep: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "scenario": self.scenario.to_dict(),
            "nwe_rmse": self.nwe_rmse,
            "vkre_rmse": self.vkre_rmse,
            "diagnostics": self.diagnostics,
        }
        if self.per_point_mse is not None:
            out["per_point_mse"] = {k: [float(v) for v in vals] for k, vals in self.per_point_mse.items()}
        return out


def _fit_rep(cfg: ScenarioConfig, j: int, points=None):
    sample = gen_regression_sample(cfg, j)
    at = sample.x if points is None else np.asarray(points, dtype=float)
    h_nw = nw_cv_bandwidth(sample, cfg.nw_kernel, default_nw_grid(sample, cfg.nw_grid_size))
    nwe = nw_estimate(sample, at, h_nw, cfg.nw_kernel).value
    vkre = true_vb_estimate(sample, at, cfg.bandwidths, cfg.kernel, cfg.clip).value
    return at, nwe, vkre, h_nw


def _safe(fn):
    def wrapped(j):
        try:
            return fn(j)
        except ValueError as exc:
            return exc

    return wrapped


def mc_rmse(cfg: ScenarioConfig, threads: int | None = None) -> MCReport:
    """Average RMSE of NW (CV bandwidth) and the two-stage VB estimator at the sampled X_i."""

    def one(j):
        at, nwe, vkre, h_nw = _fit_rep(cfg, j)
        truth = cfg.r(at)
        a, ea = rmse(truth, nwe, return_excluded=True)
        b, eb = rmse(truth, vkre, return_excluded=True)
        return a, b, ea, eb, h_nw

    results = _map_reps(_safe(one), cfg.reps, threads)
    good = [r for r in results if not isinstance(r, Exception)]
    failures = [str(r) for r in results if isinstance(r, Exception)]
    if not good:
        raise RuntimeError(f"all {cfg.reps} replications failed; first error: {failures[0]}")
    arr = np.array(good, dtype=float)
    diagnostics = {
        "reps_ok": len(good),
        "reps_failed": len(failures),
        "failures": failures[:5],
        "nwe_excluded_points": int(arr[:, 2].sum()),
        "vkre_excluded_points": int(arr[:, 3].sum()),
        "nw_bandwidth_mean": float(np.mean(arr[:, 4])),
        "nwe_rmse_sd": float(np.std(arr[:, 0], ddof=1)) if len(good) > 1 else 0.0,
        "vkre_rmse_sd": float(np.std(arr[:, 1], ddof=1)) if len(good) > 1 else 0.0,
    }
    per_rep = {
        "rep": [j for j, r in enumerate(results) if not isinstance(r, Exception)],
        "nwe_rmse": arr[:, 0].tolist(),
        "vkre_rmse": arr[:, 1].tolist(),
        "nw_bandwidth": arr[:, 4].tolist(),
    }
    return MCReport(cfg, float(np.mean(arr[:, 0])), float(np.mean(arr[:, 1])), None, per_rep, diagnostics)


def mc_mse_points(cfg: ScenarioConfig, points, threads: int | None = None) -> MCReport:
    """Monte Carlo MSE of both estimators at fixed evaluation points."""
    points = np.asarray(points, dtype=float).ravel()
    if points.size == 0:
        raise ValueError("need at least one evaluation point")
    truth = cfg.r(points)

    def one(j):
        _, nwe, vkre, h_nw = _fit_rep(cfg, j, points)
        return (nwe - truth) ** 2, (vkre - truth) ** 2, h_nw

    results = _map_reps(_safe(one), cfg.reps, threads)
    good = [r for r in results if not isinstance(r, Exception)]
    failures = [str(r) for r in results if isinstance(r, Exception)]
    if not good:
        raise RuntimeError(f"all {cfg.reps} replications failed; first error: {failures[0]}")
    nw_sq = np.array([g[0] for g in good])
    vb_sq = np.array([g[1] for g in good])

    def avg(a):
        cnt = np.sum(np.isfinite(a), axis=0)
        with np.errstate(invalid="ignore"):
            return np.where(cnt > 0, np.nansum(a, axis=0) / np.maximum(cnt, 1), np.nan), a.shape[0] - cnt

    nw_mse, nw_miss = avg(nw_sq)
    vb_mse, vb_miss = avg(vb_sq)
    per_point = {"t": points, "truth": truth, "nwe_mse": nw_mse, "vkre_mse": vb_mse}
    diagnostics = {
        "reps_ok": len(good),
        "reps_failed": len(failures),
        "failures": failures[:5],
        "nwe_flagged": [int(v) for v in nw_miss],
        "vkre_flagged": [int(v) for v in vb_miss],
        "nw_bandwidth_mean": float(np.mean([g[2] for g in good])),
    }
    return MCReport(cfg, float("nan"), float("nan"), per_point, None, diagnostics)


# ---------------------------------------------------------------------------
# bias order and CLT diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BiasCurve:
    """Monte Carlo bias against bandwidth with the fitted log-log slope."""

    h: np.ndarray
    bias: np.ndarray
    se: np.ndarray
    usable: np.ndarray
    slope: float


def _design(x_dist: Distribution, n: int, design: str, rng):
    if design == "quantile":
        return x_dist.frozen.ppf((np.arange(n) + 0.5) / n)
    if design == "random":
        return draw(x_dist, rng, n)
    raise ValueError(f"design must be 'random' or 'quantile', got {design!r}")


def _point_estimator(model: TrueModel, estimator_kind: str, kernel, clip: ClipSpec, h1=None):
    if estimator_kind == "ideal_vb":
        return lambda s, t, h: ideal_vb_estimate(s, t, h, kernel, clip, model.q).value
    if estimator_kind == "nw":
        return lambda s, t, h: nw_estimate(s, t, h, kernel).value
    if estimator_kind == "true_vb":
        return lambda s, t, h: true_vb_estimate(
            s, t, BandwidthPlan(h1 if h1 is not None else BandwidthPlan.default(s.n).h1, h), kernel, clip
        ).value
    raise ValueError(f"unknown estimator kind {estimator_kind!r}")


def bias_curve(
    model: TrueModel,
    x_dist: Distribution,
    t: float,
    h_grid: Sequence[float],
    n: int,
    reps: int,
    seed: int,
    estimator_kind: str = "ideal_vb",
    *,
    eps_dist: Distribution | None = None,
    noise_scale: float = 0.0,
    design: str = "random",
    kernel="tricube",
    clip: ClipSpec | None = None,
    threads: int | None = None,
) -> BiasCurve:
    """Mean of ``estimate - r(t)`` over replications for each bandwidth.

    The same replicated samples are reused across the bandwidth grid.
    Bandwidths whose bias is under ten Monte Carlo standard errors (or at
    rounding level) are flagged unusable; the slope is fitted to the rest.

    Raises
    ------
    ValueError
        If fewer than three bandwidths are usable.
    """
    h_grid = np.asarray(h_grid, dtype=float)
    if h_grid.size < 4:
        raise ValueError("h_grid needs at least four bandwidths")
    clip = ClipSpec() if clip is None else clip
    kernel = get_kernel(kernel)
    estimate = _point_estimator(model, estimator_kind, kernel, clip)
    r_t = float(model.r(np.asarray(t)))

    def one(j):
        rng = rep_rng(seed, j)
        x = _design(x_dist, n, design, rng)
        y = model.r(x)
        if eps_dist is not None and noise_scale:
            y = y + noise_scale * draw(eps_dist, rng, n)
        s = Sample(x, y)
        return np.array([float(estimate(s, t, h)) for h in h_grid])

    est = np.array(_map_reps(one, reps, threads))
    err = est - r_t
    bias = np.nanmean(err, axis=0)
    se = np.nanstd(err, axis=0, ddof=1) / np.sqrt(reps) if reps > 1 else np.zeros_like(bias)
    floor = 1e-12 * max(1.0, abs(r_t))
    usable = np.isfinite(bias) & (np.abs(bias) > 10.0 * se) & (np.abs(bias) > floor)
    if usable.sum() < 3:
        raise ValueError(f"only {int(usable.sum())} bandwidth(s) with bias above the noise floor")
    slope = float(np.polyfit(np.log(h_grid[usable]), np.log(np.abs(bias[usable])), 1)[0])
    return BiasCurve(h_grid, bias, se, usable, slope)


def bias_slope(model, x_dist, t, h_grid, n, reps, seed, estimator_kind="ideal_vb", **kwargs) -> float:
    """Fitted slope of ``log|bias|`` against ``log h``; see :func:`bias_curve`."""
    return bias_curve(model, x_dist, t, h_grid, n, reps, seed, estimator_kind, **kwargs).slope


def clt_check(
    model: TrueModel,
    x_dist: Distribution,
    eps_dist: Distribution,
    t: float,
    n: int,
    h: float,
    reps: int,
    seed: int,
    estimator_kind: str = "ideal_vb",
    *,
    noise_scale: float = 0.3,
    kernel="tricube",
    clip: ClipSpec | None = None,
    h1: float | None = None,
    threads: int | None = None,
) -> dict:
    """Compare ``z = sqrt(nh) (r_hat(t) - r(t))`` with its normal limit.

    The limit is centred at ``lambda_hat * theta(t)`` with the finite-sample
    ``lambda_hat = h^4 sqrt(nh)`` and has variance
    :func:`~vbkreg.theory.asymptotic_variance`.
    """
    clip = ClipSpec() if clip is None else clip
    kernel = get_kernel(kernel)
    estimate = _point_estimator(model, estimator_kind, kernel, clip, h1)
    r_t = float(model.r(np.asarray(t)))
    root_nh = math.sqrt(n * h)

    def one(j):
        rng = rep_rng(seed, j)
        x = draw(x_dist, rng, n)
        y = model.r(x) + noise_scale * draw(eps_dist, rng, n)
        return float(estimate(Sample(x, y), t, h))

    est = np.array(_map_reps(one, reps, threads))
    flagged = int(np.sum(~np.isfinite(est)))
    z = root_nh * (est[np.isfinite(est)] - r_t)
    if z.size < 3:
        raise ValueError("fewer than three usable replications")
    theta = float(theta_coefficient(model, t, kernel=kernel))
    lam = h**4 * root_nh
    centre = lam * theta
    var_theory = float(asymptotic_variance(model, t, kernel))
    var_z = float(np.var(z, ddof=1))
    if var_theory > 0:
        ks = stats.kstest(z, "norm", args=(centre, math.sqrt(var_theory)))
        ks_stat, ks_p = float(ks.statistic), float(ks.pvalue)
    else:
        ks_stat, ks_p = float("nan"), float("nan")
    return {
        "t": float(t),
        "n": int(n),
        "h": float(h),
        "reps": int(reps),
        "estimator": estimator_kind,
        "flagged": flagged,
        "lambda_hat": lam,
        "theta": theta,
        "mean_z": float(np.mean(z)),
        "centre": centre,
        "mean_z_se": float(np.std(z, ddof=1) / math.sqrt(z.size)),
        "var_z": var_z,
        "var_theory": var_theory,
        "var_ratio": var_z / var_theory if var_theory > 0 else float("nan"),
        "ks_stat": ks_stat,
        "ks_pvalue": ks_p,
        "ks_crit_1pct": 1.628 / math.sqrt(z.size),
        "max_abs_z": float(np.max(np.abs(z))),
    }


# ---------------------------------------------------------------------------
# built-in scenarios mirroring the published tables
# ---------------------------------------------------------------------------

_T4 = Distribution.student_t(4)
_N01 = Distribution.normal(0, 1)
_U05 = Distribution.uniform(-0.5, 0.5)

TABLE_MSE_POINTS = {
    "t4": (-7.161518, -5.593896, -4.026274, -2.458652, -0.89103,
           0.676592, 2.244214, 3.811836, 5.379458, 6.94708),
    "normal": (-3.166296, -2.476748778, -1.787201556, -1.097654333, -0.408107111,
               0.281440111, 0.970987333, 1.660534556, 2.350081778, 3.039629),
}

BUILTIN_SCENARIOS: dict[str, dict] = {
    "table1-row1": dict(eps_dist=_U05),
    "table1-row2": dict(eps_dist=Distribution.uniform(-1, 1)),
    "table1-row3": dict(eps_dist=Distribution.uniform(-2, 2)),
    "table2-row1": dict(x_dist=Distribution.student_t(1)),
    "table2-row2": dict(x_dist=_T4),
    "table2-row3": dict(x_dist=Distribution.student_t(8)),
    "table2-row4": dict(x_dist=Distribution.cauchy(3, 4)),
    "table2-row5": dict(x_dist=Distribution.cauchy(5, 7)),
    "table2-row6": dict(x_dist=_N01),
    "table2-row7": dict(x_dist=Distribution.normal(5, 10)),
    "table3": dict(sweep_n=(500, 1000, 2000, 5000, 8000, 10000)),
    "table4": dict(x_dist=_T4, eps_dist=_N01, points="t4", reg_ids=(2, 3)),
    "table5": dict(x_dist=_T4, eps_dist=Distribution.uniform(-1, 1), points="t4", reg_ids=(2, 3)),
    "table6": dict(x_dist=_N01, eps_dist=_N01, points="normal", reg_ids=(2, 3)),
    "table7": dict(x_dist=_N01, eps_dist=Distribution.uniform(-1, 1), points="normal", reg_ids=(2, 3)),
}

# published (NWE, VKRE) values at n=5000, N=250
PUBLISHED_RMSE = {
    "table1-row1": (0.01165791, 0.008649485),
    "table1-row2": (0.02135706, 0.01474327),
    "table1-row3": (0.03912875, 0.02785478),
    "table2-row1": (0.01973383, 0.01215381),
    "table2-row2": (0.01165791, 0.008649485),
    "table2-row3": (0.006720047, 0.004981605),
    "table2-row4": (0.02445313, 0.01189971),
    "table2-row5": (0.02656666, 0.01461736),
    "table2-row6": (0.007069801, 0.005971244),
    "table2-row7": (0.01349415, 0.01335264),
}


def builtin_scenario(name: str, **overrides) -> tuple[ScenarioConfig, dict]:
    """Scenario config for a table id plus its table-level extras (sweep sizes, MSE points)."""
    if name not in BUILTIN_SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(BUILTIN_SCENARIOS)}")
    spec = dict(BUILTIN_SCENARIOS[name])
    extras = {k: spec.pop(k) for k in ("sweep_n", "points", "reg_ids") if k in spec}
    if "points" in extras:
        extras["points"] = TABLE_MSE_POINTS[extras["points"]]
    base = dict(reg_id=2, n=5000, reps=250, name=name)
    base.update(spec)
    valid = {f.name for f in fields(ScenarioConfig)}
    bad = set(overrides) - valid
    if bad:
        raise ValueError(f"unknown overrides {sorted(bad)}")
    base.update(overrides)
    return ScenarioConfig(**base), extras
