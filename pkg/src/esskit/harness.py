"""Monte Carlo importance-sampling experiments with Gaussian pairs.

The target is N(0, 1) and the proposal N(mu_p, sigma_p^2); the integrand is
h(x) = x. For each proposal setting the harness runs R independent
replications of N draws and records

* the self-normalized IS estimate of E[x], from whose spread across
  replications the theoretical ESS is estimated, and
* the Huggins-Roy ESS of the replication's weights on a grid of orders,
  averaged as rates ESS/N.

Every replication draws from its own Philox stream keyed by the seed with
counter words ``(grid index, replication index)``, so results do not depend
on chunking or thread scheduling. Normal variates come from numpy's
``Generator.standard_normal`` (ziggurat).
"""

from __future__ import annotations

import csv
import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import __version__
from ._backend import ess_h_batch
from .errors import (
    AllZeroWeights,
    DegenerateVariance,
    InvalidParameter,
    InvalidSize,
    SingularDesign,
)
from .simplex import ArrayLike, WeightVector, as_weight_vector

log = logging.getLogger(__name__)

__all__ = [
    "GaussianPair",
    "Vary",
    "SweepConfig",
    "SweepResult",
    "ComboFit",
    "beta_grid",
    "param_grid",
    "default_config",
    "load_config",
    "read_config_mapping",
    "config_from_mapping",
    "replication_rng",
    "run_is_replication",
    "theoretical_ess_from_estimates",
    "estimate_theoretical_ess",
    "sweep",
    "optimal_beta",
    "fit_linear_combo",
    "simulate_collision_trials",
    "pair_collision_mean_trials",
    "write_sweep_csv",
    "read_sweep_csv",
    "write_summary_csv",
]

# replications per work unit; fixed so sums are reduced in the same order
CHUNK = 250
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class GaussianPair:
    """Target N(target_mean, target_sd^2) and proposal N(proposal_mean, proposal_sd^2)."""

    proposal_mean: float = 0.0
    proposal_sd: float = 1.0
    target_mean: float = 0.0
    target_sd: float = 1.0

    def __post_init__(self) -> None:
        if not self.proposal_sd > 0 or not self.target_sd > 0:
            raise InvalidParameter("standard deviations must be positive")

    def log_weights(self, x: np.ndarray) -> np.ndarray:
        """log target(x) - log proposal(x), normalizing constants included."""
        zt = (x - self.target_mean) / self.target_sd
        zp = (x - self.proposal_mean) / self.proposal_sd
        return 0.5 * (zp * zp - zt * zt) + math.log(self.proposal_sd / self.target_sd)

    def sample(self, z: np.ndarray) -> np.ndarray:
        return self.proposal_mean + self.proposal_sd * z

    @property
    def mc_variance_unit(self) -> float:
        # variance of h(x) = x under the target
        return self.target_sd**2


class Vary(enum.Enum):
    MEAN = "mean"
    SIGMA = "sigma"

    def pair(self, value: float) -> GaussianPair:
        if self is Vary.MEAN:
            return GaussianPair(proposal_mean=float(value), proposal_sd=1.0)
        return GaussianPair(proposal_mean=0.0, proposal_sd=float(value))


def _arange(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0:
        raise InvalidParameter(f"grid step must be positive, got {step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count < 1:
        raise InvalidSize(f"empty grid {start}:{stop}:{step}")
    return np.round(start + step * np.arange(count), 10)


def beta_grid(
    start: float = 0.2, stop: float = 50.0, step: float = 0.01, include_inf: bool = True
) -> tuple[float, ...]:
    """Evenly spaced orders, rounded to 10 decimals so 1.0 and 2.0 are exact.

    2.0 is always included because :func:`fit_linear_combo` needs it.
    """
    grid = _arange(start, stop, step).tolist()
    if 2.0 not in grid:
        grid = sorted(grid + [2.0])
    if include_inf:
        grid.append(math.inf)
    return tuple(grid)


def param_grid(vary: Vary, step: Optional[float] = None) -> tuple[float, ...]:
    if vary is Vary.MEAN:
        return tuple(_arange(0.0, 2.0, 0.1 if step is None else step).tolist())
    return tuple(_arange(0.5, 1.0, 0.025 if step is None else step).tolist())


@dataclass(frozen=True)
class SweepConfig:
    grid: tuple[float, ...]
    n_samples: int = 1000
    replications: int = 10_000
    seed: int = 0
    beta_grid: tuple[float, ...] = field(default_factory=beta_grid)
    integrand: str = "x"
    centered: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "beta_grid", tuple(float(b) for b in self.beta_grid))
        if self.n_samples < 2:
            raise InvalidParameter("n_samples must be >= 2")
        if self.replications < 2:
            raise InvalidParameter("replications must be >= 2")
        if not self.grid:
            raise InvalidSize("parameter grid is empty")
        if any(math.isnan(b) or b < 0 for b in self.beta_grid):
            raise InvalidParameter("beta grid values must be >= 0")
        if self.integrand != "x":
            raise InvalidParameter(f"only integrand 'x' is supported, got {self.integrand!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameter("seed must be an unsigned 64-bit integer")

    def describe(self) -> str:
        finite = [b for b in self.beta_grid if math.isfinite(b)]
        beta = f"{min(finite):g}..{max(finite):g}x{len(finite)}" if finite else "none"
        if any(math.isinf(b) for b in self.beta_grid):
            beta += "+inf"
        return (
            f"n={self.n_samples};R={self.replications};"
            f"grid={self.grid[0]:g}..{self.grid[-1]:g}x{len(self.grid)};"
            f"beta={beta};centered={int(self.centered)};integrand={self.integrand}"
        )


def default_config(vary: Union[Vary, str], **overrides) -> SweepConfig:
    vary = Vary(vary)
    overrides.setdefault("grid", param_grid(vary))
    return SweepConfig(**overrides)


_BOOL = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def read_config_mapping(path: Union[str, Path]) -> dict[str, str]:
    """Raw ``key=value`` pairs of a config file; ``#`` starts a comment."""
    kv: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidParameter(f"{path}:{lineno}: expected key=value")
        kv[key.strip()] = value.strip()
    return kv


def load_config(path: Union[str, Path], vary: Union[Vary, str]) -> SweepConfig:
    """Read a flat ``key=value`` file.

    Keys: ``grid`` (comma list) or ``grid_step``; ``n_samples``,
    ``replications``, ``seed``; ``beta_start``, ``beta_stop``,
    ``beta_step``, ``include_inf``; ``centered``; ``integrand``.
    """
    return config_from_mapping(read_config_mapping(path), Vary(vary))


def config_from_mapping(kv: dict, vary: Vary) -> SweepConfig:
    kv = dict(kv)
    args: dict = {}
    try:
        if "grid" in kv:
            args["grid"] = tuple(float(v) for v in kv.pop("grid").split(","))
        else:
            step = kv.pop("grid_step", None)
            args["grid"] = param_grid(vary, None if step is None else float(step))
        for key in ("n_samples", "replications", "seed"):
            if key in kv:
                args[key] = int(kv.pop(key))
        bstart = float(kv.pop("beta_start", 0.2))
        bstop = float(kv.pop("beta_stop", 50.0))
        bstep = float(kv.pop("beta_step", 0.01))
        inf = _BOOL[str(kv.pop("include_inf", "true")).lower()]
        args["beta_grid"] = beta_grid(bstart, bstop, bstep, inf)
        if "centered" in kv:
            args["centered"] = _BOOL[str(kv.pop("centered")).lower()]
        if "integrand" in kv:
            args["integrand"] = kv.pop("integrand")
    except (ValueError, KeyError) as exc:
        raise InvalidParameter(f"bad config value: {exc}") from None
    if kv:
        raise InvalidParameter(f"unknown config keys: {sorted(kv)}")
    return SweepConfig(**args)


@dataclass(frozen=True)
class SweepResult:
    vary: str
    params: np.ndarray
    betas: np.ndarray
    ess_teo_rate: np.ndarray
    ess_h_rate: np.ndarray  # (len(params), len(betas))
    ess_teo_se: Optional[np.ndarray] = None
    var_is: Optional[np.ndarray] = None
    var_mc: Optional[np.ndarray] = None
    n_samples: Optional[int] = None
    replications: Optional[int] = None
    seed: Optional[int] = None

    def column(self, beta: float) -> np.ndarray:
        idx = np.flatnonzero(self.betas == beta)
        if idx.size == 0:
            raise InvalidParameter(f"beta={beta} not in the sweep's beta grid")
        return self.ess_h_rate[:, idx[0]]


@dataclass(frozen=True)
class ComboFit:
    a1: float
    a2: float
    residual_l2: float


def replication_rng(seed: int, grid_index: int, rep_index: int) -> np.random.Generator:
    """Independent Philox stream for one (grid point, replication)."""
    return np.random.Generator(
        np.random.Philox(key=int(seed), counter=[0, 0, int(grid_index), int(rep_index)])
    )


def _weights_and_estimates(pair: GaussianPair, z: np.ndarray):
    x = pair.sample(z)
    lw = pair.log_weights(x)
    if not np.all(np.isfinite(lw)):
        raise AllZeroWeights("non-finite log weights")
    lw -= lw.max(axis=-1, keepdims=True)
    u = np.exp(lw)
    w = u / u.sum(axis=-1, keepdims=True)
    return w, np.sum(w * x, axis=-1)


def run_is_replication(
    pair: GaussianPair, n: int, rng: np.random.Generator
) -> tuple[WeightVector, float]:
    """Draw ``n`` proposal samples; return normalized weights and the IS estimate."""
    if n < 2:
        raise InvalidParameter("n must be >= 2")
    w, est = _weights_and_estimates(pair, rng.standard_normal(n))
    return WeightVector(w), float(est)


def theoretical_ess_from_estimates(
    estimates: np.ndarray, n: int, pair: GaussianPair = GaussianPair(), centered: bool = True
) -> tuple[float, float]:
    """ESS_teo = n * var_mc / var_is and its delta-method standard error.

    ``var_mc`` is exact (target variance over n). ``var_is`` is the sample
    variance of the estimates, or with ``centered=False`` their mean squared
    error around the true value.
    """
    est = np.asarray(estimates, dtype=np.float64)
    r = est.size
    if centered:
        dev = est - est.mean()
        var = float(dev @ dev) / (r - 1)
        m4 = float(np.mean(dev**4))
        var_se = math.sqrt(max(m4 - var * var * (r - 3) / (r - 1), 0.0) / r)
    else:
        sq = (est - pair.target_mean) ** 2
        var = float(sq.mean())
        var_se = float(sq.std(ddof=1)) / math.sqrt(r)
    if var == 0.0:
        raise DegenerateVariance("IS estimates have zero spread")
    ess = pair.mc_variance_unit / var
    return ess, ess * var_se / var


def _run_chunk(pair, n, seed, g, r0, r1, betas):
    z = np.empty((r1 - r0, n))
    for i in range(r1 - r0):
        replication_rng(seed, g, r0 + i).standard_normal(out=z[i])
    w, est = _weights_and_estimates(pair, z)
    if betas.size:
        ess_sum = ess_h_batch(w, betas).sum(axis=0)
    else:
        ess_sum = np.zeros(0)
    return est, ess_sum


def _threads(requested: Optional[int] = None) -> int:
    if requested is not None and requested > 0:
        return requested
    raw = os.environ.get("ESSKIT_THREADS", "0")
    try:
        k = int(raw)
    except ValueError:
        k = 0
    return k if k > 0 else (os.cpu_count() or 1)


def _simulate(pairs: Sequence[GaussianPair], n, r, seed, betas, threads=None):
    tasks = [
        (g, r0, min(r0 + CHUNK, r)) for g in range(len(pairs)) for r0 in range(0, r, CHUNK)
    ]

    def work(task):
        g, r0, r1 = task
        return _run_chunk(pairs[g], n, seed, g, r0, r1, betas)

    workers = min(_threads(threads), len(tasks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(work, tasks))
    else:
        outputs = [work(t) for t in tasks]

    estimates = [np.empty(r) for _ in pairs]
    ess_sums = [np.zeros(betas.size) for _ in pairs]
    for (g, r0, r1), (est, ess_sum) in zip(tasks, outputs):
        estimates[g][r0:r1] = est
        ess_sums[g] += ess_sum
    return estimates, ess_sums


def estimate_theoretical_ess(
    pair: GaussianPair, n: int, r: int, seed: int, centered: bool = True
) -> float:
    """Monte Carlo estimate of ESS_teo for ``pair`` from ``r`` replications."""
    if n < 2 or r < 2:
        raise InvalidParameter("need n >= 2 and r >= 2")
    (est,), _ = _simulate([pair], n, r, seed, np.zeros(0))
    return theoretical_ess_from_estimates(est, n, pair, centered)[0]


def sweep(
    config: SweepConfig, vary: Union[Vary, str], threads: Optional[int] = None
) -> SweepResult:
    """Estimate ESS_teo/N and averaged ESS-H rates across the parameter grid.

    ``threads`` overrides ``ESSKIT_THREADS``; the result does not depend on it.
    """
    vary = Vary(vary)
    pairs = [vary.pair(v) for v in config.grid]
    betas = np.asarray(config.beta_grid, dtype=np.float64)
    n, r = config.n_samples, config.replications
    log.info("sweep %s: %s", vary.value, config.describe())
    estimates, ess_sums = _simulate(pairs, n, r, config.seed, betas, threads)

    teo_rate = np.empty(len(pairs))
    teo_se = np.empty(len(pairs))
    var_is = np.empty(len(pairs))
    for g, (pair, est) in enumerate(zip(pairs, estimates)):
        ess, se = theoretical_ess_from_estimates(est, n, pair, config.centered)
        teo_rate[g], teo_se[g] = ess / n, se / n
        var_is[g] = pair.mc_variance_unit / ess
    return SweepResult(
        vary=vary.value,
        params=np.asarray(config.grid),
        betas=betas,
        ess_teo_rate=teo_rate,
        ess_h_rate=np.vstack(ess_sums) / (n * r) if betas.size else np.zeros((len(pairs), 0)),
        ess_teo_se=teo_se,
        var_is=var_is,
        var_mc=np.array([p.mc_variance_unit / n for p in pairs]),
        n_samples=n,
        replications=r,
        seed=config.seed,
    )


def optimal_beta(result: SweepResult) -> float:
    """Finite order whose averaged ESS-H curve is closest in L1 to ESS_teo.

    Ties go to the smaller order.
    """
    finite = np.flatnonzero(np.isfinite(result.betas))
    if result.params.size < 2 or finite.size < 2:
        raise InvalidParameter("need >= 2 grid points and >= 2 finite betas")
    dist = np.abs(result.ess_h_rate[:, finite] - result.ess_teo_rate[:, None]).sum(axis=0)
    best = finite[dist == dist.min()]
    return float(result.betas[best].min())


def fit_linear_combo(result: SweepResult) -> ComboFit:
    """Least-squares ``a1 * ESS-H(2) + a2 * ESS-H(inf) ~ ESS_teo`` over the grid."""
    if result.params.size < 2:
        raise InvalidParameter("need >= 2 grid points")
    X = np.column_stack([result.column(2.0), result.column(math.inf)])
    y = result.ess_teo_rate
    gram = X.T @ X
    if np.linalg.cond(gram) > MAX_CONDITION:
        raise SingularDesign("ESS-H(2) and ESS-H(inf) curves are collinear")
    a = np.linalg.solve(gram, X.T @ y)
    resid = X @ a - y
    return ComboFit(float(a[0]), float(a[1]), float(resid @ resid))


def simulate_collision_trials(w: ArrayLike, r: int, seed: int) -> np.ndarray:
    """Trial counts until a drawn index pair matches, for ``r`` experiments.

    Each trial draws two indices i.i.d. from the pmf ``w``.
    """
    w = as_weight_vector(w)
    if r < 1:
        raise InvalidParameter("r must be >= 1")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(w.entries)
    cdf[-1] = 1.0
    last = w.n - 1
    pending = np.arange(r)
    counts = np.zeros(r, dtype=np.int64)
    trial = 0
    while pending.size:
        trial += 1
        m = pending.size
        a = np.minimum(np.searchsorted(cdf, rng.random(m), side="right"), last)
        b = np.minimum(np.searchsorted(cdf, rng.random(m), side="right"), last)
        hit = a == b
        counts[pending[hit]] = trial
        pending = pending[~hit]
    return counts


def pair_collision_mean_trials(w: ArrayLike, r: int, seed: int) -> float:
    return float(simulate_collision_trials(w, r, seed).mean())


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.10g}"


def _header(seed, config: str) -> str:
    return f"# seed={seed}, version={__version__}, config={config}\n"


def write_sweep_csv(
    result: SweepResult, path: Union[str, Path], config: str = ""
) -> None:
    """Long-format CSV: ``param,ess_teo_rate,beta,ess_h_rate``."""
    with open(path, "w", newline="") as fh:
        fh.write(_header(result.seed, f"vary={result.vary};{config}"))
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["param", "ess_teo_rate", "beta", "ess_h_rate"])
        for g, p in enumerate(result.params):
            teo = _fmt(result.ess_teo_rate[g])
            for k, b in enumerate(result.betas):
                writer.writerow([_fmt(p), teo, _fmt(b), _fmt(result.ess_h_rate[g, k])])


def read_sweep_csv(path: Union[str, Path]) -> SweepResult:
    seed = None
    vary = "unknown"
    rows = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                for part in line[1:].split(","):
                    key, _, value = part.strip().partition("=")
                    if key == "seed" and value not in ("", "None"):
                        seed = int(value)
                    elif key == "config" and value.startswith("vary="):
                        vary = value.split(";", 1)[0][5:]
                continue
            rows.append(line)
    reader = csv.DictReader(rows)
    if reader.fieldnames != ["param", "ess_teo_rate", "beta", "ess_h_rate"]:
        raise InvalidParameter(f"{path}: unexpected sweep CSV columns {reader.fieldnames}")
    params: dict[float, float] = {}
    betas: dict[float, int] = {}
    cells: dict[tuple[float, float], float] = {}
    for row in reader:
        p, b = float(row["param"]), float(row["beta"])
        params.setdefault(p, float(row["ess_teo_rate"]))
        betas.setdefault(b, len(betas))
        cells[(p, b)] = float(row["ess_h_rate"])
    if not params:
        raise InvalidSize(f"{path}: no sweep rows")
    h = np.full((len(params), len(betas)), np.nan)
    for i, p in enumerate(params):
        for b, k in betas.items():
            if (p, b) not in cells:
                raise InvalidParameter(f"{path}: missing row param={p} beta={b}")
            h[i, k] = cells[(p, b)]
    return SweepResult(
        vary=vary,
        params=np.array(list(params)),
        betas=np.array(list(betas)),
        ess_teo_rate=np.array(list(params.values())),
        ess_h_rate=h,
        seed=seed,
    )


def write_summary_csv(
    path: Union[str, Path],
    beta_star: float,
    fit: ComboFit,
    seed=None,
    config: str = "",
) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_header(seed, config))
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["beta_star", "a1", "a2", "residual_l2"])
        writer.writerow([_fmt(beta_star), _fmt(fit.a1), _fmt(fit.a2), _fmt(fit.residual_l2)])
