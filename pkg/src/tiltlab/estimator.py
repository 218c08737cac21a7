"""Self-normalized importance sampling for the tilted measure |Z|^{2k} d_Haar.

Samples come from plain Haar (the CMV stream by default); the tilt enters
only through log-weights 2k log|Z|.  All reductions first sort the
(value, log-weight) pairs, so every reported field is invariant under
permutations of the input stream, and the bootstrap (which resamples
matrices, i.e. pairs) is bit-reproducible for a fixed bootstrap seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import rmt_exact
from .cue import SeedSpec, _haar_unitary_batch, _log_abs_rows, log_char_poly_stream
from .special import gaussian_central_moment

__all__ = [
    "MomentReport",
    "ConformanceRecord",
    "effective_sample_size",
    "reduce_weighted",
    "tilted_moments_mc",
    "gaussian_conformance",
]

ESS_FLOOR = 30.0
DEFAULT_BOOTSTRAP = 400
DEFAULT_BOOTSTRAP_SEED = 1618033988


@dataclass(frozen=True)
class MomentReport:
    """Weighted-moment estimates with bootstrap errors for one MC run."""

    sample_count: int
    ess: float
    weighted_mean: float
    central_moments: list[float]
    standard_errors: list[float]  # [1] = SE of the mean, [n>=2] = SE of m_n
    standardized: list[float]  # m_n / m_2^{n/2}
    standardized_errors: list[float]
    mean_weight: float  # (1/M) sum of raw weights, the normalizer estimate
    mean_weight_se: float
    low_ess: bool
    matrix_size: int | None = None
    tilt: float | None = None
    proxy_correlation: float | None = None
    values: np.ndarray | None = field(default=None, repr=False)
    log_weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 1.0 <= self.ess <= self.sample_count * (1.0 + 1e-9):
            raise ValueError(f"ess {self.ess} outside [1, sample_count]")
        if self.central_moments[0] != 1.0:
            raise ValueError("central_moments[0] must be 1")
        if any(se < 0 for se in self.standard_errors):
            raise ValueError("standard errors must be nonnegative")


def _logsumexp(a):
    m = np.max(a)
    if not np.isfinite(m):
        return m
    return m + math.log(np.sum(np.exp(a - m)))


def effective_sample_size(log_weights):
    """(sum w)^2 / sum w^2, computed in log-space."""
    lw = np.asarray(log_weights, dtype=float)
    if lw.size == 0:
        raise ValueError("log_weights must be nonempty")
    lse1 = _logsumexp(lw)
    if not np.isfinite(lse1):
        raise ValueError("all weights vanish")
    lse2 = _logsumexp(2.0 * lw)
    return float(math.exp(2.0 * lse1 - lse2))


def _weighted_stats(values, log_weights, n_max):
    """(mean, central moments 0..n_max, standardized, mean_weight_log) for one stream."""
    shift = np.max(log_weights)
    w = np.exp(log_weights - shift)
    sw = np.sum(w)
    mean = float(np.sum(w * values) / sw)
    centered = values - mean
    moments = [1.0, 0.0]
    powers = centered * centered
    for n in range(2, n_max + 1):
        moments.append(float(np.sum(w * powers) / sw))
        powers = powers * centered
    m2 = moments[2] if n_max >= 2 else float("nan")
    standardized = []
    for n, m in enumerate(moments):
        if n < 3:
            standardized.append(float(n == 0) if n != 2 else 1.0)
        else:
            standardized.append(m / m2 ** (0.5 * n) if m2 > 0 else float("nan"))
    log_mean_weight = shift + math.log(sw) - math.log(len(values))
    return mean, moments, standardized, log_mean_weight


def reduce_weighted(
    values,
    log_weights,
    n_max,
    bootstrap=DEFAULT_BOOTSTRAP,
    bootstrap_seed=DEFAULT_BOOTSTRAP_SEED,
    keep_samples=True,
    matrix_size=None,
    tilt=None,
):
    """Self-normalized moment estimates plus bootstrap standard errors.

    The bootstrap resamples (value, weight) pairs with replacement, which
    is the right resampling unit because the weights are paired with the
    values they came from.
    """
    values = np.asarray(values, dtype=float)
    log_weights = np.asarray(log_weights, dtype=float)
    if values.shape != log_weights.shape or values.ndim != 1:
        raise ValueError("values and log_weights must be equal-length 1-d arrays")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    order = np.lexsort((log_weights, values))
    values = values[order]
    log_weights = log_weights[order]
    m = len(values)

    mean, moments, standardized, log_mw = _weighted_stats(values, log_weights, n_max)
    ess = effective_sample_size(log_weights)

    n_boot = int(bootstrap)
    if n_boot < 200:
        raise ValueError("bootstrap resample count must be >= 200")
    rng = np.random.default_rng(bootstrap_seed)
    boot = np.empty((n_boot, 2 * (n_max + 1) + 2))
    for b in range(n_boot):
        idx = rng.integers(0, m, m)
        bm, bmom, bstd, blmw = _weighted_stats(values[idx], log_weights[idx], n_max)
        boot[b] = [bm, blmw] + bmom + bstd
    ses = np.std(boot, axis=0, ddof=1)
    se_mean = float(ses[0])
    se_mw_log = ses[1]
    standard_errors = [0.0, se_mean] + [float(s) for s in ses[2 + 2 : 2 + n_max + 1]]
    standardized_errors = [0.0] * min(3, n_max + 1) + [
        float(s) for s in ses[2 + (n_max + 1) + 3 :]
    ]
    mean_weight = math.exp(log_mw)
    mean_weight_se = float(mean_weight * se_mw_log)  # delta method on log scale

    low = ess < ESS_FLOOR
    if low:
        warnings.warn(
            f"effective sample size {ess:.1f} below {ESS_FLOOR}; estimates unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    return MomentReport(
        sample_count=m,
        ess=ess,
        weighted_mean=mean,
        central_moments=moments[: n_max + 1],
        standard_errors=standard_errors[: n_max + 1],
        standardized=standardized[: n_max + 1],
        standardized_errors=standardized_errors[: n_max + 1],
        mean_weight=mean_weight,
        mean_weight_se=mean_weight_se,
        low_ess=bool(low),
        matrix_size=matrix_size,
        tilt=tilt,
        values=values if keep_samples else None,
        log_weights=log_weights if keep_samples else None,
    )


def tilted_moments_mc(
    n,
    k,
    n_max,
    samples,
    seed: SeedSpec,
    sampler="cmv",
    bootstrap=DEFAULT_BOOTSTRAP,
    bootstrap_seed=DEFAULT_BOOTSTRAP_SEED,
    keep_samples=True,
):
    """Monte Carlo tilted moments of log|Z| at matrix size n, tilt k.

    Draws `samples` Haar instances, sets v_i = log|Z_i| and log-weight
    2k v_i, and reduces self-normalized estimates with bootstrap errors.
    """
    if samples < 10**3:
        raise ValueError(f"samples must be >= 1000, got {samples}")
    if not 0 <= n_max <= 8:
        raise ValueError(f"n_max must be in [0, 8] for MC, got {n_max}")
    if k < 0:
        raise ValueError(f"tilt k must be nonnegative, got {k}")
    if sampler == "cmv":
        values = log_char_poly_stream(n, samples, seed)
    elif sampler == "qr":
        values = _qr_value_stream(n, samples, seed)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    log_weights = 2.0 * k * values
    return reduce_weighted(
        values,
        log_weights,
        n_max,
        bootstrap=bootstrap,
        bootstrap_seed=bootstrap_seed,
        keep_samples=keep_samples,
        matrix_size=n,
        tilt=k,
    )


def _qr_value_stream(n, samples, seed):
    out = np.empty(samples)
    batch = max(1, 2048 // max(1, n))
    pos = 0
    shard = 0
    while pos < samples:
        take = min(batch, samples - pos)
        rng = seed.shifted(shard).rng()
        u = _haar_unitary_batch(rng, n, take)
        angles = np.mod(np.angle(np.linalg.eigvals(u)), 2.0 * np.pi)
        out[pos : pos + take] = _log_abs_rows(angles, 0.0)
        pos += take
        shard += 1
    return out


_ERF = np.frompyfunc(math.erf, 1, 1)


def _normal_cdf(x):
    return 0.5 * (1.0 + _ERF(x / math.sqrt(2.0)).astype(float))


def weighted_ks_vs_normal(values, log_weights, mean, variance):
    """sup |weighted ECDF - Normal(mean, variance) CDF| over the sample."""
    order = np.argsort(values)
    v = values[order]
    w = np.exp(log_weights[order] - np.max(log_weights))
    cw = np.cumsum(w)
    cw /= cw[-1]
    cdf = _normal_cdf((v - mean) / math.sqrt(variance))
    upper = np.max(np.abs(cw - cdf))
    lower = np.max(np.abs(np.concatenate(([0.0], cw[:-1])) - cdf))
    return float(max(upper, lower))


@dataclass(frozen=True)
class ConformanceRecord:
    """MC-vs-exact deviations, each in units of its bootstrap SE."""

    mean_deviation: float
    variance_deviation: float
    standardized_deviations: dict
    ks_statistic: float
    exact_mean: float
    exact_variance: float
    exact_standardized: dict


def gaussian_conformance(report: MomentReport, n, k) -> ConformanceRecord:
    """Compare an MC report against the exact tilted values and the Gaussian law.

    Standardized moments are compared against (n-1)!! (even orders) or 0
    (odd orders); the KS statistic pits the reweighted empirical CDF
    against Normal(exact mean, exact variance).
    """
    n_max = len(report.central_moments) - 1
    exact = rmt_exact.weighted_central_moments(rmt_exact.TiltSpec(n, float(k), max(2, n_max)))
    mu_e = exact.mu_weighted
    m2_e = exact.central_moments[2]
    mean_dev = (report.weighted_mean - mu_e) / report.standard_errors[1]
    var_dev = (report.central_moments[2] - m2_e) / report.standard_errors[2]
    std_devs = {}
    exact_std = {}
    for order in range(3, n_max + 1):
        target = gaussian_central_moment(order, 1.0)
        se = report.standardized_errors[order]
        std_devs[order] = (report.standardized[order] - target) / se if se > 0 else float("nan")
        exact_std[order] = exact.central_moments[order] / m2_e ** (0.5 * order)
    if report.values is None:
        raise ValueError("report must keep samples for the KS statistic")
    ks = weighted_ks_vs_normal(report.values, report.log_weights, mu_e, m2_e)
    return ConformanceRecord(
        mean_deviation=float(mean_dev),
        variance_deviation=float(var_dev),
        standardized_deviations=std_devs,
        ks_statistic=ks,
        exact_mean=mu_e,
        exact_variance=m2_e,
        exact_standardized=exact_std,
    )
