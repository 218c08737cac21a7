"""Desk-scale number theory: primes, Dirichlet polynomials, weighted scans.

The prime window X = (lo, hi] is an explicit input everywhere (the
asymptotic choice x = T^eps is meaningless at reachable heights); the
default window keeps the (log T, x] shape of the theory at x = T^0.3.
Weighted scans sample t uniformly in [T, 2T], weigh by
|zeta^(m)(1/2 + it + i alpha)|^{2k}, and reuse the self-normalized
reduction of the Monte Carlo estimator.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .cue import SeedSpec
from .estimator import MomentReport, reduce_weighted
from .zeta_eval import (
    CAUCHY_MAX_T,
    zeta_derivative,
    zeta_derivative_rs_many,
    zeta_half_line_many,
)

__all__ = [
    "PrimeWindow",
    "WeightedHistogram",
    "ScanSpec",
    "ScanStream",
    "sieve_primes",
    "default_window",
    "dirichlet_poly",
    "dirichlet_poly_many",
    "mertens_l",
    "mu_alpha",
    "scan_stream",
    "scan_log_weights",
    "weighted_scan",
]

PRIME_COUNT_CAP = 10**7
HISTOGRAM_BINS = 80
HISTOGRAM_HALF_WIDTHS = 6.0  # in units of sqrt(L/2)


def sieve_primes(limit):
    """All primes <= limit (empty array if limit < 2), by Eratosthenes."""
    limit = int(limit)
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for i in range(2, int(limit**0.5) + 1):
        if mask[i]:
            mask[i * i :: i] = False
    return np.nonzero(mask)[0].astype(np.int64)


@dataclass(frozen=True)
class PrimeWindow:
    """Explicit prime interval X = (lo, hi] with its sieved prime list."""

    lo: float
    hi: float
    primes: np.ndarray

    def __post_init__(self):
        if not (self.lo >= 0 and self.hi > self.lo):
            raise ValueError(f"need 0 <= lo < hi, got ({self.lo}, {self.hi}]")
        primes = np.asarray(self.primes, dtype=np.int64)
        if np.any(np.diff(primes) <= 0):
            raise ValueError("prime list must be strictly ascending")
        if primes.size and (primes[0] <= self.lo or primes[-1] > self.hi):
            raise ValueError("prime list escapes the window bounds")
        object.__setattr__(self, "primes", primes)

    @classmethod
    def from_bounds(cls, lo, hi):
        primes = sieve_primes(int(math.floor(hi)))
        primes = primes[primes > lo]
        if len(primes) > PRIME_COUNT_CAP:
            primes = primes[:PRIME_COUNT_CAP]
            hi = float(primes[-1])
        return cls(lo=float(lo), hi=float(hi), primes=primes)


def default_window(T):
    """The theory-shaped default window (log T, T^0.3]."""
    if T < 10:
        raise ValueError("default window needs T >= 10")
    return PrimeWindow.from_bounds(math.log(T), T**0.3)


def mertens_l(window: PrimeWindow) -> float:
    """L = sum_{p in X} 1/p."""
    if window.primes.size == 0:
        return 0.0
    return float(math.fsum(1.0 / window.primes.astype(float)))


def mu_alpha(window: PrimeWindow, alpha: float) -> float:
    """Shifted mean density mu_alpha = sum_{p in X} cos(alpha log p)/p."""
    p = window.primes.astype(float)
    if p.size == 0:
        return 0.0
    return float(math.fsum(np.cos(alpha * np.log(p)) / p))


def dirichlet_poly(t, window: PrimeWindow) -> complex:
    """P(t) = sum_{p in X} p^{-1/2 - it}."""
    p = window.primes.astype(float)
    if p.size == 0:
        return 0.0 + 0.0j
    return complex(np.sum(np.exp(-1j * t * np.log(p)) / np.sqrt(p)))


def dirichlet_poly_many(t_arr, window: PrimeWindow):
    p = window.primes.astype(float)
    t_arr = np.asarray(t_arr, dtype=float)
    if p.size == 0:
        return np.zeros(t_arr.shape, dtype=np.complex128)
    log_p = np.log(p)
    amp = 1.0 / np.sqrt(p)
    out = np.empty(t_arr.shape, dtype=np.complex128)
    chunk = max(1, 4_000_000 // max(1, p.size))
    flat = t_arr.ravel()
    res = out.ravel()
    for lo in range(0, flat.size, chunk):
        blk = flat[lo : lo + chunk]
        res[lo : lo + chunk] = (np.exp(-1j * np.outer(blk, log_p)) * amp).sum(axis=1)
    return out


@dataclass(frozen=True)
class WeightedHistogram:
    """Weighted empirical distribution with explicit under/overflow mass."""

    bin_edges: np.ndarray
    weighted_counts: np.ndarray
    total_weight: float
    raw_count: int
    underflow_weight: float = 0.0
    overflow_weight: float = 0.0

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        counts = np.asarray(self.weighted_counts, dtype=float)
        if len(counts) != len(edges) - 1:
            raise ValueError("need len(weighted_counts) == len(bin_edges) - 1")
        if np.any(counts < 0) or self.total_weight <= 0:
            raise ValueError("weights must be nonnegative with positive total")
        mass = counts.sum() + self.underflow_weight + self.overflow_weight
        if abs(mass - self.total_weight) > 1e-9 * self.total_weight:
            raise ValueError("histogram mass does not add up to total_weight")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "weighted_counts", counts)


@dataclass(frozen=True)
class ScanSpec:
    """One weighted scan: t ~ U[T, 2T], weight |zeta^(m)(1/2+it+i alpha)|^{2k}."""

    T: float
    samples: int
    k: int = 0
    m: int = 0
    alpha: float = 0.0
    window: PrimeWindow | None = None
    seed: SeedSpec = SeedSpec(42)

    def __post_init__(self):
        if self.T < 10:
            raise ValueError(f"T must be >= 10, got {self.T}")
        if self.samples < 10**2:
            raise ValueError(f"samples must be >= 100, got {self.samples}")
        if not (isinstance(self.k, (int, np.integer)) and self.k >= 0):
            raise ValueError(f"k must be a nonnegative integer, got {self.k}")
        if not (isinstance(self.m, (int, np.integer)) and 0 <= self.m <= 4):
            raise ValueError(f"derivative order m must be in [0, 4], got {self.m}")
        if not abs(self.alpha) < 1:
            raise ValueError(f"|alpha| must be < 1, got {self.alpha}")
        if self.window is None:
            object.__setattr__(self, "window", default_window(self.T))


@dataclass(frozen=True)
class ScanStream:
    """Raw scan draws: sample heights, log|zeta| values, Re P(t) proxy."""

    t: np.ndarray
    values: np.ndarray
    proxy: np.ndarray


def scan_stream(spec: ScanSpec) -> ScanStream:
    """Draw t ~ U[T, 2T] and evaluate log|zeta(1/2+it)| and the prime proxy."""
    rng = spec.seed.rng()
    t = spec.T * (1.0 + rng.random(spec.samples))
    zeta_vals = zeta_half_line_many(t)
    with np.errstate(divide="ignore"):
        values = np.log(np.abs(zeta_vals))
    proxy = dirichlet_poly_many(t, spec.window).real
    return ScanStream(t=t, values=values, proxy=proxy)


def scan_log_weights(t, k, m, alpha):
    """log of |zeta^(m)(1/2 + i(t + alpha))|^{2k} for a sample-height array."""
    t = np.asarray(t, dtype=float)
    if k == 0:
        return np.zeros(t.shape)
    shifted = t + alpha
    if m == 0:
        w_abs = np.abs(zeta_half_line_many(shifted))
    elif np.all(shifted > CAUCHY_MAX_T):
        w_abs = np.abs(zeta_derivative_rs_many(shifted, m))
    else:
        w_abs = np.abs([zeta_derivative(tv, m) for tv in shifted])
    with np.errstate(divide="ignore"):
        return 2.0 * k * np.log(w_abs)


def weighted_scan(spec: ScanSpec, n_max=4, bootstrap=400):
    """Self-normalized weighted histogram and moment report for one scan.

    Near-zero |zeta| samples drive log to -inf; they land in the
    underflow bin with their (vanishing, at k >= 1) weight rather than
    being dropped.
    """
    stream = scan_stream(spec)
    log_w = scan_log_weights(stream.t, spec.k, spec.m, spec.alpha)
    finite = np.isfinite(stream.values)
    report = reduce_weighted(
        stream.values[finite],
        log_w[finite],
        n_max,
        bootstrap=bootstrap,
        matrix_size=None,
        tilt=float(spec.k),
    )
    corr = float(np.corrcoef(stream.proxy[finite], stream.values[finite])[0, 1])
    report = dataclasses.replace(report, proxy_correlation=corr)

    half_width = HISTOGRAM_HALF_WIDTHS * math.sqrt(0.5 * max(mertens_l(spec.window), 1e-12))
    center = report.weighted_mean
    edges = np.linspace(center - half_width, center + half_width, HISTOGRAM_BINS + 1)
    shift = np.max(log_w)
    weights = np.exp(log_w - shift)
    total = float(weights.sum())
    inside = np.histogram(stream.values, bins=edges, weights=weights)[0]
    under = float(weights[stream.values < edges[0]].sum())
    over = float(weights[stream.values >= edges[-1]].sum())
    # histogram ignores values exactly on the last edge; fold the residual in
    residual = total - float(inside.sum()) - under - over
    over += residual
    hist = WeightedHistogram(
        bin_edges=edges,
        weighted_counts=inside,
        total_weight=total,
        raw_count=int(spec.samples),
        underflow_weight=under,
        overflow_weight=over,
    )
    return hist, report
