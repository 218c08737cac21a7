"""tiltlab: tilted CUE statistics and weighted value distributions of zeta.

Exact side: closed-form moments/cumulants of log|Z| under |Z|^{2k} d_Haar.
Monte Carlo side: Haar sampling (QR and CMV routes) with self-normalized
importance sampling.  Zeta side: critical-line evaluators, prime-window
Dirichlet polynomials, weighted scans, and the shifted-moment recipe
combinatorics.
"""

__version__ = "0.1.0"

from .cue import EigenAngles, SeedSpec, log_abs_char_poly, sample_cue
from .estimator import MomentReport, effective_sample_size, gaussian_conformance, tilted_moments_mc
from .rmt_exact import (
    ExactMomentReport,
    TiltSpec,
    asymptotic_mn,
    cumulants,
    log_moment_mn,
    weighted_central_moments,
    weighted_mean,
)
from .shifts import (
    SelectionPair,
    ShiftTuple,
    enumerate_selections,
    g_p_factor,
    second_moment_recipe_k1,
    swap_shifts,
)
from .zeta_eval import zeta_derivative, zeta_half_line
from .zeta_lab import PrimeWindow, ScanSpec, mertens_l, mu_alpha, sieve_primes, weighted_scan

__all__ = [
    "__version__",
    "EigenAngles",
    "SeedSpec",
    "log_abs_char_poly",
    "sample_cue",
    "MomentReport",
    "effective_sample_size",
    "gaussian_conformance",
    "tilted_moments_mc",
    "ExactMomentReport",
    "TiltSpec",
    "asymptotic_mn",
    "cumulants",
    "log_moment_mn",
    "weighted_central_moments",
    "weighted_mean",
    "SelectionPair",
    "ShiftTuple",
    "enumerate_selections",
    "g_p_factor",
    "second_moment_recipe_k1",
    "swap_shifts",
    "zeta_derivative",
    "zeta_half_line",
    "PrimeWindow",
    "ScanSpec",
    "mertens_l",
    "mu_alpha",
    "sieve_primes",
    "weighted_scan",
]
