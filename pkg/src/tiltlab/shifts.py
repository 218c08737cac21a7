"""Selection combinatorics and main terms of the shifted-moment recipe.

A shifted 2k-th moment expands over pairs of equal-size subsets (S, T) of
the alpha- and beta-shifts; each selection swaps its chosen shifts by
alpha_i -> -beta_l, beta_l -> -alpha_i (in sorted index order) and
contributes a per-prime factor g_p(S, T).  The Gaussian main term
exp(z^2 L / 4 - k z mu + (z/2) sum_p g_p/p) is differentiated at z = 0
by the same partition expansion the exact RMT moments use.

For k = 1 the recipe's main term is evaluated in closed form and can be
compared against direct quadrature of |zeta(1/2 + it)|^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .partitions import exp_derivative
from .special import digamma
from .zeta_eval import RS_MAX_T, zeta_em, zeta_em_many

__all__ = [
    "ShiftTuple",
    "SelectionPair",
    "RecipeKernelConfig",
    "enumerate_selections",
    "swap_shifts",
    "g_p_factor",
    "gaussian_exponent",
    "gaussian_exponent_derivatives",
    "second_moment_recipe_k1",
    "second_moment_quadrature_k1",
]

MAX_SELECTION_K = 8
CONFLUENT_EPS = 1e-8


@dataclass(frozen=True)
class ShiftTuple:
    """The shifts (alpha_1..alpha_k; beta_1..beta_k), all inside the unit disk."""

    k: int
    alphas: tuple
    betas: tuple

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        alphas = tuple(complex(a) for a in self.alphas)
        betas = tuple(complex(b) for b in self.betas)
        if len(alphas) != self.k or len(betas) != self.k:
            raise ValueError("need exactly k alphas and k betas")
        if any(abs(a) >= 1 for a in alphas) or any(abs(b) >= 1 for b in betas):
            raise ValueError("all shifts must satisfy |shift| < 1")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)


@dataclass(frozen=True)
class SelectionPair:
    """Subsets S (of alpha indices) and T (of beta indices) with |S| = |T|."""

    S: tuple
    T: tuple

    def __post_init__(self):
        s = tuple(sorted(int(i) for i in self.S))
        t = tuple(sorted(int(i) for i in self.T))
        if len(s) != len(t):
            raise ValueError("|S| must equal |T|")
        if len(set(s)) != len(s) or len(set(t)) != len(t):
            raise ValueError("selection indices must be distinct")
        if any(i < 1 for i in s + t):
            raise ValueError("selection indices are 1-based")
        object.__setattr__(self, "S", s)
        object.__setattr__(self, "T", t)

    @property
    def j(self):
        return len(self.S)


@dataclass(frozen=True)
class RecipeKernelConfig:
    """Choice of the even mollifier G (G(0) = 1) and of the V-cutoff mode.

    Main terms do not depend on G; the smoothed mode only documents the
    dependence and evaluates identically to the sharp cutoff.
    """

    g_choice: str = "even-gaussian"
    v_cutoff_mode: str = "sharp"

    def __post_init__(self):
        if self.v_cutoff_mode not in ("sharp", "smoothed"):
            raise ValueError("v_cutoff_mode must be 'sharp' or 'smoothed'")


def enumerate_selections(k):
    """All selection pairs for tilt k, grouped by j; count is C(2k, k)."""
    if not 0 <= k <= MAX_SELECTION_K:
        raise ValueError(f"k must be in [0, {MAX_SELECTION_K}]")
    out = []
    indices = range(1, k + 1)
    for j in range(k + 1):
        for s in combinations(indices, j):
            for t in combinations(indices, j):
                out.append(SelectionPair(S=s, T=t))
    return out


def swap_shifts(shift_tuple: ShiftTuple, sel: SelectionPair) -> ShiftTuple:
    """(alpha_S; beta_T): swapped selections alpha_{i_r} <- -beta_{l_r} and back."""
    k = shift_tuple.k
    if sel.S and max(sel.S) > k or sel.T and max(sel.T) > k:
        raise ValueError("selection indices exceed tuple size")
    alphas = list(shift_tuple.alphas)
    betas = list(shift_tuple.betas)
    for i_r, l_r in zip(sel.S, sel.T):
        alphas[i_r - 1] = -shift_tuple.betas[l_r - 1]
        betas[l_r - 1] = -shift_tuple.alphas[i_r - 1]
    return ShiftTuple(k=k, alphas=tuple(alphas), betas=tuple(betas))


def g_p_factor(p, sel: SelectionPair, shift_tuple: ShiftTuple) -> complex:
    """g_p(S,T) = sum_{a not in S} p^-a + sum_{b not in T} p^-b
                 + sum_{a in S} p^a + sum_{b in T} p^b."""
    if p < 2:
        raise ValueError("p must be a prime >= 2")
    log_p = math.log(p)
    s_set, t_set = set(sel.S), set(sel.T)
    total = 0.0 + 0.0j
    for idx, a in enumerate(shift_tuple.alphas, start=1):
        total += cmath.exp((a if idx in s_set else -a) * log_p)
    for idx, b in enumerate(shift_tuple.betas, start=1):
        total += cmath.exp((b if idx in t_set else -b) * log_p)
    return total


def gaussian_exponent(z, L, mu, k, g_sum):
    """E(z) = z^2 L / 4 - k z mu + (z/2) g_sum."""
    return z * z * L / 4 - k * z * mu + z * g_sum / 2


def gaussian_exponent_derivatives(L, mu, k, g_sum, n_max):
    """d^n/dz^n exp(E(z)) at z = 0 for n = 0..n_max, by the partition expansion.

    Exact for exact (Fraction/integer) inputs, which is how the odd/even
    Gaussian coefficient identity is checked without rounding.
    """
    c1 = -k * mu + g_sum / 2  # wants to vanish under the matched centering
    c2 = L / 4
    coeffs = [c1, c2]
    return [exp_derivative(coeffs, n) for n in range(n_max + 1)]


def second_moment_recipe_k1(t_lo, t_hi, alpha, beta, config: RecipeKernelConfig | None = None):
    """Main term of int_{t_lo}^{t_hi} zeta(1/2+a+it) zeta(1/2+b-it) dt at k = 1.

    The two selections give (t_hi - t_lo) zeta(1 + a + b) plus
    zeta(1 - a - b) int (t/2pi)^{-a-b} dt; as a + b -> 0 both poles
    cancel against each other and the confluent value
    int [log(t/2pi) + 2 gamma] dt is used instead of near-cancelling
    evaluations.
    """
    if not (50 <= t_lo < t_hi <= RS_MAX_T):
        raise ValueError("need 50 <= t_lo < t_hi within the evaluator ceiling")
    alpha = complex(alpha)
    beta = complex(beta)
    c = alpha + beta
    if abs(c) <= CONFLUENT_EPS:
        gamma = -digamma(1.0)
        res = _confluent_antiderivative(t_hi, gamma) - _confluent_antiderivative(t_lo, gamma)
        return float(res)
    zc = zeta_em(1 + c)
    zmc = zeta_em(1 - c)
    power_integral = (2 * math.pi) ** c * (t_hi ** (1 - c) - t_lo ** (1 - c)) / (1 - c)
    res = (t_hi - t_lo) * zc + zmc * power_integral
    if abs(res.imag) > 1e-6 * max(1.0, abs(res.real)):
        raise ValueError("recipe main term is not real for these shifts")
    return float(res.real)


def _confluent_antiderivative(t, gamma):
    return t * (math.log(t / (2 * math.pi)) - 1.0 + 2.0 * gamma)


def second_moment_quadrature_k1(t_lo, t_hi, alpha, beta, step=0.05):
    """Simpson quadrature of zeta(1/2+a+it) zeta(1/2+b-it) over [t_lo, t_hi].

    This is the recipe's independent cross-check; the integrand is
    evaluated by Euler-Maclaurin off the critical line.
    """
    if not (50 <= t_lo < t_hi <= 10**4):
        raise ValueError("quadrature window must sit inside the Euler-Maclaurin range")
    n_panels = int(math.ceil((t_hi - t_lo) / step / 2)) * 2
    t = np.linspace(t_lo, t_hi, n_panels + 1)
    alpha = complex(alpha)
    beta = complex(beta)
    left = zeta_em_many(0.5 + alpha + 1j * t)
    right = zeta_em_many(0.5 + beta - 1j * t)
    integrand = (left * right).real
    h = (t_hi - t_lo) / n_panels
    weights = np.ones(n_panels + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(h / 3.0 * np.sum(weights * integrand))
