"""Critical-line zeta evaluators: Euler-Maclaurin and Riemann-Siegel.

Euler-Maclaurin handles any complex s (needed off the line for the
Cauchy-circle derivatives) at O(|t|) cost; Riemann-Siegel covers the
line up to t = 1e8 at O(sqrt t) cost with correction terms C_0..C_4.

The correction terms are polynomials in derivatives of
Phi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p), an entire function.
Its even Taylor coefficients about p = 1/2 are extracted once at import
by a contour FFT on |w| = 1 (Phi(1/2 + w) = -cos(2 pi w^2 - 5 pi/8) /
cos(2 pi w) is even in w and analytic there, so trapezoid = spectral
accuracy); runtime evaluation is then plain Horner, with no removable
singularities to dodge.

Phases theta(t) - t log n are reduced mod 2 pi in extended precision so
the main sum stays accurate at t = 1e8 where the raw phase is ~1e9.
"""

from __future__ import annotations

import math

import numpy as np

from .special import _bernoulli_even

__all__ = [
    "zeta_em",
    "zeta_em_many",
    "rs_z",
    "zeta_rs",
    "zeta_rs_many",
    "zeta_half_line",
    "zeta_half_line_many",
    "zeta_derivative",
    "siegel_theta",
    "EM_AUTO_MAX_T",
    "RS_MIN_T",
    "RS_MAX_T",
]

TWO_PI = 2.0 * math.pi
_LD = np.longdouble
PI_LD = _LD("3.14159265358979323846264338327950288420")
TWO_PI_LD = _LD(2) * PI_LD

EM_AUTO_MAX_T = 1000.0  # auto path switch; EM itself stays accurate well beyond
EM_HARD_MAX_T = 10000.0
RS_MIN_T = 40.0
RS_MAX_T = 1.0e8
CAUCHY_MAX_T = 2000.0

_B2N = _bernoulli_even(16)
_EM_J = 14


# ---------------------------------------------------------------------------
# Euler-Maclaurin
# ---------------------------------------------------------------------------


def _em_terms(abs_t):
    return max(16, int(0.6 * abs_t) + 8)


def zeta_em(s, terms=None):
    """zeta(s) by Euler-Maclaurin; valid for any complex s != 1."""
    s = complex(s)
    if s == 1.0:
        raise ValueError("zeta has a pole at s = 1")
    m = terms if terms is not None else _em_terms(abs(s.imag))
    n = np.arange(1, m)
    total = complex(np.sum(n ** (-s))) if m > 1 else 0.0 + 0.0j
    total += m ** (1.0 - s) / (s - 1.0) + 0.5 * m ** (-s)
    rising = s
    power = m ** (-s - 1.0)
    m2 = float(m) ** -2.0
    for j in range(1, _EM_J + 1):
        total += _B2N[j - 1] / math.factorial(2 * j) * rising * power
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        power *= m2
    return total


def zeta_em_many(s_values, terms=None, chunk=1024):
    """Vectorized Euler-Maclaurin over an array of complex s (shared term count)."""
    s = np.asarray(s_values, dtype=np.complex128).ravel()
    m = terms if terms is not None else _em_terms(float(np.max(np.abs(s.imag))) if s.size else 0.0)
    log_n = np.log(np.arange(1, m, dtype=float))
    out = np.empty(s.shape, dtype=np.complex128)
    for lo in range(0, s.size, chunk):
        blk = s[lo : lo + chunk]
        out[lo : lo + chunk] = np.exp(-blk[:, None] * log_n[None, :]).sum(axis=1)
    out += m ** (1.0 - s) / (s - 1.0) + 0.5 * m ** (-s)
    rising = s.copy()
    power = m ** (-s - 1.0)
    m2 = float(m) ** -2.0
    for j in range(1, _EM_J + 1):
        out += _B2N[j - 1] / math.factorial(2 * j) * rising * power
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        power = power * m2
    return out.reshape(np.shape(s_values))


# ---------------------------------------------------------------------------
# Phi Taylor table and Riemann-Siegel correction terms
# ---------------------------------------------------------------------------


def _phi_even_taylor(n_nodes=512, keep=44):
    """Even Taylor coefficients of Phi(1/2 + w) about w = 0, by contour FFT."""
    phi_angles = np.arange(n_nodes) * (TWO_PI / n_nodes)
    w = np.exp(1j * phi_angles)
    num = -np.cos(TWO_PI * w * w - 5.0 * math.pi / 8.0)
    den = np.cos(TWO_PI * w)
    samples = num / den
    coeffs = np.fft.fft(samples) / n_nodes
    even = coeffs.real[: 2 * keep : 2]
    return even  # even[i] multiplies w^{2i}


_PHI_EVEN = _phi_even_taylor()

_PI2 = math.pi**2
# C_k as combinations of Phi derivatives (Haselgrove/Gabcke coefficients)
_C_RELATIONS = (
    ((0, 1.0),),
    ((3, -1.0 / (96.0 * _PI2)),),
    ((2, 1.0 / (64.0 * _PI2)), (6, 1.0 / (18432.0 * _PI2**2))),
    (
        (1, -1.0 / (64.0 * _PI2)),
        (5, -1.0 / (3840.0 * _PI2**2)),
        (9, -1.0 / (5308416.0 * _PI2**3)),
    ),
    (
        (0, 1.0 / (128.0 * _PI2)),
        (4, 19.0 / (24576.0 * _PI2**2)),
        (8, 11.0 / (5898240.0 * _PI2**3)),
        (12, 1.0 / (2038431744.0 * _PI2**4)),
    ),
)
RS_MAX_CORRECTIONS = len(_C_RELATIONS) - 1


def _phi_derivative(p, order):
    """d^order/dp^order Phi at p (scalar or array), by Horner on the even table."""
    w = np.asarray(p, dtype=float) - 0.5
    top = 2 * (len(_PHI_EVEN) - 1)
    acc = np.zeros_like(w)
    for i in range(len(_PHI_EVEN) - 1, -1, -1):
        e = 2 * i
        if e < order:
            break
        fall = 1.0
        for r in range(order):
            fall *= e - r
        acc = acc * (w * w) + _PHI_EVEN[i] * fall
    # account for the leftover power w^{(e_min - order)} parity
    e_min = order if order % 2 == 0 else order + 1
    return acc * w ** (e_min - order)


def _correction_values(p, n_corr):
    """C_0(p)..C_{n_corr}(p) for scalar or array p."""
    return [
        sum(coef * _phi_derivative(p, order) for order, coef in _C_RELATIONS[k])
        for k in range(n_corr + 1)
    ]


# ---------------------------------------------------------------------------
# theta(t) and the Riemann-Siegel main formula
# ---------------------------------------------------------------------------


def siegel_theta(t):
    """Riemann-Siegel theta, asymptotic form (t >= ~20), in extended precision."""
    t_ld = np.asarray(t, dtype=_LD)
    return (
        t_ld / 2 * np.log(t_ld / TWO_PI_LD)
        - t_ld / 2
        - PI_LD / 8
        + 1 / (48 * t_ld)
        + 7 / (5760 * t_ld**3)
        + 31 / (80640 * t_ld**5)
    )


def _theta_derivatives(t, orders=4):
    """theta', theta'', ... in float64 (plenty away from huge t)."""
    t = float(t)
    d1 = 0.5 * math.log(t / TWO_PI) - 1.0 / (48.0 * t * t) - 7.0 / (1920.0 * t**4)
    d2 = 0.5 / t + 1.0 / (24.0 * t**3) + 7.0 / (480.0 * t**5)
    d3 = -0.5 / (t * t) - 1.0 / (8.0 * t**4)
    d4 = 1.0 / t**3 + 1.0 / (2.0 * t**5)
    return [d1, d2, d3, d4][:orders]


def rs_z(t, n_corr=4):
    """Hardy Z(t) by the Riemann-Siegel formula with n_corr correction terms."""
    return float(_rs_z_many(np.asarray([t], dtype=float), n_corr)[0])


def _rs_z_many(t_arr, n_corr=4):
    if np.any(t_arr < RS_MIN_T):
        raise ValueError(f"Riemann-Siegel path requires t >= {RS_MIN_T}")
    if np.any(t_arr > RS_MAX_T):
        raise ValueError(f"t above Riemann-Siegel ceiling {RS_MAX_T:.0e}")
    if not 0 <= n_corr <= RS_MAX_CORRECTIONS:
        raise ValueError(f"n_corr must be in [0, {RS_MAX_CORRECTIONS}]")
    t_arr = np.asarray(t_arr, dtype=float)
    a = np.sqrt(t_arr / TWO_PI)
    big_n = a.astype(np.int64)
    p = a - big_n
    theta_ld = siegel_theta(t_arr)
    out = np.empty(t_arr.shape)
    max_n = int(big_n.max())
    log_n_ld = np.log(np.arange(1, max_n + 1, dtype=_LD))
    inv_sqrt = 1.0 / np.sqrt(np.arange(1, max_n + 1, dtype=float))
    t_ld = t_arr.astype(_LD)
    for nv in np.unique(big_n):
        sel = big_n == nv
        phase = theta_ld[sel, None] - t_ld[sel, None] * log_n_ld[None, :nv]
        phase = np.remainder(phase, TWO_PI_LD).astype(float)
        out[sel] = 2.0 * (np.cos(phase) * inv_sqrt[None, :nv]).sum(axis=1)
    corr = _correction_values(p, n_corr)
    omega = a**-0.5
    acc = np.zeros_like(t_arr)
    for k in range(n_corr, -1, -1):
        acc = acc / a + corr[k]
    sign = np.where(big_n % 2 == 1, 1.0, -1.0)
    out += sign * omega * acc
    return out


def zeta_rs(t, n_corr=4):
    """zeta(1/2 + it) = exp(-i theta(t)) Z(t) on the Riemann-Siegel path."""
    return complex(zeta_rs_many(np.asarray([t], dtype=float), n_corr)[0])


def zeta_rs_many(t_arr, n_corr=4):
    t_arr = np.asarray(t_arr, dtype=float)
    z = _rs_z_many(t_arr, n_corr)
    theta_mod = np.remainder(siegel_theta(t_arr), TWO_PI_LD).astype(float)
    return np.exp(-1j * theta_mod) * z


def zeta_half_line(t, method="auto"):
    """zeta(1/2 + it); negative t by conjugation.

    The Euler-Maclaurin path carries t <= ~1e3 (1e-8 contract with large
    margin), Riemann-Siegel the rest up to the 1e8 ceiling.
    """
    t = float(t)
    if t < 0:
        return np.conj(zeta_half_line(-t, method))
    if method == "auto":
        method = "em" if t <= EM_AUTO_MAX_T else "rs"
    if method == "em":
        if t > EM_HARD_MAX_T:
            raise ValueError(f"Euler-Maclaurin path limited to t <= {EM_HARD_MAX_T}")
        return zeta_em(complex(0.5, t))
    if method == "rs":
        return zeta_rs(t)
    raise ValueError(f"unknown method {method!r}")


def zeta_half_line_many(t_arr, method="auto"):
    """Vectorized zeta(1/2 + it) for nonnegative t arrays."""
    t_arr = np.asarray(t_arr, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("zeta_half_line_many requires t >= 0")
    if method == "auto":
        em_mask = t_arr <= EM_AUTO_MAX_T
        out = np.empty(t_arr.shape, dtype=np.complex128)
        if np.any(em_mask):
            out[em_mask] = zeta_em_many(0.5 + 1j * t_arr[em_mask])
        if np.any(~em_mask):
            out[~em_mask] = zeta_rs_many(t_arr[~em_mask])
        return out
    if method == "em":
        return zeta_em_many(0.5 + 1j * t_arr)
    if method == "rs":
        return zeta_rs_many(t_arr)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Derivatives
# ---------------------------------------------------------------------------

CAUCHY_RADIUS = 1e-2
CAUCHY_NODES = 64
MAX_DERIVATIVE = 4


def zeta_derivative(t, m):
    """m-th derivative of zeta at 1/2 + it, for 0 <= m <= 4.

    Up to t ~ 2e3 a Cauchy circle of radius 1e-2 around the point (64
    trapezoid nodes over the Euler-Maclaurin evaluator) gives uniform
    accuracy in m.  Beyond that the Riemann-Siegel representation
    zeta = exp(-i theta) Z is differentiated analytically in t.
    """
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise ValueError(f"derivative order must be a nonnegative integer, got {m}")
    if m > MAX_DERIVATIVE:
        raise ValueError(f"derivative order {m} unsupported (max {MAX_DERIVATIVE})")
    t = float(t)
    if t < 0:
        return np.conj(zeta_derivative(-t, m))
    if m == 0:
        return zeta_half_line(t)
    if t <= CAUCHY_MAX_T:
        return _derivative_cauchy(t, m)
    return complex(zeta_derivative_rs_many(np.asarray([t]), m)[0])


def _derivative_cauchy(t, m):
    s0 = complex(0.5, t)
    q = np.arange(CAUCHY_NODES)
    nodes = np.exp(2j * math.pi * q / CAUCHY_NODES)
    vals = zeta_em_many(s0 + CAUCHY_RADIUS * nodes)
    coeff = np.mean(vals * np.exp(-2j * math.pi * m * q / CAUCHY_NODES))
    return complex(coeff * math.factorial(m) / CAUCHY_RADIUS**m)


def _bell_exp_derivatives(c1, higher, order):
    """d^r e^{g}/e^{g} for r = 0..order, with g' = c1 (array) and g^{(i)} = higher[i-2] scalars."""
    outs = [np.ones_like(c1)]
    if order >= 1:
        outs.append(c1)
    if order >= 2:
        g2 = higher[0]
        outs.append(c1 * c1 + g2)
    if order >= 3:
        g2, g3 = higher[0], higher[1]
        outs.append(c1**3 + 3.0 * c1 * g2 + g3)
    if order >= 4:
        g2, g3, g4 = higher[0], higher[1], higher[2]
        outs.append(c1**4 + 6.0 * c1 * c1 * g2 + 3.0 * g2 * g2 + 4.0 * c1 * g3 + g4)
    return outs


def zeta_derivative_rs_many(t_arr, m, n_corr=4):
    """zeta^{(m)}(1/2+it) for arrays of large t, by differentiating the RS form.

    Main-sum phases are differentiated exactly (complete Bell polynomials
    in i phi'); correction terms carry their first t-derivative, higher
    ones being O(t^{-2}) relative and dropped.
    """
    t_arr = np.asarray(t_arr, dtype=float)
    if np.any(t_arr <= CAUCHY_MAX_T):
        raise ValueError("RS derivative path requires t above the Cauchy ceiling")
    if not 1 <= m <= MAX_DERIVATIVE:
        raise ValueError("m must be in [1, 4]")
    a = np.sqrt(t_arr / TWO_PI)
    big_n = a.astype(np.int64)
    p = a - big_n
    theta_ld = siegel_theta(t_arr)
    theta_mod = np.remainder(theta_ld, TWO_PI_LD).astype(float)
    t_ld = t_arr.astype(_LD)
    max_n = int(big_n.max())
    log_n_ld = np.log(np.arange(1, max_n + 1, dtype=_LD))
    log_n = log_n_ld.astype(float)
    inv_sqrt = 1.0 / np.sqrt(np.arange(1, max_n + 1, dtype=float))

    z_derivs = np.zeros((m + 1, t_arr.size))
    for idx in range(t_arr.size):
        nv = big_n[idx]
        th_d = _theta_derivatives(t_arr[idx], m)
        phase = np.remainder(theta_ld[idx] - t_ld[idx] * log_n_ld[:nv], TWO_PI_LD).astype(float)
        e_phase = np.exp(1j * phase)
        c1 = 1j * (th_d[0] - log_n[:nv])
        higher = [1j * d for d in th_d[1:]]
        bells = _bell_exp_derivatives(c1, higher, m)
        for r in range(m + 1):
            z_derivs[r, idx] = 2.0 * np.sum((e_phase * bells[r]).real * inv_sqrt[:nv])
    # correction term and its first derivative
    corr = _correction_values(p, n_corr)
    corr_d = [
        sum(coef * _phi_derivative(p, order + 1) for order, coef in _C_RELATIONS[k])
        for k in range(n_corr + 1)
    ]
    omega = a**-0.5
    acc = np.zeros_like(t_arr)
    acc_d = np.zeros_like(t_arr)
    a_prime = 1.0 / (4.0 * math.pi * a)
    for k in range(n_corr + 1):
        acc += corr[k] * a ** (-float(k))
        acc_d += (corr_d[k] * a_prime - corr[k] * (k + 0.5) * a_prime / a) * a ** (-float(k))
    sign = np.where(big_n % 2 == 1, 1.0, -1.0)
    z_derivs[0] += sign * omega * acc
    if m >= 1:
        z_derivs[1] += sign * omega * acc_d

    # W(t) = e^{-i theta} Z(t); zeta^{(m)} = i^{-m} W^{(m)}
    th_d_all = np.array([_theta_derivatives(tv, m) for tv in t_arr]).T  # (m, P)
    e_fac = np.exp(-1j * theta_mod)
    exp_derivs = _bell_exp_derivatives(
        -1j * th_d_all[0], [-1j * d for d in th_d_all[1:]], m
    )
    w_m = np.zeros(t_arr.size, dtype=np.complex128)
    for j in range(m + 1):
        w_m += math.comb(m, j) * exp_derivs[j] * z_derivs[m - j]
    return (1j) ** (-m) * e_fac * w_m
