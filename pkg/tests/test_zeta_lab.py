import math

import numpy as np
import pytest

from tiltlab.cue import SeedSpec
from tiltlab.zeta_lab import (
    PrimeWindow,
    ScanSpec,
    WeightedHistogram,
    default_window,
    dirichlet_poly,
    dirichlet_poly_many,
    mertens_l,
    mu_alpha,
    scan_log_weights,
    scan_stream,
    sieve_primes,
    weighted_scan,
)

from oracles import odd_only_sieve, trial_division_primes


def test_sieve_small():
    assert list(sieve_primes(10)) == [2, 3, 5, 7]
    assert list(sieve_primes(1)) == []
    assert list(sieve_primes(2)) == [2]


def test_sieve_against_trial_division():
    assert list(sieve_primes(100)) == trial_division_primes(100)
    assert len(sieve_primes(100)) == 25


def test_sieve_against_independent_sieve():
    assert len(sieve_primes(10**6)) == 78498
    assert list(sieve_primes(10**4)) == odd_only_sieve(10**4)


def test_prime_window_membership():
    w = PrimeWindow.from_bounds(10, 60)
    assert list(w.primes) == [11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
    with pytest.raises(ValueError):
        PrimeWindow(lo=10, hi=5, primes=np.array([7], dtype=np.int64))
    with pytest.raises(ValueError):
        PrimeWindow(lo=1, hi=10, primes=np.array([3, 2], dtype=np.int64))
    with pytest.raises(ValueError):
        PrimeWindow(lo=1, hi=10, primes=np.array([2, 11], dtype=np.int64))


def test_mertens_small_window():
    w = PrimeWindow.from_bounds(1, 10)
    assert mertens_l(w) == pytest.approx(1.0 / 2 + 1.0 / 3 + 1.0 / 5 + 1.0 / 7, abs=1e-15)


def test_mertens_constant_at_desk_scale():
    w = PrimeWindow.from_bounds(1, 10**6)
    target = math.log(math.log(10**6)) + 0.26149721
    assert abs(mertens_l(w) - target) < 0.01


def test_mertens_additivity():
    a = PrimeWindow.from_bounds(1, 50)
    b = PrimeWindow.from_bounds(50, 400)
    c = PrimeWindow.from_bounds(1, 400)
    assert mertens_l(a) + mertens_l(b) == pytest.approx(mertens_l(c), abs=1e-12)


def test_mu_alpha_zero_is_mertens():
    w = PrimeWindow.from_bounds(1, 5000)
    assert mu_alpha(w, 0.0) == mertens_l(w)


def test_mu_alpha_even_in_alpha():
    w = PrimeWindow.from_bounds(1, 3000)
    for alpha in (0.01, 0.3, 0.77):
        assert mu_alpha(w, alpha) == mu_alpha(w, -alpha)


def test_mu_alpha_large_shift_band():
    # when |alpha| log(hi) > 1 the -log|alpha| regime is visible
    w = PrimeWindow.from_bounds(1, 10**6)
    for alpha in (0.2, 0.3, 0.5):
        assert abs(mu_alpha(w, alpha) + math.log(alpha)) < 2.0


def test_mu_alpha_small_shift_tracks_mertens():
    # |alpha| log(hi) <= 1 keeps mu_alpha within O(1) of L
    w = PrimeWindow.from_bounds(1, 10**6)
    for alpha in (0.01, 0.001):
        assert abs(mu_alpha(w, alpha) - mertens_l(w)) < 0.1


def test_mu_alpha_lipschitz_bound():
    w = PrimeWindow.from_bounds(1, 2000)
    bound = mertens_l(w) * math.log(float(w.primes[-1]))
    rng = np.random.default_rng(5)
    for _ in range(50):
        a, b = rng.uniform(-0.9, 0.9, size=2)
        assert abs(mu_alpha(w, a) - mu_alpha(w, b)) <= bound * abs(a - b) + 1e-12


def test_dirichlet_poly_empty_window():
    w = PrimeWindow(lo=24.0, hi=28.0, primes=np.empty(0, dtype=np.int64))
    assert dirichlet_poly(1.0, w) == 0.0


def test_dirichlet_poly_real_at_zero():
    w = PrimeWindow.from_bounds(1, 100)
    value = dirichlet_poly(0.0, w)
    assert value.imag == pytest.approx(0.0, abs=1e-14)
    assert value.real == pytest.approx(
        math.fsum(1.0 / math.sqrt(p) for p in w.primes), abs=1e-12
    )


def test_dirichlet_poly_conjugate_symmetry():
    w = PrimeWindow.from_bounds(1, 500)
    rng = np.random.default_rng(11)
    t = rng.uniform(-50, 50, size=100)
    vals_pos = dirichlet_poly_many(t, w)
    vals_neg = dirichlet_poly_many(-t, w)
    assert np.abs(vals_neg - np.conj(vals_pos)).max() < 1e-11


def test_histogram_mass_invariant_enforced():
    with pytest.raises(ValueError):
        WeightedHistogram(
            bin_edges=np.array([0.0, 1.0, 2.0]),
            weighted_counts=np.array([1.0, 1.0]),
            total_weight=5.0,
            raw_count=3,
        )
    hist = WeightedHistogram(
        bin_edges=np.array([0.0, 1.0, 2.0]),
        weighted_counts=np.array([1.0, 1.0]),
        total_weight=2.5,
        raw_count=3,
        underflow_weight=0.25,
        overflow_weight=0.25,
    )
    assert hist.total_weight == 2.5


def test_scan_spec_validation():
    with pytest.raises(ValueError):
        ScanSpec(T=5, samples=500)
    with pytest.raises(ValueError):
        ScanSpec(T=100.0, samples=50)
    with pytest.raises(ValueError):
        ScanSpec(T=100.0, samples=500, alpha=1.5)
    with pytest.raises(ValueError):
        ScanSpec(T=100.0, samples=500, m=5)
    spec = ScanSpec(T=1e4, samples=500)
    assert spec.window.lo == pytest.approx(math.log(1e4))


def test_scan_stream_determinism_and_range():
    spec = ScanSpec(T=5e3, samples=300, seed=SeedSpec(4))
    a = scan_stream(spec)
    b = scan_stream(spec)
    assert np.array_equal(a.t, b.t)
    assert np.array_equal(a.values, b.values)
    assert np.all((a.t >= 5e3) & (a.t <= 1e4))


def test_selberg_baseline_smoke():
    hist, report = weighted_scan(ScanSpec(T=5e3, samples=500, k=0, seed=SeedSpec(8)))
    # Selberg CLT: mean near 0 on the scale of the spread
    assert abs(report.weighted_mean) < 3.0 * math.sqrt(report.central_moments[2])
    mass = hist.weighted_counts.sum() + hist.underflow_weight + hist.overflow_weight
    assert mass == pytest.approx(hist.total_weight, rel=1e-9)
    assert report.ess == pytest.approx(500.0)


def test_proxy_positively_correlated():
    _, report = weighted_scan(ScanSpec(T=1e5, samples=1000, k=0, seed=SeedSpec(15)))
    assert report.proxy_correlation is not None
    assert report.proxy_correlation > 0.0


def test_scan_log_weights_zero_tilt_and_shift_reuse():
    t = np.array([5000.0, 5100.0])
    assert np.array_equal(scan_log_weights(t, 0, 0, 0.0), np.zeros(2))
    lw = scan_log_weights(t, 1, 0, 0.0)
    from tiltlab.zeta_eval import zeta_half_line

    for ti, li in zip(t, lw):
        assert li == pytest.approx(2.0 * math.log(abs(zeta_half_line(ti))), abs=1e-10)


def test_weighted_scan_with_derivative_weight_smoke():
    hist, report = weighted_scan(ScanSpec(T=4e3, samples=200, k=1, m=1, seed=SeedSpec(77)))
    assert np.isfinite(report.weighted_mean)
    assert report.ess >= 1.0
