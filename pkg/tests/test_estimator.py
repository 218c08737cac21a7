import math

import numpy as np
import pytest

from tiltlab.cue import SeedSpec
from tiltlab.estimator import (
    MomentReport,
    effective_sample_size,
    gaussian_conformance,
    reduce_weighted,
    tilted_moments_mc,
    weighted_ks_vs_normal,
)
from tiltlab.rmt_exact import TiltSpec, weighted_central_moments, weighted_mean

from oracles import harmonic


def test_ess_equal_weights():
    m = 1000
    assert effective_sample_size(np.zeros(m)) == pytest.approx(m)
    assert effective_sample_size(np.full(m, -3.7)) == pytest.approx(m)


def test_ess_single_dominant():
    lw = np.full(50, -np.inf)
    lw[17] = 2.0
    assert effective_sample_size(lw) == pytest.approx(1.0)


def test_ess_zero_tilt_is_sample_count():
    values = np.linspace(-1, 1, 2048)
    assert effective_sample_size(0.0 * values) == 2048.0


def test_ess_rejects_empty_and_all_zero():
    with pytest.raises(ValueError):
        effective_sample_size([])
    with pytest.raises(ValueError):
        effective_sample_size(np.full(4, -np.inf))


def test_reweighting_algebraic_identity():
    # self-normalized estimate must equal sum(w g)/sum(w) on fixed arrays
    values = np.array([0.2, -1.0, 3.0, 0.5, 0.5])
    log_w = np.array([0.0, 1.0, -2.0, 0.3, 0.0])
    w = np.exp(log_w)
    expected_mean = np.sum(w * values) / np.sum(w)
    report = reduce_weighted(values, log_w, 2)
    assert report.weighted_mean == pytest.approx(expected_mean, rel=1e-14)
    expected_m2 = np.sum(w * (values - expected_mean) ** 2) / np.sum(w)
    assert report.central_moments[2] == pytest.approx(expected_m2, rel=1e-14)
    assert report.sample_count == 5
    assert report.central_moments[0] == 1.0
    assert report.central_moments[1] == 0.0


def test_zero_tilt_reduces_to_plain_moments():
    rng = np.random.default_rng(4)
    values = rng.normal(2.0, 1.3, size=5000)
    report = reduce_weighted(values, np.zeros_like(values), 4)
    assert report.weighted_mean == pytest.approx(values.mean(), rel=1e-12)
    assert report.central_moments[2] == pytest.approx(values.var(), rel=1e-12)
    assert report.ess == pytest.approx(5000.0)


def test_permutation_invariance_bit_identical():
    rng = np.random.default_rng(9)
    values = rng.normal(size=4000)
    log_w = 0.5 * values
    a = reduce_weighted(values, log_w, 4, bootstrap_seed=7)
    perm = rng.permutation(4000)
    b = reduce_weighted(values[perm], log_w[perm], 4, bootstrap_seed=7)
    assert a.weighted_mean == b.weighted_mean
    assert a.central_moments == b.central_moments
    assert a.standard_errors == b.standard_errors
    assert a.standardized == b.standardized
    assert a.ess == b.ess
    assert a.mean_weight == b.mean_weight


def test_bootstrap_se_scaling():
    # doubling the sample count shrinks bootstrap SEs by about 1/sqrt(2);
    # single-run ratios fluctuate, so average over seed families and orders
    ratios = []
    for n, k, seed in ((20, 0.0, 100), (20, 1.0, 101), (50, 0.0, 102)):
        small = tilted_moments_mc(n, k, 4, 20000, SeedSpec(seed))
        large = tilted_moments_mc(n, k, 4, 40000, SeedSpec(seed))
        for idx in (1, 2, 3):
            ratios.append(large.standard_errors[idx] / small.standard_errors[idx])
    mean_ratio = sum(ratios) / len(ratios)
    assert 0.8 / math.sqrt(2.0) < mean_ratio < 1.2 / math.sqrt(2.0)


def test_mc_k0_matches_baseline_mean():
    report = tilted_moments_mc(50, 0.0, 4, 10**5, SeedSpec(7))
    assert abs(report.weighted_mean) < 3 * report.standard_errors[1]
    exact = weighted_central_moments(TiltSpec(50, 0.0, 2)).central_moments[2]
    assert abs(report.central_moments[2] - exact) < 3 * report.standard_errors[2]


def test_mc_weighted_mean_matches_telescoped_exact():
    report = tilted_moments_mc(20, 1.0, 4, 2 * 10**5, SeedSpec(21))
    target = harmonic(21) - 1.0
    assert abs(report.weighted_mean - target) < 3 * report.standard_errors[1]


def test_mc_normalizer_cross_check():
    report = tilted_moments_mc(20, 1.0, 2, 10**5, SeedSpec(5))
    assert abs(report.mean_weight - 21.0) < 3 * report.mean_weight_se


@pytest.mark.spec_defect
def test_exact_mc_agreement_primary_invariant():
    """Exact/MC agreement within 3 bootstrap SEs over {20, 50} x {0, 1, 2}.

    The (50, 2) cell is expected to fail: the tilted bulk there sits more
    than four base-measure sigmas into the Haar tail, so importance
    sampling from Haar cannot reach it at desk-scale sample counts and
    its bootstrap errors cannot see the missing mass (measured at M up
    to 8e6; see the decisions ledger).  The assertion is kept as
    specified rather than loosened.
    """
    import warnings as _warnings

    samples_for = {0.0: 3 * 10**4, 1.0: 3 * 10**4, 2.0: 5 * 10**5}
    failures = []
    for n in (20, 50):
        for k in (0.0, 1.0, 2.0):
            with _warnings.catch_warnings():
                _warnings.simplefilter("ignore", RuntimeWarning)
                report = tilted_moments_mc(n, k, 4, samples_for[k], SeedSpec(1000 + n))
            exact = weighted_central_moments(TiltSpec(n, k, 4))
            dev_mean = abs(report.weighted_mean - exact.mu_weighted)
            if not dev_mean < 3 * report.standard_errors[1]:
                failures.append((n, k, "mean", dev_mean / report.standard_errors[1]))
            for order in (2, 3, 4):
                dev = abs(report.central_moments[order] - exact.central_moments[order])
                if not dev < 3 * report.standard_errors[order]:
                    failures.append((n, k, order, dev / report.standard_errors[order]))
    assert not failures, f"cells beyond 3 bootstrap SEs: {failures}"


def test_low_ess_flagged_not_raised():
    with pytest.warns(RuntimeWarning, match="effective sample size"):
        report = tilted_moments_mc(50, 3.0, 2, 1000, SeedSpec(3))
    assert report.low_ess


def test_conformance_null_case_synthetic_gaussian():
    exact = weighted_central_moments(TiltSpec(30, 1.0, 4))
    rng = np.random.default_rng(77)
    values = rng.normal(exact.mu_weighted, math.sqrt(exact.central_moments[2]), size=50000)
    report = reduce_weighted(values, np.zeros_like(values), 4)
    conf = gaussian_conformance(report, 30, 1.0)
    assert abs(conf.mean_deviation) < 3
    assert abs(conf.variance_deviation) < 3
    for dev in conf.standardized_deviations.values():
        assert abs(dev) < 3
    assert conf.ks_statistic < 1.63 / math.sqrt(50000) * 1.5


def test_weighted_ks_against_wrong_law_is_large():
    rng = np.random.default_rng(5)
    values = rng.normal(0.0, 1.0, size=20000)
    ks = weighted_ks_vs_normal(values, np.zeros_like(values), 1.0, 1.0)
    assert ks > 0.2


def test_preconditions():
    with pytest.raises(ValueError):
        tilted_moments_mc(10, 1.0, 4, 999, SeedSpec(1))
    with pytest.raises(ValueError):
        tilted_moments_mc(10, 1.0, 9, 2000, SeedSpec(1))
    with pytest.raises(ValueError):
        tilted_moments_mc(10, -1.0, 4, 2000, SeedSpec(1))
    with pytest.raises(ValueError):
        reduce_weighted(np.ones(10), np.ones(11), 2)
    with pytest.raises(ValueError):
        reduce_weighted(np.ones(10), np.ones(10), 2, bootstrap=100)


def test_report_invariants_enforced():
    with pytest.raises(ValueError):
        MomentReport(
            sample_count=10,
            ess=20.0,
            weighted_mean=0.0,
            central_moments=[1.0, 0.0],
            standard_errors=[0.0, 0.1],
            standardized=[1.0, 0.0],
            standardized_errors=[0.0, 0.0],
            mean_weight=1.0,
            mean_weight_se=0.0,
            low_ess=False,
        )
