"""Divergences, KDE comparison, and shape correlation."""

import math

import numpy as np
import pytest

from solartwin.metrics import (
    DiscreteDistribution,
    jsd,
    jsd_histogram,
    jsd_kde,
    kld,
    pearson_monthly,
    relative_pct_diff,
    scott_bandwidth,
)

EDGES = (0.0, 1.0, 2.0)


def dist(*mass):
    edges = tuple(float(i) for i in range(len(mass) + 1))
    return DiscreteDistribution(edges, mass)


def test_distribution_validation():
    with pytest.raises(ValueError):
        DiscreteDistribution(EDGES, (0.5, 0.6))  # does not sum to 1
    with pytest.raises(ValueError):
        DiscreteDistribution(EDGES, (1.2, -0.2))
    with pytest.raises(ValueError):
        DiscreteDistribution((0.0, 0.0, 1.0), (0.5, 0.5))
    d = DiscreteDistribution.from_counts(EDGES, [3, 1])
    assert d.mass == pytest.approx((0.75, 0.25))


def test_kld_oracle_and_infinity():
    # KL([.5,.5] || [.25,.75]) = .5*log2(2) + .5*log2(2/3)
    assert kld(dist(0.5, 0.5), dist(0.25, 0.75)) == pytest.approx(
        0.20751874963942185, rel=1e-12
    )
    assert kld(dist(1.0, 0.0), dist(1.0, 0.0)) == 0.0
    assert kld(dist(0.5, 0.5), dist(1.0, 0.0)) == math.inf
    with pytest.raises(ValueError, match="share bin edges"):
        kld(dist(0.5, 0.5), DiscreteDistribution((0.0, 5.0, 9.0), (0.5, 0.5)))


def test_jsd_bounds_and_oracle():
    assert jsd(dist(0.3, 0.7), dist(0.3, 0.7)) == 0.0
    assert jsd(dist(1.0, 0.0), dist(0.0, 1.0)) == 1.0  # disjoint, base 2
    assert jsd(dist(0.5, 0.5), dist(0.25, 0.75)) == pytest.approx(
        0.0487949406953985, rel=1e-12
    )


def test_jsd_symmetry_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a = rng.random(6)
        b = rng.random(6)
        p = dist(*(a / a.sum()))
        q = dist(*(b / b.sum()))
        assert abs(jsd(p, q) - jsd(q, p)) <= 1e-12
        assert 0.0 <= jsd(p, q) <= 1.0


def test_jsd_histogram_behavior():
    rng = np.random.default_rng(1)
    samples = rng.normal(10.0, 2.0, size=500)
    assert jsd_histogram(samples, samples) == 0.0
    far = samples + 1000.0
    assert jsd_histogram(samples, far) == pytest.approx(1.0)
    assert jsd_histogram([5.0, 5.0], [5.0, 5.0]) == 0.0  # degenerate range
    mid = jsd_histogram(samples, samples + 0.5)
    assert 0.0 < mid < 1.0


def test_scott_bandwidth_exact_values():
    # n^(-1/5) * population std; 32 points of unit std give exactly 0.5
    samples = [-1.0, 1.0] * 16
    assert scott_bandwidth(samples) == 0.5
    assert scott_bandwidth([-1.0, 1.0] * 8) == 16.0 ** (-0.2)


def test_jsd_kde_basics():
    rng = np.random.default_rng(2)
    a = rng.normal(0.0, 1.0, size=100)
    assert jsd_kde(a, a) == pytest.approx(0.0, abs=1e-12)
    b = rng.normal(60.0, 1.0, size=100)
    assert jsd_kde(a, b) > 0.99
    near = a + 0.2
    assert 0.0 < jsd_kde(a, near) < 0.5


def test_jsd_kde_per_point_bandwidths():
    rng = np.random.default_rng(3)
    a = rng.normal(0.0, 1.0, size=50)
    b = rng.normal(0.2, 1.0, size=60)
    per_point = np.full(50, 0.4)
    v = jsd_kde(a, b, bandwidth_a=per_point)
    w = jsd_kde(a, b, bandwidth_a=0.4)
    assert v == pytest.approx(w, rel=1e-12)
    with pytest.raises(ValueError, match="bandwidth"):
        jsd_kde(a, b, bandwidth_a=np.zeros(50))


def test_jsd_kde_guards():
    with pytest.raises(ValueError, match="zero-variance"):
        jsd_kde([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError, match="at least"):
        jsd_kde([1.0], [1.0, 2.0])


def month_rows(values_by_month, scale=1.0, offset=0.0):
    rows = []
    for month, values in values_by_month.items():
        for hour in range(24):
            rows.append((month, hour, scale * values[hour] + offset))
    return rows


def test_pearson_monthly_identity_and_affine():
    rng = np.random.default_rng(4)
    shapes = {"2018-01": rng.random(24), "2018-02": rng.random(24)}
    a = month_rows(shapes)
    same = pearson_monthly(a, month_rows(shapes))
    affine = pearson_monthly(a, month_rows(shapes, scale=3.0, offset=7.0))
    for month in ("2018-01", "2018-02"):
        assert same[month] == pytest.approx(1.0, abs=1e-9)
        assert affine[month] == pytest.approx(1.0, abs=1e-9)


def test_pearson_monthly_averages_duplicates():
    shape = np.arange(24.0)
    a = month_rows({"m": shape}) + month_rows({"m": shape + 2.0})
    b = month_rows({"m": shape + 1.0})  # the mean of the two a-series
    out = pearson_monthly(a, b)
    assert out["m"] == pytest.approx(1.0, abs=1e-12)


def test_pearson_monthly_zero_variance_is_none():
    flat = {"m": np.ones(24)}
    varying = {"m": np.arange(24.0)}
    assert pearson_monthly(month_rows(flat), month_rows(varying))["m"] is None


def test_pearson_monthly_errors():
    full = month_rows({"m": np.arange(24.0)})
    with pytest.raises(ValueError, match="missing hour 23 in month m"):
        pearson_monthly(full[:-1], full)
    other = month_rows({"x": np.arange(24.0)})
    with pytest.raises(ValueError, match="different months"):
        pearson_monthly(full, other)


def test_relative_pct_diff_oracle():
    assert relative_pct_diff(62, 338) == pytest.approx(445.16129032258067, rel=1e-12)
    assert relative_pct_diff(50, 50) == 0.0
    assert relative_pct_diff(100, 50) == 50.0
    with pytest.raises(ValueError, match="undefined"):
        relative_pct_diff(0, 10)
