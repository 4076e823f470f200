"""Validation metrics: divergences, load-shape correlation, count deltas.

All divergences use base-2 logarithms so the Jensen-Shannon divergence
lands in [0, 1]: 0 for identical distributions, 1 for disjoint supports.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability mass over shared ascending bin edges."""

    bin_edges: tuple
    mass: tuple

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        mass = np.asarray(self.mass, dtype=float)
        if edges.size != mass.size + 1:
            raise ValueError("need len(bin_edges) == len(mass) + 1")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly ascending")
        if np.any(mass < 0) or abs(float(mass.sum()) - 1.0) > 1e-9:
            raise ValueError("mass must be non-negative and sum to 1")

    @classmethod
    def from_counts(cls, bin_edges, counts) -> "DiscreteDistribution":
        counts = np.asarray(counts, dtype=float)
        total = counts.sum()
        if total <= 0:
            raise ValueError("counts sum to zero")
        return cls(tuple(float(e) for e in bin_edges), tuple(counts / total))


def _kld_mass(p: np.ndarray, q: np.ndarray) -> float:
    support = p > 0
    if np.any(q[support] == 0):
        return math.inf
    terms = p[support] * np.log2(p[support] / q[support])
    return max(0.0, float(terms.sum()))


def _check_edges(p: DiscreteDistribution, q: DiscreteDistribution):
    if not np.array_equal(p.bin_edges, q.bin_edges):
        raise ValueError("distributions must share bin edges")


def kld(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Kullback-Leibler divergence in bits; +inf when q lacks p's support."""
    _check_edges(p, q)
    return _kld_mass(np.asarray(p.mass), np.asarray(q.mass))


def jsd(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Jensen-Shannon divergence in bits, bounded [0, 1]."""
    _check_edges(p, q)
    return _jsd_mass(np.asarray(p.mass), np.asarray(q.mass))


def _jsd_mass(pm: np.ndarray, qm: np.ndarray) -> float:
    m = 0.5 * (pm + qm)
    value = 0.5 * _kld_mass(pm, m) + 0.5 * _kld_mass(qm, m)
    return min(1.0, max(0.0, value))


def jsd_histogram(samples_a, samples_b, bins: int = 50) -> float:
    """JSD between equal-width shared-range histograms of two sample sets."""
    a = np.asarray(list(samples_a), dtype=float)
    b = np.asarray(list(samples_b), dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both sample sets must be non-empty")
    lo = float(min(a.min(), b.min()))
    hi = float(max(a.max(), b.max()))
    if lo == hi:
        return 0.0  # every sample identical on both sides
    counts_a, edges = np.histogram(a, bins=bins, range=(lo, hi))
    counts_b, _ = np.histogram(b, bins=bins, range=(lo, hi))
    return _jsd_mass(counts_a / a.size, counts_b / b.size)


def scott_bandwidth(samples) -> float:
    """Scott's rule: n^(-1/5) times the population standard deviation."""
    arr = np.asarray(list(samples), dtype=float)
    if arr.size == 0:
        raise ValueError("empty sample set")
    return arr.size ** (-1.0 / 5.0) * float(np.std(arr))


def _kde_mass(samples: np.ndarray, bandwidths: np.ndarray, xs: np.ndarray) -> np.ndarray:
    z = (xs[:, None] - samples[None, :]) / bandwidths[None, :]
    kernels = np.exp(-0.5 * z**2) / (bandwidths[None, :] * math.sqrt(2.0 * math.pi))
    density = kernels.mean(axis=1)
    return density / density.sum()


def jsd_kde(samples_a, samples_b, bandwidth_a=None, grid: int = 512) -> float:
    """JSD between Gaussian KDEs evaluated on a shared grid.

    Side b always uses Scott's rule.  Side a uses Scott's rule by default;
    pass a scalar bandwidth or one positive std per point (the synthetic
    side's per-sample uncertainty) to override.
    """
    a = np.asarray(list(samples_a), dtype=float)
    b = np.asarray(list(samples_b), dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("need at least 2 samples on each side")
    h_b = scott_bandwidth(b)
    if h_b <= 0:
        raise ValueError("zero-variance sample set; use jsd_histogram instead")
    if bandwidth_a is None:
        h_a_scalar = scott_bandwidth(a)
        if h_a_scalar <= 0:
            raise ValueError("zero-variance sample set; use jsd_histogram instead")
        h_a = np.full(a.size, h_a_scalar)
    else:
        h_a = np.asarray(bandwidth_a, dtype=float)
        if h_a.ndim == 0:
            h_a = np.full(a.size, float(h_a))
        if h_a.shape != a.shape:
            raise ValueError("need one bandwidth per sample on side a")
        if np.any(h_a <= 0):
            raise ValueError(
                "non-positive bandwidth on side a; use jsd_histogram instead"
            )
    pad = 3.0 * max(float(h_a.max()), h_b)
    lo = min(float(a.min()), float(b.min())) - pad
    hi = max(float(a.max()), float(b.max())) + pad
    xs = np.linspace(lo, hi, grid)
    return _jsd_mass(_kde_mass(a, h_a, xs), _kde_mass(b, np.full(b.size, h_b), xs))


def pearson_monthly(a, b) -> dict:
    """Per-month Pearson correlation of hourly load shapes.

    Inputs are iterables of (month_key, hour, value); values are averaged
    per (month, hour) into 24-point shapes first.  Both sides must cover
    the same months and all 24 hours of each.  Months where either shape
    has zero variance map to None.
    """
    shapes_a = _monthly_shapes(a, "a")
    shapes_b = _monthly_shapes(b, "b")
    if set(shapes_a) != set(shapes_b):
        raise ValueError("the two series cover different months")
    out = {}
    for month in sorted(shapes_a):
        va = shapes_a[month]
        vb = shapes_b[month]
        if float(np.std(va)) == 0.0 or float(np.std(vb)) == 0.0:
            out[month] = None
        else:
            out[month] = float(np.corrcoef(va, vb)[0, 1])
    return out


def _monthly_shapes(rows, side: str) -> dict:
    sums = {}
    counts = {}
    for month, hour, value in rows:
        hour = int(hour)
        if not 0 <= hour < 24:
            raise ValueError(f"hour {hour} out of range on side {side}")
        key = (month, hour)
        sums[key] = sums.get(key, 0.0) + float(value)
        counts[key] = counts.get(key, 0) + 1
    months = sorted({m for m, _ in sums})
    if not months:
        raise ValueError(f"no rows on side {side}")
    shapes = {}
    for month in months:
        shape = np.empty(24)
        for hour in range(24):
            key = (month, hour)
            if key not in sums:
                raise ValueError(f"side {side} missing hour {hour} in month {month}")
            shape[hour] = sums[key] / counts[key]
        shapes[month] = shape
    return shapes


def relative_pct_diff(real: float, synth: float) -> float:
    """100 * |synth - real| / real; undefined (error) when real is 0."""
    if real <= 0:
        raise ValueError("relative percentage difference undefined for real <= 0")
    return 100.0 * abs(synth - real) / real
