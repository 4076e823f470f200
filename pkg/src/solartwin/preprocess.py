"""Class-imbalance correction and categorical association diagnostics.

SMOTEN balances nominal-feature datasets by synthesizing minority rows as
the per-feature mode of a random seed row's nearest minority neighbors
under Hamming distance.  Cramér's V quantifies pairwise association so the
balanced data can be checked for distributional drift.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .records import FEATURE_DOMAINS, FEATURE_NAMES, HouseholdTable
from .seeds import rng_for


@dataclass
class LabeledDataset:
    """Integer feature matrix with one class label per row.

    X is (n, d) of small integer codes, y is (n,) of class indices, and
    domains lists the valid codes of each feature column.
    """

    X: np.ndarray
    y: np.ndarray
    domains: tuple = field(default=())

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.int64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2:
            raise ValueError("X must be 2-dimensional")
        if self.y.shape != (self.X.shape[0],):
            raise ValueError("y length must match X row count")
        if not self.domains:
            self.domains = tuple(
                tuple(np.unique(self.X[:, j]).tolist()) for j in range(self.X.shape[1])
            )
        if len(self.domains) != self.X.shape[1]:
            raise ValueError("one domain per feature column required")
        for j, domain in enumerate(self.domains):
            bad = set(np.unique(self.X[:, j]).tolist()) - set(domain)
            if bad:
                raise ValueError(f"column {j} has codes outside domain: {sorted(bad)}")

    def __len__(self):
        return self.X.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, LabeledDataset)
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    def class_counts(self) -> dict:
        classes, counts = np.unique(self.y, return_counts=True)
        return {int(c): int(k) for c, k in zip(classes, counts)}


def dataset_from_households(table: HouseholdTable, label: str) -> LabeledDataset:
    """LabeledDataset over the eight feature columns of a household table.

    label selects the target: "solar" (0/1) or "sqft_class".
    """
    X = table.feature_matrix()
    if label == "solar":
        missing = [rec.id for rec in table if rec.solar is None]
        if missing:
            raise ValueError(f"household {missing[0]} has no solar label")
        y = np.array([1 if rec.solar else 0 for rec in table], dtype=np.int64)
    elif label == "sqft_class":
        missing = [rec.id for rec in table if rec.sqft_class is None]
        if missing:
            raise ValueError(f"household {missing[0]} has no sqft_class label")
        y = np.array([rec.sqft_class for rec in table], dtype=np.int64)
    else:
        raise ValueError(f"unknown label {label!r}")
    domains = tuple(tuple(FEATURE_DOMAINS[name]) for name in FEATURE_NAMES)
    return LabeledDataset(X, y, domains)


def smoten_oversample(data: LabeledDataset, k: int = 5, seed: int = 0) -> LabeledDataset:
    """Upsample every minority class to the majority count.

    Each synthetic row takes a uniformly chosen minority seed row and sets
    feature j to the mode over the seed's k nearest minority neighbors by
    Hamming distance (the seed itself excluded; neighbor distance ties go to
    the lower row index, mode ties to the lowest code).  Original rows are
    passed through verbatim, synthetics are appended per class in ascending
    class order.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    counts = data.class_counts()
    if len(counts) < 2:
        raise ValueError("need at least two classes to oversample")
    majority = max(counts.values())
    rng = rng_for(seed, "smoten")
    synth_rows = []
    synth_labels = []
    for cls in sorted(counts):
        deficit = majority - counts[cls]
        if deficit == 0:
            continue
        if counts[cls] <= k:
            raise ValueError(
                f"class {cls} has {counts[cls]} rows, not enough neighbors for "
                f"k={k}; use a smaller k"
            )
        rows = data.X[data.y == cls]
        for _ in range(deficit):
            s = int(rng.integers(0, rows.shape[0]))
            dist = np.count_nonzero(rows != rows[s], axis=1)
            dist[s] = rows.shape[1] + 1  # a row is not its own neighbor
            order = np.lexsort((np.arange(rows.shape[0]), dist))
            neighbors = rows[order[:k]]
            row = np.empty(rows.shape[1], dtype=np.int64)
            for j in range(rows.shape[1]):
                codes, code_counts = np.unique(neighbors[:, j], return_counts=True)
                row[j] = codes[np.argmax(code_counts)]
            synth_rows.append(row)
            synth_labels.append(cls)
    if not synth_rows:
        return LabeledDataset(data.X.copy(), data.y.copy(), data.domains)
    X = np.vstack([data.X, np.array(synth_rows, dtype=np.int64)])
    y = np.concatenate([data.y, np.array(synth_labels, dtype=np.int64)])
    return LabeledDataset(X, y, data.domains)


def random_oversample(data: LabeledDataset, seed: int = 0) -> LabeledDataset:
    """Duplicate-with-replacement fallback balancing."""
    counts = data.class_counts()
    if len(counts) < 2:
        raise ValueError("need at least two classes to oversample")
    majority = max(counts.values())
    rng = rng_for(seed, "random-oversample")
    synth_rows = []
    synth_labels = []
    for cls in sorted(counts):
        deficit = majority - counts[cls]
        if deficit == 0:
            continue
        rows = data.X[data.y == cls]
        picks = rng.integers(0, rows.shape[0], size=deficit)
        synth_rows.append(rows[picks])
        synth_labels.append(np.full(deficit, cls, dtype=np.int64))
    if not synth_rows:
        return LabeledDataset(data.X.copy(), data.y.copy(), data.domains)
    X = np.vstack([data.X] + synth_rows)
    y = np.concatenate([data.y] + synth_labels)
    return LabeledDataset(X, y, data.domains)


def cramers_v(col_a, col_b) -> float:
    """Cramér's V association between two code vectors, in [0, 1].

    V = sqrt(chi2 / (n * min(r-1, c-1))); degenerate tables (a constant
    column) return 0.
    """
    a = np.asarray(col_a)
    b = np.asarray(col_b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("columns must be 1-d and of equal length")
    n = a.size
    if n < 2:
        raise ValueError("need at least 2 observations")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    r = int(ai.max()) + 1
    c = int(bi.max()) + 1
    if min(r - 1, c - 1) == 0:
        return 0.0
    observed = np.zeros((r, c))
    np.add.at(observed, (ai, bi), 1.0)
    expected = observed.sum(axis=1, keepdims=True) * observed.sum(axis=0) / n
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = np.where(expected > 0, (observed - expected) ** 2 / expected, 0.0)
    chi2 = float(terms.sum())
    v = math.sqrt(max(0.0, chi2 / (n * min(r - 1, c - 1))))
    return min(1.0, v)


def correlation_matrix(data: LabeledDataset, include_label: bool = False) -> np.ndarray:
    """Pairwise Cramér's V over feature columns (label appended on request)."""
    if len(data) == 0:
        raise ValueError("empty dataset")
    columns = [data.X[:, j] for j in range(data.X.shape[1])]
    if include_label:
        columns.append(data.y)
    d = len(columns)
    matrix = np.eye(d)
    for i in range(d):
        for j in range(i + 1, d):
            v = cramers_v(columns[i], columns[j])
            matrix[i, j] = v
            matrix[j, i] = v
    return matrix
