"""Datasets, min-max scaling, target binning and split protocols."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from ordrep.rng import make_rng


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with ordinal labels in ``1..num_classes``.

    Parameters
    ----------
    features : array-like, shape (n_samples, n_features)
    labels : array-like of int, shape (n_samples,)
    num_classes : int
        Number of ordered classes ``K``; labels need not cover all of them.
    """

    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or x.shape[1] < 1:
            raise ValueError("features must be a 2-D matrix with at least one column")
        y = np.asarray(self.labels)
        if y.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        if y.size and not np.all(np.equal(np.mod(y, 1), 0)):
            raise ValueError("labels must be integers")
        y = y.astype(np.int64)
        if x.shape[0] != y.shape[0]:
            raise ValueError(
                f"features have {x.shape[0]} rows but there are {y.shape[0]} labels"
            )
        k = int(self.num_classes)
        if k < 2:
            raise ValueError("num_classes must be at least 2")
        if y.size and (y.min() < 1 or y.max() > k):
            raise ValueError(f"labels must lie in 1..{k}")
        object.__setattr__(self, "features", _frozen(x, float))
        object.__setattr__(self, "labels", _frozen(y, np.int64))
        object.__setattr__(self, "num_classes", k)

    def __len__(self):
        return self.features.shape[0]

    @property
    def dim(self):
        return self.features.shape[1]

    def subset(self, indices):
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.num_classes)

    def with_features(self, features):
        return Dataset(features, self.labels, self.num_classes)

    def class_counts(self):
        return np.bincount(self.labels, minlength=self.num_classes + 1)[1:]


@dataclass(frozen=True)
class MinMaxScaler:
    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.minimum, dtype=float).ravel()
        hi = np.asarray(self.maximum, dtype=float).ravel()
        if lo.shape != hi.shape:
            raise ValueError("minimum and maximum must have the same length")
        if np.any(lo > hi):
            raise ValueError("minimum exceeds maximum for some feature")
        object.__setattr__(self, "minimum", _frozen(lo, float))
        object.__setattr__(self, "maximum", _frozen(hi, float))

    @property
    def dim(self):
        return self.minimum.shape[0]

    def transform(self, x):
        """Scale a vector or a row-matrix; constant features map to 0."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected {self.dim} features, got {x.shape[-1]}")
        span = self.maximum - self.minimum
        safe = np.where(span > 0, span, 1.0)
        out = (x - self.minimum) / safe
        return np.where(span > 0, out, 0.0)


def fit_minmax(dataset):
    """Record columnwise extrema of ``dataset.features``."""
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    x = dataset.features
    return MinMaxScaler(x.min(axis=0), x.max(axis=0))


def apply_minmax(scaler, x):
    # out-of-range inputs extrapolate linearly, no clamping
    return scaler.transform(x)


def equal_frequency_bins(values, num_bins):
    """Discretize ``values`` into ``num_bins`` ordered, equally populated bins.

    Sorted positions are cut at ``ceil(i * n / K)`` for ``i = 1..K-1``.
    Equal values are never split: every duplicate takes the bin of its first
    occurrence in sorted order, so a long tie run can leave later bins
    short or empty.

    Returns
    -------
    labels : ndarray of int in ``1..num_bins``, aligned with ``values``
    """
    v = np.asarray(values, dtype=float).ravel()
    n = v.shape[0]
    k = int(num_bins)
    if k < 2:
        raise ValueError("need at least 2 bins")
    if k > n:
        raise ValueError(f"cannot form {k} bins from {n} values")
    order = np.argsort(v, kind="stable")
    cuts = np.array([math.ceil(i * n / k) for i in range(1, k)])
    positional = 1 + np.searchsorted(cuts, np.arange(n), side="right")
    sorted_v = v[order]
    # first sorted position of each value's tie run
    first = np.searchsorted(sorted_v, sorted_v, side="left")
    labels = np.empty(n, dtype=np.int64)
    labels[order] = positional[first]
    return labels


@dataclass(frozen=True)
class SplitPlan:
    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int = 0

    def __post_init__(self):
        tr = _frozen(self.train_indices, np.int64)
        te = _frozen(self.test_indices, np.int64)
        if np.intersect1d(tr, te).size:
            raise ValueError("train and test indices overlap")
        object.__setattr__(self, "train_indices", tr)
        object.__setattr__(self, "test_indices", te)

    def apply(self, dataset):
        return dataset.subset(self.train_indices), dataset.subset(self.test_indices)


def split_random(dataset, n_train, seed):
    """Uniformly random ``n_train``-subset for training, the rest for testing."""
    n = len(dataset)
    if not 1 <= n_train < n:
        raise ValueError(f"n_train must satisfy 1 <= n_train < {n}, got {n_train}")
    perm = make_rng(seed).permutation(n)
    return SplitPlan(np.sort(perm[:n_train]), np.sort(perm[n_train:]), int(seed))


def loocv_folds(dataset):
    n = len(dataset)
    if n < 2:
        raise ValueError("leave-one-out needs at least 2 examples")
    everything = np.arange(n)
    return [SplitPlan(np.delete(everything, i), np.array([i])) for i in range(n)]


# --- CSV ---------------------------------------------------------------------

def write_csv(path, dataset, extra_columns=None):
    """Write ``f1,...,fp,label`` rows; ``extra_columns`` maps name -> column."""
    extra = dict(extra_columns or {})
    header = [f"f{d + 1}" for d in range(dataset.dim)] + ["label"] + list(extra)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        cols = [np.asarray(c) for c in extra.values()]
        for i in range(len(dataset)):
            row = [repr(float(v)) for v in dataset.features[i]]
            row.append(str(int(dataset.labels[i])))
            row.extend(_fmt(c[i]) for c in cols)
            w.writerow(row)


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def read_csv(path, num_classes=None):
    """Read a dataset written by :func:`write_csv`.

    Feature columns are those named ``f<d>``; other columns besides ``label``
    are ignored. ``num_classes`` defaults to the largest label present.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if "label" not in header:
        raise ValueError(f"{path}: header has no 'label' column")
    fcols = [i for i, h in enumerate(header) if h.startswith("f") and h[1:].isdigit()]
    if not fcols:
        raise ValueError(f"{path}: no feature columns")
    lcol = header.index("label")
    body = [r for r in rows[1:] if r]
    x = np.array([[float(r[i]) for i in fcols] for r in body], dtype=float)
    x = x.reshape(len(body), len(fcols))
    y = np.array([int(r[lcol]) for r in body], dtype=np.int64)
    k = num_classes if num_classes is not None else max(2, int(y.max()) if y.size else 2)
    return Dataset(x, y, k)


# --- public regression datasets ----------------------------------------------

ABALONE_SEX = {"M": 1.0, "F": 0.0, "I": -1.0}


def load_abalone(path, num_classes, prescaled=True):
    """Load the UCI abalone file and bin its ring counts into ordinal classes.

    Sex is encoded M=1, F=0, I=-1. The distributed file already carries the
    continuous columns divided by 200; pass ``prescaled=False`` for a file in
    raw millimetres and grams so the division is applied here.
    Rows with missing fields are dropped.
    """
    feats, rings = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = [p.strip() for p in line.strip().split(",")]
            if len(parts) != 9 or "?" in parts or "" in parts:
                continue
            if parts[0] not in ABALONE_SEX:
                continue  # header line
            cont = [float(p) for p in parts[1:8]]
            if not prescaled:
                cont = [c / 200.0 for c in cont]
            feats.append([ABALONE_SEX[parts[0]]] + cont)
            rings.append(float(parts[8]))
    if not feats:
        raise ValueError(f"{path}: no abalone records found")
    labels = equal_frequency_bins(rings, num_classes)
    return Dataset(np.array(feats), labels, num_classes)


CPU_COLUMNS = ("MYCT", "MMIN", "MMAX", "CACH", "CHMIN", "CHMAX")


def load_machine_cpu(path, num_classes):
    """Load the UCI machine.data file: six predictors, PRP binned as target.

    Vendor, model name and the estimated performance column are discarded.
    Features are returned unscaled; fit a :class:`MinMaxScaler` on the
    training part.
    """
    feats, target = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = [p.strip() for p in line.strip().split(",")]
            if len(parts) != 10 or "?" in parts:
                continue
            try:
                feats.append([float(p) for p in parts[2:8]])
                target.append(float(parts[8]))
            except ValueError:
                continue
    if not feats:
        raise ValueError(f"{path}: no machine records found")
    return Dataset(np.array(feats), equal_frequency_bins(target, num_classes), num_classes)
