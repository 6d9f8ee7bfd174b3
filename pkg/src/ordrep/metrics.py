"""Evaluation criteria for ordinal predictions.

Error rates (MER, MAE, MSE), the bounded loss ``l^s``, and three rank
agreement coefficients built on pair counts: Spearman, Kendall tau-b and
``o_c``. Correlation measures raise ``ValueError("degenerate ranking")``
when a ranking has no spread.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

DEGENERATE = "degenerate ranking"


def _pair(pred, truth, minimum=1):
    a = np.asarray(pred)
    b = np.asarray(truth)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("expected 1-D sequences")
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < minimum:
        raise ValueError(f"need at least {minimum} values")
    return a, b


def mer(pred, truth):
    """Misclassification error rate."""
    a, b = _pair(pred, truth)
    return float(np.mean(a != b))


def mae(pred, truth):
    a, b = _pair(pred, truth)
    return float(np.mean(np.abs(a.astype(float) - b)))


def mse(pred, truth):
    a, b = _pair(pred, truth)
    d = a.astype(float) - b
    return float(np.mean(d * d))


def loss_ls(f, k, s):
    """``min(|f - k|, s)``: absolute class error capped at ``s``."""
    if s < 1:
        raise ValueError("s must be at least 1")
    return int(min(abs(int(f) - int(k)), int(s)))


def empirical_risk_s(pred, truth, s):
    a, b = _pair(pred, truth)
    if s < 1:
        raise ValueError("s must be at least 1")
    return float(np.mean(np.minimum(np.abs(a.astype(np.int64) - b.astype(np.int64)), s)))


@dataclass(frozen=True)
class PairCounts:
    concordant: int
    discordant: int
    extra_x: int
    extra_y: int
    ignored: int

    @property
    def total(self):
        return (self.concordant + self.discordant + self.extra_x + self.extra_y
                + self.ignored)


def count_pairs(x, y):
    """Sort every unordered pair into the five buckets; ``O(n^2)`` memory-light."""
    a, b = _pair(x, y, minimum=2)
    a = a.astype(float)
    b = b.astype(float)
    c = d = ex = ey = ig = 0
    for i in range(a.size - 1):
        sx = np.sign(a[i + 1:] - a[i])
        sy = np.sign(b[i + 1:] - b[i])
        tx, ty = sx == 0, sy == 0
        ig += int(np.count_nonzero(tx & ty))
        ex += int(np.count_nonzero(tx & ~ty))
        ey += int(np.count_nonzero(ty & ~tx))
        prod = sx * sy
        c += int(np.count_nonzero(prod > 0))
        d += int(np.count_nonzero(prod < 0))
    return PairCounts(c, d, ex, ey, ig)


def _denominator(counts):
    base = counts.concordant + counts.discordant
    # integer product first, one rounding in the square root
    q = math.sqrt((base + counts.extra_x) * (base + counts.extra_y))
    if q == 0:
        raise ValueError(DEGENERATE)
    return q


def kendall_tau_b(x, y, counts=None):
    counts = count_pairs(x, y) if counts is None else counts
    return (counts.concordant - counts.discordant) / _denominator(counts)


def oc_coefficient(x, y, counts=None):
    counts = count_pairs(x, y) if counts is None else counts
    return -1.0 + 2.0 * counts.concordant / _denominator(counts)


def spearman(x, y):
    """Pearson correlation of average ranks."""
    a, b = _pair(x, y, minimum=2)
    ra = rankdata(a) - (a.size + 1) / 2.0
    rb = rankdata(b) - (b.size + 1) / 2.0
    sa, sb = np.dot(ra, ra), np.dot(rb, rb)
    if sa == 0 or sb == 0:
        raise ValueError(DEGENERATE)
    return float(np.dot(ra, rb) / math.sqrt(sa * sb))


@dataclass(frozen=True)
class EvaluationReport:
    mer: float
    mae: float
    mse: float
    spearman: float
    kendall_tau_b: float
    o_c: float
    n: int

    COLUMNS = ("mer", "mae", "mse", "rmse", "spearman", "tau_b", "o_c", "n")

    @property
    def rmse(self):
        return math.sqrt(self.mse)

    def row(self):
        """Values in :attr:`COLUMNS` order."""
        return (self.mer, self.mae, self.mse, self.rmse, self.spearman,
                self.kendall_tau_b, self.o_c, self.n)


def _or_nan(fn, *args):
    try:
        return fn(*args)
    except ValueError as err:
        if str(err) != DEGENERATE:
            raise
        return float("nan")


def evaluate(pred, truth):
    """All criteria at once; undefined coefficients come back as NaN.

    A constant prediction vector has no ranking, so its rank coefficients
    are reported as NaN rather than aborting the whole report.
    """
    a, b = _pair(pred, truth)
    if a.size < 2:
        nan = float("nan")
        return EvaluationReport(mer(a, b), mae(a, b), mse(a, b), nan, nan, nan, 1)
    counts = count_pairs(a, b)
    return EvaluationReport(
        mer=mer(a, b),
        mae=mae(a, b),
        mse=mse(a, b),
        spearman=_or_nan(spearman, a, b),
        kendall_tau_b=_or_nan(kendall_tau_b, a, b, counts),
        o_c=_or_nan(oc_coefficient, a, b, counts),
        n=int(a.size),
    )
