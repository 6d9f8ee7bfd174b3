"""Synthetic ordinal benchmarks on the unit square and the unit 4-cube.

A point drawn uniformly gets a deterministic score (a centred product of
its coordinates, scaled), Gaussian noise is added, and the noisy score is
thresholded into ``K`` ordered classes. The noiseless label thresholds the
score alone, so comparing the two shows how many labels the noise flipped.
"""

from dataclasses import dataclass

import numpy as np

from ordrep.core import Dataset
from ordrep.rng import make_rng, normal

INF = float("inf")

# (space, K) -> (thresholds b_1..b_{K-1}, noise sigma, default n)
PRESETS = {
    ("r2", 5): ((-1.0, -0.1, 0.25, 1.0), 0.125, 1000),
    ("r2", 10): ((-1.75, -1.0, -0.5, -0.1, 0.1, 0.25, 0.75, 1.0, 1.75), 0.125 / 2, 1000),
    ("r4", 5): ((-2.5, -0.5, 0.5, 3.0), 0.25, 2000),
    ("r4", 10): ((-5.0, -2.5, -1.0, -0.4, 0.1, 0.5, 1.1, 3.0, 6.0), 0.125, 2000),
}

SPACE_DIM = {"r2": 2, "r4": 4}
SCORE_SCALE = {"r2": 10.0, "r4": 1000.0}


@dataclass(frozen=True)
class SyntheticSpec:
    """Generator settings; ``thresholds`` are the interior cuts ``b_1..b_{K-1}``."""

    space: str
    num_classes: int
    n: int
    sigma: float
    thresholds: tuple
    seed: int = 0

    def __post_init__(self):
        if self.space not in SPACE_DIM:
            raise ValueError(f"space must be 'r2' or 'r4', got {self.space!r}")
        b = tuple(float(v) for v in self.thresholds)
        if len(b) != self.num_classes - 1:
            raise ValueError(
                f"{self.num_classes} classes need {self.num_classes - 1} thresholds, got {len(b)}"
            )
        if any(not lo < hi for lo, hi in zip(b, b[1:])):
            raise ValueError("thresholds must be strictly increasing")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        object.__setattr__(self, "thresholds", b)

    @property
    def dim(self):
        return SPACE_DIM[self.space]

    @property
    def full_thresholds(self):
        return (-INF,) + self.thresholds + (INF,)


def preset(space, num_classes, n=None, seed=0, sigma=None):
    """One of the four benchmark configurations, optionally resized."""
    key = (space, int(num_classes))
    if key not in PRESETS:
        raise ValueError(f"no preset for space={space!r}, K={num_classes}")
    b, default_sigma, default_n = PRESETS[key]
    return SyntheticSpec(
        space=space,
        num_classes=int(num_classes),
        n=default_n if n is None else int(n),
        sigma=default_sigma if sigma is None else float(sigma),
        thresholds=b,
        seed=seed,
    )


def score(space, x):
    """``10 (x1-.5)(x2-.5)`` in r2, ``1000 prod_i (x_i-.5)`` in r4."""
    x = np.asarray(x, dtype=float)
    return SCORE_SCALE[space] * np.prod(x - 0.5, axis=-1)


def threshold(values, thresholds):
    """Smallest ``r`` with ``b_{r-1} < v <= b_r``; exact hits go to the lower class."""
    return 1 + np.searchsorted(np.asarray(thresholds), np.asarray(values), side="left")


def generate(spec):
    """Draw a dataset; returns ``(dataset, noiseless_labels)``.

    Points come first (``n * dim`` uniforms), then the Box-Muller noise, all
    from one PCG64 stream seeded by ``spec.seed``.
    """
    rng = make_rng(spec.seed)
    x = rng.random((spec.n, spec.dim))
    clean = score(spec.space, x)
    noisy = clean + spec.sigma * normal(rng, spec.n) if spec.sigma > 0 else clean
    labels = threshold(noisy, spec.thresholds)
    noiseless = threshold(clean, spec.thresholds)
    return Dataset(x, labels, spec.num_classes), noiseless


def corruption_rate(labels, noiseless):
    return float(np.mean(np.asarray(labels) != np.asarray(noiseless)))
