import numpy as np


def logistic(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def clamp_renormalize(masses):
    """Zero out negative masses and rescale each row to sum to one."""
    m = np.maximum(np.asarray(masses, dtype=float), 0.0)
    total = m.sum(axis=-1, keepdims=True)
    return m / np.where(total > 0, total, 1.0)


def exceedance_to_masses(p_greater):
    """Class masses from ``p_i = Pr(C > i)``, ``i = 1..K-1`` (last axis).

    ``P(C_1) = 1 - p_1``, ``P(C_k) = p_{k-1} - p_k``, ``P(C_K) = p_{K-1}``;
    negative differences from crossing estimates are clamped and the row is
    renormalized.
    """
    p = np.asarray(p_greater, dtype=float)
    ones = np.ones(p.shape[:-1] + (1,))
    zeros = np.zeros(p.shape[:-1] + (1,))
    upper = np.concatenate([ones, p], axis=-1)
    lower = np.concatenate([p, zeros], axis=-1)
    return clamp_renormalize(upper - lower)


def cumulative_to_masses(p_at_most):
    """Class masses from ``P_k = Pr(C <= k)``, ``k = 1..K-1``."""
    return exceedance_to_masses(1.0 - np.asarray(p_at_most, dtype=float))


def argmax_class(masses):
    """1-based argmax; ties go to the lower class."""
    return 1 + np.argmax(np.asarray(masses), axis=-1)
