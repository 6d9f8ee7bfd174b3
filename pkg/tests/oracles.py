"""Independent reference implementations used to check the package.

Nothing here imports the code under test.
"""

import itertools
import math

import numpy as np


# --- dense QP -----------------------------------------------------------------------

def project_box_hyperplane(v, y, upper):
    """Euclidean projection of ``v`` onto ``{0 <= a <= upper, y'a = 0}``, ``y`` in {-1,+1}.

    ``a(lam) = clip(v - lam * y, 0, upper)`` and ``f(lam) = y'a(lam)`` is
    piecewise linear and nonincreasing, so the root is found exactly between
    consecutive breakpoints.
    """
    bps = np.unique(np.concatenate([v * y, (v - upper) * y]))

    vals = np.clip(v[None, :] - bps[:, None] * y[None, :], 0.0, upper) @ y
    if vals[0] < 0 or vals[-1] > 0:
        raise ValueError("empty feasible set")
    idx = np.flatnonzero(vals <= 0)[0]
    if vals[idx] == 0 or idx == 0:
        lam = bps[idx]
    else:
        lo, hi = bps[idx - 1], bps[idx]
        flo, fhi = vals[idx - 1], vals[idx]
        lam = lo + (hi - lo) * flo / (flo - fhi)
    return np.clip(v - lam * y, 0.0, upper)


def qp_projected_gradient(q, y, upper, iters=5000, tol=1e-10):
    """Minimize ``1/2 a'Qa - sum(a)`` over the SVM dual feasible set (FISTA)."""
    n = q.shape[0]
    lip = max(np.linalg.eigvalsh(q).max(), 1e-12)
    a = np.zeros(n)
    z = a.copy()
    t = 1.0

    def obj(v):
        return 0.5 * v @ q @ v - v.sum()

    def step(v):
        return project_box_hyperplane(v - (q @ v - 1.0) / lip, y, upper)

    for _ in range(iters):
        a_next = step(z)
        if obj(a_next) > obj(a):
            # restart momentum
            t = 1.0
            z = a.copy()
            continue
        t_next = (1 + math.sqrt(1 + 4 * t * t)) / 2
        z = a_next + (t - 1) / t_next * (a_next - a)
        a, t = a_next, t_next
        # stationarity of the plain projected-gradient map
        if np.max(np.abs(step(a) - a)) < tol:
            break
    return a, obj(a)


def linear_gram(x1, x2):
    return x1 @ x2.T


def poly_gram(x1, x2, degree=2):
    return (1.0 + x1 @ x2.T) ** degree


# --- rank statistics ------------------------------------------------------------------

def enumerate_pairs(x, y):
    """(concordant, discordant, extra_x, extra_y, ignored) by looping over pairs."""
    c = d = ex = ey = ig = 0
    for i, j in itertools.combinations(range(len(x)), 2):
        dx, dy = x[i] - x[j], y[i] - y[j]
        if dx == 0 and dy == 0:
            ig += 1
        elif dx == 0:
            ex += 1
        elif dy == 0:
            ey += 1
        elif (dx > 0) == (dy > 0):
            c += 1
        else:
            d += 1
    return c, d, ex, ey, ig


def tau_b_oracle(x, y):
    c, d, ex, ey, _ = enumerate_pairs(x, y)
    return (c - d) / math.sqrt((c + d + ex) * (c + d + ey))


def oc_oracle(x, y):
    c, d, ex, ey, _ = enumerate_pairs(x, y)
    return -1 + 2 * c / math.sqrt((c + d + ex) * (c + d + ey))


def average_ranks(v):
    """Ranks 1..n with ties sharing the mean of the positions they span."""
    v = list(v)
    order = sorted(range(len(v)), key=lambda i: v[i])
    ranks = [0.0] * len(v)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and v[order[j + 1]] == v[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman_oracle(x, y):
    rx, ry = average_ranks(x), average_ranks(y)
    n = len(rx)
    mx, my = sum(rx) / n, sum(ry) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    sxx = sum((a - mx) ** 2 for a in rx)
    syy = sum((b - my) ** 2 for b in ry)
    return sxy / math.sqrt(sxx * syy)


def spearman_closed_form(x, y):
    """``1 - 6 sum d^2 / (n (n^2 - 1))``, valid without ties."""
    rx, ry = average_ranks(x), average_ranks(y)
    n = len(rx)
    d2 = sum((a - b) ** 2 for a, b in zip(rx, ry))
    return 1 - 6 * d2 / (n * (n * n - 1))


# --- binomial -------------------------------------------------------------------------

def binomial_pmf(p, k):
    """``C(K-1, c-1) p^(c-1) (1-p)^(K-c)`` for ``c = 1..K``."""
    return np.array([math.comb(k - 1, c) * p ** c * (1 - p) ** (k - 1 - c) for c in range(k)])
