"""Soft-margin binary SVM trained by sequential minimal optimization.

The dual solved here is::

    min_a  1/2 a'Qa - sum(a)    s.t.  0 <= a_i <= C_i,  y'a = 0,
    Q_it = y_i y_t k(x_i, x_t)

Each step takes ``i`` as the maximal KKT violator among the indices allowed
to move up; its partner ``j`` is the violating index allowed to move down
whose pairing with ``i`` gives the largest second-order decrease of the
objective. The two-variable subproblem is then solved in closed form.
Convergence is declared once ``m(a) - M(a)``, the spread between the
largest and smallest violation scores, drops below the tolerance.
"""

from dataclasses import dataclass, field

import numba
import numpy as np

from ordrep.svm.kernels import Kernel, KernelCache

KKT_TOL = 1e-3
MAX_ITER = 10_000_000
TAU = 1e-12


class ConvergenceError(RuntimeError):
    def __init__(self, message, iterations, gap):
        super().__init__(message)
        self.iterations = iterations
        self.gap = gap


@dataclass(frozen=True)
class BinarySVMModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray       # alpha_i * y_i for the support vectors
    bias: float
    kernel: object
    C: float
    support: np.ndarray = None  # training indices of the support vectors
    alpha: np.ndarray = None    # full dual vector over the training set
    upper: np.ndarray = None    # per-example box bounds C_i
    iterations: int = 0
    kkt_gap: float = 0.0
    objective: float = float("nan")
    stats: dict = field(default_factory=dict)

    def decision_function(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.support_vectors.shape[1]:
            raise ValueError(
                f"expected {self.support_vectors.shape[1]} features, got {x.shape[1]}"
            )
        if self.dual_coef.size == 0:
            return np.full(x.shape[0], self.bias)
        return self.kernel(x, self.support_vectors) @ self.dual_coef + self.bias

    def predict(self, x):
        # g == 0 goes to the negative class
        return np.where(self.decision_function(x) > 0, 1, -1)

    @property
    def dim(self):
        return self.support_vectors.shape[1]


def _violations(y, alpha, upper, grad):
    """Return (m, M, i, j): the KKT gap is m - M."""
    score = -y * grad
    up = np.where(y > 0, alpha < upper, alpha > 0)
    low = np.where(y > 0, alpha > 0, alpha < upper)
    s_up = np.where(up, score, -np.inf)
    s_low = np.where(low, score, np.inf)
    i = int(np.argmax(s_up))
    j = int(np.argmin(s_low))
    return s_up[i], s_low[j], i, j


def _second_order_partner(i, m, y, alpha, upper, grad, qd, qi):
    score = -y * grad
    low = np.where(y > 0, alpha > 0, alpha < upper)
    b = m - score
    cand = low & (b > 0)
    # curvature along the pair direction: k_ii + k_tt - 2 k_it
    a = qd[i] + qd - 2.0 * y[i] * y * qi
    a = np.where(a > 0, a, TAU)
    gain = np.where(cand, -(b * b) / a, np.inf)
    return int(np.argmin(gain))


def _pair_step(i, j, y, alpha, upper, grad, qii, qjj, qij):
    """Solve the subproblem in (alpha_i, alpha_j); returns the new pair."""
    ci, cj = upper[i], upper[j]
    ai, aj = alpha[i], alpha[j]
    if y[i] != y[j]:
        quad = qii + qjj + 2.0 * qij
        if quad <= 0:
            quad = TAU
        delta = (-grad[i] - grad[j]) / quad
        diff = ai - aj
        ai += delta
        aj += delta
        if diff > 0:
            if aj < 0:
                aj, ai = 0.0, diff
        elif ai < 0:
            ai, aj = 0.0, -diff
        if diff > ci - cj:
            if ai > ci:
                ai, aj = ci, ci - diff
        elif aj > cj:
            aj, ai = cj, cj + diff
    else:
        quad = qii + qjj - 2.0 * qij
        if quad <= 0:
            quad = TAU
        delta = (grad[i] - grad[j]) / quad
        total = ai + aj
        ai -= delta
        aj += delta
        if total > ci:
            if ai > ci:
                ai, aj = ci, total - ci
        elif aj < 0:
            aj, ai = 0.0, total
        if total > cj:
            if aj > cj:
                aj, ai = cj, total - cj
        elif ai < 0:
            ai, aj = 0.0, total
    return ai, aj


@numba.njit(cache=True)
def _scan(y, alpha, upper, grad):
    m = -np.inf
    big_m = np.inf
    i = -1
    for t in range(y.shape[0]):
        sc = -y[t] * grad[t]
        if y[t] > 0:
            up = alpha[t] < upper[t]
            low = alpha[t] > 0
        else:
            up = alpha[t] > 0
            low = alpha[t] < upper[t]
        if up and sc > m:
            m = sc
            i = t
        if low and sc < big_m:
            big_m = sc
    return m, big_m, i


@numba.njit(cache=True)
def _smo_dense(q, y, upper, tol, max_iter):
    """Compiled SMO over a precomputed signed Gram matrix.

    Same selection and update rules as the Python path; returns
    ``(alpha, grad, iterations, gap)`` with ``iterations == -1`` when
    ``max_iter`` is exhausted.
    """
    n = q.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    qd = np.empty(n)
    for t in range(n):
        qd[t] = q[t, t]
    m, big_m, i = _scan(y, alpha, upper, grad)
    gap = m - big_m
    for it in range(max_iter):
        if gap < tol:
            return alpha, grad, it, gap
        j = -1
        best = np.inf
        for t in range(n):
            if y[t] > 0:
                low = alpha[t] > 0
            else:
                low = alpha[t] < upper[t]
            b = m + y[t] * grad[t]
            if low and b > 0:
                a = qd[i] + qd[t] - 2.0 * y[i] * y[t] * q[i, t]
                if a <= 0:
                    a = TAU
                g = -(b * b) / a
                if g < best:
                    best = g
                    j = t
        ci = upper[i]
        cj = upper[j]
        ai = alpha[i]
        aj = alpha[j]
        if y[i] != y[j]:
            quad = qd[i] + qd[j] + 2.0 * q[i, j]
            if quad <= 0:
                quad = TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            elif ai < 0:
                ai = 0.0
                aj = -diff
            if diff > ci - cj:
                if ai > ci:
                    ai = ci
                    aj = ci - diff
            elif aj > cj:
                aj = cj
                ai = cj + diff
        else:
            quad = qd[i] + qd[j] - 2.0 * q[i, j]
            if quad <= 0:
                quad = TAU
            delta = (grad[i] - grad[j]) / quad
            total = ai + aj
            ai -= delta
            aj += delta
            if total > ci:
                if ai > ci:
                    ai = ci
                    aj = total - ci
            elif aj < 0:
                aj = 0.0
                ai = total
            if total > cj:
                if aj > cj:
                    aj = cj
                    ai = total - cj
            elif ai < 0:
                ai = 0.0
                aj = total
        dai = ai - alpha[i]
        daj = aj - alpha[j]
        alpha[i] = ai
        alpha[j] = aj
        # gradient update fused with the next violator scan
        m = -np.inf
        big_m = np.inf
        qi = q[i]
        qj = q[j]
        inext = -1
        for t in range(n):
            grad[t] += qi[t] * dai + qj[t] * daj
            sc = -y[t] * grad[t]
            if y[t] > 0:
                up = alpha[t] < upper[t]
                low = alpha[t] > 0
            else:
                up = alpha[t] > 0
                low = alpha[t] < upper[t]
            if up and sc > m:
                m = sc
                inext = t
            if low and sc < big_m:
                big_m = sc
        i = inext
        gap = m - big_m
    if gap < tol:
        return alpha, grad, max_iter, gap
    return alpha, grad, -1, gap


def solve_dual(kernel, x, y, upper, tol=KKT_TOL, max_iter=MAX_ITER, cache_rows=4096):
    """Run SMO; returns ``(alpha, grad, iterations, gap)``.

    When the whole signed Gram matrix fits in ``cache_rows`` rows it is built
    once and the compiled loop runs over it; otherwise rows come from an LRU
    cache and the loop runs in Python.
    """
    n = x.shape[0]
    yf = y.astype(float)
    cache = KernelCache(kernel, x, y, capacity=cache_rows)
    if cache.full is not None:
        alpha, grad, it, gap = _smo_dense(
            np.ascontiguousarray(cache.full), yf, np.asarray(upper, dtype=float),
            float(tol), int(max_iter),
        )
        if it < 0:
            raise ConvergenceError(
                f"SMO did not reach KKT gap {tol:g} in {max_iter} iterations (gap {gap:.3g})",
                max_iter,
                gap,
            )
        return alpha, grad, it, gap
    qd = cache.diag
    alpha = np.zeros(n)
    grad = -np.ones(n)
    gap = np.inf
    for it in range(max_iter):
        m, big_m, i, _ = _violations(yf, alpha, upper, grad)
        gap = m - big_m
        if gap < tol:
            return alpha, grad, it, gap
        qi = cache.row(i)
        j = _second_order_partner(i, m, yf, alpha, upper, grad, qd, qi)
        qj = cache.row(j)
        ai, aj = _pair_step(i, j, yf, alpha, upper, grad, qd[i], qd[j], qi[j])
        dai, daj = ai - alpha[i], aj - alpha[j]
        alpha[i], alpha[j] = ai, aj
        grad += qi * dai + qj * daj
    raise ConvergenceError(
        f"SMO did not reach KKT gap {tol:g} in {max_iter} iterations (gap {gap:.3g})",
        max_iter,
        gap,
    )


def _bias(y, alpha, upper, grad):
    score = -y * grad
    free = (alpha > 0) & (alpha < upper)
    if np.any(free):
        return float(np.mean(score[free]))
    m, big_m, _, _ = _violations(y, alpha, upper, grad)
    return float((m + big_m) / 2.0)


def dual_objective(kernel, x, y, alpha):
    q = np.outer(y, y) * kernel(x, x)
    return 0.5 * alpha @ q @ alpha - alpha.sum()


def kkt_gap(kernel, x, y, alpha, upper):
    """Maximal KKT violation ``m(a) - M(a)`` of a dual point."""
    yf = np.asarray(y, dtype=float)
    grad = (np.outer(yf, yf) * kernel(x, x)) @ alpha - 1.0
    m, big_m, _, _ = _violations(yf, alpha, np.broadcast_to(upper, alpha.shape), grad)
    return float(max(m - big_m, 0.0))


def kkt_audit(model, x, y, tol=KKT_TOL):
    return kkt_gap(model.kernel, x, y, model.alpha, model.upper) <= tol


def train_binary_svm(x, y, C=1.0, kernel=None, per_example_costs=None,
                     tol=KKT_TOL, max_iter=MAX_ITER, cache_rows=4096):
    """Train a soft-margin SVM on labels in {-1, +1}.

    ``per_example_costs`` are multiplicative weights: example ``i`` gets the
    box bound ``C * per_example_costs[i]``. Ties in working-set selection go
    to the lowest index, so training is deterministic.
    """
    kernel = kernel if kernel is not None else Kernel("linear")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y)
    if x.shape[0] != y.shape[0]:
        raise ValueError("x and y lengths differ")
    if not np.all((y == 1) | (y == -1)):
        raise ValueError("binary labels must be -1 or +1")
    if not (np.any(y == 1) and np.any(y == -1)):
        raise ValueError("both classes must be present to train a binary SVM")
    if not C > 0:
        raise ValueError("C must be positive")
    upper = np.full(x.shape[0], float(C))
    if per_example_costs is not None:
        w = np.asarray(per_example_costs, dtype=float)
        if w.shape != upper.shape or np.any(w <= 0):
            raise ValueError("per_example_costs must be positive, one per example")
        upper = upper * w
    yf = y.astype(float)
    alpha, grad, iters, gap = solve_dual(kernel, x, y, upper, tol, max_iter, cache_rows)
    b = _bias(yf, alpha, upper, grad)
    sv = np.flatnonzero(alpha > 0)
    objective = 0.5 * alpha @ (grad + 1.0) - alpha.sum()
    return BinarySVMModel(
        support_vectors=x[sv].copy(),
        dual_coef=alpha[sv] * yf[sv],
        bias=b,
        kernel=kernel,
        C=float(C),
        support=sv,
        alpha=alpha,
        upper=upper,
        iterations=iters,
        kkt_gap=float(gap),
        objective=float(objective),
    )


@dataclass(frozen=True)
class SlackReport:
    xi: np.ndarray
    slack_count: int      # sum of sgn(xi_i), an upper bound on training errors
    training_errors: int


def slack_diagnostics(model, x, y):
    """Slacks ``xi_i = max(0, 1 - y_i g(x_i))`` and the error bound they give."""
    y = np.asarray(y)
    g = model.decision_function(x)
    xi = np.maximum(0.0, 1.0 - y * g)
    errors = int(np.count_nonzero(model.predict(x) != y))
    return SlackReport(xi=xi, slack_count=int(np.count_nonzero(xi > 0)), training_errors=errors)
