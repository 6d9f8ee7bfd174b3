"""Compiled loss and gradient for shallow networks.

Covers zero or one logistic hidden layer, a linear, logistic or softmax
output and squared error, with optional skip inputs added straight to the
output pre-activation (the oNN tag block). The parameter layout is the one
used by :class:`ordrep.nn.mlp.MLP`, with the skip weights appended.
The numpy path in ``mlp.py`` is the reference; tests check both agree.
"""

import math

import numba
import numpy as np

OUTPUT_CODES = {"linear": 0, "logistic": 1, "softmax": 2}


@numba.njit(cache=True)
def _sigmoid(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


@numba.njit(cache=True)
def shallow_objective(theta, x, skip, target, hidden, n_out, out_code, skip_act):
    """Mean over rows of the summed squared error and its gradient.

    ``skip_act`` selects where the skip term enters: 0 adds it to the output
    pre-activation of unit 0 followed by the logistic (oNN), -1 disables it.
    """
    n, p = x.shape
    t = skip.shape[1]
    grad = np.zeros(theta.size)
    if hidden > 0:
        w1 = theta[: hidden * p]
        b1_at = hidden * p
        w2_at = b1_at + hidden
        b2_at = w2_at + n_out * hidden
        v_at = b2_at + n_out
        width = hidden
    else:
        w2_at = 0
        b2_at = n_out * p
        v_at = b2_at + n_out
        width = p
    a = np.empty(width)
    z = np.empty(n_out)
    dz = np.empty(n_out)
    total = 0.0
    scale = 2.0 / n
    for r in range(n):
        if hidden > 0:
            for u in range(hidden):
                acc = theta[b1_at + u]
                for d in range(p):
                    acc += w1[u * p + d] * x[r, d]
                a[u] = _sigmoid(acc)
        else:
            for d in range(p):
                a[d] = x[r, d]
        for o in range(n_out):
            acc = theta[b2_at + o]
            for u in range(width):
                acc += theta[w2_at + o * width + u] * a[u]
            z[o] = acc
        if skip_act == 0:
            for c in range(t):
                z[0] += theta[v_at + c] * skip[r, c]
        # output activation and dL/dz
        if out_code == 2:
            m = z[0]
            for o in range(1, n_out):
                if z[o] > m:
                    m = z[o]
            s = 0.0
            for o in range(n_out):
                z[o] = math.exp(z[o] - m)
                s += z[o]
            inner = 0.0
            for o in range(n_out):
                z[o] /= s
                diff = z[o] - target[r, o]
                total += diff * diff
                dz[o] = scale * diff
                inner += dz[o] * z[o]
            for o in range(n_out):
                dz[o] = z[o] * (dz[o] - inner)
        else:
            for o in range(n_out):
                out = _sigmoid(z[o]) if (out_code == 1 or skip_act == 0) else z[o]
                diff = out - target[r, o]
                total += diff * diff
                g = scale * diff
                if out_code == 1 or skip_act == 0:
                    g *= out * (1.0 - out)
                dz[o] = g
        # backprop
        for o in range(n_out):
            grad[b2_at + o] += dz[o]
            for u in range(width):
                grad[w2_at + o * width + u] += dz[o] * a[u]
        if skip_act == 0:
            for c in range(t):
                grad[v_at + c] += dz[0] * skip[r, c]
        if hidden > 0:
            for u in range(hidden):
                back = 0.0
                for o in range(n_out):
                    back += dz[o] * theta[w2_at + o * width + u]
                dh = back * a[u] * (1.0 - a[u])
                grad[b1_at + u] += dh
                for d in range(p):
                    grad[u * p + d] += dh * x[r, d]
    return total / n, grad


def supports(net, loss="squared"):
    """True if ``net`` fits the compiled shallow layout."""
    hidden = len(net.sizes) - 2
    if loss != "squared" or hidden > 1:
        return False
    if hidden == 1 and net.activations[0] != "logistic":
        return False
    return net.activations[-1] in OUTPUT_CODES


def _hidden(net):
    return net.sizes[1] if len(net.sizes) == 3 else 0


def make_objective(net, x, target):
    """``theta -> (loss, grad)`` for a plain shallow network."""
    x = np.ascontiguousarray(x, dtype=float)
    target = np.ascontiguousarray(target, dtype=float)
    skip = np.zeros((x.shape[0], 0))
    hidden, n_out = _hidden(net), net.n_out
    code = OUTPUT_CODES[net.activations[-1]]

    def objective(theta):
        return shallow_objective(np.asarray(theta, dtype=float), x, skip, target,
                                 hidden, n_out, code, -1)

    return objective


def make_onn_objective(g, base, tags, target):
    """Objective of ``logsig(G(base) + v . tags)`` over ``[G params, v]``."""
    base = np.ascontiguousarray(base, dtype=float)
    tags = np.ascontiguousarray(tags, dtype=float)
    target = np.ascontiguousarray(np.asarray(target, dtype=float).reshape(-1, 1))
    hidden = _hidden(g)

    def objective(theta):
        return shallow_objective(np.asarray(theta, dtype=float), base, tags, target,
                                 hidden, 1, 0, 0)

    return objective
