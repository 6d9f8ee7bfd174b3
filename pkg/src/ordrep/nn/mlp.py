"""Dense feedforward networks with hand-written backprop.

Parameters of every network live in one flat vector so the trainer and the
finite-difference checks can treat all architectures alike.
"""

from dataclasses import dataclass

import numpy as np

from ordrep.nn import fast
from ordrep.probability import logistic
from ordrep.rng import make_rng

ACTIVATIONS = ("logistic", "linear", "softmax")


class DivergenceError(RuntimeError):
    def __init__(self, message, epoch):
        super().__init__(message)
        self.epoch = epoch


def softmax(z):
    e = np.exp(z - z.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def _activate(kind, z):
    if kind == "logistic":
        return logistic(z)
    if kind == "softmax":
        return softmax(z)
    return z


def _activation_backward(kind, a, grad_a):
    """Map dL/da to dL/dz for activation output ``a``."""
    if kind == "logistic":
        return grad_a * a * (1.0 - a)
    if kind == "softmax":
        return a * (grad_a - np.sum(grad_a * a, axis=1, keepdims=True))
    return grad_a


@dataclass
class MLP:
    """Layer sizes ``[n_in, h_1, ..., n_out]`` and one activation per layer.

    Weight matrices are stored ``(n_out, n_in)`` per layer, row-major in the
    flat parameter vector, each followed by its bias vector.
    """

    sizes: tuple
    activations: tuple
    params: np.ndarray

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        self.activations = tuple(self.activations)
        if len(self.activations) != len(self.sizes) - 1:
            raise ValueError("need one activation per layer")
        for i, act in enumerate(self.activations):
            if act not in ACTIVATIONS:
                raise ValueError(f"unknown activation {act!r}")
            if act == "softmax" and i != len(self.activations) - 1:
                raise ValueError("softmax is only allowed on the output layer")
        self.params = np.asarray(self.params, dtype=float)
        if self.params.size != self.num_params(self.sizes):
            raise ValueError("parameter vector has the wrong length")

    @staticmethod
    def num_params(sizes):
        return sum(o * i + o for i, o in zip(sizes[:-1], sizes[1:]))

    @property
    def n_in(self):
        return self.sizes[0]

    @property
    def n_out(self):
        return self.sizes[-1]

    def layers(self, params=None):
        """Yield ``(W, b)`` views into ``params`` (defaults to own params)."""
        theta = self.params if params is None else params
        pos = 0
        for n_in, n_out in zip(self.sizes[:-1], self.sizes[1:]):
            w = theta[pos:pos + n_out * n_in].reshape(n_out, n_in)
            pos += n_out * n_in
            b = theta[pos:pos + n_out]
            pos += n_out
            yield w, b

    def forward(self, x, params=None, keep=False):
        a = np.atleast_2d(np.asarray(x, dtype=float))
        if a.shape[1] != self.n_in:
            raise ValueError(f"expected {self.n_in} inputs, got {a.shape[1]}")
        outs = [a]
        for (w, b), act in zip(self.layers(params), self.activations):
            a = _activate(act, a @ w.T + b)
            outs.append(a)
        return (a, outs) if keep else a

    def backward(self, outs, grad_out, params=None):
        """Flat gradient of the loss given ``dL/d(output)``."""
        theta = self.params if params is None else params
        grads = []
        delta = grad_out
        layers = list(self.layers(theta))
        for idx in range(len(layers) - 1, -1, -1):
            w, _ = layers[idx]
            dz = _activation_backward(self.activations[idx], outs[idx + 1], delta)
            grads.append((dz.T @ outs[idx], dz.sum(axis=0)))
            delta = dz @ w
        flat = []
        for gw, gb in reversed(grads):
            flat.append(gw.ravel())
            flat.append(gb)
        return np.concatenate(flat), delta

    def copy_with(self, params):
        return MLP(self.sizes, self.activations, np.array(params, dtype=float))


def init_mlp(sizes, activations, seed=0, rng=None):
    """Weights and biases uniform in ``[-r, r]``, ``r = 1/sqrt(fan_in)``."""
    rng = make_rng(seed) if rng is None else rng
    chunks = []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        r = 1.0 / np.sqrt(n_in) if n_in > 0 else 1.0
        chunks.append(rng.uniform(-r, r, size=n_out * n_in + n_out))
    return MLP(tuple(sizes), tuple(activations), np.concatenate(chunks))


def architecture(n_in, hidden, n_out, output):
    """Sizes and activations for zero or more logistic hidden layers."""
    hidden = [hidden] if isinstance(hidden, int) else list(hidden)
    hidden = [h for h in hidden if h > 0]
    sizes = [n_in] + hidden + [n_out]
    acts = ["logistic"] * len(hidden) + [output]
    return sizes, acts


# --- losses ------------------------------------------------------------------

def squared_error(out, target):
    """Mean over rows of the summed squared error, and its output gradient."""
    diff = out - target
    n = out.shape[0]
    return float(np.sum(diff * diff) / n), 2.0 * diff / n


def absolute_error(out, target):
    diff = out - target
    n = out.shape[0]
    return float(np.sum(np.abs(diff)) / n), np.sign(diff) / n


LOSSES = {"squared": squared_error, "absolute": absolute_error}


def mlp_objective(net, x, target, loss="squared", compiled=True):
    """``theta -> (loss, gradient)`` for a plain network.

    Shallow networks under squared error use the compiled kernel unless
    ``compiled`` is False; the numpy path below is the reference.
    """
    loss_fn = LOSSES[loss]
    x = np.atleast_2d(np.asarray(x, dtype=float))
    target = np.asarray(target, dtype=float).reshape(x.shape[0], net.n_out)
    if compiled and fast.supports(net, loss):
        return fast.make_objective(net, x, target)

    def objective(theta):
        out, outs = net.forward(x, theta, keep=True)
        value, g_out = loss_fn(out, target)
        grad, _ = net.backward(outs, g_out, theta)
        return value, grad

    return objective


# --- optimizer -----------------------------------------------------------------

@dataclass
class TrainTrace:
    losses: list
    final_lr: float
    backoffs: int


def gradient_descent(objective, theta0, epochs=2000, lr=0.5, grow=1.05,
                     max_backoff=40):
    """Full-batch gradient descent with an adaptive step.

    A step that raises the loss is undone and retried at half the rate; an
    accepted step grows the rate by ``grow``. The recorded loss is therefore
    nonincreasing. Stops early if the rate underflows.
    """
    theta = np.array(theta0, dtype=float)
    value, grad = objective(theta)
    if not np.isfinite(value):
        raise DivergenceError("loss is not finite at epoch 0", 0)
    losses = [value]
    backoffs = 0
    for epoch in range(1, epochs + 1):
        for _ in range(max_backoff):
            trial = theta - lr * grad
            t_value, t_grad = objective(trial)
            if np.isfinite(t_value) and t_value <= value:
                theta, value, grad = trial, t_value, t_grad
                lr *= grow
                break
            lr *= 0.5
            backoffs += 1
        else:
            if not np.isfinite(t_value):
                raise DivergenceError(f"loss became NaN at epoch {epoch}", epoch)
            break
        losses.append(value)
    return theta, TrainTrace(losses=losses, final_lr=lr, backoffs=backoffs)


def train_mlp(x, target, hidden=0, output="linear", epochs=2000, lr=0.5, seed=0,
              loss="squared"):
    """Fit a network to ``target`` by full-batch gradient descent.

    Returns ``(mlp, trace)``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    target = np.asarray(target, dtype=float)
    if target.ndim == 1:
        target = target.reshape(-1, 1)
    if target.shape[0] != x.shape[0]:
        raise ValueError("targets and inputs differ in length")
    sizes, acts = architecture(x.shape[1], hidden, target.shape[1], output)
    net = init_mlp(sizes, acts, seed)
    theta, trace = gradient_descent(mlp_objective(net, x, target, loss), net.params,
                                    epochs=epochs, lr=lr)
    return net.copy_with(theta), trace


def finite_difference_gradient(objective, theta, eps=1e-6):
    """Central differences, one coordinate at a time."""
    theta = np.array(theta, dtype=float)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        old = theta[i]
        theta[i] = old + eps
        up, _ = objective(theta)
        theta[i] = old - eps
        down, _ = objective(theta)
        theta[i] = old
        grad[i] = (up - down) / (2 * eps)
    return grad
