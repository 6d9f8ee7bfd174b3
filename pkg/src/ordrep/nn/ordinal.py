"""Network learners for ordinal data: cNN, pNN, oNN and the unimodal uNN."""

from dataclasses import dataclass, field

import numpy as np

from ordrep.nn import fast
from ordrep.nn.mlp import (
    MLP,
    architecture,
    gradient_descent,
    init_mlp,
    mlp_objective,
    squared_error,
)
from ordrep.probability import (
    argmax_class,
    cumulative_to_masses,
    exceedance_to_masses,
    logistic,
)
from ordrep.rng import make_rng
from ordrep.replicate import C1BAR, C2BAR, ReplicationConfig, decode_many, make_query_replicas, replicate

DEFAULT_EPOCHS = 2000
DEFAULT_LR = 0.5


# --- cNN -------------------------------------------------------------------------

@dataclass
class ConventionalNN:
    """One output per class, 1-of-K targets, argmax decision.

    With ``output="logistic"`` and ``K=2`` a single logistic unit is used and
    read as the probability of the upper class.
    """

    net: MLP
    num_classes: int
    trace: object = None

    name = "cnn"

    @property
    def dim(self):
        return self.net.n_in

    def predict_proba(self, x):
        out = self.net.forward(x)
        if out.shape[1] == 1:
            return np.column_stack([1.0 - out[:, 0], out[:, 0]])
        return out

    def predict(self, x):
        return argmax_class(self.predict_proba(x))


def one_hot(labels, num_classes):
    t = np.zeros((len(labels), num_classes))
    t[np.arange(len(labels)), np.asarray(labels) - 1] = 1.0
    return t


def cnn_objective(net, dataset, compiled=True):
    if net.n_out == 1:
        target = (dataset.labels == 2).astype(float)
    else:
        target = one_hot(dataset.labels, dataset.num_classes)
    return mlp_objective(net, dataset.features, target, compiled=compiled)


def init_cnn(dataset, hidden=0, output="softmax", seed=0):
    k = dataset.num_classes
    n_out = 1 if (k == 2 and output == "logistic") else k
    sizes, acts = architecture(dataset.dim, hidden, n_out, output)
    return init_mlp(sizes, acts, seed)


def train_cnn(dataset, hidden=0, epochs=DEFAULT_EPOCHS, lr=DEFAULT_LR, seed=0,
              output="softmax"):
    net = init_cnn(dataset, hidden, output, seed)
    theta, trace = gradient_descent(cnn_objective(net, dataset), net.params,
                                    epochs=epochs, lr=lr)
    return ConventionalNN(net.copy_with(theta), dataset.num_classes, trace)


# --- pNN -------------------------------------------------------------------------

@dataclass
class FrankHallNN:
    """``K-1`` logistic networks, member ``i`` estimating ``Pr(C > i)``."""

    members: list
    num_classes: int
    traces: list = field(default_factory=list)

    name = "pnn"

    @property
    def dim(self):
        return self.members[0].n_in

    def exceedance(self, x):
        return np.column_stack([m.forward(x)[:, 0] for m in self.members])

    def predict_proba(self, x):
        return exceedance_to_masses(self.exceedance(x))

    def predict(self, x):
        return argmax_class(self.predict_proba(x))


def init_pnn_member(dataset, hidden=0, seed=0):
    sizes, acts = architecture(dataset.dim, hidden, 1, "logistic")
    return init_mlp(sizes, acts, seed)


def pnn_member_objective(net, dataset, boundary, compiled=True):
    target = (dataset.labels > boundary).astype(float)
    return mlp_objective(net, dataset.features, target, compiled=compiled)


def train_pnn(dataset, hidden=0, epochs=DEFAULT_EPOCHS, lr=DEFAULT_LR, seed=0):
    members, traces = [], []
    for i in range(1, dataset.num_classes):
        net = init_pnn_member(dataset, hidden, seed + i - 1)
        theta, trace = gradient_descent(pnn_member_objective(net, dataset, i), net.params,
                                        epochs=epochs, lr=lr)
        members.append(net.copy_with(theta))
        traces.append(trace)
    return FrankHallNN(members, dataset.num_classes, traces)


# --- oNN -------------------------------------------------------------------------

@dataclass
class OrdinalNN:
    """Replication network: ``out = logsig(G(x) + v . e)``.

    ``G`` is a network with a single linear output fed by the feature part
    of the extended vector; ``v`` weights the ``K-2`` tag components. Fed
    with the replica for boundary ``k`` the output estimates ``Pr(C <= k)``.
    In cumulative-logit form ``Pr(C <= k) = logsig(phi_k - latent(x))`` with
    ``latent = -G`` and cut points ``phi_k = v . e_{k-1}`` (``phi_1 = 0``).
    """

    g: MLP
    tag_weights: np.ndarray
    config: ReplicationConfig
    dim: int
    trace: object = None

    name = "onn"

    @property
    def num_classes(self):
        return self.config.num_classes

    def cut_points(self):
        k = self.num_classes
        return np.array([self.tag_weights @ self.config.tag(q) for q in range(1, k)])

    def latent(self, x):
        if self.config.shared(self.dim) < self.dim:
            raise ValueError("a single latent score exists only when all features are shared")
        reps = make_query_replicas(np.atleast_2d(x), self.config, dim=self.dim)
        base = reps[:, 0, : reps.shape[2] - self.config.tag_dim()]
        return -self.g.forward(base)[:, 0]

    def cumulative(self, x):
        """``P_k = Pr(C <= k)`` for ``k = 1..K-1`` as an ``(n, K-1)`` array."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        reps = make_query_replicas(x, self.config, dim=self.dim)
        n, k1, d = reps.shape
        out = onn_forward(self.g, self.tag_weights, reps.reshape(n * k1, d),
                          self.config.tag_dim())
        return out.reshape(n, k1)

    def predict_proba(self, x):
        return onn_class_probabilities(self, x)

    def predict(self, x):
        # output below 0.5 reads as C2BAR ("class > k")
        p = self.cumulative(x)
        return decode_many(np.where(p < 0.5, C2BAR, C1BAR))


def onn_forward(g, v, xbar, tag_dim, params=None, keep=False):
    d = xbar.shape[1]
    base, tags = xbar[:, : d - tag_dim], xbar[:, d - tag_dim:]
    gout, outs = g.forward(base, params, keep=True)
    z = gout[:, 0] + tags @ v
    out = logistic(z)
    return (out, outs) if keep else out


def onn_objective(g, ext, compiled=True):
    """Objective over the flat vector ``[G params, v]``; targets 1 for C1BAR."""
    t = ext.config.tag_dim()
    target = (ext.labels == C1BAR).astype(float)
    ng = g.params.size
    x = ext.features
    if compiled and fast.supports(g):
        d = x.shape[1]
        return fast.make_onn_objective(g, x[:, : d - t], x[:, d - t:], target)

    def objective(theta):
        gp, v = theta[:ng], theta[ng:]
        out, outs = onn_forward(g, v, x, t, gp, keep=True)
        value, g_out = squared_error(out[:, None], target[:, None])
        dz = g_out[:, 0] * out * (1.0 - out)
        grad_g, _ = g.backward(outs, dz[:, None], gp)
        grad_v = x[:, x.shape[1] - t:].T @ dz
        return value, np.concatenate([grad_g, grad_v])

    return objective


def init_onn(dataset, config, hidden=0, seed=0):
    d = config.extended_dim(dataset.dim) - config.tag_dim()
    sizes, acts = architecture(d, hidden, 1, "linear")
    rng = make_rng(seed)
    g = init_mlp(sizes, acts, rng=rng)
    # tag weights feed the output unit alongside G's last layer
    r = 1.0 / np.sqrt(sizes[-2])
    v = rng.uniform(-r, r, config.tag_dim())
    return g, v


def train_onn(dataset, h=1.0, s=None, j=None, hidden=0, epochs=DEFAULT_EPOCHS,
              lr=DEFAULT_LR, seed=0, cumulative=False):
    config = ReplicationConfig(dataset.num_classes, h=h, s=s, j=j, cumulative=cumulative)
    ext = replicate(dataset, config)
    g, v = init_onn(dataset, config, hidden, seed)
    theta, trace = gradient_descent(onn_objective(g, ext), np.concatenate([g.params, v]),
                                    epochs=epochs, lr=lr)
    ng = g.params.size
    return OrdinalNN(g.copy_with(theta[:ng]), theta[ng:].copy(), config, dataset.dim, trace)


def onn_class_probabilities(model, x):
    """Class masses from the cumulative outputs, clamped if cut points cross."""
    return cumulative_to_masses(model.cumulative(x))


# --- uNN -------------------------------------------------------------------------

def binomial_posteriors(p, num_classes):
    """``P(C_k) = C(K-1, k-1) p^(k-1) (1-p)^(K-k)`` by the ratio recursion.

    Starts from ``P(C_1) = (1-p)^(K-1)`` and multiplies by
    ``p (K-k+1) / ((k-1)(1-p))``. If that start underflows, the mirrored
    recursion from ``P(C_K) = p^(K-1)`` is used instead.
    """
    p = float(p)
    k = int(num_classes)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if k < 2:
        raise ValueError("num_classes must be at least 2")
    out = np.zeros(k)
    if p == 0.0:
        out[0] = 1.0
        return out
    if p == 1.0:
        out[-1] = 1.0
        return out
    q = 1.0 - p
    first = q ** (k - 1)
    if first > 0.0:
        out[0] = first
        for c in range(2, k + 1):
            out[c - 1] = out[c - 2] * p * (k - c + 1) / ((c - 1) * q)
        return out
    out[-1] = p ** (k - 1)
    for c in range(k - 1, 0, -1):
        out[c - 1] = out[c] * q * c / ((k - c) * p)
    return out


def binomial_target(labels, num_classes):
    """The posterior-maximizing parameter ``(c - 1) / (K - 1)``."""
    return (np.asarray(labels, dtype=float) - 1.0) / (num_classes - 1)


def unimodal_error(p, true_class, num_classes):
    """Squared distance between the binomial posteriors and the one-hot truth."""
    post = binomial_posteriors(p, num_classes)
    truth = np.zeros(num_classes)
    truth[int(true_class) - 1] = 1.0
    return float(np.sum((post - truth) ** 2))


def round_half_up(v):
    return np.floor(np.asarray(v, dtype=float) + 0.5).astype(np.int64)


@dataclass
class UnimodalNN:
    """Single logistic output ``p``; class posteriors are ``B(K-1, p)``."""

    net: MLP
    num_classes: int
    loss: str = "squared"
    trace: object = None

    name = "unn"

    @property
    def dim(self):
        return self.net.n_in

    def parameter(self, x):
        return self.net.forward(x)[:, 0]

    def predict_proba(self, x):
        return np.array([binomial_posteriors(p, self.num_classes) for p in self.parameter(x)])

    def predict(self, x):
        return predict_unimodal(self.parameter(x), self.num_classes)


def predict_unimodal(p, num_classes):
    """Round ``1 + (K-1) p`` to the nearest class, halves going up."""
    c = round_half_up(1.0 + (num_classes - 1) * np.asarray(p, dtype=float))
    return np.clip(c, 1, num_classes)


def init_unn(dataset, hidden=0, seed=0):
    sizes, acts = architecture(dataset.dim, hidden, 1, "logistic")
    return init_mlp(sizes, acts, seed)


def unn_objective(net, dataset, loss="squared", compiled=True):
    target = binomial_target(dataset.labels, dataset.num_classes)
    return mlp_objective(net, dataset.features, target, loss, compiled=compiled)


def train_unn(dataset, hidden=0, epochs=DEFAULT_EPOCHS, lr=DEFAULT_LR, seed=0,
              loss="squared"):
    net = init_unn(dataset, hidden, seed)
    theta, trace = gradient_descent(unn_objective(net, dataset, loss), net.params,
                                    epochs=epochs, lr=lr)
    return UnimodalNN(net.copy_with(theta), dataset.num_classes, loss, trace)
