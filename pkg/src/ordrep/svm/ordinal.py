"""SVM learners for ordinal data: oSVM, one-vs-one cSVM and Frank-Hall pSVM."""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ordrep.probability import argmax_class, exceedance_to_masses, logistic
from ordrep.replicate import (
    C1BAR,
    C2BAR,
    ReplicationConfig,
    decode_many,
    make_query_replicas,
    replicate,
)
from ordrep.svm.kernels import ExtendedKernel, Kernel
from ordrep.svm.smo import KKT_TOL, MAX_ITER, train_binary_svm


@dataclass(frozen=True)
class OrdinalSVMModel:
    """A binary SVM on the replicated data, read back as K-1 boundaries."""

    binary: object
    config: ReplicationConfig
    dim: int

    name = "osvm"

    @property
    def num_classes(self):
        return self.config.num_classes

    def tag_weights(self):
        """Weights on the tag block, ``sum_i alpha_i y_i e_i``."""
        t = self.config.tag_dim()
        if t == 0 or self.binary.dual_coef.size == 0:
            return np.zeros(t)
        return self.binary.dual_coef @ self.binary.support_vectors[:, -t:]

    def boundary_biases(self):
        """``b_q = b + w_tag . e_{q-1}``; ``b_1`` is the binary bias itself."""
        w = self.tag_weights()
        k = self.num_classes
        return np.array([self.binary.bias + w @ self.config.tag(q) for q in range(1, k)])

    def boundary_weights(self):
        """Per-boundary ``(K-1, p)`` weight vectors; linear kernel only."""
        if self.binary.kernel.base.kind != "linear":
            raise ValueError("explicit weights exist only for the linear kernel")
        p = self.dim
        j = self.config.shared(p)
        w = self.binary.dual_coef @ self.binary.support_vectors
        out = np.empty((self.num_classes - 1, p))
        for q in range(1, self.num_classes):
            start = j + (q - 1) * (p - j)
            out[q - 1, :j] = w[:j]
            out[q - 1, j:] = w[start:start + p - j]
        return out

    def boundary_decisions(self, x):
        """Decision values ``g(x, e_{q-1})`` as an ``(n, K-1)`` array."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        reps = make_query_replicas(x, self.config, dim=self.dim)
        n, k1, d = reps.shape
        return self.binary.decision_function(reps.reshape(n * k1, d)).reshape(n, k1)

    def predict(self, x):
        g = self.boundary_decisions(x)
        return decode_many(np.where(g > 0, C2BAR, C1BAR))


def train_osvm(dataset, C=1.0, h=1.0, s=None, j=None, kernel=None, cumulative=False,
               tol=KKT_TOL, max_iter=MAX_ITER):
    """Replicate ``dataset`` and fit one binary SVM with the extended kernel."""
    kernel = kernel if kernel is not None else Kernel("linear")
    config = ReplicationConfig(dataset.num_classes, h=h, s=s, j=j, cumulative=cumulative)
    ext = replicate(dataset, config)
    binary = train_binary_svm(
        ext.features, ext.labels, C=C,
        kernel=ExtendedKernel(kernel, config.tag_dim()),
        tol=tol, max_iter=max_iter,
    )
    return OrdinalSVMModel(binary=binary, config=config, dim=dataset.dim)


def predict_ordinal(model, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return int(model.predict(x.reshape(1, -1))[0])
    return model.predict(x)


@dataclass(frozen=True)
class Constant:
    """Stand-in for a binary member whose training split had a single class."""

    value: float


@dataclass(frozen=True)
class OneVsOneSVM:
    """``K(K-1)/2`` pairwise SVMs combined by majority vote.

    ``members`` maps a class pair ``(a, b)`` with ``a < b`` to a binary model
    (negative side ``a``) or to a :class:`Constant` holding the only class
    seen in training for that pair. Pairs with no training data abstain.
    Vote ties go to the lowest class.
    """

    members: dict
    num_classes: int
    dim: int
    C: float
    kernel: Kernel

    name = "csvm"

    def votes(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim} features, got {x.shape[1]}")
        n = x.shape[0]
        votes = np.zeros((n, self.num_classes), dtype=np.int64)
        rows = np.arange(n)
        for (a, b), member in self.members.items():
            if isinstance(member, Constant):
                votes[:, int(member.value) - 1] += 1
                continue
            winner = np.where(member.decision_function(x) > 0, b, a)
            votes[rows, winner - 1] += 1
        return votes

    def predict(self, x):
        return argmax_class(self.votes(x))


def train_csvm(dataset, C=1.0, kernel=None, tol=KKT_TOL, max_iter=MAX_ITER):
    kernel = kernel if kernel is not None else Kernel("linear")
    x, y = dataset.features, dataset.labels
    members = {}
    for a, b in combinations(range(1, dataset.num_classes + 1), 2):
        in_a, in_b = y == a, y == b
        if not in_a.any() and not in_b.any():
            continue
        if not (in_a.any() and in_b.any()):
            members[(a, b)] = Constant(a if in_a.any() else b)
            continue
        mask = in_a | in_b
        members[(a, b)] = train_binary_svm(
            x[mask], np.where(y[mask] == b, 1, -1), C=C, kernel=kernel,
            tol=tol, max_iter=max_iter,
        )
    return OneVsOneSVM(members, dataset.num_classes, dataset.dim, float(C), kernel)


@dataclass(frozen=True)
class FrankHallSVM:
    """``K-1`` independent SVMs, member ``i`` testing ``class > i``.

    Margins are squashed by a unit-slope logistic into ``Pr(C > i)``;
    members trained on a one-sided split hold a constant 0 or 1.
    """

    members: tuple
    num_classes: int
    dim: int
    C: float
    kernel: Kernel

    name = "psvm"

    def exceedance(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim} features, got {x.shape[1]}")
        cols = []
        for member in self.members:
            if isinstance(member, Constant):
                cols.append(np.full(x.shape[0], member.value))
            else:
                cols.append(logistic(member.decision_function(x)))
        return np.column_stack(cols)

    def predict_proba(self, x):
        return exceedance_to_masses(self.exceedance(x))

    def predict(self, x):
        return argmax_class(self.predict_proba(x))


def train_psvm(dataset, C=1.0, kernel=None, tol=KKT_TOL, max_iter=MAX_ITER):
    kernel = kernel if kernel is not None else Kernel("linear")
    x, y = dataset.features, dataset.labels
    members = []
    for i in range(1, dataset.num_classes):
        t = np.where(y > i, 1, -1)
        if np.all(t == 1) or np.all(t == -1):
            members.append(Constant(1.0 if t[0] == 1 else 0.0))
            continue
        members.append(train_binary_svm(x, t, C=C, kernel=kernel, tol=tol, max_iter=max_iter))
    return FrankHallSVM(tuple(members), dataset.num_classes, dataset.dim, float(C), kernel)
