from collections import OrderedDict
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Kernel:
    """``linear``: x'y; ``polynomial``: (1 + x'y) ** degree."""

    kind: str = "linear"
    degree: int = 2

    def __post_init__(self):
        if self.kind not in ("linear", "polynomial"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "polynomial" and int(self.degree) < 1:
            raise ValueError("polynomial degree must be positive")
        object.__setattr__(self, "degree", int(self.degree))

    def __call__(self, a, b):
        g = np.atleast_2d(a) @ np.atleast_2d(b).T
        if self.kind == "polynomial":
            g = (1.0 + g) ** self.degree
        return g

    def describe(self):
        return "linear" if self.kind == "linear" else f"polynomial {self.degree}"


@dataclass(frozen=True)
class ExtendedKernel:
    """Base kernel on the feature part plus a plain dot product of the tag blocks.

    The last ``tag_dim`` columns of each extended vector are the tag block.
    """

    base: Kernel
    tag_dim: int

    def __call__(self, a, b):
        a, b = np.atleast_2d(a), np.atleast_2d(b)
        if self.tag_dim == 0:
            return self.base(a, b)
        t = self.tag_dim
        return self.base(a[:, :-t], b[:, :-t]) + a[:, -t:] @ b[:, -t:].T

    def describe(self):
        return self.base.describe()


class KernelCache:
    """LRU cache of signed kernel rows ``y_i y_t k(x_i, x_t)``.

    When the whole matrix fits in ``capacity`` rows it is computed once.
    """

    def __init__(self, kernel, x, y, capacity=1024):
        self.kernel = kernel
        self.x = x
        self.y = y.astype(float)
        self.capacity = max(2, int(capacity))
        self._rows = OrderedDict()
        n = x.shape[0]
        self.full = None
        if n <= self.capacity:
            self.full = np.outer(self.y, self.y) * kernel(x, x)
            self.diag = np.diag(self.full).copy()
        else:
            self.diag = np.array([kernel(x[i], x[i])[0, 0] for i in range(n)])

    def row(self, i):
        if self.full is not None:
            return self.full[i]
        r = self._rows.get(i)
        if r is not None:
            self._rows.move_to_end(i)
            return r
        r = self.y[i] * self.y * self.kernel(self.x[i], self.x)[0]
        self._rows[i] = r
        if len(self._rows) > self.capacity:
            self._rows.popitem(last=False)
        return r
