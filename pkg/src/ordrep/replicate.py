"""Data replication: K-class ordinal data as one binary problem.

Every example of class ``k`` is copied into the subspace of each boundary
``q`` whose neighbourhood contains it, ``max(1, q-s+1) <= k <= min(K, q+s)``.
The copy for boundary ``q`` is tagged by an appended block ``e_{q-1}`` of
``K-2`` components (``h`` at position ``q-1``, zeros elsewhere; ``e_0`` is
all zeros) and labelled ``C1BAR`` when ``k <= q``, ``C2BAR`` otherwise.

With ``j < p`` only the first ``j`` features are shared across boundaries;
the remaining ``p-j`` go into a per-boundary slot, so an extended row reads::

    [x[:j], 0 .. 0, x[j:], 0 .. 0, e_{q-1}]
               ^ slot q of K-1 slots, each p-j wide
"""

from dataclasses import dataclass

import numpy as np

# binary labels on the extension: C1BAR is "class <= q", C2BAR is "class > q"
C1BAR = -1
C2BAR = 1


@dataclass(frozen=True)
class ReplicationConfig:
    """Parameters of the replication transform.

    ``s`` defaults to ``K - 1`` (every class constrains every boundary) and
    ``j`` to ``None``, meaning all features share one direction. ``cumulative``
    switches the tag blocks to ``h, .., h, 0, .., 0`` with ``q-1`` leading h's,
    which regularizes consecutive bias gaps instead of gaps to the first bias.
    """

    num_classes: int
    h: float = 1.0
    s: int = None
    j: int = None
    cumulative: bool = False

    def __post_init__(self):
        k = int(self.num_classes)
        if k < 2:
            raise ValueError("num_classes must be at least 2")
        if not self.h > 0:
            raise ValueError("h must be positive")
        s = k - 1 if self.s is None else int(self.s)
        if not 1 <= s <= k - 1:
            raise ValueError(f"s must lie in 1..{k - 1}, got {s}")
        if self.j is not None and int(self.j) < 0:
            raise ValueError("j must be non-negative")
        object.__setattr__(self, "num_classes", k)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "s", s)
        if self.j is not None:
            object.__setattr__(self, "j", int(self.j))

    def shared(self, p):
        """Number of leading features constrained to one direction."""
        j = p if self.j is None else self.j
        if j > p:
            raise ValueError(f"j={j} exceeds the feature dimension {p}")
        return j

    def extended_dim(self, p):
        k, j = self.num_classes, self.shared(p)
        return j + (p - j) * (k - 1) + (k - 2)

    def tag_dim(self):
        return self.num_classes - 2

    def boundaries(self, k):
        """1-based boundaries ``q`` that receive a replica of a class-``k`` example."""
        lo = max(1, k - self.s)
        hi = min(self.num_classes - 1, k + self.s - 1)
        return range(lo, hi + 1)

    def tag(self, q):
        """The block ``e_{q-1}`` appended to replicas of boundary ``q``."""
        e = np.zeros(self.num_classes - 2)
        if q >= 2:
            if self.cumulative:
                e[: q - 1] = self.h
            else:
                e[q - 2] = self.h
        return e

    def to_dict(self):
        return {"K": self.num_classes, "h": self.h, "s": self.s,
                "j": self.j, "cumulative": self.cumulative}


@dataclass(frozen=True)
class ExtendedDataset:
    features: np.ndarray
    labels: np.ndarray      # C1BAR / C2BAR
    subspace: np.ndarray    # boundary q in 1..K-1
    origin: np.ndarray      # row index in the source dataset
    config: ReplicationConfig
    source_dim: int

    def __len__(self):
        return self.features.shape[0]

    @property
    def tag_slice(self):
        d = self.features.shape[1]
        return slice(d - self.config.tag_dim(), d)

    @property
    def base_slice(self):
        return slice(0, self.features.shape[1] - self.config.tag_dim())


def _layout(x, q, config, out):
    """Write the replica of rows ``x`` for boundary ``q`` into ``out``."""
    p = x.shape[1]
    j = config.shared(p)
    w = p - j
    out[:, :j] = x[:, :j]
    start = j + (q - 1) * w
    out[:, start:start + w] = x[:, j:]
    out[:, out.shape[1] - config.tag_dim():] = config.tag(q)


def replicate(dataset, config):
    """Build the binary extended dataset, boundary by boundary."""
    if dataset.num_classes != config.num_classes:
        raise ValueError(
            f"dataset has K={dataset.num_classes}, config has K={config.num_classes}"
        )
    x, y = dataset.features, dataset.labels
    p = dataset.dim
    d = config.extended_dim(p)
    k, s = config.num_classes, config.s
    blocks, labels, subspace, origin = [], [], [], []
    for q in range(1, k):
        lo, hi = max(1, q - s + 1), min(k, q + s)
        idx = np.flatnonzero((y >= lo) & (y <= hi))
        block = np.zeros((idx.size, d))
        _layout(x[idx], q, config, block)
        blocks.append(block)
        labels.append(np.where(y[idx] <= q, C1BAR, C2BAR))
        subspace.append(np.full(idx.size, q))
        origin.append(idx)
    return ExtendedDataset(
        features=np.vstack(blocks),
        labels=np.concatenate(labels).astype(np.int64),
        subspace=np.concatenate(subspace).astype(np.int64),
        origin=np.concatenate(origin).astype(np.int64),
        config=config,
        source_dim=p,
    )


def make_query_replicas(x, config, dim=None):
    """The ``K-1`` extended points used to classify ``x``.

    ``x`` may be one point or a matrix of points; the result has shape
    ``(K-1, D)`` or ``(n, K-1, D)`` respectively.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xs = x.reshape(1, -1) if single else x
    if dim is not None and xs.shape[1] != dim:
        raise ValueError(f"expected {dim} features, got {xs.shape[1]}")
    p = xs.shape[1]
    k = config.num_classes
    out = np.zeros((xs.shape[0], k - 1, config.extended_dim(p)))
    for q in range(1, k):
        _layout(xs, q, config, out[:, q - 1, :])
    return out[0] if single else out


def decode(binary_sequence, num_classes=None):
    """Class = 1 + number of ``C2BAR`` labels, monotone or not.

    When ``num_classes`` is given the sequence must have ``K-1`` entries.
    """
    seq = np.asarray(binary_sequence)
    if seq.ndim != 1 or seq.size < 1:
        raise ValueError("expected a non-empty 1-D label sequence")
    if num_classes is not None and seq.size != num_classes - 1:
        raise ValueError(f"expected {num_classes - 1} labels, got {seq.size}")
    if not np.all((seq == C1BAR) | (seq == C2BAR)):
        raise ValueError("labels must be C1BAR (-1) or C2BAR (+1)")
    return 1 + int(np.count_nonzero(seq == C2BAR))


def decode_many(signs):
    """Row-wise :func:`decode` of an ``(n, K-1)`` array of labels."""
    return 1 + np.count_nonzero(np.asarray(signs) == C2BAR, axis=1)
