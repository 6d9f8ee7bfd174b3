"""Plain-text persistence for the network learners (``ordrep-nn v1``).

Layout::

    ordrep-nn v1
    learner cnn|pnn|onn|unn
    classes K
    dim p
    loss squared|absolute                            (unn only)
    replication <h> <s> <j|all> <cumulative 0|1>     (onn only)
    networks <count>
    sizes <n_in> <h_1> ... <n_out>
    activations <act_1> ... <act_L>
    params <count>
    <weights, one layer block per line, row-major W then b>
    tags <count> <v_1> ... <v_count>                 (onn only)
    end

Numbers carry 17 significant digits so weights round-trip exactly.
"""

import numpy as np

from ordrep.nn.mlp import MLP
from ordrep.nn.ordinal import ConventionalNN, FrankHallNN, OrdinalNN, UnimodalNN
from ordrep.replicate import ReplicationConfig

HEADER = "ordrep-nn v1"


def _g(v):
    return format(float(v), ".17g")


def _net_lines(net):
    lines = ["sizes " + " ".join(str(s) for s in net.sizes),
             "activations " + " ".join(net.activations),
             f"params {net.params.size}"]
    for w, b in net.layers():
        lines.append(" ".join(_g(v) for v in np.concatenate([w.ravel(), b])))
    return lines


def dumps(model):
    lines = [HEADER, f"learner {model.name}", f"classes {model.num_classes}",
             f"dim {model.dim}"]
    if model.name == "cnn":
        nets = [model.net]
    elif model.name == "pnn":
        nets = list(model.members)
    elif model.name == "unn":
        lines.append(f"loss {model.loss}")
        nets = [model.net]
    elif model.name == "onn":
        cfg = model.config
        lines.append(f"replication {_g(cfg.h)} {cfg.s} {'all' if cfg.j is None else cfg.j} "
                     f"{int(cfg.cumulative)}")
        nets = [model.g]
    else:
        raise ValueError(f"cannot save learner {model.name!r}")
    lines.append(f"networks {len(nets)}")
    for net in nets:
        lines += _net_lines(net)
    if model.name == "onn":
        v = np.asarray(model.tag_weights, dtype=float)
        lines.append(" ".join(["tags", str(v.size)] + [_g(t) for t in v]))
    lines.append("end")
    return "\n".join(lines) + "\n"


def save(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model))


def _read_net(lines, pos):
    sizes = tuple(int(t) for t in lines[pos].split()[1:])
    acts = tuple(lines[pos + 1].split()[1:])
    count = int(lines[pos + 2].split()[1])
    pos += 3
    values = []
    for _ in range(len(sizes) - 1):
        values += [float(t) for t in lines[pos].split()]
        pos += 1
    if len(values) != count:
        raise ValueError("parameter count does not match the stored weights")
    return MLP(sizes, acts, np.array(values)), pos


def loads(text):
    try:
        return _parse(text)
    except (IndexError, KeyError):
        raise ValueError("model file is truncated or malformed") from None


def _parse(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != HEADER:
        raise ValueError(f"not an {HEADER} model file")
    pos = 1
    fields = {}
    while not lines[pos].startswith("networks"):
        tok = lines[pos].split()
        fields[tok[0]] = tok
        pos += 1
    learner = fields["learner"][1]
    k = int(fields["classes"][1])
    p = int(fields["dim"][1])
    count = int(lines[pos].split()[1])
    pos += 1
    nets = []
    for _ in range(count):
        net, pos = _read_net(lines, pos)
        nets.append(net)
    tags = None
    if lines[pos].startswith("tags"):
        tok = lines[pos].split()
        tags = np.array([float(t) for t in tok[2:]])
        if tags.size != int(tok[1]):
            raise ValueError("tag weight count mismatch")
        pos += 1
    if pos >= len(lines) or lines[pos] != "end":
        raise ValueError("model file is truncated")
    if learner == "cnn":
        return ConventionalNN(nets[0], k)
    if learner == "pnn":
        return FrankHallNN(nets, k)
    if learner == "unn":
        return UnimodalNN(nets[0], k, fields["loss"][1])
    if learner == "onn":
        h, s, j, cum = fields["replication"][1:5]
        config = ReplicationConfig(k, h=float(h), s=int(s),
                                   j=None if j == "all" else int(j), cumulative=cum == "1")
        return OrdinalNN(nets[0], tags if tags is not None else np.zeros(k - 2), config, p)
    raise ValueError(f"unknown learner {learner!r}")


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
