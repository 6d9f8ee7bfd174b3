"""Plain-text persistence for the SVM learners (``ordrep-svm v1``).

Layout, one record per line, whitespace separated::

    ordrep-svm v1
    learner osvm|csvm|psvm
    classes K
    dim p
    kernel linear | kernel polynomial <degree>
    C <float>
    replication <h> <s> <j|all> <cumulative 0|1>     (osvm only)
    members <count>
    member <key...> binary <bias> <n_support> <width>
    <coef> <x_1> ... <x_width>                         (n_support lines)
    member <key...> constant <value>
    end

Floats are written with ``repr`` so they round-trip exactly.
"""

import numpy as np

from ordrep.replicate import ReplicationConfig
from ordrep.svm.kernels import ExtendedKernel, Kernel
from ordrep.svm.ordinal import Constant, FrankHallSVM, OneVsOneSVM, OrdinalSVMModel
from ordrep.svm.smo import BinarySVMModel

HEADER = "ordrep-svm v1"


def _f(v):
    return repr(float(v))


def _kernel_line(kernel):
    if kernel.kind == "linear":
        return "kernel linear"
    return f"kernel polynomial {kernel.degree}"


def _binary_lines(key, model):
    lines = [f"member {key} binary {_f(model.bias)} {model.dual_coef.size} "
             f"{model.support_vectors.shape[1]}"]
    for c, sv in zip(model.dual_coef, model.support_vectors):
        lines.append(" ".join([_f(c)] + [_f(v) for v in sv]))
    return lines


def dumps(model):
    lines = [HEADER, f"learner {model.name}", f"classes {model.num_classes}",
             f"dim {model.dim}"]
    if model.name == "osvm":
        cfg = model.config
        lines += [
            _kernel_line(model.binary.kernel.base),
            f"C {_f(model.binary.C)}",
            f"replication {_f(cfg.h)} {cfg.s} {'all' if cfg.j is None else cfg.j} "
            f"{int(cfg.cumulative)}",
            "members 1",
        ]
        lines += _binary_lines("0", model.binary)
    else:
        lines += [_kernel_line(model.kernel), f"C {_f(model.C)}"]
        if model.name == "csvm":
            items = [(f"{a} {b}", m) for (a, b), m in model.members.items()]
        else:
            items = [(str(i + 1), m) for i, m in enumerate(model.members)]
        lines.append(f"members {len(items)}")
        for key, m in items:
            if isinstance(m, Constant):
                lines.append(f"member {key} constant {_f(m.value)}")
            else:
                lines += _binary_lines(key, m)
    lines.append("end")
    return "\n".join(lines) + "\n"


def save(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model))


def _parse_kernel(tokens):
    if tokens[1] == "linear":
        return Kernel("linear")
    return Kernel("polynomial", int(tokens[2]))


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
    while not lines[pos].startswith("members"):
        tok = lines[pos].split()
        fields[tok[0]] = tok
        pos += 1
    learner = fields["learner"][1]
    k = int(fields["classes"][1])
    p = int(fields["dim"][1])
    base = _parse_kernel(fields["kernel"])
    C = float(fields["C"][1])
    count = int(lines[pos].split()[1])
    pos += 1
    members = []
    for _ in range(count):
        tok = lines[pos].split()
        pos += 1
        kind_at = tok.index("binary") if "binary" in tok else tok.index("constant")
        key = tuple(int(t) for t in tok[1:kind_at])
        if tok[kind_at] == "constant":
            members.append((key, Constant(float(tok[kind_at + 1]))))
            continue
        bias = float(tok[kind_at + 1])
        n_sv, width = int(tok[kind_at + 2]), int(tok[kind_at + 3])
        rows = np.array([[float(v) for v in lines[pos + r].split()] for r in range(n_sv)])
        rows = rows.reshape(n_sv, width + 1)
        pos += n_sv
        members.append((key, (bias, rows[:, 0].copy(), rows[:, 1:].copy())))
    if lines[pos] != "end":
        raise ValueError("model file is truncated")

    def binary(parts, kernel):
        bias, coef, sv = parts
        return BinarySVMModel(support_vectors=sv, dual_coef=coef, bias=bias,
                              kernel=kernel, C=C)

    if learner == "osvm":
        h, s, j, cum = fields["replication"][1:5]
        config = ReplicationConfig(k, h=float(h), s=int(s),
                                   j=None if j == "all" else int(j), cumulative=cum == "1")
        kernel = ExtendedKernel(base, config.tag_dim())
        return OrdinalSVMModel(binary(members[0][1], kernel), config, p)
    built = [(key, m if isinstance(m, Constant) else binary(m, base)) for key, m in members]
    if learner == "csvm":
        return OneVsOneSVM({key: m for key, m in built}, k, p, C, base)
    if learner == "psvm":
        return FrankHallSVM(tuple(m for _, m in built), k, p, C, base)
    raise ValueError(f"unknown learner {learner!r}")


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
