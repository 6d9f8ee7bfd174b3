"""One entry point to configure, train, save and load every learner."""

from dataclasses import dataclass, replace

from ordrep.nn import io as nn_io
from ordrep.nn.ordinal import train_cnn, train_onn, train_pnn, train_unn
from ordrep.svm import io as svm_io
from ordrep.svm.kernels import Kernel
from ordrep.svm.ordinal import train_csvm, train_osvm, train_psvm
from ordrep.svm.smo import KKT_TOL, MAX_ITER

SVM_MODELS = ("csvm", "psvm", "osvm")
NN_MODELS = ("cnn", "pnn", "onn", "unn")
MODELS = SVM_MODELS + NN_MODELS

# which hyperparameters each model reads; anything else is a config error
_COMMON = {"model", "seed"}
_SVM = {"C", "kernel", "degree", "tol", "max_iter"}
_NN = {"hidden", "epochs", "lr"}
_REPLICATION = {"h", "s", "j", "cumulative"}
ALLOWED = {
    "csvm": _COMMON | _SVM,
    "psvm": _COMMON | _SVM,
    "osvm": _COMMON | _SVM | _REPLICATION,
    "cnn": _COMMON | _NN,
    "pnn": _COMMON | _NN,
    "onn": _COMMON | _NN | _REPLICATION,
    "unn": _COMMON | _NN | {"loss"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Model choice plus hyperparameters.

    ``None`` means "use the model default": ``h`` is 10 for oSVM and 1 for
    oNN, ``s`` is ``K-1`` and ``j`` shares every feature.
    """

    model: str
    C: float = 10000.0
    kernel: str = "polynomial"
    degree: int = 2
    tol: float = KKT_TOL
    max_iter: int = MAX_ITER
    h: float = None
    s: int = None
    j: int = None
    cumulative: bool = False
    hidden: int = 5
    epochs: int = 2000
    lr: float = 0.5
    loss: str = "squared"
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if self.kernel not in ("linear", "polynomial"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if self.degree < 1:
            raise ValueError("degree must be a positive integer")
        if self.hidden < 0 or self.epochs < 0:
            raise ValueError("hidden and epochs must be non-negative")
        if self.loss not in ("squared", "absolute"):
            raise ValueError(f"unknown loss {self.loss!r}")

    @classmethod
    def from_mapping(cls, values):
        """Build from a name -> value mapping, rejecting keys the model ignores.

        Values may be strings, as read from a config file or the command line.
        """
        values = dict(values)
        model = values.get("model")
        if model not in MODELS:
            raise ValueError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
        extra = set(values) - ALLOWED[model]
        if extra:
            raise ValueError(f"{model} does not take: {', '.join(sorted(extra))}")
        return cls(**{key: _coerce(key, raw) for key, raw in values.items()})

    def with_seed(self, seed):
        return replace(self, seed=int(seed))

    def base_kernel(self):
        if self.kernel == "linear":
            return Kernel("linear")
        return Kernel("polynomial", self.degree)

    def replication_h(self):
        if self.h is not None:
            return float(self.h)
        return 10.0 if self.model == "osvm" else 1.0


_BOOL = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def _coerce(key, raw):
    if raw is None or not isinstance(raw, str):
        return raw
    text = raw.strip()
    if key == "kernel":
        return {"poly": "polynomial"}.get(text, text)
    if key == "cumulative":
        if text.lower() not in _BOOL:
            raise ValueError(f"cumulative expects a boolean, got {raw!r}")
        return _BOOL[text.lower()]
    if key in ("model", "loss"):
        return text
    if key == "j" and text in ("all", "p"):
        return None
    try:
        if key in ("degree", "max_iter", "s", "j", "hidden", "epochs", "seed"):
            return int(float(text)) if "e" in text.lower() else int(text)
        return float(text)
    except ValueError:
        raise ValueError(f"bad value for {key}: {raw!r}") from None


def train(config, dataset):
    """Fit the configured learner on ``dataset``."""
    m = config.model
    if m in SVM_MODELS:
        svm_args = dict(C=config.C, kernel=config.base_kernel(), tol=config.tol,
                        max_iter=config.max_iter)
        if m == "csvm":
            return train_csvm(dataset, **svm_args)
        if m == "psvm":
            return train_psvm(dataset, **svm_args)
        return train_osvm(dataset, h=config.replication_h(), s=config.s, j=config.j,
                          cumulative=config.cumulative, **svm_args)
    nn_args = dict(hidden=config.hidden, epochs=config.epochs, lr=config.lr, seed=config.seed)
    if m == "cnn":
        return train_cnn(dataset, **nn_args)
    if m == "pnn":
        return train_pnn(dataset, **nn_args)
    if m == "unn":
        return train_unn(dataset, loss=config.loss, **nn_args)
    return train_onn(dataset, h=config.replication_h(), s=config.s, j=config.j,
                     cumulative=config.cumulative, **nn_args)


def dumps(model):
    if model.name in SVM_MODELS:
        return svm_io.dumps(model)
    return nn_io.dumps(model)


def save(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model))


def loads(text):
    head = text.lstrip().split("\n", 1)[0].strip()
    if head == svm_io.HEADER:
        return svm_io.loads(text)
    if head == nn_io.HEADER:
        return nn_io.loads(text)
    raise ValueError("unrecognised model file header")


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _binary_summary(tag, model):
    return (f"{tag} iterations={model.iterations} kkt_gap={model.kkt_gap:.6g} "
            f"objective={model.objective:.10g} support_vectors={model.dual_coef.size} "
            f"bias={model.bias:.10g}")


def diagnostics(model):
    """Training diagnostics as text lines: KKT residuals or loss traces."""
    lines = []
    if model.name == "osvm":
        lines.append(_binary_summary("binary", model.binary))
        lines.append("boundary_biases " + " ".join(f"{b:.10g}" for b in model.boundary_biases()))
    elif model.name in ("csvm", "psvm"):
        items = model.members.items() if model.name == "csvm" else enumerate(model.members, 1)
        for key, member in items:
            tag = f"member {key}"
            if hasattr(member, "iterations"):
                lines.append(_binary_summary(tag, member))
            else:
                lines.append(f"{tag} constant {member.value}")
    else:
        traces = model.traces if model.name == "pnn" else [model.trace]
        for idx, trace in enumerate(traces, 1):
            if trace is None:
                continue
            lines.append(f"network {idx} epochs={len(trace.losses) - 1} "
                         f"final_loss={trace.losses[-1]:.10g} final_lr={trace.final_lr:.6g} "
                         f"backoffs={trace.backoffs}")
            lines.append("loss " + " ".join(f"{v:.8g}" for v in trace.losses))
        if model.name == "onn":
            lines.append("cut_points " + " ".join(f"{c:.10g}" for c in model.cut_points()))
    return lines
