from ordrep.svm.kernels import ExtendedKernel, Kernel
from ordrep.svm.ordinal import (
    FrankHallSVM,
    OneVsOneSVM,
    OrdinalSVMModel,
    predict_ordinal,
    train_csvm,
    train_osvm,
    train_psvm,
)
from ordrep.svm.smo import (
    BinarySVMModel,
    ConvergenceError,
    kkt_audit,
    slack_diagnostics,
    train_binary_svm,
)

__all__ = [
    "BinarySVMModel",
    "ConvergenceError",
    "ExtendedKernel",
    "FrankHallSVM",
    "Kernel",
    "OneVsOneSVM",
    "OrdinalSVMModel",
    "kkt_audit",
    "predict_ordinal",
    "slack_diagnostics",
    "train_binary_svm",
    "train_csvm",
    "train_osvm",
    "train_psvm",
]
