from ordrep.nn.mlp import MLP, DivergenceError, gradient_descent, init_mlp, train_mlp
from ordrep.nn.ordinal import (
    ConventionalNN,
    FrankHallNN,
    OrdinalNN,
    UnimodalNN,
    binomial_posteriors,
    onn_class_probabilities,
    predict_unimodal,
    train_cnn,
    train_onn,
    train_pnn,
    train_unn,
    unimodal_error,
)

__all__ = [
    "MLP",
    "ConventionalNN",
    "DivergenceError",
    "FrankHallNN",
    "OrdinalNN",
    "UnimodalNN",
    "binomial_posteriors",
    "gradient_descent",
    "init_mlp",
    "onn_class_probabilities",
    "predict_unimodal",
    "train_cnn",
    "train_mlp",
    "train_onn",
    "train_pnn",
    "train_unn",
    "unimodal_error",
]
