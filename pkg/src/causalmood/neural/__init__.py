"""Minimal float64 autodiff core plus the recurrent layers and optimizers
used by the user-type and emotion classifiers."""

from causalmood.neural.tensor import (
    Tensor,
    concat_cols,
    concat_rows,
    cross_entropy_from_probs,
    embedding_rows,
    flip_rows,
    softmax_rows,
)
from causalmood.neural.layers import (
    LSTM,
    GRU,
    BiLSTM,
    ContextAttention,
    Linear,
    uniform_tensor,
)
from causalmood.neural.optim import OptimizerConfig, make_optimizer, zero_grads

__all__ = [
    "Tensor", "concat_cols", "concat_rows", "cross_entropy_from_probs",
    "embedding_rows", "flip_rows", "softmax_rows",
    "LSTM", "GRU", "BiLSTM", "ContextAttention", "Linear", "uniform_tensor",
    "OptimizerConfig", "make_optimizer", "zero_grads",
]
