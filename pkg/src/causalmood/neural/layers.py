"""Recurrent cells, attention pooling, and the linear layer.

Weights initialize from U(-0.1, 0.1); biases start at zero. All layers take
and return (time x features) matrices built from the autodiff Tensor type.
"""

from __future__ import annotations

import numpy as np

from causalmood.neural.tensor import (
    Tensor,
    concat_cols,
    concat_rows,
    flip_rows,
    matmul,
    mul,
    select_row,
    sigmoid,
    slice_cols,
    softmax_rows,
    tanh,
    transpose,
)

INIT_RANGE = 0.1


def uniform_tensor(rng: np.random.Generator, shape: tuple[int, int]) -> Tensor:
    return Tensor(rng.uniform(-INIT_RANGE, INIT_RANGE, shape), requires_grad=True)


def zeros_tensor(shape: tuple[int, int], trainable: bool = True) -> Tensor:
    return Tensor(np.zeros(shape), requires_grad=trainable)


class Linear:
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        self.weight = uniform_tensor(rng, (in_dim, out_dim))
        self.bias = zeros_tensor((1, out_dim))

    def __call__(self, x: Tensor) -> Tensor:
        return matmul(x, self.weight) + self.bias

    def params(self, prefix: str) -> dict[str, Tensor]:
        return {f"{prefix}.weight": self.weight, f"{prefix}.bias": self.bias}


class LSTM:
    """Single-direction LSTM; gates packed [input, forget, cell, output]."""

    def __init__(self, in_dim: int, hidden: int, rng: np.random.Generator):
        self.hidden = hidden
        self.w_x = uniform_tensor(rng, (in_dim, 4 * hidden))
        self.w_h = uniform_tensor(rng, (hidden, 4 * hidden))
        self.bias = zeros_tensor((1, 4 * hidden))

    def __call__(self, x: Tensor) -> Tensor:
        """(T x in_dim) -> all hidden states (T x hidden); h0 = c0 = 0."""
        if x.data.shape[0] < 1:
            raise ValueError("LSTM input needs at least one time step")
        d = self.hidden
        h = zeros_tensor((1, d), trainable=False)
        c = zeros_tensor((1, d), trainable=False)
        states = []
        pre_x = matmul(x, self.w_x)  # all steps at once
        for t in range(x.data.shape[0]):
            z = select_row(pre_x, t) + matmul(h, self.w_h) + self.bias
            i = sigmoid(slice_cols(z, 0, d))
            f = sigmoid(slice_cols(z, d, 2 * d))
            g = tanh(slice_cols(z, 2 * d, 3 * d))
            o = sigmoid(slice_cols(z, 3 * d, 4 * d))
            c = mul(f, c) + mul(i, g)
            h = mul(o, tanh(c))
            states.append(h)
        return concat_rows(states)

    def params(self, prefix: str) -> dict[str, Tensor]:
        return {
            f"{prefix}.w_x": self.w_x,
            f"{prefix}.w_h": self.w_h,
            f"{prefix}.bias": self.bias,
        }


class BiLSTM:
    """Concatenates a forward pass and a reversed-input backward pass."""

    def __init__(self, in_dim: int, hidden: int, rng: np.random.Generator):
        self.fwd = LSTM(in_dim, hidden, rng)
        self.bwd = LSTM(in_dim, hidden, rng)
        self.hidden = hidden

    def __call__(self, x: Tensor) -> Tensor:
        """(T x in_dim) -> (T x 2*hidden)."""
        forward_states = self.fwd(x)
        backward_states = flip_rows(self.bwd(flip_rows(x)))
        return concat_cols([forward_states, backward_states])

    def params(self, prefix: str) -> dict[str, Tensor]:
        return {**self.fwd.params(f"{prefix}.fwd"),
                **self.bwd.params(f"{prefix}.bwd")}


class GRU:
    """GRU cell; gates packed [reset, update, candidate].

    Candidate state uses the reset gate on the previous hidden state before
    the hidden-to-hidden product: n = tanh(x W_xn + (r*h) W_hn + b_n).
    """

    def __init__(self, in_dim: int, hidden: int, rng: np.random.Generator):
        self.hidden = hidden
        self.w_x = uniform_tensor(rng, (in_dim, 3 * hidden))
        self.w_h = uniform_tensor(rng, (hidden, 3 * hidden))
        self.bias = zeros_tensor((1, 3 * hidden))

    def __call__(self, x: Tensor) -> Tensor:
        if x.data.shape[0] < 1:
            raise ValueError("GRU input needs at least one time step")
        d = self.hidden
        h = zeros_tensor((1, d), trainable=False)
        states = []
        pre_x = matmul(x, self.w_x)
        for t in range(x.data.shape[0]):
            px = select_row(pre_x, t)
            ph = matmul(h, self.w_h)
            r = sigmoid(slice_cols(px, 0, d) + slice_cols(ph, 0, d)
                        + slice_cols(self.bias, 0, d))
            z = sigmoid(slice_cols(px, d, 2 * d) + slice_cols(ph, d, 2 * d)
                        + slice_cols(self.bias, d, 2 * d))
            n = tanh(slice_cols(px, 2 * d, 3 * d)
                     + matmul(mul(r, h),
                              slice_cols(self.w_h, 2 * d, 3 * d))
                     + slice_cols(self.bias, 2 * d, 3 * d))
            one_minus_z = _affine(z, -1.0, 1.0)
            h = mul(one_minus_z, n) + mul(z, h)
            states.append(h)
        return concat_rows(states)

    def params(self, prefix: str) -> dict[str, Tensor]:
        return {
            f"{prefix}.w_x": self.w_x,
            f"{prefix}.w_h": self.w_h,
            f"{prefix}.bias": self.bias,
        }


def _affine(x: Tensor, a: float, b: float) -> Tensor:
    """a*x + b elementwise."""
    out = Tensor(a * x.data + b, _parents=(x,))

    def bwd() -> None:
        x._ensure_grad()
        x.grad += a * out.grad

    out._backward = bwd
    return out


class ContextAttention:
    """Similarity-to-context pooling over recurrent states.

    m_i = tanh(h_i W + b); score_i = m_i . c; a = softmax(scores);
    pooled = sum_i a_i h_i.
    """

    def __init__(self, state_dim: int, attn_dim: int, rng: np.random.Generator):
        self.w = uniform_tensor(rng, (state_dim, attn_dim))
        self.bias = zeros_tensor((1, attn_dim))
        self.context = uniform_tensor(rng, (attn_dim, 1))

    def __call__(self, states: Tensor) -> tuple[Tensor, Tensor]:
        """(T x S) -> (weights (1 x T), pooled (1 x S))."""
        m = tanh(matmul(states, self.w) + self.bias)
        scores = matmul(m, self.context)            # (T x 1)
        weights = softmax_rows(transpose(scores))   # (1 x T)
        pooled = matmul(weights, states)            # (1 x S)
        return weights, pooled

    def params(self, prefix: str) -> dict[str, Tensor]:
        return {
            f"{prefix}.w": self.w,
            f"{prefix}.bias": self.bias,
            f"{prefix}.context": self.context,
        }
