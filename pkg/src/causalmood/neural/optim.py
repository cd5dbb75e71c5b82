"""Adadelta, Adam, and SGD-with-momentum over named parameter tensors.

L2 regularization is applied as ``grad += weight_decay * w`` before each
update, so every optimizer sees the same penalized gradient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from causalmood.neural.tensor import Tensor

KINDS = ("adadelta", "adam", "sgd_momentum")


@dataclass
class OptimizerConfig:
    kind: str = "adam"
    lr: float = 0.001
    weight_decay: float = 0.0
    rho: float = 0.95          # adadelta accumulator decay
    eps: float = 1e-6
    beta1: float = 0.9         # adam moment decays
    beta2: float = 0.999
    momentum: float = 0.9

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown optimizer kind {self.kind!r}, want {KINDS}")
        if self.lr <= 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")


class Optimizer:
    def __init__(self, params: dict[str, Tensor], cfg: OptimizerConfig):
        cfg.validate()
        self.params = params
        self.cfg = cfg

    def _penalized_grad(self, p: Tensor) -> np.ndarray:
        g = p.grad
        if g is None:
            raise ValueError("optimizer step before any backward pass")
        if self.cfg.weight_decay > 0:
            g = g + self.cfg.weight_decay * p.data
        return g

    def step(self) -> None:
        raise NotImplementedError


class Adadelta(Optimizer):
    def __init__(self, params: dict[str, Tensor], cfg: OptimizerConfig):
        super().__init__(params, cfg)
        self._sq_grad = {k: np.zeros_like(p.data) for k, p in params.items()}
        self._sq_delta = {k: np.zeros_like(p.data) for k, p in params.items()}

    def step(self) -> None:
        rho, eps, lr = self.cfg.rho, self.cfg.eps, self.cfg.lr
        for name, p in self.params.items():
            g = self._penalized_grad(p)
            eg = self._sq_grad[name]
            ed = self._sq_delta[name]
            eg *= rho
            eg += (1 - rho) * g * g
            delta = np.sqrt((ed + eps) / (eg + eps)) * g
            p.data -= lr * delta
            ed *= rho
            ed += (1 - rho) * delta * delta


class Adam(Optimizer):
    def __init__(self, params: dict[str, Tensor], cfg: OptimizerConfig):
        super().__init__(params, cfg)
        self._m = {k: np.zeros_like(p.data) for k, p in params.items()}
        self._v = {k: np.zeros_like(p.data) for k, p in params.items()}
        self._t = 0

    def step(self) -> None:
        b1, b2, eps, lr = self.cfg.beta1, self.cfg.beta2, 1e-8, self.cfg.lr
        self._t += 1
        bc1 = 1 - b1 ** self._t
        bc2 = 1 - b2 ** self._t
        for name, p in self.params.items():
            g = self._penalized_grad(p)
            m = self._m[name]
            v = self._v[name]
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            p.data -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)


class SgdMomentum(Optimizer):
    def __init__(self, params: dict[str, Tensor], cfg: OptimizerConfig):
        super().__init__(params, cfg)
        self._vel = {k: np.zeros_like(p.data) for k, p in params.items()}

    def step(self) -> None:
        mu, lr = self.cfg.momentum, self.cfg.lr
        for name, p in self.params.items():
            g = self._penalized_grad(p)
            vel = self._vel[name]
            vel *= mu
            vel += g
            p.data -= lr * vel


def make_optimizer(params: dict[str, Tensor], cfg: OptimizerConfig) -> Optimizer:
    cfg.validate()
    cls = {"adadelta": Adadelta, "adam": Adam, "sgd_momentum": SgdMomentum}[cfg.kind]
    return cls(params, cfg)


def zero_grads(params: Iterable[Tensor]) -> None:
    for p in params:
        if p.grad is not None:
            p.grad[:] = 0.0
