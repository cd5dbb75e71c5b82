"""The float64 autodiff core under the classifiers: build a graph, check a
gradient against finite differences, then race the three optimizers."""

import numpy as np

from causalmood.neural import (
    LSTM,
    OptimizerConfig,
    Tensor,
    make_optimizer,
    zero_grads,
)
from causalmood.neural.tensor import matmul, tanh, tsum

rng = np.random.default_rng(0)

# forward: sum(tanh(x W)) with reverse-mode gradients for W
x = Tensor(rng.standard_normal((4, 3)))
w = Tensor(rng.standard_normal((3, 2)), requires_grad=True)
loss = tsum(tanh(matmul(x, w)))
loss.backward()

h = 1e-6
i, j = 1, 0
orig = w.data[i, j]
w.data[i, j] = orig + h
up = float(tsum(tanh(matmul(x, w))).data.item())
w.data[i, j] = orig - h
down = float(tsum(tanh(matmul(x, w))).data.item())
w.data[i, j] = orig
numeric = (up - down) / (2 * h)
print(f"dL/dW[{i},{j}]: autodiff {w.grad[i, j]:+.9f}, "
      f"finite difference {numeric:+.9f}")

# the recurrent layers ride on the same tape
lstm = LSTM(3, 5, rng)
states = lstm(x)
tsum(states).backward()
print(f"LSTM over {x.data.shape[0]} steps -> states {states.data.shape}, "
      f"input-weight grad norm {np.linalg.norm(lstm.w_x.grad):.4f}\n")

# three optimizers descending the same quadratic bowl; the gradient of
# |p - target|^2 is written in by hand each step
target = np.array([[3.0, -2.0]])
print(f"minimizing |p - {target.ravel()}|^2 from the origin:")
for kind, lr, steps in (("sgd_momentum", 0.05, 100), ("adam", 0.1, 100),
                        ("adadelta", 1.0, 1000)):
    p = Tensor(np.zeros((1, 2)), requires_grad=True)
    opt = make_optimizer({"p": p}, OptimizerConfig(kind=kind, lr=lr))
    for _ in range(steps):
        zero_grads([p])
        p._ensure_grad()
        p.grad += 2 * (p.data - target)
        opt.step()
    note = "  (long sqrt(eps) warmup)" if kind == "adadelta" else ""
    print(f"  {kind:>12} after {steps:4d} steps: "
          f"p = {np.round(p.data.ravel(), 4)}{note}")
