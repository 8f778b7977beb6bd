"""Dense-network math with hand-written backpropagation.

Everything is float64. Inputs may be a single vector or a (batch, features)
array.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import ShapeError


@dataclass
class DenseNet:
    """Affine layers with ReLU between them and an identity output."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ShapeError("need one bias per weight matrix and at least one layer")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ShapeError(f"layer {i}: weight {w.shape} / bias {b.shape} mismatch")
            if i and w.shape[1] != self.weights[i - 1].shape[0]:
                raise ShapeError(
                    f"layer {i} expects {w.shape[1]} inputs but layer {i - 1} emits {self.weights[i - 1].shape[0]}"
                )

    @classmethod
    def init(cls, sizes: list[int], rng: np.random.Generator) -> "DenseNet":
        """He-uniform weights (bound sqrt(6 / fan_in)) and zero biases."""
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = np.sqrt(6.0 / fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases)

    @classmethod
    def zeros(cls, sizes: list[int]) -> "DenseNet":
        return cls(
            [np.zeros((o, i)) for i, o in zip(sizes[:-1], sizes[1:])],
            [np.zeros(o) for o in sizes[1:]],
        )

    @property
    def sizes(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[0]

    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    @classmethod
    def from_params(cls, params: list[np.ndarray]) -> "DenseNet":
        return cls(list(params[0::2]), list(params[1::2]))

    def copy(self) -> "DenseNet":
        return DenseNet.from_params([p.copy() for p in self.params()])


@dataclass
class ForwardCache:
    inputs: list  # input seen by each layer
    pre: list[np.ndarray]  # pre-activations
    signature: tuple = field(default=())
    squeeze: bool = False


def _signature(net: DenseNet) -> tuple:
    return tuple(w.shape for w in net.weights)


def forward(net: DenseNet, x) -> tuple[np.ndarray, ForwardCache]:
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    if x.shape[1] != net.in_dim:
        raise ShapeError(f"input has {x.shape[1]} features, net expects {net.in_dim}")
    inputs, pre = [], []
    h = x
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        inputs.append(h)
        a = h @ w.T + b
        pre.append(a)
        h = np.maximum(a, 0.0) if i < last else a
    out = h[0] if squeeze else h
    return out, ForwardCache(inputs, pre, _signature(net), squeeze)


def backward(
    net: DenseNet, cache: ForwardCache, output_grad, *, need_input_grad: bool = True
) -> tuple[list[np.ndarray], np.ndarray | None]:
    """Gradients for ``[W0, b0, W1, b1, ...]`` and for the net input."""
    if cache.signature != _signature(net) or len(cache.pre) != len(net.weights):
        raise ShapeError("forward cache does not belong to this network")
    g = np.asarray(output_grad, dtype=np.float64)
    if cache.squeeze:
        g = g[None, :]
    if g.shape != cache.pre[-1].shape:
        raise ShapeError(f"output gradient {g.shape} does not match output {cache.pre[-1].shape}")
    grads: list[np.ndarray] = [None] * (2 * len(net.weights))
    grad_in = None
    for i in range(len(net.weights) - 1, -1, -1):
        if i < len(net.weights) - 1:
            g = g * (cache.pre[i] > 0)
        x = cache.inputs[i]
        grads[2 * i] = g.T @ x
        grads[2 * i + 1] = g.sum(axis=0)
        if i > 0 or need_input_grad:
            g = g @ net.weights[i]
            if i == 0:
                grad_in = g[0] if cache.squeeze else g
    return grads, grad_in


@dataclass
class GaussianParams:
    mu: np.ndarray
    logvar: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=np.float64)
        self.logvar = np.asarray(self.logvar, dtype=np.float64)
        if self.mu.shape != self.logvar.shape:
            raise ShapeError(f"mu {self.mu.shape} and logvar {self.logvar.shape} differ")


def kl_standard_normal(g: GaussianParams) -> tuple[float, np.ndarray, np.ndarray]:
    """KL(N(mu, exp(logvar)) || N(0, I)) summed over every entry, with gradients."""
    ev = np.exp(g.logvar)
    kl = 0.5 * float(np.sum(ev + g.mu ** 2 - 1.0 - g.logvar))
    return kl, g.mu.copy(), 0.5 * (ev - 1.0)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits, target) -> tuple[float, np.ndarray]:
    """Summed cross-entropy of softmax(logits) against integer targets.

    ``logits`` has the vocabulary on its last axis; ``target`` matches the
    leading axes. The gradient is ``softmax(logits) - one_hot(target)``.
    """
    logits = np.asarray(logits, dtype=np.float64)
    target = np.asarray(target)
    vocab = logits.shape[-1]
    if target.shape != logits.shape[:-1]:
        raise ShapeError(f"targets {target.shape} do not match logits {logits.shape}")
    if np.any(target < 0) or np.any(target >= vocab):
        raise ValueError(f"target index out of range for vocabulary of {vocab}")
    z = logits - logits.max(axis=-1, keepdims=True)
    logsum = np.log(np.exp(z).sum(axis=-1))
    picked = np.take_along_axis(z, target[..., None], axis=-1)[..., 0]
    loss = float(np.sum(logsum - picked))
    grad = softmax(logits)
    np.put_along_axis(grad, target[..., None], np.take_along_axis(grad, target[..., None], axis=-1) - 1.0, axis=-1)
    return loss, grad


def reparameterize(g: GaussianParams, noise) -> np.ndarray:
    noise = np.asarray(noise, dtype=np.float64)
    if noise.shape != g.mu.shape:
        raise ShapeError(f"noise {noise.shape} does not match latent {g.mu.shape}")
    return g.mu + np.exp(0.5 * g.logvar) * noise


@dataclass
class LRSchedule:
    """Step decay: ``factor`` mode multiplies by ``factor`` every ``interval``
    epochs; ``decrement`` mode subtracts ``factor * base`` each interval."""

    base: float = 0.001
    factor: float = 0.01
    interval: int = 2500
    mode: str = "factor"

    def __post_init__(self):
        if self.mode not in ("factor", "decrement"):
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if self.interval <= 0:
            raise ValueError("decay interval must be positive")

    def rate(self, epoch: int) -> float:
        k = epoch // self.interval
        if self.mode == "factor":
            return self.base * self.factor ** k
        return max(self.base * (1.0 - self.factor * k), 0.0)


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    schedule: LRSchedule = field(default_factory=LRSchedule)

    @classmethod
    def for_params(cls, params: list[np.ndarray], schedule: LRSchedule | None = None, **kw) -> "AdamState":
        return cls(
            [np.zeros_like(p) for p in params],
            [np.zeros_like(p) for p in params],
            schedule=schedule or LRSchedule(),
            **kw,
        )


def adam_step(
    params: list[np.ndarray], grads: list[np.ndarray], state: AdamState, epoch: int = 0
) -> tuple[list[np.ndarray], AdamState]:
    """One bias-corrected Adam update at the scheduled rate for ``epoch``.

    Returns fresh parameter arrays; the moment buffers in ``state`` are
    updated in place and the step counter advances.
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError("parameter, gradient and optimizer-state lists differ in length")
    for p, g, m in zip(params, grads, state.m):
        if p.shape != g.shape or p.shape != m.shape:
            raise ShapeError(f"shape mismatch: param {p.shape}, grad {g.shape}, moment {m.shape}")
    state.step += 1
    t = state.step
    lr = state.schedule.rate(epoch)
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t
    new_params = []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        out = np.empty_like(p, dtype=np.float64)
        _adam_kernel(
            np.ascontiguousarray(p, dtype=np.float64).ravel(),
            np.ascontiguousarray(g, dtype=np.float64).ravel(),
            m.reshape(-1), v.reshape(-1), state.beta1, state.beta2, lr, c1, c2, state.eps, out.reshape(-1),
        )
        new_params.append(out)
    return new_params, state


@numba.njit(cache=False)
def _adam_kernel(p, g, m, v, beta1, beta2, lr, c1, c2, eps, out):
    # Same operation order as the vectorised form:
    # m = b1*m + (1-b1)*g; v = b2*v + (1-b2)*(g*g); p - lr*(m/c1)/(sqrt(v/c2)+eps)
    for i in range(p.size):
        mi = m[i] * beta1 + (1.0 - beta1) * g[i]
        vi = v[i] * beta2 + (1.0 - beta2) * (g[i] * g[i])
        m[i] = mi
        v[i] = vi
        out[i] = p[i] - lr * (mi / c1) / (np.sqrt(vi / c2) + eps)
