"""Minimal feed-forward networks with exact reverse-mode gradients and Adam.

Everything is plain float64 numpy.  A network is a spec (layer sizes plus
activations) and a parameter set (weight matrices and bias vectors); gradients
reuse the parameter layout.  Backward passes return exact partial derivatives
of ``upstream . output`` with respect to parameters and/or inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError

HIDDEN_ACTIVATIONS = ("tanh", "relu")
OUTPUT_ACTIVATIONS = ("identity", "tanh")


@dataclass(frozen=True)
class MlpSpec:
    """Shape and activation choice of a fully-connected net.

    ``layer_sizes`` runs input-first, output-last and needs at least two
    entries; every size must be >= 1.
    """

    layer_sizes: tuple[int, ...]
    hidden_activation: str = "tanh"
    output_activation: str = "identity"

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(int(n) for n in self.layer_sizes))
        if len(self.layer_sizes) < 2:
            raise ConfigError("layer_sizes needs an input and an output size")
        if any(n < 1 for n in self.layer_sizes):
            raise ConfigError(f"layer sizes must be >= 1, got {self.layer_sizes}")
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ConfigError(f"unknown hidden activation {self.hidden_activation!r}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ConfigError(f"unknown output activation {self.output_activation!r}")

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1


@dataclass
class MlpParams:
    """Per-layer weights and biases matching an MlpSpec.

    Also the container for gradients, which are shape-identical by
    construction.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def copy(self) -> "MlpParams":
        return MlpParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def arrays(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out


Gradient = MlpParams


def init_params(spec: MlpSpec, rng: np.random.Generator) -> MlpParams:
    """Uniform init in +-1/sqrt(fan_in) per layer, seeded by ``rng``."""
    weights, biases = [], []
    for n_in, n_out in zip(spec.layer_sizes[:-1], spec.layer_sizes[1:]):
        bound = 1.0 / np.sqrt(n_in)
        weights.append(rng.uniform(-bound, bound, size=(n_in, n_out)))
        biases.append(rng.uniform(-bound, bound, size=n_out))
    return MlpParams(weights, biases)


def zeros_like_params(params: MlpParams) -> MlpParams:
    return MlpParams([np.zeros_like(w) for w in params.weights],
                     [np.zeros_like(b) for b in params.biases])


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "tanh":
        return np.tanh(z)
    if kind == "relu":
        return np.maximum(z, 0.0)
    return z  # identity


def _activation_grad(z: np.ndarray, h: np.ndarray, kind: str) -> np.ndarray:
    # Derivative expressed through the already-computed activation h where cheap.
    if kind == "tanh":
        return 1.0 - h * h
    if kind == "relu":
        return (z > 0.0).astype(z.dtype)
    return np.ones_like(z)


def _layer_kinds(spec: MlpSpec) -> list[str]:
    kinds = [spec.hidden_activation] * (spec.n_layers - 1)
    kinds.append(spec.output_activation)
    return kinds


def forward(params: MlpParams, spec: MlpSpec, x: np.ndarray) -> np.ndarray:
    """Evaluate the net on one input vector or a batch of rows."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x[None, :] if single else x
    if h.shape[-1] != spec.input_dim:
        raise ConfigError(f"input dim {h.shape[-1]} != spec input dim {spec.input_dim}")
    for w, b, kind in zip(params.weights, params.biases, _layer_kinds(spec)):
        h = _activate(h @ w + b, kind)
    return h[0] if single else h


class _ForwardCache:
    __slots__ = ("x", "zs", "hs")

    def __init__(self, x, zs, hs):
        self.x = x
        self.zs = zs
        self.hs = hs


def _forward_cached(params: MlpParams, spec: MlpSpec, x: np.ndarray) -> tuple[np.ndarray, _ForwardCache]:
    x = np.asarray(x, dtype=np.float64)
    h = x
    zs, hs = [], []
    for i, (w, b, kind) in enumerate(zip(params.weights, params.biases, _layer_kinds(spec))):
        z = h @ w + b
        if not np.all(np.isfinite(z)):
            raise NumericalError(f"non-finite pre-activation at layer {i}")
        h = _activate(z, kind)
        zs.append(z)
        hs.append(h)
    return h, _ForwardCache(x, zs, hs)


def backprop(params: MlpParams, spec: MlpSpec, x: np.ndarray,
             upstream: np.ndarray) -> tuple[Gradient, np.ndarray]:
    """Exact gradients of ``sum(upstream * output)`` w.r.t. params and input.

    ``x`` and ``upstream`` may be single vectors or aligned batches; parameter
    gradients are summed over the batch, input gradients stay per-row.
    """
    x = np.asarray(x, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    single = x.ndim == 1
    xb = x[None, :] if single else x
    ub = upstream[None, :] if single else upstream
    if ub.shape != (xb.shape[0], spec.output_dim):
        raise ConfigError(f"upstream shape {upstream.shape} does not match output dim {spec.output_dim}")

    _, cache = _forward_cached(params, spec, xb)
    kinds = _layer_kinds(spec)
    grad_w: list[np.ndarray] = [None] * spec.n_layers  # type: ignore[list-item]
    grad_b: list[np.ndarray] = [None] * spec.n_layers  # type: ignore[list-item]

    delta = ub * _activation_grad(cache.zs[-1], cache.hs[-1], kinds[-1])
    for i in range(spec.n_layers - 1, -1, -1):
        inp = cache.x if i == 0 else cache.hs[i - 1]
        grad_w[i] = inp.T @ delta
        grad_b[i] = delta.sum(axis=0)
        if not (np.all(np.isfinite(grad_w[i])) and np.all(np.isfinite(grad_b[i]))):
            raise NumericalError(f"non-finite gradient at layer {i}")
        delta = delta @ params.weights[i].T
        if i > 0:
            delta = delta * _activation_grad(cache.zs[i - 1], cache.hs[i - 1], kinds[i - 1])
    input_grad = delta[0] if single else delta
    return MlpParams(grad_w, grad_b), input_grad


def backward_params(params: MlpParams, spec: MlpSpec, x: np.ndarray,
                    upstream: np.ndarray) -> Gradient:
    return backprop(params, spec, x, upstream)[0]


def backward_input(params: MlpParams, spec: MlpSpec, x: np.ndarray,
                   upstream: np.ndarray) -> np.ndarray:
    return backprop(params, spec, x, upstream)[1]


@dataclass
class AdamState:
    """First/second moment tables plus the step counter for one parameter set."""

    m: MlpParams
    v: MlpParams
    t: int = 0
    learning_rate: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon_num: float = 1e-8

    @classmethod
    def for_params(cls, params: MlpParams, learning_rate: float = 3e-4,
                   beta1: float = 0.9, beta2: float = 0.999,
                   epsilon_num: float = 1e-8) -> "AdamState":
        return cls(m=zeros_like_params(params), v=zeros_like_params(params),
                   learning_rate=learning_rate, beta1=beta1, beta2=beta2,
                   epsilon_num=epsilon_num)


def adam_step(params: MlpParams, grad: Gradient, state: AdamState) -> None:
    """One bias-corrected Adam update, in place on ``params`` and ``state``."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    step = state.learning_rate
    for p, g, m, v in zip(params.arrays(), grad.arrays(), state.m.arrays(), state.v.arrays()):
        if not np.all(np.isfinite(g)):
            raise NumericalError("non-finite gradient passed to adam_step")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= step * (m / bc1) / (np.sqrt(v / bc2) + state.epsilon_num)


class Mlp:
    """A spec + params + optimizer bundle; the working unit for agents."""

    def __init__(self, spec: MlpSpec, rng: np.random.Generator,
                 learning_rate: float = 3e-4, beta1: float = 0.9,
                 beta2: float = 0.999, epsilon_num: float = 1e-8):
        self.spec = spec
        self.params = init_params(spec, rng)
        self.adam = AdamState.for_params(self.params, learning_rate, beta1, beta2, epsilon_num)

    def forward(self, x: np.ndarray) -> np.ndarray:
        return forward(self.params, self.spec, x)

    def backprop(self, x: np.ndarray, upstream: np.ndarray) -> tuple[Gradient, np.ndarray]:
        return backprop(self.params, self.spec, x, upstream)

    def step(self, grad: Gradient) -> None:
        adam_step(self.params, grad, self.adam)

    def clone_params(self) -> MlpParams:
        return self.params.copy()
