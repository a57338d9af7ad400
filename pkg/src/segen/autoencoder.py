"""Correlated autoencoder unit model.

Parameters are stored per layer but can be flattened into a single
chromosome vector. The flattening order is: encoder layers 1..o+1, then
decoder layers o+1..1 (the layer fed by ``z`` first, the output layer
last); within each layer the weight matrix row-major, followed by the bias.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .graph import SubNetwork

__all__ = [
    "LayerSpec",
    "AutoencoderParams",
    "TrainConfig",
    "init_params",
    "encode",
    "decode",
    "loss_le",
    "gradient",
    "train_on_batch",
    "to_chromosome",
    "from_chromosome",
    "save_chromosome",
    "load_chromosome",
]


@dataclass(frozen=True)
class LayerSpec:
    """Layer widths ``[k, h_1, ..., h_o, d]``; the decoder mirrors them."""

    dims: tuple

    def __post_init__(self):
        dims = tuple(int(x) for x in self.dims)
        if len(dims) < 2:
            raise ValueError("LayerSpec needs at least an input and a latent size")
        if min(dims) < 1:
            raise ValueError(f"layer sizes must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def build(cls, k: int, hidden=(32,), d: int = 16) -> "LayerSpec":
        return cls((k, *hidden, d))

    @property
    def input_dim(self) -> int:
        return self.dims[0]

    @property
    def latent_dim(self) -> int:
        return self.dims[-1]

    @property
    def n_hidden(self) -> int:
        return len(self.dims) - 2

    def shapes(self):
        """(out, in) weight shapes: encoder first, then decoder."""
        dims = self.dims
        enc = [(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]
        dec = [(dims[i - 1], dims[i]) for i in range(len(dims) - 1, 0, -1)]
        return enc + dec

    @property
    def n_params(self) -> int:
        return sum(o * i + o for o, i in self.shapes())


@dataclass
class AutoencoderParams:
    """Weights and biases of one unit model.

    ``weights[l]`` has shape ``(out, in)``. The first ``o + 1`` entries are
    the encoder ``W^1 .. W^{o+1}``; the rest are the decoder, ordered from
    ``What^{o+1}`` (reads ``z``) down to ``What^1`` (emits ``x_hat``).
    """

    spec: LayerSpec
    weights: list
    biases: list

    @property
    def n_encoder(self) -> int:
        return len(self.spec.dims) - 1

    def copy(self) -> "AutoencoderParams":
        return AutoencoderParams(self.spec, [w.copy() for w in self.weights], [b.copy() for b in self.biases])


@dataclass(frozen=True)
class TrainConfig:
    alpha: float = 0.01
    beta: float = 1e-4
    gamma_recon: float = 5.0
    learning_rate: float = 0.01
    epochs_per_batch: int = 20

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not self.gamma_recon > 1:
            raise ValueError(f"gamma_recon must be > 1, got {self.gamma_recon}")
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs_per_batch < 0:
            raise ValueError(f"epochs_per_batch must be >= 0, got {self.epochs_per_batch}")


def init_params(spec: LayerSpec, rng) -> AutoencoderParams:
    """Every weight and bias drawn i.i.d. from the standard normal."""
    return from_chromosome(spec, rng.standard_normal(spec.n_params))


def to_chromosome(params: AutoencoderParams) -> np.ndarray:
    parts = []
    for w, b in zip(params.weights, params.biases):
        parts.append(w.ravel())
        parts.append(b)
    return np.concatenate(parts)


def from_chromosome(spec: LayerSpec, vector) -> AutoencoderParams:
    vector = np.asarray(vector, dtype=np.float64)
    if vector.ndim != 1 or len(vector) != spec.n_params:
        raise ValueError(f"chromosome length {vector.size} does not match {spec.n_params} parameters")
    weights, biases = [], []
    pos = 0
    for out, inp in spec.shapes():
        weights.append(vector[pos:pos + out * inp].reshape(out, inp).copy())
        pos += out * inp
        biases.append(vector[pos:pos + out].copy())
        pos += out
    return AutoencoderParams(spec, weights, biases)


def save_chromosome(params: AutoencoderParams, path) -> None:
    """Little-endian float64 binary for ``.bin``/``.f64``; one value per line for ``.csv``."""
    vec = to_chromosome(params)
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == ".csv":
        with open(path, "w", encoding="utf-8") as fh:
            fh.writelines(f"{v!r}\n" for v in vec.tolist())
    elif ext in (".bin", ".f64"):
        vec.astype("<f8").tofile(path)
    else:
        raise ValueError(f"unsupported chromosome file extension {ext!r}")


def load_chromosome(spec: LayerSpec, path) -> AutoencoderParams:
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == ".csv":
        vec = np.loadtxt(path, dtype=np.float64, ndmin=1, delimiter=",")
    elif ext in (".bin", ".f64"):
        vec = np.fromfile(path, dtype="<f8")
    else:
        raise ValueError(f"unsupported chromosome file extension {ext!r}")
    return from_chromosome(spec, vec)


def _as_rows(x, width: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != width:
        raise ValueError(f"expected vectors of length {width}, got {x.shape[-1]}")
    return x


def encode(params: AutoencoderParams, x) -> np.ndarray:
    """Latent code in ``(0, 1)^d``; accepts one vector or a matrix of rows."""
    h = _as_rows(x, params.spec.input_dim)
    for w, b in zip(params.weights[:params.n_encoder], params.biases[:params.n_encoder]):
        h = expit(h @ w.T + b)
    return h


def decode(params: AutoencoderParams, z) -> np.ndarray:
    h = _as_rows(z, params.spec.latent_dim)
    for w, b in zip(params.weights[params.n_encoder:], params.biases[params.n_encoder:]):
        h = expit(h @ w.T + b)
    return h


def _views(spec: LayerSpec, flat: np.ndarray):
    """Per-layer weight and bias views into a flat chromosome-ordered buffer."""
    weights, biases = [], []
    pos = 0
    for out, inp in spec.shapes():
        weights.append(flat[pos:pos + out * inp].reshape(out, inp))
        pos += out * inp
        biases.append(flat[pos:pos + out])
        pos += out
    return weights, biases


def _subnet_terms(s: SubNetwork, width: int):
    """Padded features, sign matrix and its Laplacian; cached on the sub-network."""
    cache = s.__dict__.setdefault("_ae_cache", {})
    terms = cache.get(width)
    if terms is None:
        x = s.feature_matrix(width)
        sign = np.where(s.adjacency, 1.0, -1.0)
        np.fill_diagonal(sign, 0.0)
        lap = np.diag(sign.sum(axis=1)) - sign
        terms = cache[width] = (x, x != 0, sign, lap)
    return terms


def _loss_and_grad(spec, weights, biases, s: SubNetwork, cfg: TrainConfig, grad_views=None):
    """Loss on one sub-network; fills ``grad_views`` (from :func:`_views`) if given."""
    k_in = spec.input_dim
    if s.k == 0:
        raise ValueError("sub-network is empty")
    if s.k > k_in:
        raise ValueError(f"sub-network has {s.k} nodes but the model expects at most {k_in}")
    # smaller sub-networks are zero-padded; phantom rows are simply absent
    x, nonzero, sign, lap = _subnet_terms(s, k_in)
    acts = [x]
    for w, b in zip(weights, biases):
        acts.append(expit(acts[-1] @ w.T + b))
    n_enc = len(spec.dims) - 1
    z = acts[n_enc]
    x_hat = acts[-1]

    weight = np.where(nonzero, cfg.gamma_recon, 1.0)
    resid = (x - x_hat) * weight
    recon = float(np.vdot(resid, resid))

    sq = np.einsum("ij,ij->i", z, z)
    dist = sq[:, None] + sq[None, :] - 2.0 * (z @ z.T)
    corr = float(np.vdot(sign, dist))

    # weight decay covers W^1..W^o and their decoder mirrors, not the layers touching z
    o = spec.n_hidden
    n_layers = len(weights)
    reg_idx = [*range(o), *range(n_layers - o, n_layers)] if o else []
    reg = float(sum(np.vdot(weights[l], weights[l]) for l in reg_idx))

    loss = recon + cfg.alpha * corr + cfg.beta * reg
    if grad_views is None:
        return loss

    grad_w, grad_b = grad_views
    # walk d(loss)/d(activation) back through the decoder, then the encoder
    upstream = -2.0 * resid * weight
    for l in range(n_layers - 1, -1, -1):
        a_out = acts[l + 1]
        if l == n_enc - 1:
            upstream = upstream + (4.0 * cfg.alpha) * (lap @ z)
        pre = upstream * a_out * (1.0 - a_out)
        np.matmul(pre.T, acts[l], out=grad_w[l])
        pre.sum(axis=0, out=grad_b[l])
        if l:
            upstream = pre @ weights[l]
    for l in reg_idx:
        grad_w[l] += (2.0 * cfg.beta) * weights[l]
    return loss


def _loss_and_grad_params(params: AutoencoderParams, s: SubNetwork, cfg: TrainConfig, want_grad: bool):
    spec = params.spec
    grad = np.empty(spec.n_params) if want_grad else None
    views = _views(spec, grad) if want_grad else None
    loss = _loss_and_grad(spec, params.weights, params.biases, s, cfg, views)
    return loss, grad


def loss_le(params: AutoencoderParams, s: SubNetwork, cfg: TrainConfig) -> float:
    """Weighted reconstruction + correlation + weight-decay loss on one sub-network.

    The correlation term sums over ordered pairs ``i != j`` (both
    orientations), with sign +1 for linked pairs and -1 otherwise.
    """
    return _loss_and_grad_params(params, s, cfg, want_grad=False)[0]


def gradient(params: AutoencoderParams, s: SubNetwork, cfg: TrainConfig) -> np.ndarray:
    """Analytic gradient of :func:`loss_le`, in chromosome order."""
    return _loss_and_grad_params(params, s, cfg, want_grad=True)[1]


class _Adam:
    def __init__(self, size, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, theta, grad):
        """Update ``theta`` in place."""
        self.t += 1
        self.m *= self.beta1
        self.m += (1 - self.beta1) * grad
        self.v *= self.beta2
        self.v += (1 - self.beta2) * grad * grad
        step = self.lr * np.sqrt(1 - self.beta2 ** self.t) / (1 - self.beta1 ** self.t)
        theta -= step * self.m / (np.sqrt(self.v) + self.eps * np.sqrt(1 - self.beta2 ** self.t))


def train_on_batch(params: AutoencoderParams, batch, cfg: TrainConfig, rng, history=None) -> AutoencoderParams:
    """Adam over the batch, one update per sub-network per epoch.

    Sub-networks are visited in a fresh shuffled order every epoch. If
    ``history`` is a list, the mean loss seen during each epoch is appended.
    The input ``params`` is left untouched.
    """
    batch = list(batch)
    if not batch:
        raise ValueError("training batch is empty")
    spec = params.spec
    for s in batch:
        if s.k > spec.input_dim:
            raise ValueError(f"sub-network of size {s.k} does not fit input size {spec.input_dim}")
    if cfg.learning_rate == 0 or cfg.epochs_per_batch == 0:
        return params.copy()
    theta = to_chromosome(params)
    weights, biases = _views(spec, theta)
    grad = np.empty_like(theta)
    grad_views = _views(spec, grad)
    adam = _Adam(theta.size, cfg.learning_rate)
    for _ in range(cfg.epochs_per_batch):
        total = 0.0
        for idx in rng.permutation(len(batch)):
            total += _loss_and_grad(spec, weights, biases, batch[idx], cfg, grad_views)
            adam.step(theta, grad)
        if history is not None:
            history.append(total / len(batch))
    if not np.all(np.isfinite(theta)):
        raise FloatingPointError("training produced non-finite parameters")
    return from_chromosome(spec, theta)
