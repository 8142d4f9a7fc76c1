"""Linear classifier head trained on pre-propagated node features.

The model is a chain of bias-free matrices ``X @ T1 @ T2 ... @ TN`` with
inverted dropout on the input of every block at train time. Softmax is
folded into the cross-entropy loss. Gradients are analytic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .errors import DimensionMismatch, EmptyMask, ShapeMismatch

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    dropout_rate: float = 0.5
    hidden_dim: int = 16
    rounds: int = 150
    local_iters: int = 3
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.dropout_rate < 1:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")


@dataclass
class ClassifierParams:
    blocks: list[np.ndarray]

    @property
    def shapes(self) -> list[tuple[int, int]]:
        return [b.shape for b in self.blocks]

    def copy(self) -> "ClassifierParams":
        return ClassifierParams([b.copy() for b in self.blocks])


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, params: ClassifierParams) -> "AdamState":
        return cls([np.zeros_like(b) for b in params.blocks], [np.zeros_like(b) for b in params.blocks])


def block_shapes(feature_dim: int, hidden_dim: int, num_classes: int, num_blocks: int):
    dims = [feature_dim] + [hidden_dim] * (num_blocks - 1) + [num_classes]
    return list(zip(dims[:-1], dims[1:]))


def init_params(
    feature_dim: int, hidden_dim: int, num_classes: int, num_blocks: int = 2, seed: int = 0
) -> ClassifierParams:
    """Glorot-uniform initialization of each block."""
    rng = rngmod.seeded_rng(seed, rngmod.INIT)
    blocks = []
    for fan_in, fan_out in block_shapes(feature_dim, hidden_dim, num_classes, num_blocks):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        blocks.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
    return ClassifierParams(blocks)


def sample_dropout_masks(rng: np.random.Generator, rows: int, params: ClassifierParams, rate: float):
    """One inverted-dropout mask per block input; ``None`` entries when rate is 0."""
    if rate == 0:
        return [None] * len(params.blocks)
    keep = 1.0 - rate
    return [
        (rng.random((rows, block.shape[0])) < keep) / keep for block in params.blocks
    ]


def _forward(x, params: ClassifierParams, dropout_masks=None):
    x = np.asarray(x, dtype=np.float64)
    if dropout_masks is None:
        dropout_masks = [None] * len(params.blocks)
    inputs = []
    h = x
    for k, block in enumerate(params.blocks):
        if h.shape[1] != block.shape[0]:
            raise DimensionMismatch(
                f"block {k} expects {block.shape[0]} input columns, got {h.shape[1]}"
            )
        if dropout_masks[k] is not None:
            h = h * dropout_masks[k]
        inputs.append(h)
        h = h @ block
    return h, inputs


def forward(x_final, params: ClassifierParams, dropout_masks=None) -> np.ndarray:
    return _forward(x_final, params, dropout_masks)[0]


def _select(logits, labels, mask):
    labels = np.asarray(labels)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        logits, labels = logits[mask], labels[mask]
    if labels.size == 0:
        raise EmptyMask("loss/accuracy needs at least one masked node")
    return logits, labels


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def cross_entropy_loss(logits, labels, mask=None) -> float:
    """Mean negative log-likelihood over the masked rows."""
    logits, labels = _select(np.asarray(logits, dtype=np.float64), labels, mask)
    logp = log_softmax(logits)
    return float(-logp[np.arange(labels.size), labels].mean())


def gradients(x_final, params: ClassifierParams, labels, mask=None, dropout_masks=None):
    """Gradients of ``cross_entropy_loss(forward(...))`` with respect to every block."""
    logits, inputs = _forward(x_final, params, dropout_masks)
    labels = np.asarray(labels)
    rows = np.ones(labels.size, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    count = int(rows.sum())
    if count == 0:
        raise EmptyMask("gradient needs at least one masked node")

    probs = np.exp(log_softmax(logits))
    g = np.zeros_like(logits)
    g[rows] = probs[rows]
    g[np.flatnonzero(rows), labels[rows]] -= 1.0
    g /= count

    grads = [None] * len(params.blocks)
    for k in range(len(params.blocks) - 1, -1, -1):
        grads[k] = inputs[k].T @ g
        if k:
            g = g @ params.blocks[k].T
            if dropout_masks is not None and dropout_masks[k] is not None:
                g = g * dropout_masks[k]
    return grads


def adam_step(params: ClassifierParams, grads, state: AdamState, lr: float = 0.01):
    """One bias-corrected Adam update. Returns ``(new_params, new_state)``."""
    if len(grads) != len(params.blocks):
        raise ShapeMismatch(f"{len(grads)} gradients for {len(params.blocks)} blocks")
    t = state.t + 1
    new_blocks, new_m, new_v = [], [], []
    for p, g, m, v in zip(params.blocks, grads, state.m, state.v):
        if g.shape != p.shape or m.shape != p.shape:
            raise ShapeMismatch(f"gradient shape {g.shape} does not match block {p.shape}")
        m = BETA1 * m + (1 - BETA1) * g
        v = BETA2 * v + (1 - BETA2) * g * g
        m_hat = m / (1 - BETA1**t)
        v_hat = v / (1 - BETA2**t)
        new_blocks.append(p - lr * m_hat / (np.sqrt(v_hat) + EPS))
        new_m.append(m)
        new_v.append(v)
    return ClassifierParams(new_blocks), AdamState(new_m, new_v, t)


def count_correct(params: ClassifierParams, x_final, labels, mask=None) -> tuple[int, int]:
    logits = forward(x_final, params)
    labels = np.asarray(labels)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        logits, labels = logits[mask], labels[mask]
    # argmax breaks ties towards the lowest class index
    return int((logits.argmax(axis=1) == labels).sum()), int(labels.size)


def evaluate(params: ClassifierParams, x_final, labels, mask=None) -> float:
    correct, total = count_correct(params, x_final, labels, mask)
    if total == 0:
        raise EmptyMask("accuracy needs at least one masked node")
    return correct / total


@dataclass
class LocalTrainer:
    """Full-batch trainer owning one model copy, its Adam state and dropout stream."""

    features: np.ndarray
    labels: np.ndarray
    train_mask: np.ndarray
    params: ClassifierParams
    config: TrainConfig
    stream: int = 0
    state: AdamState = field(init=False)
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.train_mask = np.asarray(self.train_mask, dtype=bool)
        self.state = AdamState.zeros_like(self.params)
        self.rng = rngmod.seeded_rng(self.config.seed, rngmod.DROPOUT, self.stream)
        self._x_train = np.asarray(self.features)[self.train_mask]
        self._y_train = np.asarray(self.labels)[self.train_mask]
        self.steps_taken = 0

    @property
    def num_train(self) -> int:
        return int(self._y_train.size)

    def set_params(self, params: ClassifierParams) -> None:
        self.params = params.copy()

    def step(self) -> None:
        masks = sample_dropout_masks(
            self.rng, self.num_train, self.params, self.config.dropout_rate
        )
        grads = gradients(self._x_train, self.params, self._y_train, None, masks)
        self.params, self.state = adam_step(
            self.params, grads, self.state, self.config.learning_rate
        )
        self.steps_taken += 1

    def train(self, iters: int) -> None:
        if self.num_train == 0:
            return
        for _ in range(iters):
            self.step()

    def train_loss(self) -> float:
        return cross_entropy_loss(forward(self._x_train, self.params), self._y_train)

    def correct(self, mask) -> tuple[int, int]:
        return count_correct(self.params, self.features, self.labels, mask)
