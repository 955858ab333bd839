"""Character recognition: 24x24 glyph vectors, PCA compression, MLP.

The classifier is a plain feed-forward network (two ReLU hidden layers
with inverted dropout, softmax output) trained with mini-batch Adam on
PCA-projected glyph vectors. Everything is seeded and deterministic; the
backward pass is checked against finite differences in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTrainingError, InvalidInputError
from .raster import BinaryImage

GLYPH_SIDE = 24
GLYPH_DIM = GLYPH_SIDE * GLYPH_SIDE  # 576
PCA_COMPONENTS = 200
HIDDEN_SIZES = (150, 70)
NUM_CLASSES = 29


@dataclass(frozen=True)
class GlyphSample:
    pixels: np.ndarray  # 576-vector of {0,1}
    label: int
    eow: bool


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 8192
    epochs: int = 80
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    dropout: float = 0.10
    seed: int = 0
    val_fraction: float = 0.01
    adam_eps: float = 1e-8


def normalize_glyph(crop: BinaryImage) -> np.ndarray:
    """Tight-crop a glyph and center it on a 24x24 canvas.

    Large glyphs are shrunk (aspect preserved, nearest-neighbor, then
    re-binarized); glyphs already within 24x24 are only centered, never
    blown up, so a stray single pixel stays a single pixel.
    """
    rows, cols = np.nonzero(crop)
    if len(rows) == 0:
        raise InvalidInputError("cannot normalize an empty glyph crop")
    box = crop[rows.min() : rows.max() + 1, cols.min() : cols.max() + 1]
    bh, bw = box.shape
    if max(bh, bw) > GLYPH_SIDE:
        scale = GLYPH_SIDE / max(bh, bw)
        nh = max(1, round(bh * scale))
        nw = max(1, round(bw * scale))
        src_r = np.minimum((np.arange(nh) + 0.5) * bh / nh, bh - 1).astype(np.int64)
        src_c = np.minimum((np.arange(nw) + 0.5) * bw / nw, bw - 1).astype(np.int64)
        box = (box[src_r][:, src_c] > 0).astype(np.uint8)
        bh, bw = nh, nw
    canvas = np.zeros((GLYPH_SIDE, GLYPH_SIDE), dtype=np.uint8)
    top = (GLYPH_SIDE - bh) // 2
    left = (GLYPH_SIDE - bw) // 2
    canvas[top : top + bh, left : left + bw] = box
    return canvas.reshape(GLYPH_DIM)


@dataclass
class PcaModel:
    mean: np.ndarray  # (d,)
    components: np.ndarray  # (k, d), orthonormal rows
    explained_variance_ratio: np.ndarray  # (k,), non-increasing
    n_samples: int = 0
    rank_deficient: bool = False


def _svd_sign_fix(Vt: np.ndarray) -> np.ndarray:
    """Deterministic sign convention: largest-|.| entry of each row > 0."""
    signs = np.sign(Vt[np.arange(len(Vt)), np.argmax(np.abs(Vt), axis=1)])
    signs[signs == 0] = 1.0
    return Vt * signs[:, None]


class IncrementalPca:
    """Mean-tracking incremental PCA via SVD merging of batches.

    With a single batch this reduces exactly to full-batch PCA; with many
    batches each update folds the running singular spectrum, the new
    centered batch and a mean-correction row into one SVD.
    """

    def __init__(self, k: int):
        self.k = k
        self.n = 0
        self.mean: np.ndarray | None = None
        self.components: np.ndarray | None = None
        self.singular_values: np.ndarray | None = None
        self._m2 = None  # per-dimension sum of squared deviations

    def partial_fit(self, X: np.ndarray) -> None:
        X = np.asarray(X, dtype=np.float64)
        n_new, d = X.shape
        if self.n == 0 and n_new < self.k:
            raise InvalidInputError(
                f"first batch must hold at least k={self.k} samples, got {n_new}")
        batch_mean = X.mean(axis=0)
        centered = X - batch_mean
        if self.n == 0:
            stack = centered
            self.mean = batch_mean
            self._m2 = (centered**2).sum(axis=0)
        else:
            total = self.n + n_new
            correction = np.sqrt(self.n * n_new / total) * (self.mean - batch_mean)
            stack = np.vstack([
                self.singular_values[:, None] * self.components,
                centered,
                correction[None, :],
            ])
            self._m2 = (self._m2 + (centered**2).sum(axis=0)
                        + self.n * n_new / total * (self.mean - batch_mean) ** 2)
            self.mean = (self.n * self.mean + n_new * batch_mean) / total
        _, S, Vt = np.linalg.svd(stack, full_matrices=False)
        Vt = _svd_sign_fix(Vt)
        if len(S) < self.k:
            pad = self.k - len(S)
            S = np.concatenate([S, np.zeros(pad)])
            Vt = np.vstack([Vt, np.zeros((pad, d))])
        self.singular_values = S[: self.k]
        self.components = Vt[: self.k]
        self.n += n_new

    def to_model(self) -> PcaModel:
        if self.n == 0:
            raise InvalidInputError("PCA has seen no data")
        ev = self.singular_values**2
        total = float(self._m2.sum())
        ratios = ev / total if total > 1e-12 else np.zeros_like(ev)
        return PcaModel(
            mean=self.mean.copy(),
            components=self.components.copy(),
            explained_variance_ratio=ratios,
            n_samples=self.n,
            rank_deficient=bool((ev < 1e-12).any()),
        )


def pca_fit(samples: np.ndarray, k: int = PCA_COMPONENTS,
            batch_size: int | None = None) -> PcaModel:
    """Fit incremental PCA over a sample matrix (n, d)."""
    X = np.asarray(samples, dtype=np.float64)
    n, d = X.shape
    if n < k:
        raise InvalidInputError(f"need at least k={k} samples, got {n}")
    if batch_size is None:
        batch_size = max(5 * d, k)
    ipca = IncrementalPca(k)
    for start in range(0, n, batch_size):
        ipca.partial_fit(X[start : start + batch_size])
    return ipca.to_model()


def pca_project(m: PcaModel, v: np.ndarray) -> np.ndarray:
    """(v - mean) onto the component rows. Accepts vectors or matrices."""
    return (np.asarray(v, dtype=np.float64) - m.mean) @ m.components.T


def pca_reconstruct(m: PcaModel, z: np.ndarray) -> np.ndarray:
    return np.asarray(z, dtype=np.float64) @ m.components + m.mean


@dataclass
class Mlp:
    """Feed-forward network; ``weights[i]`` maps layer i to i+1."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    dropout: float = 0.10

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    def copy(self) -> "Mlp":
        return Mlp([w.copy() for w in self.weights], [b.copy() for b in self.biases],
                   self.dropout)


def he_init(layer_sizes: tuple[int, ...], rng: np.random.Generator,
            dropout: float = 0.10) -> Mlp:
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(weights, biases, dropout)


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def mlp_forward(m: Mlp, x: np.ndarray, train_mode: bool = False,
                rng: np.random.Generator | None = None) -> np.ndarray:
    """Class probabilities for one vector or a batch.

    Inverted dropout after each hidden ReLU in train mode only, so
    inference needs no rescaling and is fully deterministic.
    """
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("non-finite input to the network")
    single = x.ndim == 1
    a = x[None, :] if single else x
    n_layers = len(m.weights)
    for i in range(n_layers - 1):
        a = np.maximum(a @ m.weights[i].T + m.biases[i], 0.0)
        if train_mode and m.dropout > 0.0:
            if rng is None:
                raise InvalidInputError("train-mode forward needs an rng for dropout")
            mask = (rng.random(a.shape) >= m.dropout) / (1.0 - m.dropout)
            a = a * mask
    probs = _softmax(a @ m.weights[-1].T + m.biases[-1])
    return probs[0] if single else probs


def _forward_cached(m: Mlp, X: np.ndarray, dropout_masks: list[np.ndarray] | None):
    acts = [X]
    a = X
    for i in range(len(m.weights) - 1):
        a = np.maximum(a @ m.weights[i].T + m.biases[i], 0.0)
        if dropout_masks is not None:
            a = a * dropout_masks[i]
        acts.append(a)
    probs = _softmax(a @ m.weights[-1].T + m.biases[-1])
    return acts, probs


def mlp_loss_and_grads(m: Mlp, X: np.ndarray, labels: np.ndarray,
                       dropout_masks: list[np.ndarray] | None = None):
    """Mean categorical cross-entropy and gradients for every parameter."""
    n = len(X)
    acts, probs = _forward_cached(m, X, dropout_masks)
    eps = 1e-12
    loss = -np.log(probs[np.arange(n), labels] + eps).mean()

    delta = probs.copy()
    delta[np.arange(n), labels] -= 1.0
    delta /= n

    grads_w: list[np.ndarray] = [None] * len(m.weights)
    grads_b: list[np.ndarray] = [None] * len(m.weights)
    for i in range(len(m.weights) - 1, -1, -1):
        grads_w[i] = delta.T @ acts[i]
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ m.weights[i]
            if dropout_masks is not None:
                delta = delta * dropout_masks[i - 1]
            delta = delta * (acts[i] > 0)
    return loss, grads_w, grads_b


@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    val_accuracy: float


def train(samples: list[GlyphSample] | tuple[np.ndarray, np.ndarray],
          cfg: TrainConfig, pca: PcaModel) -> tuple[Mlp, list[EpochMetrics]]:
    """Train the classifier on glyph samples; returns best-validation model.

    Deterministic for a fixed ``cfg.seed``: He init, the validation split,
    per-epoch shuffles and dropout masks all derive from one generator.
    """
    if isinstance(samples, tuple):
        vectors, labels = samples
    else:
        vectors = np.stack([s.pixels for s in samples])
        labels = np.array([s.label for s in samples], dtype=np.int64)
    if len(np.unique(labels)) < 2:
        raise DegenerateTrainingError("training set holds fewer than 2 classes")

    X = pca_project(pca, vectors)
    n_classes = max(NUM_CLASSES, int(labels.max()) + 1)
    rng = np.random.default_rng(cfg.seed)

    order = rng.permutation(len(X))
    n_val = max(1, int(round(cfg.val_fraction * len(X))))
    val_idx, train_idx = order[:n_val], order[n_val:]
    Xv, yv = X[val_idx], labels[val_idx]
    Xt, yt = X[train_idx], labels[train_idx]

    model = he_init((X.shape[1],) + tuple(HIDDEN_SIZES) + (n_classes,), rng, cfg.dropout)
    mw = [np.zeros_like(w) for w in model.weights]
    vw = [np.zeros_like(w) for w in model.weights]
    mb = [np.zeros_like(b) for b in model.biases]
    vb = [np.zeros_like(b) for b in model.biases]

    best_val = -1.0
    best_model = model.copy()
    metrics: list[EpochMetrics] = []
    t = 0
    for epoch in range(cfg.epochs):
        perm = rng.permutation(len(Xt))
        losses = []
        for start in range(0, len(Xt), cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            xb, yb = Xt[idx], yt[idx]
            masks = None
            if cfg.dropout > 0:
                masks = [
                    (rng.random((len(xb), h)) >= cfg.dropout) / (1.0 - cfg.dropout)
                    for h in HIDDEN_SIZES
                ]
            loss, gw, gb = mlp_loss_and_grads(model, xb, yb, masks)
            losses.append(loss)
            t += 1
            b1c = 1.0 - cfg.beta1**t
            b2c = 1.0 - cfg.beta2**t
            for i in range(len(model.weights)):
                mw[i] = cfg.beta1 * mw[i] + (1 - cfg.beta1) * gw[i]
                vw[i] = cfg.beta2 * vw[i] + (1 - cfg.beta2) * gw[i] ** 2
                model.weights[i] -= cfg.lr * (mw[i] / b1c) / (np.sqrt(vw[i] / b2c) + cfg.adam_eps)
                mb[i] = cfg.beta1 * mb[i] + (1 - cfg.beta1) * gb[i]
                vb[i] = cfg.beta2 * vb[i] + (1 - cfg.beta2) * gb[i] ** 2
                model.biases[i] -= cfg.lr * (mb[i] / b1c) / (np.sqrt(vb[i] / b2c) + cfg.adam_eps)

        val_pred = mlp_forward(model, Xv).argmax(axis=1)
        val_acc = float((val_pred == yv).mean())
        metrics.append(EpochMetrics(epoch=epoch, train_loss=float(np.mean(losses)),
                                    val_accuracy=val_acc))
        if val_acc > best_val:
            best_val = val_acc
            best_model = model.copy()
    return best_model, metrics


def predict(pca: PcaModel, mlp: Mlp, crop: BinaryImage) -> tuple[int, float, np.ndarray]:
    """(class id, confidence, full distribution) for one glyph crop.

    Ties break toward the lowest class id (argmax picks the first max).
    """
    vec = normalize_glyph(crop)
    probs = mlp_forward(mlp, pca_project(pca, vec.astype(np.float64)))
    cls = int(probs.argmax())
    return cls, float(probs[cls]), probs
