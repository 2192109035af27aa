"""Skip-gram word embeddings with negative sampling, plus vector arithmetic.

The trainer consumes a document (a list of token lists), builds a
min-count-filtered vocabulary, and runs sequential SGD over (center,
context) pairs with a per-position window radius drawn uniformly from
[1, window]. Negatives come from the unigram distribution raised to 0.75.
Single-worker training is deterministic for a fixed seed; the optional
multi-worker mode updates shared matrices without synchronization and is
not.

Stored vectors are float32; averages and dot products accumulate in
float64.
"""

from __future__ import annotations

import struct
import warnings
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .errors import BundleError, DataError, UntrainableDocumentError

MODEL_MAGIC = b"EMTG"
MODEL_FORMAT_VERSION = 1


@dataclass
class TrainConfig:
    window: int = 4
    min_count: int = 3
    dim: int = 50
    epochs: int = 5
    negatives: int = 5
    lr_initial: float = 0.025
    lr_floor: float = 1e-4
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.window < 1 or self.dim < 1 or self.min_count < 1 or self.epochs < 1:
            raise DataError("window, dim, min_count, and epochs must all be >= 1")
        if self.negatives < 0:
            raise DataError("negatives must be >= 0")
        if not 0 < self.lr_floor < self.lr_initial:
            raise DataError("need 0 < lr_floor < lr_initial")
        if self.workers < 1:
            raise DataError("workers must be >= 1")

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "min_count": self.min_count,
            "dim": self.dim,
            "epochs": self.epochs,
            "negatives": self.negatives,
            "lr_initial": self.lr_initial,
            "lr_floor": self.lr_floor,
            "seed": self.seed,
            "workers": self.workers,
        }


@dataclass
class Vocabulary:
    words: list[str]
    counts: np.ndarray
    index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index


@dataclass
class EmbeddingModel:
    vocabulary: Vocabulary
    vectors: np.ndarray  # float32, |vocabulary| x dim
    config: TrainConfig | None = None

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def build_vocabulary(document: list[list[str]], min_count: int) -> Vocabulary:
    """Words with total count >= min_count, frequency-descending, ties lexicographic."""
    counts: Counter = Counter()
    for sentence in document:
        counts.update(sentence)
    kept = sorted((w for w, c in counts.items() if c >= min_count), key=lambda w: (-counts[w], w))
    return Vocabulary(words=kept, counts=np.array([counts[w] for w in kept], dtype=np.int64))


def pair_loss(center, context, negatives) -> float:
    """Negative-sampling loss of one (center, context) pair.

    -log sigma(u.v) - sum_neg log sigma(-u_neg.v), computed stably.
    """
    center = np.asarray(center, dtype=np.float64)
    context = np.asarray(context, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64).reshape(-1, center.shape[0])
    loss = np.logaddexp(0.0, -context @ center)
    loss += np.logaddexp(0.0, negatives @ center).sum()
    return float(loss)


def pair_gradients(center, context, negatives):
    """Analytic gradient of `pair_loss` w.r.t. center, context, and negatives."""
    center = np.asarray(center, dtype=np.float64)
    context = np.asarray(context, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64).reshape(-1, center.shape[0])
    g_pos = _sigmoid(context @ center) - 1.0
    g_negs = _sigmoid(negatives @ center)
    d_center = g_pos * context + g_negs @ negatives
    d_context = g_pos * center
    d_negatives = g_negs[:, None] * center[None, :]
    return d_center, d_context, d_negatives


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=np.float64)))


@njit(cache=True, nogil=True)
def _sgd_kernel(syn0, syn1, centers, contexts, negatives, lr_initial, lr_floor, t_start, t_total):
    n_pairs = centers.shape[0]
    dim = syn0.shape[1]
    n_neg = negatives.shape[1]
    dv = np.empty(dim, dtype=np.float64)
    for i in range(n_pairs):
        lr = lr_initial + (lr_floor - lr_initial) * ((t_start + i) / t_total)
        c = centers[i]
        for d in range(dim):
            dv[d] = 0.0
        for j in range(n_neg + 1):
            if j == 0:
                o = contexts[i]
                label = 1.0
            else:
                o = negatives[i, j - 1]
                label = 0.0
            dot = 0.0
            for d in range(dim):
                dot += np.float64(syn0[c, d]) * np.float64(syn1[o, d])
            g = (label - 1.0 / (1.0 + np.exp(-dot))) * lr
            for d in range(dim):
                dv[d] += g * syn1[o, d]
            for d in range(dim):
                syn1[o, d] = np.float32(syn1[o, d] + g * syn0[c, d])
        for d in range(dim):
            syn0[c, d] = np.float32(syn0[c, d] + dv[d])


def _epoch_pairs(sentences: list[list[int]], window: int, rng: np.random.Generator):
    """(center, context) pairs for one epoch under per-position random radii."""
    centers: list[int] = []
    contexts: list[int] = []
    for sent in sentences:
        n = len(sent)
        if n == 0:
            continue
        radii = rng.integers(1, window + 1, size=n)
        for i in range(n):
            b = int(radii[i])
            for j in range(max(0, i - b), min(n, i + b + 1)):
                if j != i:
                    centers.append(sent[i])
                    contexts.append(sent[j])
    return (
        np.array(centers, dtype=np.int32),
        np.array(contexts, dtype=np.int32),
    )


def train(document: list[list[str]], cfg: TrainConfig) -> EmbeddingModel:
    """Train skip-gram vectors over `document`; token lists bound the window."""
    vocab = build_vocabulary(document, cfg.min_count)
    if len(vocab) == 0:
        raise UntrainableDocumentError(
            f"document yields an empty vocabulary at min_count={cfg.min_count}"
        )
    sentences = [
        [vocab.index[t] for t in sent if t in vocab.index] for sent in document
    ]
    rng = np.random.default_rng(cfg.seed)
    n = len(vocab)
    syn0 = ((rng.random((n, cfg.dim)) - 0.5) / cfg.dim).astype(np.float32)
    syn1 = np.zeros((n, cfg.dim), dtype=np.float32)

    noise = vocab.counts.astype(np.float64) ** 0.75
    cumulative = np.cumsum(noise / noise.sum())

    epochs = []
    for _ in range(cfg.epochs):
        centers, contexts = _epoch_pairs(sentences, cfg.window, rng)
        if cfg.negatives > 0 and len(centers):
            draws = rng.random((len(centers), cfg.negatives))
            negs = np.minimum(
                np.searchsorted(cumulative, draws, side="right"), n - 1
            ).astype(np.int32)
        else:
            negs = np.zeros((len(centers), cfg.negatives), dtype=np.int32)
        epochs.append((centers, contexts, negs))

    t_total = max(sum(len(c) for c, _, _ in epochs), 1)
    t = 0
    for centers, contexts, negs in epochs:
        if len(centers) == 0:
            continue
        if cfg.workers > 1:
            _run_hogwild(syn0, syn1, centers, contexts, negs, cfg, t, t_total)
        else:
            _sgd_kernel(
                syn0, syn1, centers, contexts, negs, cfg.lr_initial, cfg.lr_floor, t, t_total
            )
        t += len(centers)
    return EmbeddingModel(vocabulary=vocab, vectors=syn0, config=cfg)


def _run_hogwild(syn0, syn1, centers, contexts, negs, cfg: TrainConfig, t_start, t_total):
    warnings.warn(
        "multi-worker training updates shared matrices without locks and is "
        "NOT deterministic; use workers=1 for reproducible models",
        stacklevel=3,
    )
    bounds = np.linspace(0, len(centers), cfg.workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [
            pool.submit(
                _sgd_kernel,
                syn0,
                syn1,
                centers[lo:hi],
                contexts[lo:hi],
                negs[lo:hi],
                cfg.lr_initial,
                cfg.lr_floor,
                t_start + lo,
                t_total,
            )
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for fut in futures:
            fut.result()


def lookup(model: EmbeddingModel, word: str) -> np.ndarray | None:
    """The word's vector, or None when out of vocabulary."""
    i = model.vocabulary.index.get(word)
    return None if i is None else model.vectors[i]


def average(vectors) -> np.ndarray:
    """Componentwise mean, accumulated in float64."""
    if len(vectors) == 0:
        raise DataError("cannot average an empty list of vectors")
    try:
        arr = np.asarray(vectors, dtype=np.float64)
    except ValueError as exc:
        raise DataError("vectors to average must share dimensionality") from exc
    if arr.ndim != 2:
        raise DataError("vectors to average must share dimensionality")
    return arr.sum(axis=0) / arr.shape[0]


def cosine(a, b) -> float:
    """Cosine similarity in float64; 0.0 when either norm is zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DataError(f"cosine dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = np.sqrt(a @ a)
    norm_b = np.sqrt(b @ b)
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return float(min(1.0, max(-1.0, (a @ b) / (norm_a * norm_b))))


def save_model(model: EmbeddingModel, path: str | Path) -> None:
    """Binary format: magic, version u16, dim u32, vocab u64, then per word
    a u32-length-prefixed UTF-8 string, u64 count, and dim little-endian f32."""
    vocab = model.vocabulary
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<HIQ", MODEL_FORMAT_VERSION, model.dim, len(vocab)))
        for i, word in enumerate(vocab.words):
            encoded = word.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<Q", int(vocab.counts[i])))
            fh.write(model.vectors[i].astype("<f4", copy=False).tobytes())


def load_model(path: str | Path, config: TrainConfig | None = None) -> EmbeddingModel:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MODEL_MAGIC:
            raise BundleError(f"{path}: bad magic {magic!r}, not an embedding model file")
        version, dim, size = struct.unpack("<HIQ", _read_exact(fh, 14, path))
        if version != MODEL_FORMAT_VERSION:
            raise BundleError(f"{path}: unsupported format version {version}")
        words: list[str] = []
        counts = np.empty(size, dtype=np.int64)
        vectors = np.empty((size, dim), dtype=np.float32)
        for i in range(size):
            (wlen,) = struct.unpack("<I", _read_exact(fh, 4, path))
            words.append(_read_exact(fh, wlen, path).decode("utf-8"))
            (counts[i],) = struct.unpack("<Q", _read_exact(fh, 8, path))
            vectors[i] = np.frombuffer(_read_exact(fh, 4 * dim, path), dtype="<f4")
        if fh.read(1):
            raise BundleError(f"{path}: trailing bytes after vocabulary")
    vocab = Vocabulary(words=words, counts=counts)
    return EmbeddingModel(vocabulary=vocab, vectors=vectors, config=config)


def _read_exact(fh, n: int, path) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise BundleError(f"{path}: truncated embedding model file")
    return data


def export_text(model: EmbeddingModel, path: str | Path) -> None:
    """Plain-text export: header 'vocab_size dim', one word per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(model.vocabulary)} {model.dim}\n")
        for word, row in zip(model.vocabulary.words, model.vectors):
            fh.write(word + " " + " ".join(f"{x:.6f}" for x in row) + "\n")
