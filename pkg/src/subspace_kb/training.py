"""Fit word vectors and a shared scalar by weighted least squares on log counts.

For every pair with a positive count ``X[w,w']`` the model drives
``||v_w + v_w'||^2 + Z`` toward ``log X[w,w']``, each term weighted by
``weight_f``. Optimization is per-entry Adagrad over shuffled nonzero
entries; vectors are normalized to unit length once training completes.

The vector file format owned by this module is text: first line
``<vocab_size> <d>``, then one ``word v1 ... vd`` line per word with six
significant digits, and a final ``__Z__ <Z>`` line.
"""

from __future__ import annotations

import concurrent.futures
import logging
from dataclasses import dataclass, field

import numba
import numpy as np

from .corpus import CooccurrenceMatrix
from .errors import ContractError, FormatError, TrainingDivergedError

logger = logging.getLogger(__name__)

_Z_SENTINEL = "__Z__"
_ADAGRAD_EPS = 1e-8


def weight_f(x, x_max: float = 100.0, alpha: float = 0.75):
    """Co-occurrence weight ``min((x / x_max)^alpha, 1)``; accepts arrays."""
    return np.minimum(np.power(np.asarray(x, dtype=np.float64) / x_max, alpha), 1.0)


@dataclass
class TrainConfig:
    d: int = 50
    lr: float = 0.05
    epochs: int = 25
    x_max: float = 100.0
    alpha: float = 0.75
    seed: int = 0
    init_scale: float | None = None  # defaults to 0.5 / d

    def __post_init__(self):
        if self.d < 1:
            raise ContractError(f"d must be >= 1, got {self.d}")
        if self.epochs < 1:
            raise ContractError(f"epochs must be >= 1, got {self.epochs}")
        if not 0.0 < self.alpha <= 1.0:
            raise ContractError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.lr <= 0:
            raise ContractError(f"lr must be positive, got {self.lr}")
        if self.x_max <= 0:
            raise ContractError(f"x_max must be positive, got {self.x_max}")
        if self.init_scale is not None and self.init_scale <= 0:
            raise ContractError("init_scale must be positive")

    @property
    def scale(self) -> float:
        return self.init_scale if self.init_scale is not None else 0.5 / self.d


@dataclass
class EmbeddingSet:
    """Dense word vectors plus the trained shared scalar.

    ``vectors`` has one row per word, in the same order as ``words``.
    When ``normalized`` every row has unit Euclidean norm.
    """

    words: list[str]
    vectors: np.ndarray
    z: float = 0.0
    normalized: bool = False
    initial_loss: float | None = None
    final_loss: float | None = None
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.words):
            raise ContractError("vector count must equal word count")
        if not np.isfinite(self.vectors).all() or not np.isfinite(self.z):
            raise ContractError("embedding contains non-finite values")
        if self.normalized:
            norms = np.linalg.norm(self.vectors, axis=1)
            if norms.size and np.abs(norms - 1.0).max() > 1e-6:
                raise ContractError("normalized embedding has non-unit rows")
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ContractError("duplicate words in embedding")

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def vector(self, word: str) -> np.ndarray:
        try:
            return self.vectors[self.index[word]]
        except KeyError:
            raise ContractError(f"no vector for word {word!r}") from None

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(self.words)} {self.dim}\n")
            for w, row in zip(self.words, self.vectors):
                coords = " ".join(format(x, ".6g") for x in row)
                fh.write(f"{w} {coords}\n")
            fh.write(f"{_Z_SENTINEL} {self.z:.17g}\n")

    @classmethod
    def load(cls, path) -> "EmbeddingSet":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise FormatError(path, "expected header '<vocab_size> <d>'", 1)
            try:
                n, d = int(header[0]), int(header[1])
            except ValueError:
                raise FormatError(path, "non-integer header fields", 1) from None
            words: list[str] = []
            rows: list[list[float]] = []
            z: float | None = None
            for lineno, line in enumerate(fh, 2):
                parts = line.split()
                if not parts:
                    continue
                if parts[0] == _Z_SENTINEL:
                    if len(parts) != 2:
                        raise FormatError(path, "malformed scalar line", lineno)
                    z = float(parts[1])
                    continue
                if len(parts) != d + 1:
                    raise FormatError(
                        path, f"expected {d} coordinates, got {len(parts) - 1}", lineno
                    )
                try:
                    row = [float(x) for x in parts[1:]]
                except ValueError:
                    raise FormatError(path, "bad coordinate", lineno) from None
                words.append(parts[0])
                rows.append(row)
        if z is None:
            raise FormatError(path, f"missing final '{_Z_SENTINEL} <Z>' line")
        if len(words) != n:
            raise FormatError(path, f"header promised {n} words, found {len(words)}")
        vectors = np.asarray(rows, dtype=np.float64) if rows else np.empty((0, d))
        norms = np.linalg.norm(vectors, axis=1)
        normalized = bool(norms.size and np.abs(norms - 1.0).max() < 1e-3)
        if normalized:
            vectors /= norms[:, None]
        return cls(words=words, vectors=vectors, z=z, normalized=normalized)


def _pair_terms(emb_vectors: np.ndarray, z: float, X: CooccurrenceMatrix, cfg: TrainConfig):
    s = emb_vectors[X.ii] + emb_vectors[X.jj]
    resid = np.log(X.counts) - np.einsum("ij,ij->i", s, s) - z
    w = weight_f(X.counts, cfg.x_max, cfg.alpha)
    # the ordered-pair double sum counts off-diagonal entries twice
    mult = np.where(X.ii == X.jj, 1.0, 2.0)
    return s, resid, w, mult


def sn_loss(emb: EmbeddingSet, X: CooccurrenceMatrix, cfg: TrainConfig) -> float:
    """Weighted squared-residual objective summed over ordered nonzero pairs."""
    if emb.dim != cfg.d:
        raise ContractError(f"embedding dim {emb.dim} != config d {cfg.d}")
    if len(emb) != X.n_words:
        raise ContractError("embedding size does not match matrix")
    _, resid, w, mult = _pair_terms(emb.vectors, emb.z, X, cfg)
    return float(np.sum(mult * w * resid * resid))


def sn_loss_gradients(
    emb: EmbeddingSet, X: CooccurrenceMatrix, cfg: TrainConfig
) -> tuple[np.ndarray, float]:
    """Analytic gradient of :func:`sn_loss` w.r.t. every vector and the scalar."""
    if emb.dim != cfg.d:
        raise ContractError(f"embedding dim {emb.dim} != config d {cfg.d}")
    s, resid, w, mult = _pair_terms(emb.vectors, emb.z, X, cfg)
    coef = mult * w * resid
    grad_v = np.zeros_like(emb.vectors)
    per_entry = -4.0 * coef[:, None] * s
    np.add.at(grad_v, X.ii, per_entry)
    np.add.at(grad_v, X.jj, per_entry)  # diagonal rows accumulate twice, as required
    grad_z = float(np.sum(-2.0 * coef))
    return grad_v, grad_z


@numba.njit(cache=True, nogil=True)
def _adagrad_epoch(order, ii, jj, logx, fw, vecs, acc, zstate, lr):  # pragma: no cover
    d = vecs.shape[1]
    sbuf = np.empty(d)
    for t in range(order.shape[0]):
        e = order[t]
        i = ii[e]
        j = jj[e]
        s2 = 0.0
        for c in range(d):
            sc = vecs[i, c] + vecs[j, c]
            sbuf[c] = sc
            s2 += sc * sc
        r = logx[e] - s2 - zstate[0]
        if not np.isfinite(r):
            return e
        f = fw[e]
        if i == j:
            coef = -16.0 * f * r
            gz = -2.0 * f * r
            for c in range(d):
                g = coef * vecs[i, c]
                acc[i, c] += g * g
                vecs[i, c] -= lr * g / np.sqrt(acc[i, c] + _ADAGRAD_EPS)
        else:
            coef = -8.0 * f * r
            gz = -4.0 * f * r
            for c in range(d):
                g = coef * sbuf[c]
                acc[i, c] += g * g
                vecs[i, c] -= lr * g / np.sqrt(acc[i, c] + _ADAGRAD_EPS)
                acc[j, c] += g * g
                vecs[j, c] -= lr * g / np.sqrt(acc[j, c] + _ADAGRAD_EPS)
        zstate[1] += gz * gz
        zstate[0] -= lr * gz / np.sqrt(zstate[1] + _ADAGRAD_EPS)
    return -1


def train_sn(
    X: CooccurrenceMatrix,
    cfg: TrainConfig,
    words: list[str] | None = None,
    threads: int = 1,
) -> EmbeddingSet:
    """Train vectors and the shared scalar on the nonzero entries of ``X``.

    One epoch is a full shuffled pass over stored entries; shuffle order and
    initialization are drawn from ``cfg.seed``, so single-threaded runs are
    bit-reproducible. ``threads > 1`` shards each epoch across worker
    threads with unsynchronized updates (approximate, last write wins).
    Vectors are unit-normalized after the final epoch.
    """
    if X.nnz == 0:
        raise ContractError("co-occurrence matrix has no nonzero entries")
    if words is not None and len(words) != X.n_words:
        raise ContractError("words length does not match matrix")
    if words is None:
        words = [str(i) for i in range(X.n_words)]

    rng = np.random.default_rng(cfg.seed)
    vecs = rng.uniform(-cfg.scale, cfg.scale, size=(X.n_words, cfg.d))
    acc = np.zeros_like(vecs)
    zstate = np.zeros(2)  # [Z, accumulated squared Z-gradient]
    logx = np.log(X.counts)
    fw = weight_f(X.counts, cfg.x_max, cfg.alpha)

    probe = EmbeddingSet(words=list(words), vectors=vecs.copy(), z=0.0)
    initial_loss = sn_loss(probe, X, cfg)

    for epoch in range(cfg.epochs):
        order = rng.permutation(X.nnz)
        if threads > 1:
            shards = np.array_split(order, threads)
            with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(
                    pool.map(
                        lambda sh: _adagrad_epoch(
                            sh, X.ii, X.jj, logx, fw, vecs, acc, zstate, cfg.lr
                        ),
                        shards,
                    )
                )
            bad = max(results)
        else:
            bad = _adagrad_epoch(order, X.ii, X.jj, logx, fw, vecs, acc, zstate, cfg.lr)
        if bad >= 0:
            raise TrainingDivergedError(epoch, (int(X.ii[bad]), int(X.jj[bad])))
        if not np.isfinite(zstate[0]) or not np.isfinite(vecs).all():
            raise TrainingDivergedError(epoch, "parameters")

    final = EmbeddingSet(words=list(words), vectors=vecs.copy(), z=float(zstate[0]))
    final_loss = sn_loss(final, X, cfg)
    if final_loss > initial_loss:
        logger.warning(
            "training loss rose from %.6g to %.6g; consider a lower lr",
            initial_loss,
            final_loss,
        )

    norms = np.linalg.norm(vecs, axis=1)
    if (norms == 0).any():
        raise TrainingDivergedError(cfg.epochs, "zero-norm vector")
    vecs = vecs / norms[:, None]
    return EmbeddingSet(
        words=list(words),
        vectors=vecs,
        z=float(zstate[0]),
        normalized=True,
        initial_loss=initial_loss,
        final_loss=final_loss,
    )
