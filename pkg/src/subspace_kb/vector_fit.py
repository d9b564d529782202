"""Learn a vector for a rare word from a small corpus.

The objective matches the main training objective restricted to the
target word's co-occurrence rows (with weight ``weight_g`` in place of
``weight_f``), plus a regularizer pulling the new vector toward the
subspace of a category the word is known to belong to. The subspace
coefficients have a closed form (the projection of the current vector),
so they are refreshed once per epoch while Adagrad drives the vector and
the scalar.
"""

from __future__ import annotations

import collections
from dataclasses import dataclass

import numpy as np

from .corpus import build_vocabulary, tokenize
from .errors import ContractError, TrainingDivergedError
from .subspace import CategorySet, SubspaceBasis, get_basis
from .training import EmbeddingSet, _ADAGRAD_EPS

_G_SCALE = 10.0
_G_ALPHA = 0.75


def weight_g(x):
    """Small-corpus count weight ``min((x / 10)^0.75, 1)``; accepts arrays."""
    return np.minimum(np.power(np.asarray(x, dtype=np.float64) / _G_SCALE, _G_ALPHA), 1.0)


@dataclass
class FitConfig:
    k: int = 3
    lr: float = 0.1
    lam: float = 1.0
    min_count: int = 10
    epochs: int = 200
    seed: int = 0
    window: int = 10

    def __post_init__(self):
        if self.lam < 0:
            raise ContractError(f"lambda must be >= 0, got {self.lam}")
        if self.min_count < 1:
            raise ContractError(f"min_count must be >= 1, got {self.min_count}")
        if self.lr <= 0:
            raise ContractError(f"lr must be positive, got {self.lr}")
        if self.epochs < 1:
            raise ContractError(f"epochs must be >= 1, got {self.epochs}")
        if self.k < 1:
            raise ContractError(f"rank must be >= 1, got {self.k}")
        if self.window < 1:
            raise ContractError(f"window must be >= 1, got {self.window}")


@dataclass
class FitResult:
    """Fitted unit vector plus optimizer diagnostics.

    ``y_total`` sums the target word's co-occurrence counts over the small
    corpus vocabulary, quantifying how much data backed the fit. ``b`` is
    the subspace coefficient vector after the final closed-form refresh
    against the returned (normalized) vector.
    """

    v_hat: np.ndarray
    final_loss: float
    y_total: int
    b: np.ndarray
    z: float

    def __post_init__(self):
        if abs(float(np.linalg.norm(self.v_hat)) - 1.0) > 1e-6:
            raise ContractError("fitted vector must be unit-norm")


def fit_loss(
    v_hat: np.ndarray,
    b: np.ndarray,
    z: float,
    counts: dict[str, float],
    emb: EmbeddingSet,
    basis: SubspaceBasis,
    lam: float,
) -> float:
    """Weighted squared-residual objective for one new vector.

    ``counts`` maps context words (which must have vectors) to their
    co-occurrence counts with the target word.
    """
    v_hat = np.asarray(v_hat, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if v_hat.shape != (emb.dim,):
        raise ContractError("v_hat dimension mismatch")
    if b.shape != (basis.k,) or basis.dim != emb.dim:
        raise ContractError("basis coefficient dimension mismatch")
    total = 0.0
    for w, y in counts.items():
        s = v_hat + emb.vector(w)
        r = float(s @ s) - np.log(y) + z
        total += float(weight_g(y)) * r * r
    gap = v_hat - basis.U @ b
    return float(total + lam * (gap @ gap))


def fit_loss_gradients(
    v_hat: np.ndarray,
    b: np.ndarray,
    z: float,
    counts: dict[str, float],
    emb: EmbeddingSet,
    basis: SubspaceBasis,
    lam: float,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Analytic gradient of :func:`fit_loss` w.r.t. ``v_hat``, ``b``, and ``z``."""
    v_hat = np.asarray(v_hat, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    grad_v = np.zeros_like(v_hat)
    grad_z = 0.0
    for w, y in counts.items():
        s = v_hat + emb.vector(w)
        r = float(s @ s) - np.log(y) + z
        g = float(weight_g(y))
        grad_v += 4.0 * g * r * s
        grad_z += 2.0 * g * r
    gap = v_hat - basis.U @ b
    grad_v += 2.0 * lam * gap
    grad_b = -2.0 * lam * (basis.U.T @ gap)
    return grad_v, grad_b, float(grad_z)


def count_target_cooccurrences(
    corpus_path, target: str, window: int, min_count: int
) -> tuple[dict[str, int], int]:
    """Counts of words within ``window`` of the target in a small corpus.

    Only words occurring at least ``min_count`` times in the corpus are
    counted. Returns the count map and its total (the amount of
    co-occurrence data available for the target).
    """
    vocab = build_vocabulary(corpus_path, min_count)
    with open(corpus_path, encoding="utf-8") as fh:
        toks = tokenize(fh.read())
    counts: collections.Counter[str] = collections.Counter()
    for pos, tok in enumerate(toks):
        if tok != target:
            continue
        lo = max(0, pos - window)
        hi = min(len(toks), pos + window + 1)
        for q in range(lo, hi):
            if q != pos and toks[q] in vocab:
                counts[toks[q]] += 1
    return dict(counts), int(sum(counts.values()))


def learn_vector(
    w_hat: str,
    category: CategorySet,
    corpus_path,
    emb: EmbeddingSet,
    cfg: FitConfig,
) -> FitResult:
    """Fit a unit vector for ``w_hat`` from a small corpus.

    The category basis is built from members that have vectors, excluding
    ``w_hat`` itself; when ``w_hat`` already has a vector it is also
    withheld from the co-occurrence terms, so refits of known words can be
    scored against the stored truth. Full-batch Adagrad drives the vector
    and scalar; the subspace coefficients are refreshed in closed form
    after every epoch.
    """
    members = [w for w in category.members if w != w_hat and w in emb]
    if not members:
        raise ContractError(
            f"no category member of {category.name!r} has a vector; cannot build a basis"
        )
    if cfg.k > min(emb.dim, len(members)):
        raise ContractError(
            f"rank {cfg.k} exceeds min(d={emb.dim}, members={len(members)})"
        )
    basis = get_basis(np.stack([emb.vector(w) for w in members]), cfg.k)

    raw_counts, y_total = count_target_cooccurrences(
        corpus_path, w_hat, cfg.window, cfg.min_count
    )
    counts = {
        w: float(c) for w, c in sorted(raw_counts.items()) if w in emb and w != w_hat
    }
    if not counts and cfg.lam == 0:
        raise ContractError(
            f"no usable co-occurrence data for {w_hat!r} and lambda is 0; "
            "the objective is unconstrained"
        )

    rng = np.random.default_rng(cfg.seed)
    scale = 0.5 / emb.dim
    v_hat = rng.uniform(-scale, scale, size=emb.dim)
    z = 0.0
    acc_v = np.zeros_like(v_hat)
    acc_z = 0.0

    words = list(counts)
    ctx = np.stack([emb.vector(w) for w in words]) if words else np.empty((0, emb.dim))
    logy = np.log(np.asarray([counts[w] for w in words])) if words else np.empty(0)
    gw = weight_g(np.asarray([counts[w] for w in words])) if words else np.empty(0)

    for epoch in range(cfg.epochs):
        b = basis.U.T @ v_hat  # closed-form coefficients at the current vector
        if words:
            s = v_hat[None, :] + ctx
            r = np.einsum("ij,ij->i", s, s) - logy + z
            grad_v = 4.0 * (gw * r) @ s
            grad_z = float(np.sum(2.0 * gw * r))
        else:
            grad_v = np.zeros_like(v_hat)
            grad_z = 0.0
        grad_v = grad_v + 2.0 * cfg.lam * (v_hat - basis.U @ b)
        if not np.isfinite(grad_v).all() or not np.isfinite(grad_z):
            raise TrainingDivergedError(epoch, w_hat)
        acc_v += grad_v * grad_v
        v_hat -= cfg.lr * grad_v / np.sqrt(acc_v + _ADAGRAD_EPS)
        acc_z += grad_z * grad_z
        if acc_z > 0:
            z -= cfg.lr * grad_z / np.sqrt(acc_z + _ADAGRAD_EPS)

    b = basis.U.T @ v_hat
    final_loss = fit_loss(v_hat, b, z, counts, emb, basis, cfg.lam)
    norm = float(np.linalg.norm(v_hat))
    if norm == 0:
        raise ContractError("fit collapsed to the zero vector")
    v_unit = v_hat / norm
    return FitResult(
        v_hat=v_unit,
        final_loss=final_loss,
        y_total=y_total,
        b=basis.U.T @ v_unit,
        z=float(z),
    )


def order_and_cosine(
    v_hat: np.ndarray, w_hat: str, emb: EmbeddingSet
) -> tuple[int, float]:
    """Rank of the stored vector in the fitted vector's similarity order.

    Order 1 means the stored vector for ``w_hat`` is the nearest of all
    vocabulary vectors by dot product with ``v_hat``; the cosine is their
    dot product (vectors are unit-norm).
    """
    if w_hat not in emb:
        raise ContractError(f"word {w_hat!r} has no stored vector")
    v_hat = np.asarray(v_hat, dtype=np.float64)
    dots = emb.vectors @ v_hat
    ref = float(dots[emb.index[w_hat]])
    order = int(np.sum(dots > ref)) + 1
    return order, ref
