"""Low-rank orthonormal bases for word categories and relations.

A category is a named set of words; a relation is a named set of ordered
word pairs. The basis of a category subspace comes from the SVD of the
matrix whose columns are the member vectors; relations use difference
vectors ``v_a - v_b`` instead (never re-normalized). The first basis
column is sign-fixed so the training vectors' dot products sum positive.

File formats owned by this module: category files carry one word per
line; relation files carry two whitespace-separated words per line.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, FormatError
from .training import EmbeddingSet

logger = logging.getLogger(__name__)


@dataclass
class SubspaceBasis:
    """Column-orthonormal ``d x k`` basis with a sign-fixed first column.

    ``sign_fixed`` is False only when the training vectors' dot products
    with the first column summed exactly to zero, leaving the sign as the
    SVD produced it.
    """

    U: np.ndarray
    k: int
    sign_fixed: bool = True

    def __post_init__(self):
        self.U = np.asarray(self.U, dtype=np.float64)
        if self.U.ndim != 2 or self.U.shape[1] != self.k:
            raise ContractError("basis must be d x k")
        gram = self.U.T @ self.U
        if np.abs(gram - np.eye(self.k)).max() > 1e-8:
            raise ContractError("basis columns are not orthonormal")

    @property
    def dim(self) -> int:
        return int(self.U.shape[0])

    @property
    def u1(self) -> np.ndarray:
        return self.U[:, 0]

    def projector(self) -> np.ndarray:
        return self.U @ self.U.T

    def prefix(self, k: int) -> "SubspaceBasis":
        """First ``k`` columns; shares the sign-fixed leading column."""
        if not 1 <= k <= self.k:
            raise ContractError(f"prefix rank {k} out of range 1..{self.k}")
        return SubspaceBasis(U=self.U[:, :k], k=k, sign_fixed=self.sign_fixed)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"BASIS v1 {self.dim} {self.k} {int(self.sign_fixed)}\n")
            for row in self.U:
                fh.write(" ".join(format(x, ".12g") for x in row) + "\n")

    @classmethod
    def load(cls, path) -> "SubspaceBasis":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 5 or header[:2] != ["BASIS", "v1"]:
                raise FormatError(path, "expected header 'BASIS v1 <d> <k> <sign_fixed>'", 1)
            d, k, fixed = int(header[2]), int(header[3]), bool(int(header[4]))
            rows = []
            for lineno, line in enumerate(fh, 2):
                if not line.strip():
                    continue
                vals = [float(x) for x in line.split()]
                if len(vals) != k:
                    raise FormatError(path, f"expected {k} columns", lineno)
                rows.append(vals)
        if len(rows) != d:
            raise FormatError(path, f"expected {d} rows, found {len(rows)}")
        return cls(U=np.asarray(rows), k=k, sign_fixed=fixed)


def _as_matrix(vectors) -> np.ndarray:
    """Stack a vector collection into rows of a 2-d float array."""
    mat = np.asarray(vectors, dtype=np.float64)
    if mat.ndim == 1:
        mat = mat[None, :]
    if mat.ndim != 2:
        raise ContractError("expected a list of vectors or a 2-d array")
    return mat


def get_basis(vectors, k: int) -> SubspaceBasis:
    """Rank-``k`` orthonormal basis for the span of ``vectors``.

    Columns are the leading left-singular vectors of the matrix whose
    columns are the input vectors, singular values descending. The first
    column is flipped, when needed, so the inputs' dot products with it
    sum positive.
    """
    rows = _as_matrix(vectors)
    n, d = rows.shape
    if n < 1:
        raise ContractError("need at least one vector")
    if not 1 <= k <= min(d, n):
        raise ContractError(f"rank {k} out of range 1..min(d={d}, n={n})")
    U, _, _ = np.linalg.svd(rows.T, full_matrices=False)
    U = U[:, :k].copy()
    total = float((rows @ U[:, 0]).sum())
    sign_fixed = True
    if total < 0:
        U[:, 0] = -U[:, 0]
    elif total == 0.0:
        sign_fixed = False
    return SubspaceBasis(U=U, k=k, sign_fixed=sign_fixed)


def capture(basis: SubspaceBasis, v) -> float:
    """Fraction of ``v``'s norm lying inside the subspace: ``||U^T v|| / ||v||``."""
    v = np.asarray(v, dtype=np.float64)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ContractError("capture of the zero vector is undefined")
    return float(np.linalg.norm(basis.U.T @ v) / nv)


def capture_rate(basis: SubspaceBasis, vectors) -> float:
    """Mean capture over a non-empty collection of test vectors."""
    rows = _as_matrix(vectors)
    if rows.shape[0] == 0:
        raise ContractError("capture_rate needs a non-empty test set")
    norms = np.linalg.norm(rows, axis=1)
    if (norms == 0).any():
        raise ContractError("capture of the zero vector is undefined")
    proj = np.linalg.norm(rows @ basis.U, axis=1)
    return float(np.mean(proj / norms))


@dataclass
class CategorySet:
    """Named set of distinct words sharing a concept."""

    name: str
    members: list[str]

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise ContractError(f"category {self.name!r} has duplicate members")

    def __len__(self) -> int:
        return len(self.members)


@dataclass
class RelationSet:
    """Named set of distinct ordered word pairs satisfying a common link."""

    name: str
    pairs: list[tuple[str, str]]

    def __post_init__(self):
        self.pairs = [tuple(p) for p in self.pairs]
        if len(set(self.pairs)) != len(self.pairs):
            raise ContractError(f"relation {self.name!r} has duplicate pairs")

    def __len__(self) -> int:
        return len(self.pairs)


def load_category(path, emb: EmbeddingSet | None = None, name: str | None = None) -> CategorySet:
    """Read a one-word-per-line category file.

    When ``emb`` is given, members without a vector are dropped with a
    logged count. Duplicate words are deduplicated with a warning.
    """
    name = name or str(path)
    words: list[str] = []
    seen = set()
    dupes = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 1:
                raise FormatError(path, "expected one word per line", lineno)
            w = parts[0]
            if w in seen:
                dupes += 1
                continue
            seen.add(w)
            words.append(w)
    if dupes:
        logger.warning("category %s: deduplicated %d repeated words", name, dupes)
    if emb is not None:
        kept = [w for w in words if w in emb]
        if len(kept) < len(words):
            logger.warning(
                "category %s: dropped %d out-of-vocabulary words", name, len(words) - len(kept)
            )
        words = kept
    return CategorySet(name=name, members=words)


def load_relation(path, emb: EmbeddingSet | None = None, name: str | None = None) -> RelationSet:
    """Read a two-words-per-line relation file; same drop/dedup rules as categories."""
    name = name or str(path)
    pairs: list[tuple[str, str]] = []
    seen = set()
    dupes = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise FormatError(path, "expected two words per line", lineno)
            pair = (parts[0], parts[1])
            if pair in seen:
                dupes += 1
                continue
            seen.add(pair)
            pairs.append(pair)
    if dupes:
        logger.warning("relation %s: deduplicated %d repeated pairs", name, dupes)
    if emb is not None:
        kept = [p for p in pairs if p[0] in emb and p[1] in emb]
        if len(kept) < len(pairs):
            logger.warning(
                "relation %s: dropped %d out-of-vocabulary pairs", name, len(pairs) - len(kept)
            )
        pairs = kept
    return RelationSet(name=name, pairs=pairs)


def save_category(cat: CategorySet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for w in cat.members:
            fh.write(w + "\n")


def save_relation(rel: RelationSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in rel.pairs:
            fh.write(f"{a} {b}\n")


def member_vectors(s: CategorySet | RelationSet, emb: EmbeddingSet) -> np.ndarray:
    """Vectors backing a set: member vectors, or ``v_a - v_b`` for relations."""
    if isinstance(s, CategorySet):
        return np.stack([emb.vector(w) for w in s.members])
    return np.stack([emb.vector(a) - emb.vector(b) for a, b in s.pairs])


@dataclass
class CaptureExperimentResult:
    """Per-rank mean capture rates plus raw dot products for box plots.

    ``rows`` holds ``(rank, mean_capture, stddev)``; ``direction_dots``
    holds ``(trial, direction, dot)`` for the largest requested rank's
    basis, evaluated on each trial's test vectors.
    """

    name: str
    rows: list[tuple[int, float, float]] = field(default_factory=list)
    direction_dots: list[tuple[int, int, float]] = field(default_factory=list)


def cv_capture_experiment(
    s: CategorySet | RelationSet,
    emb: EmbeddingSet,
    ranks: list[int],
    trials: int,
    split: float = 0.7,
    seed: int = 0,
    min_size: int = 2,
) -> CaptureExperimentResult:
    """Cross-validated capture rates of train-split bases on held-out vectors.

    Each trial partitions the set into a training part of
    ``floor(split * n)`` elements and a test part with the rest, builds one
    basis of the largest requested rank from the training vectors, and
    evaluates every requested rank through prefixes of that basis (so the
    per-trial rates are non-decreasing in rank by construction). Trial
    ``t`` draws its partition from a generator seeded by ``(seed, t)``.
    """
    if not ranks:
        raise ContractError("ranks must be non-empty")
    if trials < 1:
        raise ContractError("trials must be >= 1")
    vectors = member_vectors(s, emb)
    n = vectors.shape[0]
    if n < min_size:
        raise ContractError(f"set {s.name!r} has {n} usable members, need >= {min_size}")
    n_train = int(split * n)
    if n_train < 1 or n_train >= n:
        raise ContractError(
            f"split {split} leaves an empty train or test part for set {s.name!r} (n={n})"
        )
    kmax = max(ranks)
    if min(ranks) < 1 or kmax > min(emb.dim, n_train):
        raise ContractError(
            f"ranks must lie in 1..min(d={emb.dim}, train size={n_train})"
        )

    per_rank = {k: [] for k in ranks}
    dots: list[tuple[int, int, float]] = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        perm = rng.permutation(n)
        train = vectors[perm[:n_train]]
        test = vectors[perm[n_train:]]
        basis = get_basis(train, kmax)
        for k in ranks:
            per_rank[k].append(capture_rate(basis.prefix(k), test))
        for i in range(kmax):
            for val in test @ basis.U[:, i]:
                dots.append((t, i + 1, float(val)))

    rows = [
        (k, float(np.mean(per_rank[k])), float(np.std(per_rank[k])))
        for k in sorted(ranks)
    ]
    return CaptureExperimentResult(name=s.name, rows=rows, direction_dots=dots)
