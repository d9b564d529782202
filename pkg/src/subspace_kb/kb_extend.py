"""Discover new category members and relation pairs via subspace projections.

A candidate passes when its vector (or difference vector) has a positive
dot product with the first basis column and a projection magnitude above
the threshold. Results are sorted by descending projection, ties broken
lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .subspace import CategorySet, RelationSet, get_basis
from .training import EmbeddingSet


@dataclass
class ExtensionResult:
    """Accepted items with their projection magnitudes, best first."""

    items: list[tuple[object, float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.items)

    def keys(self) -> list[object]:
        return [item for item, _ in self.items]


def _sorted_items(items: list[tuple[object, float]]) -> list[tuple[object, float]]:
    return sorted(items, key=lambda it: (-it[1], it[0]))


def extend_category(
    s_c: CategorySet, emb: EmbeddingSet, k: int, delta: float
) -> ExtensionResult:
    """Words outside ``s_c`` likely to belong to its category.

    Builds a rank-``k`` basis from the member vectors and returns every
    other vocabulary word whose vector points into the basis half-space
    and projects onto the subspace with magnitude above ``delta``.
    """
    if len(s_c) == 0:
        raise ContractError(f"category {s_c.name!r} is empty")
    if not 0.0 <= delta <= 1.0:
        raise ContractError(f"delta must be in [0, 1], got {delta}")
    members = [emb.vector(w) for w in s_c.members]
    basis = get_basis(np.stack(members), k)
    member_set = set(s_c.members)
    proj = np.linalg.norm(emb.vectors @ basis.U, axis=1)
    first = emb.vectors @ basis.u1
    items = [
        (w, float(proj[i]))
        for i, w in enumerate(emb.words)
        if w not in member_set and first[i] > 0.0 and proj[i] > delta
    ]
    return ExtensionResult(items=_sorted_items(items))


def extend_relation(
    s_r: RelationSet,
    emb: EmbeddingSet,
    ks: tuple[int, int, int],
    deltas: tuple[float, float, float],
    pair_cap: int = 10**7,
) -> ExtensionResult:
    """Word pairs outside ``s_r`` likely to satisfy its relation.

    First extends the categories of the pair components, then keeps the
    cross-product pairs whose difference vector passes the sign and
    threshold tests against the relation-difference basis. The candidate
    cross product is capped at ``pair_cap`` pairs.
    """
    if len(s_r) == 0:
        raise ContractError(f"relation {s_r.name!r} is empty")
    k_a, k_b, k_r = ks
    d_a, d_b, d_r = deltas
    a_words: list[str] = []
    b_words: list[str] = []
    for a, b in s_r.pairs:  # dedup preserving first occurrence
        if a not in a_words:
            a_words.append(a)
        if b not in b_words:
            b_words.append(b)
    s_a = extend_category(CategorySet(f"{s_r.name}:left", a_words), emb, k_a, d_a)
    s_b = extend_category(CategorySet(f"{s_r.name}:right", b_words), emb, k_b, d_b)
    n_pairs = len(s_a) * len(s_b)
    if n_pairs > pair_cap:
        raise ContractError(
            f"candidate cross product has {n_pairs} pairs (cap {pair_cap}); "
            "raise the category thresholds"
        )
    diffs = np.stack([emb.vector(a) - emb.vector(b) for a, b in s_r.pairs])
    basis = get_basis(diffs, k_r)
    items: list[tuple[object, float]] = []
    if len(s_a) and len(s_b):
        va = np.stack([emb.vector(w) for w, _ in s_a.items])
        vb = np.stack([emb.vector(w) for w, _ in s_b.items])
        for i, (a, _) in enumerate(s_a.items):
            diff = va[i] - vb  # all candidate differences for this left word
            first = diff @ basis.u1
            proj = np.linalg.norm(diff @ basis.U, axis=1)
            for j, (b, _) in enumerate(s_b.items):
                if first[j] > 0.0 and proj[j] > d_r:
                    items.append(((a, b), float(proj[j])))
    return ExtensionResult(items=_sorted_items(items))


@dataclass
class RelationExperimentRow:
    rank: int
    delta: float
    mean_accuracy: float  # NaN when every trial produced no checkable answer
    used_trials: int
    empty_trials: int
    correct: int
    incorrect: int


@dataclass
class RelationExperimentResult:
    name: str
    trials: int
    rows: list[RelationExperimentRow] = field(default_factory=list)


def relation_accuracy_experiment(
    s_r: RelationSet,
    emb: EmbeddingSet,
    ranks: list[int],
    deltas: list[float],
    trials: int,
    seed: int = 0,
    split: float = 0.3,
    pair_cap: int = 10**7,
) -> RelationExperimentResult:
    """Cross-validated accuracy of relation extension over a (rank, delta) grid.

    Each trial splits the pairs into a training part of ``round(split * n)``
    pairs and a test part, extends the training part, and checks the
    answers whose left word appears as a test left word or whose right
    word appears as a test right word; such an answer is correct when it
    is a test pair. Trials whose checkable answer set is empty are
    excluded from the mean and tallied per row. Trial ``t`` draws its
    partition from a generator seeded by ``(seed, t)``.
    """
    n = len(s_r)
    if n < 4:
        raise ContractError(f"relation {s_r.name!r} has {n} pairs, need >= 4")
    if trials < 1:
        raise ContractError("trials must be >= 1")
    n_train = int(round(split * n))
    if n_train < 1 or n_train >= n:
        raise ContractError(f"split {split} leaves an empty part for {s_r.name!r}")

    partitions = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        perm = rng.permutation(n)
        train = [s_r.pairs[i] for i in perm[:n_train]]
        test = [s_r.pairs[i] for i in perm[n_train:]]
        partitions.append((train, test))

    rows = []
    for k in ranks:
        for delta in deltas:
            accs = []
            empty = 0
            correct_total = 0
            incorrect_total = 0
            for t, (train, test) in enumerate(partitions):
                s1 = RelationSet(f"{s_r.name}:trial{t}", train)
                result = extend_relation(
                    s1, emb, (k, k, k), (delta, delta, delta), pair_cap=pair_cap
                )
                test_set = set(test)
                test_a = {a for a, _ in test}
                test_b = {b for _, b in test}
                checkable = [
                    pair for pair, _ in result.items
                    if pair[0] in test_a or pair[1] in test_b
                ]
                if not checkable:
                    empty += 1
                    continue
                n_correct = sum(1 for pair in checkable if pair in test_set)
                correct_total += n_correct
                incorrect_total += len(checkable) - n_correct
                accs.append(n_correct / len(checkable))
            mean = float(np.mean(accs)) if accs else float("nan")
            rows.append(
                RelationExperimentRow(
                    rank=k,
                    delta=delta,
                    mean_accuracy=mean,
                    used_trials=len(accs),
                    empty_trials=empty,
                    correct=correct_total,
                    incorrect=incorrect_total,
                )
            )
    return RelationExperimentResult(name=s_r.name, trials=trials, rows=rows)
