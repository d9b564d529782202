"""Analogy queries by vector arithmetic, with optional tag-based filtering.

A query "a:b::c:?" ranks candidate words by cosine similarity to
``v_b - v_a + v_c``. Candidates can be restricted to words sharing a
part-of-speech (POS) tag or a finer lexicographer (LEX) tag with the query
word ``b``; LEX names come from the standard 45-entry lexicographer file
inventory.

The tag file format owned by this module is one line per word:
``word<TAB>POS:t1,t2<TAB>LEX:t3,t4`` (either tag list may be empty).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .corpus import Vocabulary
from .errors import ContractError, FormatError
from .subspace import RelationSet
from .training import EmbeddingSet

logger = logging.getLogger(__name__)

VALID_LEX_TAGS = frozenset(
    {
        "adj.all",
        "adj.pert",
        "adv.all",
        "noun.Tops",
        "noun.act",
        "noun.animal",
        "noun.artifact",
        "noun.attribute",
        "noun.body",
        "noun.cognition",
        "noun.communication",
        "noun.event",
        "noun.feeling",
        "noun.food",
        "noun.group",
        "noun.location",
        "noun.motive",
        "noun.object",
        "noun.person",
        "noun.phenomenon",
        "noun.plant",
        "noun.possession",
        "noun.process",
        "noun.quantity",
        "noun.relation",
        "noun.shape",
        "noun.state",
        "noun.substance",
        "noun.time",
        "verb.body",
        "verb.change",
        "verb.cognition",
        "verb.communication",
        "verb.competition",
        "verb.consumption",
        "verb.contact",
        "verb.creation",
        "verb.emotion",
        "verb.motion",
        "verb.perception",
        "verb.possession",
        "verb.social",
        "verb.stative",
        "verb.weather",
        "adj.ppl",
    }
)

MODES = ("none", "pos", "lex")


@dataclass
class TagTable:
    """POS and LEX tag sets per word; untagged words have empty sets."""

    pos: dict[str, frozenset[str]] = field(default_factory=dict)
    lex: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        self.pos = {w: frozenset(t) for w, t in self.pos.items()}
        self.lex = {w: frozenset(t) for w, t in self.lex.items()}
        for w, tags in self.lex.items():
            bad = tags - VALID_LEX_TAGS
            if bad:
                raise ContractError(f"word {w!r} has unknown LEX tags {sorted(bad)}")

    def pos_tags(self, word: str) -> frozenset[str]:
        return self.pos.get(word, frozenset())

    def lex_tags(self, word: str) -> frozenset[str]:
        return self.lex.get(word, frozenset())

    def save(self, path) -> None:
        words = sorted(set(self.pos) | set(self.lex))
        with open(path, "w", encoding="utf-8") as fh:
            for w in words:
                p = ",".join(sorted(self.pos_tags(w)))
                l = ",".join(sorted(self.lex_tags(w)))
                fh.write(f"{w}\tPOS:{p}\tLEX:{l}\n")

    @classmethod
    def load(cls, path) -> "TagTable":
        pos: dict[str, frozenset[str]] = {}
        lex: dict[str, frozenset[str]] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 3 or not parts[1].startswith("POS:") or not parts[2].startswith("LEX:"):
                    raise FormatError(
                        path, "expected 'word<TAB>POS:...<TAB>LEX:...'", lineno
                    )
                word = parts[0]
                if word in pos:
                    raise FormatError(path, f"duplicate word {word!r}", lineno)
                p = frozenset(t for t in parts[1][4:].split(",") if t)
                l = frozenset(t for t in parts[2][4:].split(",") if t)
                bad = l - VALID_LEX_TAGS
                if bad:
                    raise FormatError(path, f"unknown LEX tags {sorted(bad)}", lineno)
                pos[word] = p
                lex[word] = l
        return cls(pos=pos, lex=lex)


def _word_universe(vocab) -> list[str]:
    if isinstance(vocab, (Vocabulary, EmbeddingSet)):
        return list(vocab.words)
    return list(vocab)


def filter_candidates(b: str, mode: str, tags: TagTable | None, vocab) -> set[str]:
    """Candidate words for a query whose second word is ``b``.

    Mode ``none`` passes the whole vocabulary through; ``pos`` and ``lex``
    keep words sharing at least one tag of that kind with ``b``. A word
    with no tag entry yields an empty result (logged), mirroring lexicon
    gaps.
    """
    words = _word_universe(vocab)
    if mode == "none":
        return set(words)
    if mode not in MODES:
        raise ContractError(f"unknown filter mode {mode!r}")
    if tags is None:
        raise ContractError(f"mode {mode!r} requires a tag table")
    getter = tags.pos_tags if mode == "pos" else tags.lex_tags
    b_tags = getter(b)
    if not b_tags:
        logger.warning("word %r has no %s tags; filter result is empty", b, mode)
        return set()
    return {w for w in words if getter(w) & b_tags}


def solve_query(
    a: str,
    b: str,
    c: str,
    candidates,
    n: int,
    emb: EmbeddingSet,
    include_query_words: bool = False,
) -> list[str]:
    """Top ``n`` candidates by cosine similarity to ``v_b - v_a + v_c``.

    The query words are excluded from the candidate pool unless
    ``include_query_words`` is set; fewer than ``n`` survivors are all
    returned. Ties are broken lexicographically.
    """
    for w in (a, b, c):
        if w not in emb:
            raise ContractError(f"query word {w!r} has no vector")
    if n < 1:
        raise ContractError(f"n must be >= 1, got {n}")
    target = emb.vector(b) - emb.vector(a) + emb.vector(c)
    pool = [w for w in candidates if w in emb]
    if not include_query_words:
        pool = [w for w in pool if w not in (a, b, c)]
    if not pool:
        return []
    pool_arr = np.array(sorted(pool))
    dots = emb.vectors[[emb.index[w] for w in pool_arr]] @ target
    order = np.lexsort((pool_arr, -dots))
    return [str(w) for w in pool_arr[order[:n]]]


@dataclass
class BenchmarkRow:
    relation: str
    n: int
    mode: str
    correct: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else float("nan")


@dataclass
class BenchmarkResult:
    rows: list[BenchmarkRow] = field(default_factory=list)
    query_errors: int = 0

    def accuracy(self, n: int, mode: str) -> float:
        for row in self.rows:
            if row.n == n and row.mode == mode:
                return row.accuracy
        raise KeyError((n, mode))


def analogy_benchmark(
    s_r: RelationSet,
    emb: EmbeddingSet,
    tags: TagTable | None,
    ns: list[int],
    modes: tuple[str, ...] = MODES,
) -> BenchmarkResult:
    """All-ordered-pairs analogy accuracy for each list size and filter mode.

    For every ordered pair of distinct relation pairs (a, b), (c, d) the
    query "a:b::c:?" is solved against the mode's candidate set; a query
    counts as correct when ``d`` appears in the returned list. Queries
    that raise (e.g. a missing vector) count as incorrect and are tallied
    in ``query_errors``.
    """
    if len(s_r) < 2:
        raise ContractError(f"relation {s_r.name!r} needs >= 2 pairs")
    for mode in modes:
        if mode not in MODES:
            raise ContractError(f"unknown filter mode {mode!r}")
    if any(n < 1 for n in ns):
        raise ContractError("every n must be >= 1")
    n_max = max(ns)
    correct = {(n, mode): 0 for n in ns for mode in modes}
    total = len(s_r) * (len(s_r) - 1)
    errors = 0
    for a, b in s_r.pairs:
        for c, d in s_r.pairs:
            if (c, d) == (a, b):
                continue
            for mode in modes:
                try:
                    pool = filter_candidates(b, mode, tags, emb)
                    answers = solve_query(a, b, c, pool, n_max, emb)
                except ContractError:
                    errors += 1
                    continue
                if d in answers:
                    pos = answers.index(d)
                    for n in ns:
                        if pos < n:
                            correct[(n, mode)] += 1
    rows = [
        BenchmarkRow(relation=s_r.name, n=n, mode=mode, correct=correct[(n, mode)], total=total)
        for n in ns
        for mode in modes
    ]
    return BenchmarkResult(rows=rows, query_errors=errors)
