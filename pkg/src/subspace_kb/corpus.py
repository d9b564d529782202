"""Corpus tokenization, vocabulary construction, and windowed co-occurrence counts.

A corpus is UTF-8 plain text with whitespace-delimited tokens; multi-word
entities are expected to be pre-joined with underscores upstream.
Tokenization lowercases and splits on whitespace, nothing more.

File formats owned by this module:

* vocabulary file: one ``word<TAB>count`` line per word, in canonical order
  (descending count, ties broken lexicographically);
* co-occurrence file: header ``COOC v1 <vocab_size> <window>`` followed by
  ``i j count`` lines with ``i <= j``, sorted by ``(i, j)``.
"""

from __future__ import annotations

import collections

import numpy as np

from .errors import ContractError, FormatError


def tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace."""
    return text.lower().split()


class Vocabulary:
    """Ordered word <-> id map with corpus frequencies.

    Words are ordered by descending corpus count, ties broken
    lexicographically; ids are assigned in that order. Every stored word
    occurs at least ``min_count`` times.
    """

    def __init__(self, counts: dict[str, int], min_count: int):
        if min_count < 1:
            raise ContractError(f"min_count must be >= 1, got {min_count}")
        kept = [(w, c) for w, c in counts.items() if c >= min_count]
        kept.sort(key=lambda wc: (-wc[1], wc[0]))
        self.min_count = min_count
        self.words: list[str] = [w for w, _ in kept]
        self.count: dict[str, int] = {w: c for w, c in kept}
        self.index: dict[str, int] = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def id_of(self, word: str) -> int:
        return self.index[word]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for w in self.words:
                fh.write(f"{w}\t{self.count[w]}\n")

    @classmethod
    def load(cls, path, min_count: int | None = None) -> "Vocabulary":
        counts: dict[str, int] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 2:
                    raise FormatError(path, "expected 'word<TAB>count'", lineno)
                word, raw = parts
                try:
                    c = int(raw)
                except ValueError:
                    raise FormatError(path, f"bad count {raw!r}", lineno) from None
                if word in counts:
                    raise FormatError(path, f"duplicate word {word!r}", lineno)
                counts[word] = c
        if min_count is None:
            min_count = min(counts.values()) if counts else 1
        return cls(counts, min_count)


def build_vocabulary(corpus_path, m0: int) -> Vocabulary:
    """Count tokens in ``corpus_path`` and keep those occurring >= ``m0`` times.

    An empty corpus yields an empty vocabulary; an unreadable path raises
    the underlying OSError.
    """
    counts: collections.Counter[str] = collections.Counter()
    with open(corpus_path, encoding="utf-8") as fh:
        for line in fh:
            counts.update(tokenize(line))
    return Vocabulary(counts, m0)


class CooccurrenceMatrix:
    """Sparse symmetric window co-occurrence counts over a vocabulary.

    Entries are stored once per unordered id pair ``(i, j)`` with
    ``i <= j``; ``entry(i, j)`` presents the symmetric view. Diagonal
    entries store the full count (both directed events per position pair).
    Counts are kept as floats so synthetic real-valued matrices can be
    represented; corpus-built matrices are integral.
    """

    def __init__(self, n_words: int, window: int, ii, jj, counts):
        if window < 1:
            raise ContractError(f"window must be >= 1, got {window}")
        ii = np.asarray(ii, dtype=np.int64)
        jj = np.asarray(jj, dtype=np.int64)
        counts = np.asarray(counts, dtype=np.float64)
        if not (ii.shape == jj.shape == counts.shape):
            raise ContractError("ii, jj, counts must have equal length")
        if ii.size:
            if (ii > jj).any():
                raise ContractError("entries must satisfy i <= j")
            if ii.min() < 0 or jj.max() >= n_words:
                raise ContractError("entry ids out of range")
            if (counts <= 0).any():
                raise ContractError("all stored counts must be > 0")
        codes = ii * n_words + jj
        order = np.argsort(codes, kind="stable")
        codes = codes[order]
        if codes.size and (np.diff(codes) <= 0).any():
            raise ContractError("duplicate (i, j) entries")
        self.n_words = n_words
        self.window = window
        self.ii = ii[order]
        self.jj = jj[order]
        self.counts = counts[order]
        self._codes = codes
        self.row_sums = np.zeros(n_words, dtype=np.float64)
        np.add.at(self.row_sums, self.ii, self.counts)
        off = self.ii != self.jj
        np.add.at(self.row_sums, self.jj[off], self.counts[off])

    @property
    def nnz(self) -> int:
        return int(self.counts.size)

    def entry(self, i: int, j: int) -> float:
        """Symmetric accessor: count for the unordered pair (i, j)."""
        lo, hi = (i, j) if i <= j else (j, i)
        code = lo * self.n_words + hi
        pos = np.searchsorted(self._codes, code)
        if pos < self._codes.size and self._codes[pos] == code:
            return float(self.counts[pos])
        return 0.0

    def total_mass(self) -> float:
        """Sum of row sums; equals the number of directed co-occurrence events."""
        return float(self.row_sums.sum())

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"COOC v1 {self.n_words} {self.window}\n")
            for i, j, c in zip(self.ii, self.jj, self.counts):
                text = str(int(c)) if c == int(c) else repr(float(c))
                fh.write(f"{i} {j} {text}\n")

    @classmethod
    def load(cls, path) -> "CooccurrenceMatrix":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split()
            if len(header) != 4 or header[0] != "COOC" or header[1] != "v1":
                raise FormatError(path, "expected header 'COOC v1 <vocab_size> <window>'", 1)
            try:
                n_words, window = int(header[2]), int(header[3])
            except ValueError:
                raise FormatError(path, "non-integer header fields", 1) from None
            ii, jj, counts = [], [], []
            for lineno, line in enumerate(fh, 2):
                if not line.strip():
                    continue
                parts = line.split()
                if len(parts) != 3:
                    raise FormatError(path, "expected 'i j count'", lineno)
                try:
                    i, j, c = int(parts[0]), int(parts[1]), float(parts[2])
                except ValueError:
                    raise FormatError(path, f"bad entry {line.strip()!r}", lineno) from None
                ii.append(i)
                jj.append(j)
                counts.append(c)
        try:
            return cls(n_words, window, ii, jj, counts)
        except ContractError as exc:
            raise FormatError(path, str(exc)) from None


def _token_ids(corpus_path, vocab: Vocabulary) -> np.ndarray:
    """Map the corpus token stream to vocabulary ids, -1 for out-of-vocabulary.

    Out-of-vocabulary tokens keep their positions so they still occupy
    window slots; they are never counted and never widen a window.
    """
    index = vocab.index
    ids: list[int] = []
    with open(corpus_path, encoding="utf-8") as fh:
        for line in fh:
            ids.extend(index.get(tok, -1) for tok in tokenize(line))
    return np.asarray(ids, dtype=np.int64)


def count_cooccurrences(corpus_path, vocab: Vocabulary, k: int) -> CooccurrenceMatrix:
    """Count, for every vocabulary pair, co-occurrences within distance ``k``.

    Each ordered position pair (p, q) with 0 < |p - q| <= k and both tokens
    in the vocabulary contributes one directed event to the symmetric count
    matrix. Corpus boundaries truncate windows; counts are exact integers,
    not distance-weighted.
    """
    if k < 1:
        raise ContractError(f"window must be >= 1, got {k}")
    ids = _token_ids(corpus_path, vocab)
    n = len(vocab)
    parts = []
    for off in range(1, k + 1):
        if ids.size <= off:
            break
        x, y = ids[:-off], ids[off:]
        mask = (x >= 0) & (y >= 0)
        a, b = x[mask], y[mask]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        parts.append(lo * n + hi)
    if parts:
        codes = np.concatenate(parts)
        uniq, cnt = np.unique(codes, return_counts=True)
        ii = uniq // n
        jj = uniq % n
        cnt = cnt.astype(np.float64)
        cnt[ii == jj] *= 2.0  # both directed events of a same-word position pair
    else:
        ii = jj = np.empty(0, dtype=np.int64)
        cnt = np.empty(0, dtype=np.float64)
    return CooccurrenceMatrix(n, k, ii, jj, cnt)
