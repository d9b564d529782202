"""Vocabulary construction and windowed co-occurrence counting."""

import collections

import numpy as np
import pytest

from subspace_kb import (
    ContractError,
    CooccurrenceMatrix,
    FormatError,
    Vocabulary,
    build_vocabulary,
    count_cooccurrences,
)


def write(tmp_path, text, name="corpus.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def brute_force_counts(tokens, vocab, k):
    """O(n*k) reference scan counting every directed event once."""
    counts = collections.Counter()
    idx = [vocab.index.get(t, -1) for t in tokens]
    for p, i in enumerate(idx):
        if i < 0:
            continue
        for q in range(max(0, p - k), min(len(idx), p + k + 1)):
            j = idx[q]
            if q == p or j < 0:
                continue
            counts[(i, j)] += 1
    return counts


def test_threshold_keeps_only_frequent_words(tmp_path):
    path = write(tmp_path, "a b a b a")
    vocab = build_vocabulary(path, 3)
    assert vocab.words == ["a"]
    assert vocab.count == {"a": 3}


def test_threshold_one_keeps_all_in_frequency_order(tmp_path):
    path = write(tmp_path, "a b a b a")
    vocab = build_vocabulary(path, 1)
    assert vocab.words == ["a", "b"]
    assert vocab.count == {"a": 3, "b": 2}
    assert vocab.index == {"a": 0, "b": 1}


def test_ties_break_lexicographically(tmp_path):
    path = write(tmp_path, "z q z q m")
    vocab = build_vocabulary(path, 1)
    assert vocab.words == ["q", "z", "m"]


def test_lowercasing(tmp_path):
    path = write(tmp_path, "Apple APPLE apple")
    vocab = build_vocabulary(path, 1)
    assert vocab.count == {"apple": 3}


def test_empty_corpus_gives_empty_vocabulary(tmp_path):
    path = write(tmp_path, "")
    vocab = build_vocabulary(path, 1)
    assert len(vocab) == 0


def test_unreadable_corpus_raises(tmp_path):
    with pytest.raises(OSError):
        build_vocabulary(tmp_path / "missing.txt", 1)


def test_vocabulary_matches_independent_counter(tmp_path):
    rng = np.random.default_rng(11)
    tokens = [f"w{i}" for i in rng.integers(0, 200, size=60_000)]
    path = write(tmp_path, " ".join(tokens))
    m0 = 50
    vocab = build_vocabulary(path, m0)
    reference = {w: c for w, c in collections.Counter(tokens).items() if c >= m0}
    assert vocab.count == reference
    assert len(vocab) == len(reference)


def test_window_of_one(tmp_path):
    path = write(tmp_path, "a b c")
    vocab = build_vocabulary(path, 1)
    X = count_cooccurrences(path, vocab, 1)
    a, b, c = vocab.index["a"], vocab.index["b"], vocab.index["c"]
    assert X.entry(a, b) == 1
    assert X.entry(b, c) == 1
    assert X.entry(a, c) == 0


def test_out_of_vocab_token_still_occupies_its_position(tmp_path):
    path = write(tmp_path, "a z b")
    vocab = Vocabulary({"a": 5, "b": 5}, 1)  # z is out of vocabulary
    X = count_cooccurrences(path, vocab, 1)
    assert X.entry(vocab.index["a"], vocab.index["b"]) == 0
    assert X.nnz == 0


def test_matches_brute_force_window_scan(tmp_path):
    rng = np.random.default_rng(5)
    tokens = [f"w{i}" for i in rng.integers(0, 30, size=1000)]
    path = write(tmp_path, " ".join(tokens))
    vocab = build_vocabulary(path, 2)
    k = 5
    X = count_cooccurrences(path, vocab, k)
    reference = brute_force_counts(tokens, vocab, k)
    for (i, j), count in reference.items():
        assert X.entry(i, j) == count
    # no spurious entries
    total_ref = sum(c for (i, j), c in reference.items())
    assert X.total_mass() == total_ref


def test_symmetry_and_row_sums(tmp_path):
    rng = np.random.default_rng(9)
    tokens = [f"w{i}" for i in rng.integers(0, 12, size=400)]
    path = write(tmp_path, " ".join(tokens))
    vocab = build_vocabulary(path, 1)
    X = count_cooccurrences(path, vocab, 3)
    n = len(vocab)
    for i in range(n):
        for j in range(n):
            assert X.entry(i, j) == X.entry(j, i)
    dense_sums = [sum(X.entry(i, j) for j in range(n)) for i in range(n)]
    np.testing.assert_allclose(X.row_sums, dense_sums)


def test_total_mass_bound(tmp_path):
    rng = np.random.default_rng(2)
    tokens = [f"w{i}" for i in rng.integers(0, 20, size=500)]
    path = write(tmp_path, " ".join(tokens))
    vocab = build_vocabulary(path, 1)
    k = 4
    X = count_cooccurrences(path, vocab, k)
    assert X.total_mass() <= 2 * k * len(tokens)


def test_windows_span_line_breaks(tmp_path):
    path = write(tmp_path, "a\nb\n")
    vocab = build_vocabulary(path, 1)
    X = count_cooccurrences(path, vocab, 2)
    assert X.entry(vocab.index["a"], vocab.index["b"]) == 1


def test_diagonal_counts_both_directions(tmp_path):
    path = write(tmp_path, "a a")
    vocab = build_vocabulary(path, 1)
    X = count_cooccurrences(path, vocab, 1)
    a = vocab.index["a"]
    assert X.entry(a, a) == 2
    assert X.row_sums[a] == 2


def test_serialization_is_deterministic(tmp_path):
    rng = np.random.default_rng(3)
    tokens = [f"w{i}" for i in rng.integers(0, 25, size=800)]
    path = write(tmp_path, " ".join(tokens))
    vocab = build_vocabulary(path, 1)
    X = count_cooccurrences(path, vocab, 4)
    out1 = tmp_path / "one.cooc"
    out2 = tmp_path / "two.cooc"
    X.save(out1)
    count_cooccurrences(path, vocab, 4).save(out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_cooccurrence_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    tokens = [f"w{i}" for i in rng.integers(0, 15, size=600)]
    path = write(tmp_path, " ".join(tokens))
    vocab = build_vocabulary(path, 1)
    X = count_cooccurrences(path, vocab, 2)
    out = tmp_path / "m.cooc"
    X.save(out)
    loaded = CooccurrenceMatrix.load(out)
    assert loaded.n_words == X.n_words
    assert loaded.window == X.window
    np.testing.assert_array_equal(loaded.ii, X.ii)
    np.testing.assert_array_equal(loaded.jj, X.jj)
    np.testing.assert_allclose(loaded.counts, X.counts)
    again = tmp_path / "m2.cooc"
    loaded.save(again)
    assert again.read_bytes() == out.read_bytes()


def test_vocabulary_round_trip(tmp_path):
    path = write(tmp_path, "b a a c c c")
    vocab = build_vocabulary(path, 1)
    out = tmp_path / "v.vocab"
    vocab.save(out)
    loaded = Vocabulary.load(out)
    assert loaded.words == vocab.words
    assert loaded.count == vocab.count
    again = tmp_path / "v2.vocab"
    loaded.save(again)
    assert again.read_bytes() == out.read_bytes()


def test_cooc_loader_rejects_malformed_header(tmp_path):
    bad = tmp_path / "bad.cooc"
    bad.write_text("NOPE 1 2\n0 0 1\n")
    with pytest.raises(FormatError):
        CooccurrenceMatrix.load(bad)


def test_cooc_loader_rejects_bad_entry_line(tmp_path):
    bad = tmp_path / "bad.cooc"
    bad.write_text("COOC v1 3 2\n0 1\n")
    with pytest.raises(FormatError, match="bad.cooc:2"):
        CooccurrenceMatrix.load(bad)


def test_vocab_loader_rejects_malformed_line(tmp_path):
    bad = tmp_path / "bad.vocab"
    bad.write_text("a\t3\nb\n")
    with pytest.raises(FormatError, match="bad.vocab:2"):
        Vocabulary.load(bad)


def test_matrix_constructor_validates():
    with pytest.raises(ContractError):
        CooccurrenceMatrix(3, 2, [1], [0], [1.0])  # i > j
    with pytest.raises(ContractError):
        CooccurrenceMatrix(3, 2, [0], [1], [0.0])  # zero count
    with pytest.raises(ContractError):
        CooccurrenceMatrix(3, 2, [0, 0], [1, 1], [1.0, 2.0])  # duplicate
