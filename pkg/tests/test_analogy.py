"""Analogy solving, tag filtering, and the all-pairs benchmark."""

import logging

import numpy as np
import pytest

from subspace_kb import (
    VALID_LEX_TAGS,
    ContractError,
    FormatError,
    RelationSet,
    TagTable,
    analogy_benchmark,
    filter_candidates,
    solve_query,
)

from ._synth import make_embedding, matched_offset_relation, unit


def grid_tags(left, right, extra=()):
    """Right-side words share one LEX tag; everything else gets another."""
    pos = {}
    lex = {}
    for w in left:
        pos[w] = {"noun"}
        lex[w] = {"noun.person"}
    for w in right:
        pos[w] = {"noun"}
        lex[w] = {"noun.location"}
    for w in extra:
        pos[w] = {"noun"}
        lex[w] = {"noun.artifact"}
    return TagTable(pos=pos, lex=lex)


def test_exact_match_ranks_first():
    rng = np.random.default_rng(0)
    words = ["a", "b", "c", "d"] + [f"r{i}" for i in range(10)]
    rows = [unit(rng.standard_normal(8)) for _ in words]
    emb = make_embedding(words, np.stack(rows))
    target = unit(emb.vector("b") - emb.vector("a") + emb.vector("c"))
    vectors = emb.vectors.copy()
    vectors[3] = target  # plant d exactly at the query target
    emb = make_embedding(words, vectors, normalized=True)
    answers = solve_query("a", "b", "c", set(words), 1, emb)
    assert answers == ["d"]


def test_full_sort_matches_brute_force():
    rng = np.random.default_rng(1)
    words = [f"w{i}" for i in range(20)]
    emb = make_embedding(words, rng.standard_normal((20, 6)))
    a, b, c = words[0], words[1], words[2]
    candidates = set(words)
    n = len(candidates) - 3  # query words excluded
    answers = solve_query(a, b, c, candidates, n, emb)
    target = emb.vector(b) - emb.vector(a) + emb.vector(c)
    expected = sorted(
        (w for w in words if w not in (a, b, c)),
        key=lambda w: (-float(emb.vector(w) @ target), w),
    )
    assert answers == expected


def test_query_words_excluded_by_default():
    emb, rel, left, right = matched_offset_relation(n_pairs=4)
    (a, b), (c, d) = rel.pairs[0], rel.pairs[1]
    answers = solve_query(a, b, c, set(emb.words), 3, emb)
    assert not {a, b, c} & set(answers)
    with_q = solve_query(a, b, c, set(emb.words), 3, emb, include_query_words=True)
    assert b in with_q  # v_b itself scores highly on the literal reading


def test_missing_query_word_is_named():
    emb = make_embedding(["a", "b"], np.eye(2))
    with pytest.raises(ContractError, match="zzz"):
        solve_query("a", "b", "zzz", {"a", "b"}, 1, emb)


def test_planted_grid_accuracy_is_perfect():
    emb, rel, left, right = matched_offset_relation(n_pairs=10)
    correct = 0
    total = 0
    for a, b in rel.pairs:
        for c, d in rel.pairs:
            if (c, d) == (a, b):
                continue
            total += 1
            if solve_query(a, b, c, set(emb.words), 1, emb) == [d]:
                correct += 1
    assert total == 90
    assert correct == total


def test_filter_none_is_identity():
    emb, rel, left, right = matched_offset_relation(n_pairs=3)
    assert filter_candidates(left[0], "none", None, emb) == set(emb.words)


def test_filter_pos_membership():
    tags = TagTable(
        pos={"n1": {"noun"}, "n2": {"noun"}, "n3": {"noun"}, "v1": {"verb"}, "v2": {"verb"}},
        lex={},
    )
    vocab = ["n1", "n2", "n3", "v1", "v2"]
    assert filter_candidates("n1", "pos", tags, vocab) == {"n1", "n2", "n3"}


def test_filter_untagged_word_warns_and_is_empty(caplog):
    tags = TagTable(pos={"x": {"noun"}}, lex={})
    with caplog.at_level(logging.WARNING):
        result = filter_candidates("ghost", "pos", tags, ["x", "ghost"])
    assert result == set()
    assert "no pos tags" in caplog.text


def test_filter_requires_tags():
    with pytest.raises(ContractError):
        filter_candidates("x", "lex", None, ["x"])


def test_lex_filter_is_subset_of_pos_filter():
    rng = np.random.default_rng(5)
    lex_pool = sorted(VALID_LEX_TAGS)
    words = [f"w{i}" for i in range(30)]
    pos = {}
    lex = {}
    for w in words:
        chosen = rng.choice(lex_pool, size=rng.integers(1, 3), replace=False)
        lex[w] = set(chosen)
        pos[w] = {t.split(".")[0] for t in chosen}  # consistent coarse tags
    tags = TagTable(pos=pos, lex=lex)
    for b in words[:10]:
        d_lex = filter_candidates(b, "lex", tags, words)
        d_pos = filter_candidates(b, "pos", tags, words)
        assert d_lex <= d_pos


def test_filtered_ranking_is_subsequence_of_unfiltered():
    emb, rel, left, right = matched_offset_relation(n_pairs=6)
    tags = grid_tags(left, right, extra=[w for w in emb.words if w.startswith("x")])
    (a, b), (c, d) = rel.pairs[0], rel.pairs[1]
    full = solve_query(a, b, c, set(emb.words), len(emb.words), emb)
    pool = filter_candidates(b, "lex", tags, emb)
    filtered = solve_query(a, b, c, pool, len(pool), emb)
    assert set(filtered) <= set(full)
    positions = [full.index(w) for w in filtered]
    assert positions == sorted(positions)  # order preserved under deletion


def test_tag_table_rejects_unknown_lex_names():
    with pytest.raises(ContractError, match="unknown LEX"):
        TagTable(pos={}, lex={"w": {"noun.nonsense"}})


def test_tag_file_round_trip(tmp_path):
    tags = TagTable(
        pos={"apple": {"noun"}, "run": {"verb", "noun"}, "bare": set()},
        lex={"apple": {"noun.food", "noun.plant"}, "run": {"verb.motion"}, "bare": set()},
    )
    path = tmp_path / "tags.tsv"
    tags.save(path)
    loaded = TagTable.load(path)
    assert loaded.pos == tags.pos
    assert loaded.lex == tags.lex
    again = tmp_path / "tags2.tsv"
    loaded.save(again)
    assert again.read_bytes() == path.read_bytes()


def test_tag_file_rejects_malformed_lines(tmp_path):
    path = tmp_path / "tags.tsv"
    path.write_text("word\tPOS:noun\n")
    with pytest.raises(FormatError, match="tags.tsv:1"):
        TagTable.load(path)
    path.write_text("word\tPOS:noun\tLEX:noun.madeup\n")
    with pytest.raises(FormatError, match="unknown LEX"):
        TagTable.load(path)


def test_benchmark_planted_grid():
    emb, rel, left, right = matched_offset_relation(n_pairs=6)
    tags = grid_tags(left, right, extra=[w for w in emb.words if w.startswith("x")])
    result = analogy_benchmark(rel, emb, tags, ns=[1, 5])
    assert result.query_errors == 0
    assert result.accuracy(1, "none") == 1.0
    assert result.accuracy(1, "lex") == 1.0
    assert result.accuracy(5, "pos") == 1.0
    for row in result.rows:
        assert row.total == 30


def test_benchmark_pos_filter_helps_with_distractors():
    # distractor words near the targets but with a different POS tag
    rng = np.random.default_rng(9)
    emb, rel, left, right = matched_offset_relation(n_pairs=5, n_distractors=0)
    words = list(emb.words)
    vectors = [emb.vectors[i] for i in range(len(words))]
    for i, b in enumerate(right):
        words.append(f"near{i}")
        vectors.append(unit(emb.vector(b) + 0.05 * rng.standard_normal(emb.dim)))
    emb2 = make_embedding(words, np.stack(vectors), normalized=True)
    tags = TagTable(
        pos={**{w: {"noun"} for w in left + right}, **{f"near{i}": {"adj"} for i in range(5)}},
        lex={},
    )
    none_result = analogy_benchmark(rel, emb2, tags, ns=[1], modes=("none", "pos"))
    assert none_result.accuracy(1, "pos") >= none_result.accuracy(1, "none")
    assert none_result.accuracy(1, "pos") == 1.0


def test_benchmark_counts_missing_vector_as_error():
    emb, rel, left, right = matched_offset_relation(n_pairs=3)
    pairs = rel.pairs + [("phantom", right[0])]
    bigger = RelationSet(name="aug", pairs=pairs)
    result = analogy_benchmark(bigger, emb, None, ns=[1], modes=("none",))
    assert result.query_errors > 0
    assert all(row.total == len(pairs) * (len(pairs) - 1) for row in result.rows)


def test_benchmark_deterministic():
    emb, rel, left, right = matched_offset_relation(n_pairs=5)
    tags = grid_tags(left, right)
    a = analogy_benchmark(rel, emb, tags, ns=[1, 3])
    b = analogy_benchmark(rel, emb, tags, ns=[1, 3])
    assert a.rows == b.rows
