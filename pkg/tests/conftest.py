import pytest

from subspace_kb import TrainConfig, build_vocabulary, count_cooccurrences, train_sn

from ._synth import topic_corpus_text


@pytest.fixture(scope="session")
def desk_scale_setup(tmp_path_factory):
    """A >=1M-token topical corpus with trained d=50 base vectors."""
    tmp = tmp_path_factory.mktemp("desk")
    text, groups = topic_corpus_text(n_tokens=1_200_000, seed=7)
    corpus = tmp / "corpus.txt"
    corpus.write_text(text)
    vocab = build_vocabulary(corpus, 1000)
    matrix = count_cooccurrences(corpus, vocab, 10)
    emb = train_sn(
        matrix, TrainConfig(d=50, lr=0.05, epochs=20, seed=5), words=vocab.words
    )
    return {
        "dir": tmp,
        "corpus": corpus,
        "text": text,
        "groups": groups,
        "vocab": vocab,
        "matrix": matrix,
        "emb": emb,
    }
