import numpy as np
import pytest

from comply.errors import EncodingError, VocabError
from comply.vocab import (
    TokenSeq,
    Vocabulary,
    build_vocab,
    build_vocab_from_lines,
    encode_sentence,
    load_vocab,
    read_corpus_ids,
    save_vocab,
    tokenize,
    vocab_from_tokens,
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_build_vocab_counts_and_order(tmp_path):
    # hand count over the 5-token corpus: a appears 3 times, b and c once
    path = write(tmp_path, "c.txt", "a b a\nc a\n")
    v = build_vocab(path, max_size=10)
    assert v.tokens == ("a", "b", "c")
    assert v.id_of["a"] == 0
    assert list(v.frequency) == [3, 1, 1]


def test_build_vocab_singleton(tmp_path):
    v = build_vocab(write(tmp_path, "c.txt", "x"), max_size=1)
    assert v.tokens == ("x",)
    assert v.frequency[0] == 1


def test_build_vocab_size_cap(tmp_path):
    v = build_vocab(write(tmp_path, "c.txt", "a b c"), max_size=2)
    assert len(v) == 2
    assert "c" not in v.id_of


def test_build_vocab_tie_break_first_occurrence(tmp_path):
    v = build_vocab(write(tmp_path, "c.txt", "b a b a"), max_size=2)
    assert v.tokens == ("b", "a")


def test_build_vocab_errors(tmp_path):
    with pytest.raises(VocabError):
        build_vocab(tmp_path / "missing.txt", max_size=5)
    with pytest.raises(VocabError):
        build_vocab(write(tmp_path, "e.txt", " .,! \n"), max_size=5)
    with pytest.raises(VocabError):
        build_vocab(write(tmp_path, "c.txt", "a"), max_size=0)


def test_tokenize_normalization():
    assert tokenize('Fly high, fly FREE!') == ["fly", "high", "fly", "free"]
    assert tokenize('a.b (c) [d]; "e":') == ["ab", "c", "d", "e"]
    assert tokenize("") == []


def test_encode_sentence_basic():
    v = vocab_from_tokens(["a", "b"])
    assert encode_sentence(v, "a b a", 64).ids == (0, 1, 0)


def test_encode_sentence_all_oov():
    v = vocab_from_tokens(["a"])
    with pytest.raises(EncodingError):
        encode_sentence(v, "z z z", 64)


def test_encode_sentence_truncates():
    v = vocab_from_tokens(["a", "b"])
    assert encode_sentence(v, "a b a b", 3).ids == (0, 1, 0)


def test_encode_sentence_drops_oov_inline():
    v = vocab_from_tokens(["a", "b"])
    assert encode_sentence(v, "a zz b", 64).ids == (0, 1)


def test_encode_determinism():
    v = vocab_from_tokens(["a", "b", "c"])
    runs = {encode_sentence(v, "a c b a", 3).ids for _ in range(5)}
    assert runs == {(0, 2, 1)}


def test_tokenseq_rejects_empty():
    with pytest.raises(EncodingError):
        TokenSeq(ids=())


def test_save_load_round_trip(tmp_path):
    v = vocab_from_tokens(["a", "b", "c"], np.array([7, 2, 1]))
    path = tmp_path / "v.tsv"
    save_vocab(v, path)
    assert load_vocab(path) == v


def test_load_vocab_duplicate_token(tmp_path):
    path = write(tmp_path, "v.tsv", "#vocab v1 2\na\t0\t3\na\t1\t2\n")
    with pytest.raises(VocabError):
        load_vocab(path)


def test_load_vocab_id_gap(tmp_path):
    path = write(tmp_path, "v.tsv", "#vocab v1 2\na\t0\t3\nb\t2\t2\n")
    with pytest.raises(VocabError):
        load_vocab(path)


def test_load_vocab_header_and_fields(tmp_path):
    with pytest.raises(VocabError):
        load_vocab(write(tmp_path, "v1.tsv", "a\t0\t3\n"))
    with pytest.raises(VocabError):
        load_vocab(write(tmp_path, "v2.tsv", "#vocab v1 1\na\t0\n"))
    with pytest.raises(VocabError):
        load_vocab(write(tmp_path, "v3.tsv", "#vocab v1 2\na\t0\t3\n"))


def test_frequency_conservation_random_corpora():
    rng = np.random.default_rng(0)
    alphabet = [f"t{i}" for i in range(12)]
    for trial in range(20):
        lines = [
            " ".join(rng.choice(alphabet, size=rng.integers(1, 9)))
            for _ in range(rng.integers(1, 15))
        ]
        cap = int(rng.integers(1, 14))
        v = build_vocab_from_lines(lines, cap)
        all_tokens = [t for line in lines for t in tokenize(line)]
        kept_occurrences = sum(1 for t in all_tokens if t in v.id_of)
        assert int(v.frequency.sum()) == kept_occurrences


def test_vocabulary_invariants():
    v = vocab_from_tokens(["x", "y"])
    assert all(v.id_of[v.tokens[i]] == i for i in range(len(v)))
    with pytest.raises(VocabError):
        Vocabulary(tokens=("a", "a"), frequency=np.array([1, 1]))
    with pytest.raises(VocabError):
        Vocabulary(tokens=(), frequency=np.array([], dtype=np.int64))


def test_safe_frequency_lifts_zeros():
    v = vocab_from_tokens(["a", "b"], np.array([0, 5]))
    assert list(v.safe_frequency()) == [1.0, 5.0]


def test_read_corpus_ids_text_mode(tmp_path):
    v = vocab_from_tokens(["a", "b"])
    path = write(tmp_path, "c.txt", "a b\nzz\nb a b\n")
    seqs = read_corpus_ids(path, v, max_len=64)
    assert [s.ids for s in seqs] == [(0, 1), (1, 0, 1)]


def test_read_corpus_ids_pretokenized(tmp_path):
    v = vocab_from_tokens(["a", "b", "c"])
    path = write(tmp_path, "c.ids", "0 2 1\n1 1\n")
    seqs = read_corpus_ids(path, v, max_len=64, pretokenized=True)
    assert [s.ids for s in seqs] == [(0, 2, 1), (1, 1)]
    bad = write(tmp_path, "bad.ids", "0 9\n")
    with pytest.raises(VocabError):
        read_corpus_ids(bad, v, max_len=64, pretokenized=True)
