"""Vocabulary construction, persistence, and sentence encoding.

The vocabulary assigns dense integer ids to surface tokens and keeps the
corpus frequency of every token; the frequencies act as the normalization
table used by the training energy. Tokenization is deliberately minimal
and deterministic: lowercase, strip a fixed set of punctuation characters,
split on whitespace.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EncodingError, VocabError

# Characters removed before whitespace splitting.
_PUNCT = '.,;:!?"()[]'
_PUNCT_TABLE = str.maketrans("", "", _PUNCT)

VOCAB_HEADER_PREFIX = "#vocab v1"


def tokenize(text: str) -> list[str]:
    """Lowercase, strip punctuation, split on whitespace."""
    return text.lower().translate(_PUNCT_TABLE).split()


@dataclass(frozen=True)
class Vocabulary:
    """Dense token<->id maps plus corpus frequency counts.

    ``tokens[i]`` has id ``i``; ``frequency[i]`` is its corpus count.
    Immutable after construction, so instances are safe to share across
    threads.
    """

    tokens: tuple[str, ...]
    frequency: np.ndarray  # int64, shape (len(tokens),)
    id_of: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.tokens) == 0:
            raise VocabError("vocabulary must contain at least one token")
        if len(self.tokens) != len(set(self.tokens)):
            raise VocabError("duplicate tokens in vocabulary")
        freq = np.asarray(self.frequency, dtype=np.int64)
        if freq.shape != (len(self.tokens),):
            raise VocabError("frequency table does not match token count")
        if (freq < 0).any():
            raise VocabError("negative frequency")
        object.__setattr__(self, "frequency", freq)
        object.__setattr__(
            self, "id_of", {tok: i for i, tok in enumerate(self.tokens)}
        )

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Vocabulary)
            and self.tokens == other.tokens
            and np.array_equal(self.frequency, other.frequency)
        )

    def safe_frequency(self) -> np.ndarray:
        """Frequencies as float64 with zeros lifted to one.

        The table only ever appears as a divisor, so ids that were seeded
        but never observed must not produce a division by zero.
        """
        return np.maximum(self.frequency, 1).astype(np.float64)

    def checksum(self) -> bytes:
        """SHA-256 over the canonical file serialization (32 bytes)."""
        return hashlib.sha256(serialize_vocab(self).encode("utf-8")).digest()


@dataclass(frozen=True)
class TokenSeq:
    """Encoded sentence: an ordered, non-empty sequence of token ids."""

    ids: tuple[int, ...]

    def __post_init__(self):
        if len(self.ids) == 0:
            raise EncodingError("token sequence must be non-empty")

    def __len__(self) -> int:
        return len(self.ids)


def build_vocab_from_lines(lines, max_size: int) -> Vocabulary:
    """Vocabulary from an iterable of sentences (see build_vocab)."""
    if max_size < 1:
        raise VocabError("max_size must be positive")
    counts: Counter[str] = Counter()
    first_seen: dict[str, int] = {}
    pos = 0
    for line in lines:
        for tok in tokenize(line):
            counts[tok] += 1
            if tok not in first_seen:
                first_seen[tok] = pos
            pos += 1
    if not counts:
        raise VocabError("corpus contains no tokens")
    kept = sorted(counts, key=lambda t: (-counts[t], first_seen[t]))[:max_size]
    return Vocabulary(
        tokens=tuple(kept),
        frequency=np.array([counts[t] for t in kept], dtype=np.int64),
    )


def build_vocab(corpus_path: str | Path, max_size: int) -> Vocabulary:
    """Build a vocabulary from a one-sentence-per-line UTF-8 corpus.

    Keeps at most ``max_size`` tokens by descending corpus frequency,
    ties broken by first occurrence in the corpus. Frequencies reflect
    the whole corpus, including occurrences beyond the size cap.
    """
    path = Path(corpus_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise VocabError(f"cannot read corpus {path}: {exc}") from exc
    try:
        return build_vocab_from_lines(text.splitlines(), max_size)
    except VocabError as exc:
        raise VocabError(f"{path}: {exc}") from exc


def vocab_from_tokens(tokens, frequency=None) -> Vocabulary:
    """Vocabulary from an explicit token list, seeding absent counts with 1."""
    tokens = tuple(tokens)
    if frequency is None:
        frequency = np.ones(len(tokens), dtype=np.int64)
    return Vocabulary(tokens=tokens, frequency=frequency)


def encode_sentence(vocab: Vocabulary, text: str, max_len: int) -> TokenSeq:
    """Encode a sentence, dropping out-of-vocabulary tokens.

    Raises EncodingError when no in-vocabulary token remains. The result
    is truncated to ``max_len`` ids.
    """
    if max_len < 1:
        raise EncodingError("max_len must be positive")
    ids = [vocab.id_of[t] for t in tokenize(text) if t in vocab.id_of]
    if not ids:
        raise EncodingError(f"no in-vocabulary token in sentence: {text!r}")
    return TokenSeq(ids=tuple(ids[:max_len]))


def serialize_vocab(vocab: Vocabulary) -> str:
    lines = [f"{VOCAB_HEADER_PREFIX} {len(vocab)}"]
    for i, tok in enumerate(vocab.tokens):
        lines.append(f"{tok}\t{i}\t{int(vocab.frequency[i])}")
    return "\n".join(lines) + "\n"


def save_vocab(vocab: Vocabulary, path: str | Path) -> None:
    """Write the TSV vocabulary file (header, then token<TAB>id<TAB>freq)."""
    Path(path).write_text(serialize_vocab(vocab), encoding="utf-8")


def load_vocab(path: str | Path) -> Vocabulary:
    """Parse a vocabulary file, validating density and uniqueness of ids."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise VocabError(f"cannot read vocabulary {path}: {exc}") from exc
    if not lines or not lines[0].startswith(VOCAB_HEADER_PREFIX):
        raise VocabError(f"{path}: missing '{VOCAB_HEADER_PREFIX}' header")
    try:
        declared = int(lines[0][len(VOCAB_HEADER_PREFIX):].strip())
    except ValueError as exc:
        raise VocabError(f"{path}: malformed header {lines[0]!r}") from exc

    tokens: list[str] = []
    freqs: list[int] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise VocabError(f"{path}:{lineno}: expected 3 tab-separated fields")
        tok, id_str, freq_str = parts
        try:
            tok_id, freq = int(id_str), int(freq_str)
        except ValueError as exc:
            raise VocabError(f"{path}:{lineno}: non-integer id/frequency") from exc
        if tok in seen:
            raise VocabError(f"{path}:{lineno}: duplicate token {tok!r}")
        if tok_id != len(tokens):
            raise VocabError(
                f"{path}:{lineno}: ids must be dense and ascending "
                f"(got {tok_id}, expected {len(tokens)})"
            )
        if freq < 0:
            raise VocabError(f"{path}:{lineno}: negative frequency")
        seen.add(tok)
        tokens.append(tok)
        freqs.append(freq)
    if len(tokens) != declared:
        raise VocabError(
            f"{path}: header declares {declared} tokens, file has {len(tokens)}"
        )
    return Vocabulary(tokens=tuple(tokens), frequency=np.array(freqs, dtype=np.int64))


def read_corpus_ids(
    corpus_path: str | Path, vocab: Vocabulary, max_len: int, pretokenized: bool = False
) -> list[TokenSeq]:
    """Read a corpus into encoded sentences, skipping unencodable lines.

    With ``pretokenized=True`` each line is a space-separated id sequence
    (for parity with external tokenizers); ids must lie in [0, len(vocab)).
    """
    path = Path(corpus_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise VocabError(f"cannot read corpus {path}: {exc}") from exc

    sentences: list[TokenSeq] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if pretokenized:
            try:
                ids = [int(tok) for tok in line.split()]
            except ValueError as exc:
                raise VocabError(f"{path}:{lineno}: non-integer token id") from exc
            bad = [i for i in ids if not 0 <= i < len(vocab)]
            if bad:
                raise VocabError(f"{path}:{lineno}: token id {bad[0]} out of range")
            sentences.append(TokenSeq(ids=tuple(ids[:max_len])))
        else:
            try:
                sentences.append(encode_sentence(vocab, line, max_len))
            except EncodingError:
                continue
    if not sentences:
        raise VocabError(f"corpus {path} yields no encodable sentences")
    return sentences
