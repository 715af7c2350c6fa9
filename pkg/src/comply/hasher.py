"""k-winner-take-all binary hash codes over trained models.

A hash sets the bits of the k highest-scoring neurons, with ties at the
boundary always resolved toward the lower neuron index so that hashes are
deterministic and goldens stay stable. Three scorers exist: the additive
complex score (magnitude + phase sums), its multiplicative variant, and
the real bag-of-words dot product. No frequency normalization is applied
at hash time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import energy as en
from .errors import ModeMismatchError
from .model import ComplexWeights, WeightMode


@dataclass(frozen=True)
class HashCode:
    """K-bit binary vector with exactly k set bits."""

    bits: np.ndarray  # uint8, shape (K,)
    k: int

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        object.__setattr__(self, "bits", bits)
        if bits.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if int(bits.sum()) != self.k:
            raise ValueError(f"hash must have exactly {self.k} set bits")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HashCode)
            and self.k == other.k
            and np.array_equal(self.bits, other.bits)
        )

    def set_indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def to_hex(self) -> str:
        """Hex encoding, MSB of the first digit = neuron 0, nibble-padded."""
        n_nibbles = -(-len(self.bits) // 4)
        packed = np.packbits(self.bits)
        return packed.tobytes().hex()[:n_nibbles]


def top_k_bits(scores: np.ndarray, k: int) -> HashCode:
    """Bits of the k best scores; boundary ties go to lower indices."""
    scores = np.asarray(scores, dtype=np.float64)
    if not 1 <= k <= scores.shape[0]:
        raise ValueError(f"hash length {k} outside [1, {scores.shape[0]}]")
    winners = np.argsort(-scores, kind="stable")[:k]
    bits = np.zeros(scores.shape[0], dtype=np.uint8)
    bits[winners] = 1
    return HashCode(bits=bits, k=k)


def _require_complex(weights: ComplexWeights) -> None:
    if weights.mode != WeightMode.COMPLEX:
        raise ModeMismatchError("hash variant requires a complex-mode model")


def comply_hash(
    weights: ComplexWeights, sentence: en.PhasedSentence, k: int
) -> HashCode:
    """Additive score: magnitude_sum + phase_sum per neuron."""
    _require_complex(weights)
    r, aphi = en.activation_terms(weights, sentence)
    return top_k_bits(r.sum(axis=1) + aphi.sum(axis=1), k)


def complym_hash(
    weights: ComplexWeights,
    sentence: en.PhasedSentence,
    k: int,
    composition: str = "per_position",
) -> HashCode:
    """Multiplicative score.

    ``per_position`` (default) multiplies magnitude and absolute phase at
    each position and sums over positions; ``aggregate`` multiplies the
    two position sums instead.
    """
    _require_complex(weights)
    r, aphi = en.activation_terms(weights, sentence)
    if composition == "per_position":
        scores = (r * aphi).sum(axis=1)
    elif composition == "aggregate":
        scores = r.sum(axis=1) * aphi.sum(axis=1)
    else:
        raise ValueError(f"unknown composition {composition!r}")
    return top_k_bits(scores, k)


def flyvec_hash(
    weights: ComplexWeights, window: en.BagOfWordsWindow, k: int
) -> HashCode:
    """Real-mode score: plain dot product with the stacked input vector."""
    if weights.mode != WeightMode.REAL_FLYVEC:
        raise ModeMismatchError("flyvec hashing requires a real-mode model")
    v = window.dense_vector(weights.vocab_size)
    return top_k_bits(weights.re.astype(np.float64) @ v, k)


def hash_cosine(h1: HashCode, h2: HashCode) -> float:
    """Cosine similarity of two binary codes: overlap / sqrt(k1 * k2)."""
    if len(h1.bits) != len(h2.bits):
        raise ValueError("hash lengths differ")
    overlap = int(np.sum(h1.bits & h2.bits))
    return overlap / float(np.sqrt(h1.k * h2.k))


def format_hash_line(index: int, code: HashCode) -> str:
    """Dump format: <input-index> TAB <k> TAB <hex bitset, MSB = neuron 0>."""
    return f"{index}\t{code.k}\t{code.to_hex()}"
