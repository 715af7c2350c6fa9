"""Phased sentence encoding, neuron activations, energies, and gradients.

A sentence of length L enters the network as one-hot word vectors rotated
by unit phases exp(i*pi*l/L), l = 0..L-1, so every input phase lies in the
upper half-plane [0, pi). Because each position is one-hot, the Hermitian
inner product of a neuron row with position l collapses to a single
complex number

    w[s_l] * exp(-i*pi*l/L)

and every quantity below is built from its magnitude |w[s_l]| and its
argument. Arg(0) is taken to be 0, so tokens with zero weight contribute
to neither the magnitude nor the phase sums.

All arithmetic runs in float64 regardless of the float32 storage of the
weights. The gradient here is hand-derived; at points where the energy is
not differentiable (zero weight, phase difference of exactly 0 or +-pi)
the offending term contributes a zero subgradient.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .model import NORM_EPS, ComplexWeights, WeightMode
from .errors import ModeMismatchError
from .vocab import TokenSeq


def position_angles(length: int) -> np.ndarray:
    """Input phase angles pi*l/L for l = 0..L-1, all inside [0, pi)."""
    if length < 1:
        raise ValueError("sentence length must be positive")
    return np.pi * np.arange(length, dtype=np.float64) / length


def phase_for_position(position: int, length: int) -> complex:
    """Unit phase exp(i*pi*l/L) attached to position l of an L-word sentence."""
    if not 0 <= position < length:
        raise ValueError(f"position {position} outside [0, {length})")
    angle = np.pi * position / length
    return complex(np.cos(angle), np.sin(angle))


@dataclass(frozen=True)
class PhasedSentence:
    """Token ids with their per-position unit phases."""

    ids: tuple[int, ...]
    angles: np.ndarray  # float64, shape (L,)

    @classmethod
    def from_ids(cls, ids) -> "PhasedSentence":
        ids = tuple(int(i) for i in ids)
        return cls(ids=ids, angles=position_angles(len(ids)))

    @classmethod
    def from_tokenseq(cls, seq: TokenSeq) -> "PhasedSentence":
        return cls.from_ids(seq.ids)

    def __len__(self) -> int:
        return len(self.ids)

    @cached_property
    def phases(self) -> np.ndarray:
        """The L unit complex numbers exp(i * angles)."""
        return np.exp(1j * self.angles)


@dataclass(frozen=True)
class ActivationBreakdown:
    """The two differently-scaled summands of a neuron's activation.

    magnitude_sum is unbounded above; phase_sum lies in [0, L*pi]. The
    selection score is their plain sum.
    """

    magnitude_sum: float
    phase_sum: float

    @property
    def score(self) -> float:
        return self.magnitude_sum + self.phase_sum


@dataclass(frozen=True)
class BagOfWordsWindow:
    """Sparse bag-of-words input: context counts plus an optional target.

    Training windows carry exactly one target word; whole-sentence bags
    (used for hashing) leave the target block empty.
    """

    context_ids: tuple[int, ...]
    context_counts: tuple[int, ...]
    target_id: int | None = None
    window: int | None = None

    def dense_vector(self, vocab_size: int) -> np.ndarray:
        """Stacked (context block, target block) vector of length 2*Nvoc."""
        v = np.zeros(2 * vocab_size, dtype=np.float64)
        for i, c in zip(self.context_ids, self.context_counts):
            v[i] = c
        if self.target_id is not None:
            v[vocab_size + self.target_id] = 1.0
        return v


def sentence_bag(ids) -> BagOfWordsWindow:
    """Whole-sentence bag: token counts in the context block, no target."""
    uniq, counts = np.unique(np.asarray(ids, dtype=np.int64), return_counts=True)
    return BagOfWordsWindow(
        context_ids=tuple(int(i) for i in uniq),
        context_counts=tuple(int(c) for c in counts),
    )


def activation_terms(
    weights: ComplexWeights, sentence: PhasedSentence
) -> tuple[np.ndarray, np.ndarray]:
    """Per-neuron, per-position magnitudes and absolute phase differences.

    Returns (K, L) float64 arrays (r, aphi): r[mu, l] is the magnitude of
    the neuron-position product and aphi[mu, l] the absolute value of its
    argument, already wrapped to [0, pi].
    """
    ids = np.asarray(sentence.ids, dtype=np.int64)
    if ids.min() < 0 or ids.max() >= weights.n_columns:
        raise ValueError("token id out of range for this weight matrix")
    a = weights.re[:, ids].astype(np.float64)
    b = weights.im[:, ids].astype(np.float64)
    cos_a = np.cos(sentence.angles)
    sin_a = np.sin(sentence.angles)
    # w * exp(-i*alpha): rotate each column by its position angle.
    rot_re = a * cos_a + b * sin_a
    rot_im = b * cos_a - a * sin_a
    r = np.hypot(a, b)
    aphi = np.abs(np.arctan2(rot_im, rot_re))
    return r, aphi


def neuron_activation(
    weights: ComplexWeights, neuron: int, sentence: PhasedSentence
) -> ActivationBreakdown:
    """Magnitude and phase sums of a single neuron for one sentence."""
    if not 0 <= neuron < weights.n_neurons:
        raise ValueError(f"neuron index {neuron} out of range")
    r, aphi = _row_terms(weights, neuron, sentence)
    return ActivationBreakdown(
        magnitude_sum=float(r.sum()), phase_sum=float(aphi.sum())
    )


def _row_terms(weights, neuron, sentence):
    ids = np.asarray(sentence.ids, dtype=np.int64)
    if ids.min() < 0 or ids.max() >= weights.n_columns:
        raise ValueError("token id out of range for this weight matrix")
    a = weights.re[neuron, ids].astype(np.float64)
    b = weights.im[neuron, ids].astype(np.float64)
    cos_a = np.cos(sentence.angles)
    sin_a = np.sin(sentence.angles)
    rot_re = a * cos_a + b * sin_a
    rot_im = b * cos_a - a * sin_a
    return np.hypot(a, b), np.abs(np.arctan2(rot_im, rot_re))


def select_winner(weights: ComplexWeights, sentence: PhasedSentence) -> int:
    """Index of the maximally activated neuron; ties go to the lowest index.

    The selection score is magnitude_sum + phase_sum with no frequency
    normalization (the frequency table enters the energy only).
    """
    r, aphi = activation_terms(weights, sentence)
    return int(np.argmax(r.sum(axis=1) + aphi.sum(axis=1)))


def _signed_row_terms(weights, neuron, sentence):
    """(r, phi) with phi signed in (-pi, pi], for the gradient."""
    ids = np.asarray(sentence.ids, dtype=np.int64)
    a = weights.re[neuron, ids].astype(np.float64)
    b = weights.im[neuron, ids].astype(np.float64)
    cos_a = np.cos(sentence.angles)
    sin_a = np.sin(sentence.angles)
    rot_re = a * cos_a + b * sin_a
    rot_im = b * cos_a - a * sin_a
    return np.hypot(a, b), np.arctan2(rot_im, rot_re)


def _row_norm(weights, neuron):
    a = weights.re[neuron].astype(np.float64)
    b = weights.im[neuron].astype(np.float64)
    return max(float(np.sqrt(np.dot(a, a) + np.dot(b, b))), NORM_EPS)


def sample_energy(
    weights: ComplexWeights,
    sentence: PhasedSentence,
    freq: np.ndarray,
    winner: int | None = None,
) -> float:
    """Per-sample energy at the winning neuron.

        -( sum_l |<w, z_l>| / p[s_l] / ||w||  +  sum_l |Arg <w, z_l>| )

    The winner is chosen without frequency normalization; pass ``winner``
    to hold the neuron fixed (the argmax is treated as piecewise constant).
    """
    if winner is None:
        winner = select_winner(weights, sentence)
    r, aphi = _row_terms(weights, winner, sentence)
    ids = np.asarray(sentence.ids, dtype=np.int64)
    p = np.maximum(np.asarray(freq, dtype=np.float64)[ids], 1.0)
    norm = _row_norm(weights, winner)
    return float(-((r / p).sum() / norm + aphi.sum()))


@dataclass(frozen=True)
class RowGradient:
    """Energy gradient restricted to the winning row.

    d_re/d_im cover every column of the row: entries touched by the
    sentence carry magnitude and phase contributions, all others only the
    norm-denominator contribution. d_im is None for real-mode weights.
    """

    row: int
    d_re: np.ndarray
    d_im: np.ndarray | None


def energy_gradient(
    weights: ComplexWeights,
    sentence: PhasedSentence,
    freq: np.ndarray,
    winner: int | None = None,
) -> RowGradient:
    """Analytic gradient of sample_energy w.r.t. the winning row.

    No gradient flows through the winner selection. Terms sitting exactly
    at a non-differentiable point (zero weight, phase difference 0 or
    +-pi) contribute zero.
    """
    if winner is None:
        winner = select_winner(weights, sentence)
    ids = np.asarray(sentence.ids, dtype=np.int64)
    a_row = weights.re[winner].astype(np.float64)
    b_row = weights.im[winner].astype(np.float64)
    r, phi = _signed_row_terms(weights, winner, sentence)
    p = np.maximum(np.asarray(freq, dtype=np.float64)[ids], 1.0)

    norm_true = float(np.sqrt(np.dot(a_row, a_row) + np.dot(b_row, b_row)))
    norm = max(norm_true, NORM_EPS)
    mag_over_p = float((r / p).sum())

    # Per-entry accumulators: inverse-frequency mass and net phase sign.
    n_cols = weights.n_columns
    inv_p_sum = np.zeros(n_cols, dtype=np.float64)
    np.add.at(inv_p_sum, ids, 1.0 / p)
    sign = np.sign(phi)
    sign[np.abs(phi) >= np.pi] = 0.0  # wrap boundary: zero subgradient
    sign[r == 0.0] = 0.0
    sign_sum = np.zeros(n_cols, dtype=np.float64)
    np.add.at(sign_sum, ids, sign)

    # Norm-denominator contribution applies to every entry of the row
    # (vanishes when the epsilon guard clamps the norm).
    if norm_true > NORM_EPS:
        d_re = (mag_over_p / norm**3) * a_row
        d_im = (mag_over_p / norm**3) * b_row
    else:
        d_re = np.zeros(n_cols, dtype=np.float64)
        d_im = np.zeros(n_cols, dtype=np.float64)

    touched = np.unique(ids)
    r_entry = np.hypot(a_row[touched], b_row[touched])
    nz = r_entry > 0.0
    t = touched[nz]
    rt = r_entry[nz]
    d_re[t] += -inv_p_sum[t] * a_row[t] / (rt * norm) + sign_sum[t] * b_row[t] / rt**2
    d_im[t] += -inv_p_sum[t] * b_row[t] / (rt * norm) - sign_sum[t] * a_row[t] / rt**2

    if weights.mode == WeightMode.REAL_FLYVEC:
        return RowGradient(row=winner, d_re=d_re, d_im=None)
    return RowGradient(row=winner, d_re=d_re, d_im=d_im)


# Real (bag-of-words) mode -------------------------------------------------


def _require_real_mode(weights: ComplexWeights) -> None:
    if weights.mode != WeightMode.REAL_FLYVEC:
        raise ModeMismatchError("operation requires a real-mode weight matrix")


def _window_freq(window: BagOfWordsWindow, vocab_size: int, freq) -> np.ndarray:
    """Per-component frequency divisor for the stacked 2*Nvoc vector."""
    p = np.maximum(np.asarray(freq, dtype=np.float64), 1.0)
    return np.concatenate([p, p])[: 2 * vocab_size]


def flyvec_select_winner(weights: ComplexWeights, window: BagOfWordsWindow) -> int:
    """Argmax of the plain dot product with the stacked input vector."""
    _require_real_mode(weights)
    v = window.dense_vector(weights.vocab_size)
    scores = weights.re.astype(np.float64) @ v
    return int(np.argmax(scores))


def flyvec_sample_energy(
    weights: ComplexWeights,
    window: BagOfWordsWindow,
    freq: np.ndarray,
    winner: int | None = None,
) -> float:
    """Bag-of-words energy -<w, v/p> / ||w|| at the winning neuron."""
    _require_real_mode(weights)
    if winner is None:
        winner = flyvec_select_winner(weights, window)
    v = window.dense_vector(weights.vocab_size)
    u = v / _window_freq(window, weights.vocab_size, freq)
    w = weights.re[winner].astype(np.float64)
    norm = max(float(np.linalg.norm(w)), NORM_EPS)
    return float(-(w @ u) / norm)


def flyvec_energy_gradient(
    weights: ComplexWeights,
    window: BagOfWordsWindow,
    freq: np.ndarray,
    winner: int | None = None,
) -> RowGradient:
    _require_real_mode(weights)
    if winner is None:
        winner = flyvec_select_winner(weights, window)
    v = window.dense_vector(weights.vocab_size)
    u = v / _window_freq(window, weights.vocab_size, freq)
    w = weights.re[winner].astype(np.float64)
    norm_true = float(np.linalg.norm(w))
    norm = max(norm_true, NORM_EPS)
    s = float(w @ u)
    d_re = -u / norm
    if norm_true > NORM_EPS:
        d_re += (s / norm**3) * w
    return RowGradient(row=winner, d_re=d_re, d_im=None)
