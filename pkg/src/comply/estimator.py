"""Scikit-learn style front end: fit on raw sentences, transform to hashes.

The vectorizer wires vocabulary construction, energy-based training, and
k-WTA hashing into the usual fit/transform shape so the model drops into
sklearn pipelines; parameters are reachable through get_params/set_params
for grid search and cloning.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import energy as en
from . import hasher
from .errors import EncodingError
from .model import WeightMode, init_weights
from .trainer import TrainConfig, train
from .vocab import build_vocab_from_lines, encode_sentence


def _check_sentences(X) -> list[str]:
    """Validate an iterable of raw sentences, materializing it as a list."""
    if isinstance(X, str):
        raise ValueError("X must be an iterable of sentences, not a single string")
    sentences = list(X)
    if not sentences:
        raise ValueError("X must contain at least one sentence")
    for i, s in enumerate(sentences):
        if not isinstance(s, str):
            raise ValueError(f"X[{i}] is {type(s).__name__}, expected str")
    return sentences


class ComplyVectorizer(TransformerMixin, BaseEstimator):
    """Learn sentence hash codes with a winner-take-all energy model.

    Parameters
    ----------
    n_neurons : int, default=400
        Number of output neurons (rows of the weight matrix, hash width).
    hash_len : int, default=32
        Number of set bits in each produced hash code.
    mode : {"comply", "flyvec"}, default="comply"
        "comply" trains complex weights on phase-encoded sentences;
        "flyvec" trains the real bag-of-words baseline on sliding windows.
    hash_variant : {"comply", "complym", "flyvec"} or None, default=None
        Scoring rule used by transform; defaults to the rule matching
        ``mode``.
    epochs : int, default=15
        Training epochs; the learning rate anneals linearly to zero over
        this horizon.
    lr0 : float, default=4e-4
        Initial learning rate.
    batch_size : int, default=256
    window : int or None, default=5
        Sliding-window length (flyvec mode only).
    max_vocab : int, default=20000
        Vocabulary size cap, most frequent tokens kept.
    max_sentence_len : int, default=64
    optimizer : {"adam", "sgd"}, default="adam"
    seed : int, default=0
        Single source of randomness (init and epoch shuffling).

    Attributes
    ----------
    vocabulary_ : Vocabulary
        Token/id/frequency table built from the fit corpus.
    weights_ : ComplexWeights
        Trained parameter matrix.
    trace_ : TrainTrace
        Per-epoch energy record of the fit.
    """

    def __init__(
        self,
        n_neurons=400,
        hash_len=32,
        mode="comply",
        hash_variant=None,
        epochs=15,
        lr0=4e-4,
        batch_size=256,
        window=5,
        max_vocab=20000,
        max_sentence_len=64,
        optimizer="adam",
        seed=0,
    ):
        self.n_neurons = n_neurons
        self.hash_len = hash_len
        self.mode = mode
        self.hash_variant = hash_variant
        self.epochs = epochs
        self.lr0 = lr0
        self.batch_size = batch_size
        self.window = window
        self.max_vocab = max_vocab
        self.max_sentence_len = max_sentence_len
        self.optimizer = optimizer
        self.seed = seed

    def _weight_mode(self) -> WeightMode:
        if self.mode == "comply":
            return WeightMode.COMPLEX
        if self.mode == "flyvec":
            return WeightMode.REAL_FLYVEC
        raise ValueError(f"mode must be 'comply' or 'flyvec', got {self.mode!r}")

    def _variant(self) -> str:
        if self.hash_variant is not None:
            return self.hash_variant
        return "flyvec" if self.mode == "flyvec" else "comply"

    def fit(self, X, y=None):
        """Build the vocabulary from X and train the weights on it."""
        sentences = _check_sentences(X)
        mode = self._weight_mode()
        if not 1 <= self.hash_len <= self.n_neurons:
            raise ValueError("hash_len must lie in [1, n_neurons]")
        self.vocabulary_ = build_vocab_from_lines(sentences, self.max_vocab)
        encoded = []
        for s in sentences:
            try:
                encoded.append(
                    encode_sentence(self.vocabulary_, s, self.max_sentence_len)
                )
            except EncodingError:
                continue
        config = TrainConfig(
            epochs=self.epochs,
            lr0=self.lr0,
            batch_size=self.batch_size,
            window=self.window if mode == WeightMode.REAL_FLYVEC else None,
            max_sentence_len=self.max_sentence_len,
            seed=self.seed,
            optimizer=self.optimizer,
        )
        weights = init_weights(self.n_neurons, len(self.vocabulary_), mode, self.seed)
        self.weights_, self.trace_ = train(encoded, self.vocabulary_, config, weights)
        return self

    def transform(self, X) -> np.ndarray:
        """Hash sentences into an (n_samples, n_neurons) binary uint8 array.

        Every row has exactly ``hash_len`` set bits. Raises EncodingError
        for a sentence with no in-vocabulary token.
        """
        check_is_fitted(self, "weights_")
        sentences = _check_sentences(X)
        variant = self._variant()
        out = np.zeros((len(sentences), self.n_neurons), dtype=np.uint8)
        for i, text in enumerate(sentences):
            seq = encode_sentence(self.vocabulary_, text, self.max_sentence_len)
            if variant == "flyvec":
                code = hasher.flyvec_hash(
                    self.weights_, en.sentence_bag(seq.ids), self.hash_len
                )
            else:
                sent = en.PhasedSentence.from_tokenseq(seq)
                if variant == "comply":
                    code = hasher.comply_hash(self.weights_, sent, self.hash_len)
                else:
                    code = hasher.complym_hash(self.weights_, sent, self.hash_len)
            out[i] = code.bits
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "weights_")
        return np.array([f"neuron_{i}" for i in range(self.n_neurons)], dtype=object)
