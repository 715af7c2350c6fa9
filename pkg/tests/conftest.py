import time
from dataclasses import dataclass

import numpy as np
import pytest

from comply.evaluation import StsDataset
from comply.model import ComplexWeights, WeightMode, init_weights
from comply.toy import run_toy
from comply.trainer import TrainConfig, train
from comply.vocab import Vocabulary, build_vocab_from_lines, encode_sentence


@pytest.fixture(scope="session")
def toy_result():
    """The deterministic two-sequence demonstration, trained once."""
    return run_toy()


def make_desk_setup(seed=42):
    """Synthetic order-sensitive corpus: 20 templates plus reversals.

    200 sentences (5 copies of each of the 40 sequence types) over 160
    tokens, plus a similarity fixture whose gold scores mark reversed
    pairs as dissimilar.
    """
    rng = np.random.default_rng(seed)
    n_templates, t_len = 20, 8
    tokens = [f"w{i:03d}" for i in range(n_templates * t_len)]
    templates = []
    for i in range(n_templates):
        block = tokens[i * t_len : (i + 1) * t_len]
        templates.append([str(t) for t in rng.permutation(block)])

    types = [" ".join(t) for t in templates]
    types += [" ".join(reversed(t)) for t in templates]
    corpus = [types[i % len(types)] for i in range(200)]
    corpus = [corpus[i] for i in rng.permutation(200)]

    pairs = []
    for i in range(n_templates):
        fwd = " ".join(templates[i])
        rev = " ".join(reversed(templates[i]))
        other = " ".join(templates[(i + 1) % n_templates])
        pairs.append((fwd, fwd, 5.0))
        pairs.append((fwd, rev, 0.0))
        pairs.append((fwd, other, 0.0))
    return corpus, templates, StsDataset(pairs=tuple(pairs))


@pytest.fixture(scope="session")
def desk_setup():
    return make_desk_setup()


@dataclass
class DeskModels:
    vocab: Vocabulary
    comply: ComplexWeights
    flyvec: ComplexWeights
    comply_seconds: float
    flyvec_seconds: float

    def __iter__(self):  # allow `vocab, comply, flyvec = desk_models`
        return iter((self.vocab, self.comply, self.flyvec))


@pytest.fixture(scope="session")
def desk_models(desk_setup):
    """Complex model and real baseline trained on the synthetic corpus."""
    corpus, _, _ = desk_setup
    vocab = build_vocab_from_lines(corpus, 1000)
    sentences = [encode_sentence(vocab, line, 64) for line in corpus]

    config_c = TrainConfig(epochs=10, lr0=0.05, batch_size=8, seed=3, optimizer="sgd")
    weights_c = init_weights(40, len(vocab), WeightMode.COMPLEX, 3)
    t0 = time.perf_counter()
    weights_c, _ = train(sentences, vocab, config_c, weights_c)
    t_c = time.perf_counter() - t0

    config_f = TrainConfig(
        epochs=10, lr0=0.05, batch_size=8, seed=3, optimizer="sgd", window=5
    )
    weights_f = init_weights(40, len(vocab), WeightMode.REAL_FLYVEC, 3)
    t0 = time.perf_counter()
    weights_f, _ = train(sentences, vocab, config_f, weights_f)
    t_f = time.perf_counter() - t0

    return DeskModels(
        vocab=vocab,
        comply=weights_c,
        flyvec=weights_f,
        comply_seconds=t_c,
        flyvec_seconds=t_f,
    )
