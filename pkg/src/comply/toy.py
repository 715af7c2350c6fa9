"""Built-in miniature demonstration: two digit sequences, four neurons.

Trains a 4-neuron complex model with SGD on the sequences 1..9 and 9..1
and checks the qualitative outcome: each sequence is imprinted in its own
neuron, the two untouched neurons stay bitwise at their initialization,
the imprinted weight phases end up in the lower half-plane [-pi, 0), and
within each imprinted neuron the phases increase strictly along the
sequence. The run is fully deterministic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import energy as en
from .model import ComplexWeights, WeightMode, init_weights
from .trainer import TrainConfig, TrainTrace, train
from .vocab import TokenSeq, Vocabulary, vocab_from_tokens

TOY_NEURONS = 4
TOY_VOCAB = 10
TOY_SEED = 0
TOY_STEPS = 2000  # one optimizer step per epoch of the 2-sentence corpus
TOY_LR0 = 0.05

FORWARD = tuple(range(1, 10))
BACKWARD = tuple(range(9, 0, -1))


@dataclass(frozen=True)
class ToyCheck:
    name: str
    passed: bool
    detail: str


@dataclass
class ToyResult:
    checks: list[ToyCheck]
    vocab: Vocabulary
    init: ComplexWeights
    weights: ComplexWeights
    trace: TrainTrace
    winner_forward: int
    winner_backward: int
    seconds: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def toy_vocab() -> Vocabulary:
    """Digits 0..9; counts seeded at 1 and reflecting the two sequences."""
    freq = np.ones(TOY_VOCAB, dtype=np.int64)
    for seq in (FORWARD, BACKWARD):
        for t in seq:
            freq[t] += 1
    return vocab_from_tokens([str(d) for d in range(TOY_VOCAB)], freq)


def _phases(weights: ComplexWeights, row: int, tokens) -> np.ndarray:
    toks = np.asarray(tokens, dtype=np.int64)
    return np.arctan2(
        weights.im[row, toks].astype(np.float64),
        weights.re[row, toks].astype(np.float64),
    )


def run_toy(
    seed: int = TOY_SEED, steps: int = TOY_STEPS, lr0: float = TOY_LR0
) -> ToyResult:
    """Train the toy model and evaluate its qualitative checks."""
    if steps < 1 or steps > 5000:
        raise ValueError("steps must lie in [1, 5000]")
    vocab = toy_vocab()
    sentences = [TokenSeq(ids=FORWARD), TokenSeq(ids=BACKWARD)]
    config = TrainConfig(
        epochs=steps,
        lr0=lr0,
        batch_size=2,
        max_sentence_len=16,
        seed=seed,
        optimizer="sgd",
    )
    init = init_weights(TOY_NEURONS, TOY_VOCAB, WeightMode.COMPLEX, seed)
    t0 = time.perf_counter()
    weights, trace = train(sentences, vocab, config, init)
    seconds = time.perf_counter() - t0

    fwd = en.PhasedSentence.from_ids(FORWARD)
    bwd = en.PhasedSentence.from_ids(BACKWARD)
    win_f = en.select_winner(weights, fwd)
    win_b = en.select_winner(weights, bwd)

    changed = [
        mu
        for mu in range(TOY_NEURONS)
        if not (
            np.array_equal(weights.re[mu], init.re[mu])
            and np.array_equal(weights.im[mu], init.im[mu])
        )
    ]
    checks = [
        ToyCheck(
            "two_neurons_changed",
            len(changed) == 2,
            f"changed rows: {changed}",
        ),
        ToyCheck(
            "distinct_winners",
            win_f != win_b and sorted((win_f, win_b)) == changed,
            f"winners: forward={win_f}, backward={win_b}",
        ),
    ]

    for name, winner, seq in (
        ("forward", win_f, FORWARD),
        ("backward", win_b, BACKWARD),
    ):
        phases = _phases(weights, winner, seq)
        in_lower = bool(np.all((phases >= -np.pi) & (phases < 0.0)))
        monotone = bool(np.all(np.diff(phases) > 0.0))
        checks.append(
            ToyCheck(
                f"{name}_phases_in_lower_half_plane",
                in_lower,
                f"phases: {np.array2string(phases, precision=3)}",
            )
        )
        checks.append(
            ToyCheck(
                f"{name}_phases_strictly_increasing",
                monotone,
                f"diffs: {np.array2string(np.diff(phases), precision=3)}",
            )
        )

    return ToyResult(
        checks=checks,
        vocab=vocab,
        init=init,
        weights=weights,
        trace=trace,
        winner_forward=win_f,
        winner_backward=win_b,
        seconds=seconds,
    )


def dump_weights_csv(weights: ComplexWeights, path: str | Path) -> None:
    """Human-inspectable dump: one line per (neuron, token) entry."""
    lines = ["neuron,token,re,im"]
    for mu in range(weights.n_neurons):
        for tok in range(weights.n_columns):
            lines.append(
                f"{mu},{tok},{weights.re[mu, tok]!r},{weights.im[mu, tok]!r}"
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_report(result: ToyResult, path: str | Path) -> None:
    lines = []
    for c in result.checks:
        lines.append(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")
    lines.append(f"{'PASS' if result.passed else 'FAIL'} overall")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
