"""Batch construction and annealed stochastic minimization of the energy.

Sentences are the largest unit the complex model sees; the real baseline
consumes sliding bag-of-words windows instead (one window per target
position, context clipped at sentence edges, no padding). Per batch the
winner of every sample is found on the pre-step weights, row gradients
are summed per winning row, and one optimizer step is applied; rows that
win nothing in a batch are not touched. The learning rate is annealed
linearly to zero over the full planned horizon ``config.epochs``.

Training is resumable from a checkpoint: the annealing schedule continues
from the stored epoch count. Optimizer state is not checkpointed, so
bitwise resume equality holds for SGD only (a resumed Adam run restarts
its moments).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import energy as en
from .errors import NumericalInstabilityError, TrainingError
from .model import ComplexWeights, ModelMeta, WeightMode, load_model
from .vocab import TokenSeq, Vocabulary

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 15
    lr0: float = 4e-4
    anneal: str = "linear"
    batch_size: int = 256
    window: int | None = None  # real mode only
    max_sentence_len: int = 64
    seed: int = 0
    optimizer: str = "adam"

    def validate(self, mode: WeightMode) -> None:
        if self.epochs < 0:
            raise TrainingError("epochs must be >= 0")
        if self.lr0 <= 0:
            raise TrainingError("lr0 must be positive")
        if self.anneal != "linear":
            raise TrainingError(f"unknown anneal schedule {self.anneal!r}")
        if self.batch_size < 1:
            raise TrainingError("batch_size must be positive")
        if self.max_sentence_len < 1:
            raise TrainingError("max_sentence_len must be positive")
        if self.optimizer not in ("adam", "sgd"):
            raise TrainingError(f"unknown optimizer {self.optimizer!r}")
        if mode == WeightMode.REAL_FLYVEC:
            if self.window is None or self.window < 2:
                raise TrainingError("real mode requires a window length >= 2")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    mean_energy: float
    distinct_winners: int
    seconds: float


@dataclass
class TrainTrace:
    records: list[EpochRecord] = field(default_factory=list)

    def write_csv(self, path: str | Path) -> None:
        lines = ["epoch,mean_energy,distinct_winners,seconds"]
        for r in self.records:
            lines.append(
                f"{r.epoch},{r.mean_energy!r},{r.distinct_winners},{r.seconds:.3f}"
            )
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def annealed_lr(lr0: float, step: int, total_steps: int) -> float:
    """Linear anneal: lr0 * (1 - step/total_steps); exactly 0 at the end."""
    if total_steps <= 0:
        return 0.0
    return lr0 * (1.0 - step / total_steps)


def windows_for_sentence(ids, window: int):
    """One bag-of-words window per target position.

    The context is the window around the target clipped at the sentence
    edges, so boundary windows carry fewer than window-1 context tokens.
    """
    ids = list(ids)
    left = (window - 1) // 2
    right = window - 1 - left
    out = []
    for i in range(len(ids)):
        ctx: dict[int, int] = {}
        for j in range(max(0, i - left), min(len(ids), i + right + 1)):
            if j != i:
                ctx[ids[j]] = ctx.get(ids[j], 0) + 1
        out.append(
            en.BagOfWordsWindow(
                context_ids=tuple(sorted(ctx)),
                context_counts=tuple(ctx[k] for k in sorted(ctx)),
                target_id=ids[i],
                window=window,
            )
        )
    return out


def _epoch_order(n: int, seed: int, epoch: int) -> np.ndarray:
    return np.random.default_rng([seed, epoch]).permutation(n)


def make_batches(
    sentences: list[TokenSeq], config: TrainConfig, mode: WeightMode, epoch: int
):
    """Yield one epoch's batches in seed-deterministic shuffled order.

    Complex mode yields lists of PhasedSentence; real mode yields lists of
    BagOfWordsWindow. Shuffling happens at sentence granularity.
    """
    if not sentences:
        raise TrainingError("corpus is empty after encoding")
    order = _epoch_order(len(sentences), config.seed, epoch)
    if mode == WeightMode.COMPLEX:
        batch = []
        for idx in order:
            batch.append(en.PhasedSentence.from_tokenseq(sentences[idx]))
            if len(batch) == config.batch_size:
                yield batch
                batch = []
        if batch:
            yield batch
    else:
        batch = []
        for idx in order:
            for win in windows_for_sentence(sentences[idx].ids, config.window):
                batch.append(win)
                if len(batch) == config.batch_size:
                    yield batch
                    batch = []
        if batch:
            yield batch


def steps_per_epoch(
    sentences: list[TokenSeq], config: TrainConfig, mode: WeightMode
) -> int:
    if mode == WeightMode.COMPLEX:
        n_samples = len(sentences)
    else:
        n_samples = sum(len(s) for s in sentences)
    return -(-n_samples // config.batch_size)


class _Sgd:
    def step(self, weights, row_grads, lr):
        for row in sorted(row_grads):
            g_re, g_im = row_grads[row]
            weights.re[row] = (
                weights.re[row].astype(np.float64) - lr * g_re
            ).astype(np.float32)
            if g_im is not None:
                weights.im[row] = (
                    weights.im[row].astype(np.float64) - lr * g_im
                ).astype(np.float32)


class _LazyAdam:
    """Adam applied only to rows with a gradient in the current batch.

    Moments of untouched rows stay exactly zero (so those rows are never
    moved); bias correction uses the global step count, as in the usual
    lazy/sparse Adam variants.
    """

    def __init__(self, shape, complex_mode: bool):
        self.m_re = np.zeros(shape, dtype=np.float32)
        self.v_re = np.zeros(shape, dtype=np.float32)
        if complex_mode:
            self.m_im = np.zeros(shape, dtype=np.float32)
            self.v_im = np.zeros(shape, dtype=np.float32)
        self.t = 0

    def _update(self, w_row, m, v, row, g, lr, bc1, bc2):
        m_new = ADAM_BETA1 * m[row].astype(np.float64) + (1 - ADAM_BETA1) * g
        v_new = ADAM_BETA2 * v[row].astype(np.float64) + (1 - ADAM_BETA2) * g * g
        m[row] = m_new.astype(np.float32)
        v[row] = v_new.astype(np.float32)
        step = lr * (m_new / bc1) / (np.sqrt(v_new / bc2) + ADAM_EPS)
        return (w_row.astype(np.float64) - step).astype(np.float32)

    def step(self, weights, row_grads, lr):
        self.t += 1
        bc1 = 1.0 - ADAM_BETA1**self.t
        bc2 = 1.0 - ADAM_BETA2**self.t
        for row in sorted(row_grads):
            g_re, g_im = row_grads[row]
            weights.re[row] = self._update(
                weights.re[row], self.m_re, self.v_re, row, g_re, lr, bc1, bc2
            )
            if g_im is not None:
                weights.im[row] = self._update(
                    weights.im[row], self.m_im, self.v_im, row, g_im, lr, bc1, bc2
                )


def train(
    sentences: list[TokenSeq],
    vocab: Vocabulary,
    config: TrainConfig,
    weights: ComplexWeights,
    start_epoch: int = 0,
    run_epochs: int | None = None,
) -> tuple[ComplexWeights, TrainTrace]:
    """Run the annealed energy minimization from ``start_epoch``.

    ``config.epochs`` is the full planned horizon driving the annealing
    schedule; ``run_epochs`` optionally stops earlier (so a split run plus
    a resume reproduces an unsplit run exactly under SGD).
    """
    mode = weights.mode
    config.validate(mode)
    if weights.vocab_size != len(vocab):
        raise TrainingError(
            f"model vocabulary size {weights.vocab_size} != vocabulary {len(vocab)}"
        )
    if start_epoch > config.epochs:
        raise TrainingError(
            f"start epoch {start_epoch} beyond planned horizon {config.epochs}"
        )
    weights = weights.copy()
    end_epoch = config.epochs
    if run_epochs is not None:
        if run_epochs < 0:
            raise TrainingError("run_epochs must be >= 0")
        end_epoch = min(end_epoch, start_epoch + run_epochs)

    trace = TrainTrace()
    if end_epoch == start_epoch:
        return weights, trace

    freq = vocab.safe_frequency()
    per_epoch = steps_per_epoch(sentences, config, mode)
    total_steps = config.epochs * per_epoch
    opt = (
        _Sgd()
        if config.optimizer == "sgd"
        else _LazyAdam(weights.re.shape, mode == WeightMode.COMPLEX)
    )
    complex_mode = mode == WeightMode.COMPLEX
    last_good = weights.copy()
    last_good_epoch = start_epoch

    step = start_epoch * per_epoch
    for epoch in range(start_epoch, end_epoch):
        t0 = time.perf_counter()
        energy_sum = 0.0
        n_samples = 0
        winners: set[int] = set()
        for batch in make_batches(sentences, config, mode, epoch):
            row_grads: dict[int, list] = {}
            for sample in batch:
                if complex_mode:
                    mu = en.select_winner(weights, sample)
                    energy_sum += en.sample_energy(weights, sample, freq, winner=mu)
                    grad = en.energy_gradient(weights, sample, freq, winner=mu)
                else:
                    mu = en.flyvec_select_winner(weights, sample)
                    energy_sum += en.flyvec_sample_energy(
                        weights, sample, freq, winner=mu
                    )
                    grad = en.flyvec_energy_gradient(weights, sample, freq, winner=mu)
                winners.add(mu)
                n_samples += 1
                acc = row_grads.get(mu)
                if acc is None:
                    row_grads[mu] = [
                        grad.d_re.copy(),
                        None if grad.d_im is None else grad.d_im.copy(),
                    ]
                else:
                    acc[0] += grad.d_re
                    if grad.d_im is not None:
                        acc[1] += grad.d_im
            lr = annealed_lr(config.lr0, step, total_steps)
            opt.step(weights, row_grads, lr)
            step += 1
            for row in row_grads:
                if not np.isfinite(weights.re[row]).all() or not np.isfinite(
                    weights.im[row]
                ).all():
                    raise NumericalInstabilityError(
                        f"non-finite weights in row {row} at step {step}, "
                        f"epoch {epoch}",
                        last_good=last_good,
                        last_good_meta={"trained_epochs": last_good_epoch},
                    )
        trace.records.append(
            EpochRecord(
                epoch=epoch,
                mean_energy=energy_sum / n_samples,
                distinct_winners=len(winners),
                seconds=time.perf_counter() - t0,
            )
        )
        last_good = weights.copy()
        last_good_epoch = epoch + 1
    return weights, trace


def train_resume(
    checkpoint_path: str | Path,
    sentences: list[TokenSeq],
    vocab: Vocabulary,
    config: TrainConfig,
    run_epochs: int | None = None,
) -> tuple[ComplexWeights, TrainTrace, ModelMeta]:
    """Continue training from a checkpoint against the same vocabulary."""
    weights, meta = load_model(checkpoint_path)
    if meta.vocab_hash != vocab.checksum():
        raise TrainingError(
            "checkpoint was trained against a different vocabulary "
            "(checksum mismatch)"
        )
    if meta.seed != config.seed:
        config = replace(config, seed=meta.seed)
    weights, trace = train(
        sentences,
        vocab,
        config,
        weights,
        start_epoch=meta.trained_epochs,
        run_epochs=run_epochs,
    )
    new_meta = ModelMeta(
        seed=meta.seed,
        trained_epochs=meta.trained_epochs + len(trace.records),
        vocab_hash=meta.vocab_hash,
    )
    return weights, trace, new_meta
