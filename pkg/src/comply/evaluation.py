"""Similarity-task scoring: rank correlation, average precision, sweeps.

Datasets are local TSV files (sentence_a TAB sentence_b TAB gold). Pairs
in which either sentence has no in-vocabulary token are dropped from
scoring and reported in the result, mirroring the restricted-vocabulary
setting the models are trained in.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import energy as en
from . import hasher
from .errors import EvalError, EncodingError, UndefinedMetricError
from .model import ComplexWeights, WeightMode
from .vocab import Vocabulary, encode_sentence

VARIANTS = ("comply", "complym", "flyvec")


def average_ranks(values) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their group."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys) -> float:
    """Rank correlation with average ranks for ties.

    Computed as the Pearson correlation of the two rank vectors. Raises
    UndefinedMetricError when either input is constant (zero rank
    variance).
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("inputs must be equal-length vectors")
    if len(xs) < 2:
        raise ValueError("need at least 2 observations")
    rx = average_ranks(xs)
    ry = average_ranks(ys)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedMetricError("correlation undefined for constant input")
    return float(np.dot(dx, dy) / np.sqrt(sxx * syy))


def average_precision(scores, labels) -> float:
    """Mean precision at each positive, ranked by descending score.

    Ties are broken by original index (stable order). Requires at least
    one positive label.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be equal-length vectors")
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be binary")
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise UndefinedMetricError("average precision undefined without positives")
    order = np.argsort(-scores, kind="stable")
    hits = 0
    total = 0.0
    for rank, idx in enumerate(order, start=1):
        if labels[idx] == 1:
            hits += 1
            total += hits / rank
    return total / n_pos


# Datasets ------------------------------------------------------------------


@dataclass(frozen=True)
class StsDataset:
    """Sentence pairs with real-valued gold similarity scores."""

    pairs: tuple[tuple[str, str, float], ...]

    def __post_init__(self):
        if len(self.pairs) < 2:
            raise EvalError("similarity dataset needs at least 2 records")
        if not all(np.isfinite(g) for _, _, g in self.pairs):
            raise EvalError("non-finite gold score")

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class PairClassDataset:
    """Sentence pairs with binary duplicate labels; both classes present."""

    pairs: tuple[tuple[str, str, int], ...]

    def __post_init__(self):
        labels = {label for _, _, label in self.pairs}
        if not labels <= {0, 1}:
            raise EvalError("labels must be 0 or 1")
        if labels != {0, 1}:
            raise EvalError("both classes must be present")

    def __len__(self) -> int:
        return len(self.pairs)


def _read_pair_lines(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise EvalError(f"cannot read dataset {path}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise EvalError(f"{path}:{lineno}: expected 3 tab-separated fields")
        rows.append((lineno, parts))
    return rows


def load_sts_tsv(path: str | Path) -> StsDataset:
    pairs = []
    for lineno, (a, b, gold) in _read_pair_lines(path):
        try:
            pairs.append((a, b, float(gold)))
        except ValueError as exc:
            raise EvalError(f"{path}:{lineno}: bad gold score {gold!r}") from exc
    return StsDataset(pairs=tuple(pairs))


def load_pc_tsv(path: str | Path) -> PairClassDataset:
    pairs = []
    for lineno, (a, b, label) in _read_pair_lines(path):
        if label not in ("0", "1"):
            raise EvalError(f"{path}:{lineno}: label must be 0 or 1, got {label!r}")
        pairs.append((a, b, int(label)))
    return PairClassDataset(pairs=tuple(pairs))


# Hash-similarity scoring ----------------------------------------------------


def hash_sentence(
    weights: ComplexWeights,
    vocab: Vocabulary,
    text: str,
    k: int,
    variant: str,
    max_len: int = 64,
) -> hasher.HashCode:
    """Encode and hash one sentence under the given scoring variant."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    seq = encode_sentence(vocab, text, max_len)
    if variant == "flyvec":
        return hasher.flyvec_hash(weights, en.sentence_bag(seq.ids), k)
    sentence = en.PhasedSentence.from_tokenseq(seq)
    if variant == "comply":
        return hasher.comply_hash(weights, sentence, k)
    return hasher.complym_hash(weights, sentence, k)


def default_variant(weights: ComplexWeights) -> str:
    return "flyvec" if weights.mode == WeightMode.REAL_FLYVEC else "comply"


@dataclass(frozen=True)
class PairScores:
    scores: np.ndarray
    gold: np.ndarray
    n_scored: int
    n_dropped: int


def _pair_similarities(
    weights, vocab, pairs, k, variant, max_len=64, threads=1
) -> PairScores:
    def one(pair):
        a, b, gold = pair
        try:
            ha = hash_sentence(weights, vocab, a, k, variant, max_len)
            hb = hash_sentence(weights, vocab, b, k, variant, max_len)
        except EncodingError:
            return None
        return hasher.hash_cosine(ha, hb), gold

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(p) for p in pairs]
    kept = [r for r in results if r is not None]
    if not kept:
        raise EvalError("every pair was dropped (no encodable sentences)")
    scores = np.array([s for s, _ in kept], dtype=np.float64)
    gold = np.array([g for _, g in kept], dtype=np.float64)
    return PairScores(
        scores=scores, gold=gold, n_scored=len(kept), n_dropped=len(pairs) - len(kept)
    )


@dataclass(frozen=True)
class StsResult:
    rho: float
    n_scored: int
    n_dropped: int


@dataclass(frozen=True)
class PcResult:
    ap: float
    n_scored: int
    n_dropped: int


def eval_sts(
    weights: ComplexWeights,
    vocab: Vocabulary,
    dataset: StsDataset,
    k: int,
    variant: str | None = None,
    max_len: int = 64,
    threads: int = 1,
) -> StsResult:
    """Spearman correlation between hash cosine similarities and gold."""
    variant = variant or default_variant(weights)
    ps = _pair_similarities(
        weights, vocab, dataset.pairs, k, variant, max_len, threads
    )
    return StsResult(
        rho=spearman(ps.scores, ps.gold),
        n_scored=ps.n_scored,
        n_dropped=ps.n_dropped,
    )


def eval_pair_classification(
    weights: ComplexWeights,
    vocab: Vocabulary,
    dataset: PairClassDataset,
    k: int,
    variant: str | None = None,
    max_len: int = 64,
    threads: int = 1,
) -> PcResult:
    """Average precision of hash cosine similarity against duplicate labels."""
    variant = variant or default_variant(weights)
    ps = _pair_similarities(
        weights, vocab, dataset.pairs, k, variant, max_len, threads
    )
    return PcResult(
        ap=average_precision(ps.scores, ps.gold.astype(np.int64)),
        n_scored=ps.n_scored,
        n_dropped=ps.n_dropped,
    )


# Hash-length sweep ----------------------------------------------------------


@dataclass(frozen=True)
class SweepEntry:
    k: int
    fold_metrics: tuple[float, ...]
    mean: float
    std: float


@dataclass(frozen=True)
class SweepResult:
    """Per-k fold metrics plus the one-fold-selects protocol summary.

    ``best_k`` is chosen on fold 0 alone (ties to the smaller k);
    ``selected_mean``/``selected_std`` summarize that k on the remaining
    folds.
    """

    entries: tuple[SweepEntry, ...]
    folds: int
    best_k: int
    selected_mean: float
    selected_std: float

    def write_csv(self, path: str | Path) -> None:
        lines = ["k,fold,metric"]
        for e in self.entries:
            for fold, metric in enumerate(e.fold_metrics):
                lines.append(f"{e.k},{fold},{metric!r}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def fold_partition(n: int, folds: int, seed: int) -> list[np.ndarray]:
    """Seed-deterministic partition of range(n) into near-equal folds."""
    if folds < 2:
        raise EvalError("need at least 2 folds")
    if n < folds:
        raise EvalError(f"cannot split {n} records into {folds} folds")
    perm = np.random.default_rng([seed, n, folds]).permutation(n)
    return [np.sort(part) for part in np.array_split(perm, folds)]


def _metric_for(weights, vocab, dataset, subset, k, variant, max_len, threads):
    pairs = [dataset.pairs[i] for i in subset]
    ps = _pair_similarities(weights, vocab, pairs, k, variant, max_len, threads)
    if isinstance(dataset, StsDataset):
        return spearman(ps.scores, ps.gold)
    return average_precision(ps.scores, ps.gold.astype(np.int64))


def sweep_hash_length(
    weights: ComplexWeights,
    vocab: Vocabulary,
    dataset: StsDataset | PairClassDataset,
    ks,
    folds: int = 5,
    seed: int = 0,
    variant: str | None = None,
    max_len: int = 64,
    threads: int = 1,
) -> SweepResult:
    """Evaluate every hash length on every fold and run model selection."""
    ks = sorted(set(int(k) for k in ks))
    if not ks:
        raise EvalError("empty hash-length grid")
    variant = variant or default_variant(weights)
    parts = fold_partition(len(dataset), folds, seed)
    entries = []
    for k in ks:
        metrics = tuple(
            _metric_for(weights, vocab, dataset, part, k, variant, max_len, threads)
            for part in parts
        )
        entries.append(
            SweepEntry(
                k=k,
                fold_metrics=metrics,
                mean=float(np.mean(metrics)),
                std=float(np.std(metrics)),
            )
        )
    best = max(entries, key=lambda e: (e.fold_metrics[0], -e.k))
    rest = np.array(best.fold_metrics[1:], dtype=np.float64)
    return SweepResult(
        entries=tuple(entries),
        folds=folds,
        best_k=best.k,
        selected_mean=float(rest.mean()),
        selected_std=float(rest.std()),
    )
