"""Shared finite-difference gradient verification used by several tests.

Draws random (weights, sentence, frequency) instances, skips draws that
land within a safety margin of a non-differentiable point (tiny touched
weight, phase difference near 0 or +-pi), and compares the analytic row
gradient against central finite differences over every coordinate of the
winning row.
"""

import numpy as np

from comply.energy import (
    PhasedSentence,
    energy_gradient,
    flyvec_energy_gradient,
    flyvec_sample_energy,
    flyvec_select_winner,
    sample_energy,
    select_winner,
    BagOfWordsWindow,
)
from comply.model import WeightMode, init_weights

from oracles import fd_energy_gradient


def _relative_errors(analytic, fd):
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(fd)), 1e-8)
    return np.abs(analytic - fd) / denom


def _near_nondifferentiable(weights, mu, sentence, margin):
    ids = np.asarray(sentence.ids)
    a = weights.re[mu, ids].astype(np.float64)
    b = weights.im[mu, ids].astype(np.float64)
    r = np.hypot(a, b)
    if (r < margin).any():
        return True
    rot_re = a * np.cos(sentence.angles) + b * np.sin(sentence.angles)
    rot_im = b * np.cos(sentence.angles) - a * np.sin(sentence.angles)
    phi = np.abs(np.arctan2(rot_im, rot_re))
    return bool((phi < margin).any() or (phi > np.pi - margin).any())


def check_complex_gradients(
    n_draws=100,
    seed=2024,
    max_neurons=8,
    max_vocab=20,
    max_len=6,
    step=1e-5,
    margin=1e-3,
):
    """Returns (worst relative error, accepted draw count)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    accepted = 0
    attempts = 0
    while accepted < n_draws:
        attempts += 1
        assert attempts < 50 * n_draws, "rejection rate implausibly high"
        k = int(rng.integers(1, max_neurons + 1))
        nvoc = int(rng.integers(2, max_vocab + 1))
        length = int(rng.integers(1, max_len + 1))
        weights = init_weights(k, nvoc, WeightMode.COMPLEX, int(rng.integers(2**31)))
        sentence = PhasedSentence.from_ids(rng.integers(0, nvoc, size=length))
        freq = rng.integers(1, 6, size=nvoc).astype(np.float64)
        mu = select_winner(weights, sentence)
        if _near_nondifferentiable(weights, mu, sentence, margin):
            continue
        accepted += 1
        grad = energy_gradient(weights, sentence, freq, winner=mu)
        fd_re, fd_im = fd_energy_gradient(
            lambda w: sample_energy(w, sentence, freq, winner=mu), weights, mu, step
        )
        worst = max(
            worst,
            float(_relative_errors(grad.d_re, fd_re).max()),
            float(_relative_errors(grad.d_im, fd_im).max()),
        )
    return worst, accepted


def check_flyvec_gradients(n_draws=50, seed=77, step=1e-5):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_draws):
        k = int(rng.integers(1, 6))
        nvoc = int(rng.integers(2, 10))
        weights = init_weights(
            k, nvoc, WeightMode.REAL_FLYVEC, int(rng.integers(2**31))
        )
        ctx = {}
        for _ in range(int(rng.integers(0, 4))):
            tok = int(rng.integers(0, nvoc))
            ctx[tok] = ctx.get(tok, 0) + 1
        window = BagOfWordsWindow(
            context_ids=tuple(sorted(ctx)),
            context_counts=tuple(ctx[t] for t in sorted(ctx)),
            target_id=int(rng.integers(0, nvoc)),
        )
        freq = rng.integers(1, 6, size=nvoc).astype(np.float64)
        mu = flyvec_select_winner(weights, window)
        grad = flyvec_energy_gradient(weights, window, freq, winner=mu)
        fd_re, _ = fd_energy_gradient(
            lambda w: flyvec_sample_energy(w, window, freq, winner=mu),
            weights,
            mu,
            step,
        )
        worst = max(worst, float(_relative_errors(grad.d_re, fd_re).max()))
    return worst
