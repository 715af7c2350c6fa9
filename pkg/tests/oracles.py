"""Independent brute-force references used to check the fast paths.

Everything here is deliberately written the slow, obvious way (python
loops, dense complex arithmetic) and never calls into the code paths it
verifies.
"""

import numpy as np


def dense_position_product(weights, neuron, token_id, position, length):
    """<w, z_l> via an explicit dense Hermitian inner product."""
    n = weights.n_columns
    z = np.zeros(n, dtype=np.complex128)
    z[token_id] = np.exp(1j * np.pi * position / length)
    w = weights.re[neuron].astype(np.float64) + 1j * weights.im[neuron].astype(
        np.float64
    )
    return np.sum(w * np.conj(z))


def fd_energy_gradient(energy_fn, weights, row, step=1e-5):
    """Central finite differences of energy_fn over one row of the weights.

    Perturbations are applied in the float32 storage; the divisor is the
    step actually realized after rounding, read back in float64.
    """
    d_re = np.zeros(weights.n_columns)
    d_im = np.zeros(weights.n_columns)
    for arr, out in ((weights.re, d_re), (weights.im, d_im)):
        for j in range(weights.n_columns):
            orig = arr[row, j]
            arr[row, j] = np.float32(float(orig) + step)
            hi_val = float(arr[row, j])
            e_hi = energy_fn(weights)
            arr[row, j] = np.float32(float(orig) - step)
            lo_val = float(arr[row, j])
            e_lo = energy_fn(weights)
            arr[row, j] = orig
            out[j] = (e_hi - e_lo) / (hi_val - lo_val)
    return d_re, d_im


def spearman_reference(xs, ys):
    """Rank correlation from first principles: counting ranks + Pearson."""

    def ranks(v):
        out = []
        for x in v:
            less = sum(1 for o in v if o < x)
            equal = sum(1 for o in v if o == x)
            out.append(less + (equal + 1) / 2.0)
        return out

    rx, ry = ranks(list(xs)), ranks(list(ys))
    mx = sum(rx) / len(rx)
    my = sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        return None
    return num / (vx * vy) ** 0.5


def average_precision_reference(scores, labels):
    """O(n^2) precision-at-positive average, ties broken by input index."""
    n = len(scores)
    order = sorted(range(n), key=lambda i: (-scores[i], i))
    precisions = []
    for rank, idx in enumerate(order, start=1):
        if labels[idx] == 1:
            hits = sum(1 for j in order[:rank] if labels[j] == 1)
            precisions.append(hits / rank)
    if not precisions:
        return None
    return sum(precisions) / len(precisions)


def top_k_reference(scores, k):
    """Indices of the k best scores, ties broken toward lower index."""
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return sorted(order[:k])


def flyvec_energy_reference(weights, window, freq):
    """Dense, loop-based evaluation of the bag-of-words energy and winner."""
    nvoc = weights.vocab_size
    v = [0.0] * (2 * nvoc)
    for i, c in zip(window.context_ids, window.context_counts):
        v[i] += c
    if window.target_id is not None:
        v[nvoc + window.target_id] = 1.0
    best, best_score = 0, None
    for mu in range(weights.n_neurons):
        s = sum(float(weights.re[mu, j]) * v[j] for j in range(2 * nvoc))
        if best_score is None or s > best_score:
            best, best_score = mu, s
    p = [max(float(freq[j % nvoc]), 1.0) for j in range(2 * nvoc)]
    num = sum(float(weights.re[best, j]) * v[j] / p[j] for j in range(2 * nvoc))
    norm = sum(float(weights.re[best, j]) ** 2 for j in range(2 * nvoc)) ** 0.5
    return best, -num / max(norm, 1e-12)
