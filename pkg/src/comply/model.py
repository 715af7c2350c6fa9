"""Parameter matrix, initialization, and the binary checkpoint format.

The matrix holds one row per output neuron. In complex mode the columns
are vocabulary ids and the row entries are complex numbers stored as
parallel float32 real/imaginary arrays. In real mode the imaginary array
is identically zero and the column count doubles: the first half of each
row is the context block, the second half the target block, so both modes
store exactly ``2 * n_neurons * vocab_size`` real parameters.

Checkpoint layout (little-endian), all arrays float32 row-major:

    magic   4 bytes  b"CPLY"
    u32     version (1)
    u32     mode (0 = complex, 1 = real)
    u32     K (number of neurons)
    u32     Nvoc (word-vocabulary size; real mode stores 2*Nvoc columns)
    u64     seed
    u32     trained_epochs
    32 B    vocabulary checksum (SHA-256 of the vocab file serialization)
    f32[]   real parts, K * n_columns
    f32[]   imaginary parts, K * n_columns
    u32     CRC-32 over everything after the magic up to here
"""

from __future__ import annotations

import enum
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CheckpointError

MAGIC = b"CPLY"
VERSION = 1
INIT_STD = 0.1
NORM_EPS = 1e-12  # row-norm guard used by the energy denominator

_HEADER = struct.Struct("<4sIIIIQI32s")


class WeightMode(enum.IntEnum):
    COMPLEX = 0
    REAL_FLYVEC = 1


@dataclass
class ComplexWeights:
    """K x N parameter matrix as parallel float32 real/imaginary arrays."""

    mode: WeightMode
    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        self.re = np.ascontiguousarray(self.re, dtype=np.float32)
        self.im = np.ascontiguousarray(self.im, dtype=np.float32)
        if self.re.ndim != 2 or self.re.shape != self.im.shape:
            raise ValueError("re and im must be 2-D arrays of equal shape")
        if self.mode == WeightMode.REAL_FLYVEC:
            if self.re.shape[1] % 2 != 0:
                raise ValueError("real mode needs an even column count")
            if np.any(self.im):
                raise ValueError("imaginary parts must be zero in real mode")

    @property
    def n_neurons(self) -> int:
        return self.re.shape[0]

    @property
    def n_columns(self) -> int:
        return self.re.shape[1]

    @property
    def vocab_size(self) -> int:
        """Word-vocabulary size (half the columns in real mode)."""
        if self.mode == WeightMode.REAL_FLYVEC:
            return self.n_columns // 2
        return self.n_columns

    @property
    def param_count(self) -> int:
        """Stored real scalars; identical across modes for equal K, Nvoc."""
        if self.mode == WeightMode.REAL_FLYVEC:
            return self.re.size
        return self.re.size + self.im.size

    def copy(self) -> "ComplexWeights":
        return ComplexWeights(mode=self.mode, re=self.re.copy(), im=self.im.copy())


@dataclass
class ModelMeta:
    seed: int
    trained_epochs: int
    vocab_hash: bytes  # 32 bytes

    def __post_init__(self):
        if len(self.vocab_hash) != 32:
            raise ValueError("vocab_hash must be 32 bytes")


def init_weights(
    n_neurons: int, vocab_size: int, mode: WeightMode, seed: int
) -> ComplexWeights:
    """Draw i.i.d. Gaussian(0, 0.1) entries, deterministic given seed.

    Real mode forces the imaginary parts to zero and doubles the column
    count (context + target blocks). A row that comes out identically
    zero is redrawn, so no row is ever the zero vector.
    """
    if n_neurons < 1 or vocab_size < 1:
        raise ValueError("n_neurons and vocab_size must be positive")
    rng = np.random.default_rng(seed)
    cols = 2 * vocab_size if mode == WeightMode.REAL_FLYVEC else vocab_size
    re = rng.normal(0.0, INIT_STD, size=(n_neurons, cols)).astype(np.float32)
    if mode == WeightMode.COMPLEX:
        im = rng.normal(0.0, INIT_STD, size=(n_neurons, cols)).astype(np.float32)
    else:
        im = np.zeros((n_neurons, cols), dtype=np.float32)
    for mu in range(n_neurons):
        while not (re[mu].any() or im[mu].any()):
            re[mu] = rng.normal(0.0, INIT_STD, size=cols).astype(np.float32)
            if mode == WeightMode.COMPLEX:
                im[mu] = rng.normal(0.0, INIT_STD, size=cols).astype(np.float32)
    return ComplexWeights(mode=mode, re=re, im=im)


def save_model(weights: ComplexWeights, meta: ModelMeta, path: str | Path) -> None:
    """Write a checkpoint; the round trip through load_model is bit-exact."""
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        int(weights.mode),
        weights.n_neurons,
        weights.vocab_size,
        meta.seed,
        meta.trained_epochs,
        meta.vocab_hash,
    )
    payload = header[len(MAGIC):] + weights.re.tobytes() + weights.im.tobytes()
    crc = zlib.crc32(payload) & 0xFFFFFFFF
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(payload)
        fh.write(struct.pack("<I", crc))


def load_model(path: str | Path) -> tuple[ComplexWeights, ModelMeta]:
    """Read and validate a checkpoint written by save_model."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if len(blob) < _HEADER.size + 4:
        raise CheckpointError(f"{path}: truncated checkpoint")
    magic, version, mode_raw, k, nvoc, seed, epochs, vocab_hash = _HEADER.unpack(
        blob[: _HEADER.size]
    )
    if magic != MAGIC:
        raise CheckpointError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported version {version}")
    try:
        mode = WeightMode(mode_raw)
    except ValueError as exc:
        raise CheckpointError(f"{path}: unknown mode {mode_raw}") from exc

    cols = 2 * nvoc if mode == WeightMode.REAL_FLYVEC else nvoc
    array_bytes = 4 * k * cols
    expected = _HEADER.size + 2 * array_bytes + 4
    if len(blob) != expected:
        raise CheckpointError(
            f"{path}: expected {expected} bytes, found {len(blob)} (truncated payload?)"
        )
    (stored_crc,) = struct.unpack("<I", blob[-4:])
    crc = zlib.crc32(blob[len(MAGIC):-4]) & 0xFFFFFFFF
    if crc != stored_crc:
        raise CheckpointError(f"{path}: CRC mismatch (corrupt payload)")

    off = _HEADER.size
    re = np.frombuffer(blob[off : off + array_bytes], dtype="<f4").reshape(k, cols)
    off += array_bytes
    im = np.frombuffer(blob[off : off + array_bytes], dtype="<f4").reshape(k, cols)
    weights = ComplexWeights(mode=mode, re=re.copy(), im=im.copy())
    meta = ModelMeta(seed=seed, trained_epochs=epochs, vocab_hash=vocab_hash)
    return weights, meta
