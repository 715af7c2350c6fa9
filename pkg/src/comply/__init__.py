"""Sequence hashing with a single-layer complex-valued WTA network.

The complex model encodes word positions as unit phases and learns
sentence representations by winner-take-all energy minimization; the
real-valued bag-of-words baseline is included as a special case, along
with k-WTA hashing and a similarity-evaluation harness.
"""

__version__ = "0.1.0"

from .energy import (
    ActivationBreakdown,
    BagOfWordsWindow,
    PhasedSentence,
    RowGradient,
    energy_gradient,
    flyvec_energy_gradient,
    flyvec_sample_energy,
    flyvec_select_winner,
    neuron_activation,
    phase_for_position,
    sample_energy,
    select_winner,
    sentence_bag,
)
from .errors import (
    CheckpointError,
    ComplyError,
    EncodingError,
    EvalError,
    ModeMismatchError,
    NumericalInstabilityError,
    TrainingError,
    UndefinedMetricError,
    VocabError,
)
from .estimator import ComplyVectorizer
from .evaluation import (
    PairClassDataset,
    StsDataset,
    SweepResult,
    average_precision,
    eval_pair_classification,
    eval_sts,
    load_pc_tsv,
    load_sts_tsv,
    spearman,
    sweep_hash_length,
)
from .hasher import HashCode, comply_hash, complym_hash, flyvec_hash, hash_cosine
from .model import (
    ComplexWeights,
    ModelMeta,
    WeightMode,
    init_weights,
    load_model,
    save_model,
)
from .trainer import TrainConfig, TrainTrace, make_batches, train, train_resume
from .vocab import (
    TokenSeq,
    Vocabulary,
    build_vocab,
    encode_sentence,
    load_vocab,
    save_vocab,
)

__all__ = [
    "__version__",
    "ActivationBreakdown",
    "BagOfWordsWindow",
    "CheckpointError",
    "ComplexWeights",
    "ComplyError",
    "ComplyVectorizer",
    "EncodingError",
    "EvalError",
    "HashCode",
    "ModeMismatchError",
    "ModelMeta",
    "NumericalInstabilityError",
    "PairClassDataset",
    "PhasedSentence",
    "RowGradient",
    "StsDataset",
    "SweepResult",
    "TokenSeq",
    "TrainConfig",
    "TrainTrace",
    "TrainingError",
    "UndefinedMetricError",
    "VocabError",
    "Vocabulary",
    "WeightMode",
    "average_precision",
    "build_vocab",
    "comply_hash",
    "complym_hash",
    "encode_sentence",
    "energy_gradient",
    "eval_pair_classification",
    "eval_sts",
    "flyvec_energy_gradient",
    "flyvec_hash",
    "flyvec_sample_energy",
    "flyvec_select_winner",
    "hash_cosine",
    "init_weights",
    "load_model",
    "load_pc_tsv",
    "load_sts_tsv",
    "load_vocab",
    "make_batches",
    "neuron_activation",
    "phase_for_position",
    "sample_energy",
    "save_model",
    "save_vocab",
    "select_winner",
    "sentence_bag",
    "spearman",
    "sweep_hash_length",
    "train",
    "train_resume",
]
