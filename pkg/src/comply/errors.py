"""Exception hierarchy shared across the package.

Every error raised on a user-facing path derives from ComplyError so the
CLI can map them onto stable exit codes.
"""


class ComplyError(Exception):
    """Base class for all errors raised by this package."""


class VocabError(ComplyError):
    """Corpus or vocabulary file is malformed, empty, or inconsistent."""


class EncodingError(ComplyError):
    """A sentence could not be encoded (e.g. every token out of vocabulary)."""


class CheckpointError(ComplyError):
    """Model checkpoint is unreadable: bad magic, version, size, or checksum."""


class ModeMismatchError(ComplyError):
    """Operation applied to a model in the wrong mode (complex vs real)."""


class TrainingError(ComplyError):
    """Training preconditions violated (dimension or vocabulary mismatch)."""


class NumericalInstabilityError(ComplyError):
    """Non-finite values detected in the weights during training."""

    def __init__(self, message, last_good=None, last_good_meta=None):
        super().__init__(message)
        self.last_good = last_good
        self.last_good_meta = last_good_meta


class UndefinedMetricError(ComplyError):
    """Metric is mathematically undefined for the given inputs."""


class EvalError(ComplyError):
    """Evaluation dataset is malformed or degenerate."""
