"""Exception types shared across the toolkit."""


class EchoAlignError(Exception):
    """Base class for all toolkit errors (mapped to exit code 2 by the CLI)."""


class DataValidationError(EchoAlignError):
    """A domain-type invariant was violated (bad labels, dims, ids, ...)."""


class FeatureFileError(EchoAlignError):
    """Malformed feature file. Carries the offending 1-based line number."""

    def __init__(self, path, line_number, message):
        self.path = str(path)
        self.line_number = line_number
        super().__init__(f"{self.path}:{line_number}: {message}")


class PrototypePlacementError(EchoAlignError):
    """Prototype rejection sampling exhausted its attempt budget; the
    requested separation is infeasible for the given dimension."""


class PairMismatchError(EchoAlignError):
    """Original/modified feature sets do not describe the same instances."""


class ZeroVectorError(EchoAlignError):
    """Cosine similarity is undefined for a zero-norm vector."""


class SingularMatrixError(EchoAlignError):
    """Design matrix is rank deficient; no pseudo-inverse fallback is taken."""


class EmptySelectionError(EchoAlignError):
    """Selection accuracy is undefined when no originals were retained."""


class TrainingDivergedError(EchoAlignError):
    """Training loss became non-finite."""


class ConfigError(EchoAlignError):
    """Malformed key=value config file."""
