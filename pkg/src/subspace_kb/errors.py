"""Exception types shared across the package."""


class ContractError(ValueError):
    """A documented precondition or invariant was violated by the caller."""


class FormatError(ValueError):
    """A data file does not conform to its documented format.

    Carries the offending path and, when known, the 1-based line number.
    """

    def __init__(self, path, message, line=None):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


class TrainingDivergedError(RuntimeError):
    """Optimization produced a non-finite parameter or residual."""

    def __init__(self, epoch, entry):
        self.epoch = epoch
        self.entry = entry
        super().__init__(
            f"non-finite value at epoch {epoch}, co-occurrence entry {entry}; "
            "lower the learning rate"
        )
