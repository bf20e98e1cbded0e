"""
Exception hierarchy for EcoAttn.
"""


class EcoAttnError(Exception):
    """Base exception for EcoAttn errors."""
    pass


class DimensionError(EcoAttnError, ValueError):
    """Operand shapes do not line up."""

    def __init__(self, message: str, *shapes):
        if shapes:
            message = f"{message}: " + " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(message)
        self.shapes = shapes


class DomainError(EcoAttnError, ValueError):
    """Input or result outside the domain of an operation."""
    pass


class DegenerateRowError(DomainError):
    """A row cannot be normalized."""

    def __init__(self, row: int, norm: float):
        super().__init__(f"Row {row} has norm {norm:.3e}, cannot normalize")
        self.row = row
        self.norm = norm


class ParameterError(EcoAttnError, ValueError):
    """A scalar parameter is out of range."""
    pass


class ConfigurationError(EcoAttnError, ValueError):
    """Invalid attention, window, head or training configuration."""
    pass


class OracleError(EcoAttnError):
    """The finite-difference oracle hit a non-finite value."""
    pass


class DegenerateModelError(EcoAttnError, ValueError):
    """The energy model cannot produce a meaningful comparison."""
    pass


class TrainingFailureError(EcoAttnError):
    """Training diverged."""

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"Training diverged at epoch {epoch} (loss={loss})")
        self.epoch = epoch
        self.loss = loss
