"""Exception types shared across the package."""


class StratsosError(Exception):
    """Base class for package errors."""


class AlgebraDefinitionError(StratsosError):
    """Bad algebra document or an algebra failing its structural checks."""


class RegistryMismatchError(StratsosError):
    """Operands live over different algebras or variable registries."""


class DerivationError(StratsosError):
    """Representation / operator derivation failed an exact assertion."""


class SpectralError(StratsosError):
    """Numeric spectral stage failed (non-convergence, sign change, ...)."""


class GevreyError(StratsosError):
    """Gevrey synthesis stage failed."""


class InputError(StratsosError):
    """Bad CLI / config input."""


class StageFailure(StratsosError):
    """A pipeline stage failed; carries the stage name and a structured cause."""

    def __init__(self, stage: str, cause: str, detail=None):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.detail = detail
