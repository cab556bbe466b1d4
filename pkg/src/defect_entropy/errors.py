class DefectEntropyError(Exception):
    """Base class of every failure raised by the package."""


class ConfigError(DefectEntropyError):
    pass


class EigenSolverError(DefectEntropyError):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ZeroModeCountError(DefectEntropyError):
    def __init__(self, found: int, threshold: float):
        super().__init__(
            f"Expected exactly 2 near-zero modes below {threshold:g}, found {found}"
        )
        self.found = found
        self.threshold = threshold


class WindowError(DefectEntropyError):
    pass


class NumericalValidationError(DefectEntropyError):
    pass
