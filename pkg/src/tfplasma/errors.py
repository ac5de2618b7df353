"""Exception types shared across the solver."""


class TfplasmaError(Exception):
    """Base class for all solver errors."""


class ConfigError(TfplasmaError):
    """Invalid or inconsistent run configuration."""


class AdmissibilityError(TfplasmaError):
    """A state left the physically admissible set (rho, p > 0, |u| < 1)."""


class RecoveryError(TfplasmaError):
    """Conserved-to-primitive inversion failed.

    Carries the flat indices of the offending cells so a run can report
    where it died.
    """

    def __init__(self, message, cells=None):
        super().__init__(message)
        self.cells = cells


class StiffSolveError(TfplasmaError):
    """The per-cell implicit source solve did not converge."""

    def __init__(self, message, cells=None, residual=None):
        super().__init__(message)
        self.cells = cells
        self.residual = residual
