"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for all wmbench errors."""


class InvalidArgument(WorkbenchError, ValueError):
    """An operation was called with arguments violating its contract."""


class NumericalInconsistency(WorkbenchError):
    """A numerical sanity bound was violated (e.g. imaginary residual)."""


class TrainingDiverged(WorkbenchError):
    """A training loss became non-finite."""


class GenerationFailed(WorkbenchError):
    """A generator backend failed to produce an image."""


class DetectionUnavailable(WorkbenchError):
    """Inversion failed; detection could not be evaluated (distinct from
    a negative verdict)."""


class AttackFailed(WorkbenchError):
    """An attack backend failed."""


class FeatureBackendMissing(WorkbenchError):
    """The requested feature-extraction backend is not available."""


class IngestionFailed(WorkbenchError):
    """A dataset source was unreadable or empty."""
