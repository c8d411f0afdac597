"""Exception hierarchy shared by all modules."""


class PosParamError(ValueError):
    """Base class for every error raised by posparam."""


class DimensionError(PosParamError):
    """Shapes are wrong or not conformable."""


class DomainError(PosParamError):
    """Input lies outside the operation's domain (e.g. not PSD)."""


class ExtractionError(DomainError):
    """A parameter extraction produced an inconsistent residual."""


class DecompositionError(DomainError):
    """A row-contraction decomposition could not be solved consistently."""


class RankDeficiencyError(DomainError):
    """A leading block needed for an inverse problem is singular."""

    def __init__(self, message, order=None):
        super().__init__(message)
        self.order = order
