"""Shared exception types."""


class RecsynthError(Exception):
    pass


class StuckError(RecsynthError):
    """Evaluation reached a non-value that no rule applies to."""


class FuelExhausted(RecsynthError):
    """Evaluation did not terminate within the step/depth budget."""


class TypeCheckError(RecsynthError):
    """Program rejected by the type checker; carries the offending subexpression."""

    def __init__(self, message, expr=None):
        super().__init__(message)
        self.expr = expr


class AdtDeclarationError(RecsynthError):
    pass


class DnfExplosion(RecsynthError):
    pass


class CandidateExplosion(RecsynthError):
    pass


class StateBlowup(RecsynthError):
    pass


class InconsistentRun(RecsynthError):
    """Two witness bindings for the same argument disagree."""


class DepthExceeded(RecsynthError):
    pass


class SynthesisTimeout(RecsynthError):
    pass


class ExhaustedSpace(RecsynthError):
    pass


class IterationCapExceeded(RecsynthError):
    pass


class TaskParseError(RecsynthError):
    pass
