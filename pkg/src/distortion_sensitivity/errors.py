"""Exception and warning types raised across the package."""


class DistSensError(Exception):
    """Base class for all package errors."""

    code = "error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class DomainError(DistSensError, ValueError):
    code = "domain_error"


class UnsupportedKindError(DistSensError, ValueError):
    code = "unsupported_kind"


class ModelContractError(DistSensError, ValueError):
    code = "model_contract"


class ScoreUndefinedError(DomainError):
    """A distortion score hit F = 0 or S = 0, where its log is undefined."""

    code = "score_undefined"

    def __init__(self, message, observation=None, draw=None):
        super().__init__(message)
        self.observation = observation
        self.draw = draw

    def to_dict(self):
        out = super().to_dict()
        out["observation"] = self.observation
        out["draw"] = self.draw
        return out


class DegenerateWeightsError(DistSensError, ArithmeticError):
    code = "degenerate_weights"


class InitializationError(DistSensError, RuntimeError):
    code = "initialization"


class InsufficientSampleError(DistSensError, ValueError):
    code = "insufficient_sample"


class ConfigError(DistSensError, ValueError):
    code = "config_error"


class IngestionError(DistSensError, ValueError):
    code = "ingestion_error"

    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = list(rows)

    def to_dict(self):
        out = super().to_dict()
        out["rows"] = self.rows
        return out


class SamplerDiagnosticWarning(UserWarning):
    pass


class LowEffectiveSampleWarning(UserWarning):
    pass
