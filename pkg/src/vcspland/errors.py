"""Exception hierarchy. Every error carries a machine-readable ``code``."""


class VcspError(Exception):
    """Base class for all library errors."""

    code = "ERROR"
    exit_status = 1

    def __init__(self, message, code=None, **details):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.details = details

    def to_dict(self):
        out = {"error": self.code, "message": str(self)}
        out.update(self.details)
        return out


class ValidationError(VcspError, ValueError):
    code = "VALIDATION"


class UnsupportedError(VcspError, ValueError):
    code = "UNSUPPORTED"


class BudgetError(VcspError):
    code = "SIZE_LIMIT"
    exit_status = 2


class InfeasibleError(VcspError):
    code = "INFEASIBLE"


class GeneratorError(VcspError):
    code = "GENERATOR_INVARIANT"
    exit_status = 3
