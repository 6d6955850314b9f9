"""Exception hierarchy. Each error carries a short machine-readable code."""


class AsymqError(Exception):
    code = "E_ASYMQ"


class ShapeError(AsymqError, ValueError):
    code = "E_SHAPE"


class SizeError(AsymqError, ValueError):
    code = "E_SIZE"


class ContractError(AsymqError, ValueError):
    """A precondition of an operation does not hold for its input."""

    code = "E_CONTRACT"


class FormatError(AsymqError, ValueError):
    """Malformed file content (bad JSON, missing keys, wrong format tag)."""

    code = "E_FORMAT"


class StateInvariantError(AsymqError, ValueError):
    """A state or instrument violates a physical invariant (trace, PSD, ...)."""

    code = "E_INVARIANT"

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        msg = f"invariant {invariant!r} violated"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class InconsistencyError(AsymqError, RuntimeError):
    code = "E_INCONSISTENT"
