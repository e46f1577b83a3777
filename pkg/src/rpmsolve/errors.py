"""Exception hierarchy shared across the package."""


class RPMError(Exception):
    """Base class for every error raised by rpmsolve."""


class ContractViolation(RPMError, ValueError):
    """An argument falls outside the documented domain of an operation."""


class PreconditionError(RPMError, ValueError):
    """A rule's forward model was applied outside its precondition set."""


class DegenerateBeliefError(RPMError, ValueError):
    """Perception puts zero mass on every non-empty panel."""


class ExecutionInfeasibleError(RPMError):
    """The chosen rule has zero precondition mass on the row being executed."""

    def __init__(self, rule, detail: str = ""):
        self.rule = rule
        msg = f"rule {rule.name} on {rule.axis.value} has zero precondition mass"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class GenerationError(RPMError):
    """The generator could not realize a non-degenerate instance within budget."""


class InstanceFormatError(RPMError, ValueError):
    """An instance file is malformed; the message names the offending field."""
