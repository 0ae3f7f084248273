class ScenarioError(Exception):
    """Base class for every error raised while loading, validating or solving a scenario."""


class ScenarioParseError(ScenarioError):
    """Raised when a scenario document is not valid JSON."""
    def __init__(self, path, line, column, message="Invalid scenario document"):
        self.path = path
        self.line = line
        self.column = column
        self.message = f"{message}: '{path}' (line {line}, column {column})"
        super().__init__(self.message)


class ScenarioValidationError(ScenarioError):
    """Raised when a field of a scenario, allocation or option set violates its constraint."""
    def __init__(self, field, constraint, message="Invalid value"):
        self.field = field
        self.constraint = constraint
        self.message = f"{message} for '{field}': {constraint}"
        super().__init__(self.message)


class DomainError(ScenarioError, ValueError):
    """Raised when a physical formula is evaluated outside its domain."""


class InfeasibleScenarioError(ScenarioError):
    """Raised by the command line when a requested solve has no feasible allocation."""
    def __init__(self, what, min_qos_slack=None):
        self.what = what
        self.min_qos_slack = min_qos_slack
        self.message = f"No feasible allocation for {what}"
        if min_qos_slack is not None:
            self.message += f" (best max-min QoS slack {min_qos_slack:.6g} bits)"
        super().__init__(self.message)


class DemodulationError(ScenarioError, ValueError):
    """Raised on malformed bit streams or sample buffers."""
