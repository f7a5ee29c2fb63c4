"""Error types shared across the checker."""


class ModelError(Exception):
    """A malformed model definition (reported, never a runtime branch)."""


class UndeclaredName(ModelError):
    pass


class IndexOutOfRange(ModelError):
    pass


class TypeMismatch(ModelError):
    pass


class InvalidScenario(ModelError):
    pass


class UnknownPropertyId(ModelError):
    pass


class UnboundMacro(ModelError):
    pass


class TruncatedSystem(ModelError):
    pass


class NonReplayableTrace(ModelError):
    pass


class StateLimitExceeded(Exception):
    """Exploration hit the configured state bound."""

    def __init__(self, states_found: int):
        super().__init__(f"state limit exceeded after {states_found} states")
        self.states_found = states_found
