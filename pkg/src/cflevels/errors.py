"""Exception types shared across the package."""


class RefusalError(Exception):
    """A computation was declined because a gate (budget or hypothesis) failed.

    ``gate`` names the bound or hypothesis that fired so callers can report it.
    """

    def __init__(self, gate, message):
        super().__init__(f"{gate}: {message}")
        self.gate = gate
        self.message = message


class BudgetExceeded(RefusalError):
    pass


class HypothesisNotMet(RefusalError):
    pass
