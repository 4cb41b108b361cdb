"""Exception types shared across modules."""


class BudgetError(RuntimeError):
    """A request exceeds a configured resource budget (qubits, lattice size, samples)."""


class BoundError(AssertionError):
    """A certified numerical bound was violated."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap before certifying its tolerance."""

    def __init__(self, message: str, gap: float, iterations: int):
        super().__init__(message)
        self.gap = gap
        self.iterations = iterations
