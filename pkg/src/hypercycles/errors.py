"""Exception types shared by the library and the CLI."""


class WorkBudgetExceeded(RuntimeError):
    """An enumeration or search hit its configured work budget.

    ``steps`` is the work spent when the search stopped, ``estimate`` a rough
    total if one is known, and ``partial`` whatever results were collected.
    """

    def __init__(self, message, steps=0, estimate=None, partial=None):
        super().__init__(message)
        self.steps = steps
        self.estimate = estimate
        self.partial = partial if partial is not None else []


class PreconditionError(ValueError):
    """Inputs outside an operation's admissible range."""


class AnnihilationError(RuntimeError):
    """Regularization deleted every edge; ``trace`` holds the deletion log."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class CodegreeConditionError(PreconditionError):
    """The container theorem's co-degree condition ``delta(S, tau) <= eps`` failed."""

    def __init__(self, delta, eps):
        super().__init__(f"codegree condition violated: delta={delta:.6g}>{eps:.6g}")
        self.delta = delta
        self.eps = eps


class ContainerError(RuntimeError):
    """A container step could not meet its shrinkage target."""

    def __init__(self, message, container=None):
        super().__init__(message)
        self.container = container
