"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` used by the CLI:
1 generic / parse trouble, 2 necessity violated, 3 infeasible
hypothesis or inadmissible parameters, 4 internal contract failure.
"""


class HyperfactorError(Exception):
    exit_code = 1


class InvalidParams(HyperfactorError):
    exit_code = 3


class UnknownVertex(HyperfactorError):
    pass


class UnknownColor(HyperfactorError):
    pass


class MissingS(HyperfactorError):
    exit_code = 3


class BadSubsets(HyperfactorError):
    exit_code = 3


class DegenerateDenominator(HyperfactorError):
    exit_code = 3


class NotApplicable(HyperfactorError):
    exit_code = 3


class ConditionViolated(HyperfactorError):
    """A preset's modular side condition fails; ``failures`` lists which."""

    exit_code = 3

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("condition(s) violated: " + ", ".join(self.failures))


class NotPartialFactorization(HyperfactorError):
    exit_code = 3


class NotAdmissible(HyperfactorError):
    exit_code = 3


class HypothesisNotSatisfied(HyperfactorError):
    exit_code = 3


class BudgetInfeasible(HyperfactorError):
    exit_code = 3


class NecessityViolated(HyperfactorError):
    exit_code = 2

    def __init__(self, color, reason=""):
        self.color = color
        self.reason = reason
        super().__init__(f"class {color} cannot be made connected: {reason}")


class ColoringStuck(HyperfactorError):
    """Greedy star-edge coloring found no feasible color.

    Expected only when the host is smaller than the guaranteed bound;
    surfaced as a diagnostic rather than a crash.
    """

    exit_code = 3

    def __init__(self, cell, alpha_count):
        self.cell = tuple(cell)
        self.alpha_count = alpha_count
        super().__init__(
            f"no color admits edge {self.cell} with {alpha_count} amalgam slots"
        )


class CapacityMismatch(HyperfactorError):
    exit_code = 4


class NegativeBudget(HyperfactorError):
    exit_code = 3

    def __init__(self, color, value):
        self.color = color
        self.value = value
        super().__init__(f"class {color} would need {value} copies of the pure amalgam edge")


class FairnessInfeasible(HyperfactorError):
    exit_code = 4

    def __init__(self, step, detail=""):
        self.step = step
        super().__init__(f"no fair split exists at step {step}: {detail}")


class ConnectivityRepairExhausted(HyperfactorError):
    exit_code = 4

    def __init__(self, color, retries):
        self.color = color
        self.retries = retries
        super().__init__(
            f"class {color} still disconnected after {retries} reseeded attempts"
        )


class NotConnected(HyperfactorError):
    pass


class VertexMismatch(HyperfactorError):
    exit_code = 4


class CapExceeded(HyperfactorError):
    exit_code = 3


class InternalContractError(HyperfactorError):
    """The pipeline produced something the verifier rejects: always a bug."""

    exit_code = 4


class ParseError(HyperfactorError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class ValidationError(HyperfactorError):
    def __init__(self, message, line_no=None):
        self.line_no = line_no
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(where + message)
