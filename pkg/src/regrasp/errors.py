"""Exception types shared across the toolkit."""


class RegraspError(Exception):
    """Base class for all toolkit errors."""


class DegenerateInput(RegraspError):
    """Input points cannot form a strictly convex polygon."""


class JointOutOfLimits(RegraspError):
    """A configuration assigns a revolute joint a value outside its limits."""

    def __init__(self, joint: str, value: float, lo: float, hi: float):
        super().__init__(f"joint '{joint}' value {value:.6f} outside [{lo:.6f}, {hi:.6f}]")
        self.joint = joint
        self.value = value


class IkInfeasible(RegraspError):
    """Inverse kinematics could not reach the target within its budget."""


class ParseError(RegraspError):
    """A model/object/scenario file failed validation."""

    def __init__(self, path, field: str, message: str):
        super().__init__(f"{path}: field '{field}': {message}")
        self.path = str(path)
        self.field = field


class MissingFile(RegraspError):
    """A referenced input file does not exist."""


class EmptyResult(RegraspError):
    """An enumeration produced no admissible results."""


class EmptyGraph(RegraspError):
    """No grasp is compatible with the start or goal placement."""


class NoPlan(RegraspError):
    """Start and goal became disconnected after node/edge removals."""

    def __init__(self, message: str, removal_log: list[str]):
        super().__init__(message)
        self.removal_log = list(removal_log)


class InfeasibleEndpoints(RegraspError):
    """Start or goal state of a task admits no IK solution for the hand configuration."""


class UndefinedRatio(RegraspError):
    """Stability ratio is undefined when no poses were evaluated."""


class NoCandidates(RegraspError):
    """Hand-configuration selection received no tallies."""
