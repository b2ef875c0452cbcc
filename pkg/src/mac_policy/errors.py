"""
Exceptions raised by the MAC policy engine.

Policy denials are never raised: they come back as Decision values. The
exceptions below signal malformed input, misuse of the API, or operations
on things that do not exist.
"""

from typing import List, Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from .models import Violation


class MacPolicyError(Exception):
    """Base class for every error raised by mac_policy."""
    pass


class LabelSyntaxError(MacPolicyError):
    """Label text does not match the label grammar."""

    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        self.reason = reason
        super().__init__(f"{reason} at position {position} in '{text}'")


class LabelValidationError(MacPolicyError):
    """Label text parsed but breaks one or more label invariants."""

    def __init__(self, violations: List["Violation"], text: Optional[str] = None):
        self.violations = list(violations)
        self.text = text
        summary = ", ".join(str(v) for v in self.violations)
        prefix = f"invalid label '{text}'" if text is not None else "invalid label"
        super().__init__(f"{prefix}: {summary}")


class PolicyMismatchError(MacPolicyError):
    """Two labels do not cover the same set of policies."""
    pass


class RangedObjectError(MacPolicyError):
    """A ranged element was given where only single-level elements are allowed."""
    pass


class LatticeError(MacPolicyError):
    """Lattice operation undefined for the given elements."""
    pass


class ChineseWallError(MacPolicyError):
    """Base class for Chinese Wall label errors."""
    pass


class LengthMismatchError(ChineseWallError):
    """Chinese Wall labels of different industry counts were combined."""
    pass


class IncompatibleLabelsError(ChineseWallError):
    """Join requested for labels that disagree on some industry."""
    pass


class InfeasibleConfigError(ChineseWallError):
    """Chinese Wall configuration needs more compartments than labels allow."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class WallViolationError(ChineseWallError):
    """Progress would cross a conflict-of-interest wall."""
    pass


class ScenarioError(MacPolicyError):
    """Base class for errors in the labeled filesystem simulation."""
    pass


class ScenarioSyntaxError(ScenarioError):
    """A scenario or script line does not match the scenario grammar."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        self.message = message
        super().__init__(f"line {line_no}: {message}")


class ScenarioValidationError(ScenarioError):
    """A scenario or script line carries an invalid label."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        self.message = message
        super().__init__(f"line {line_no}: {message}")


class UnknownUserError(ScenarioError):
    pass


class UnknownSessionError(ScenarioError):
    pass


class UnknownPathError(ScenarioError):
    pass


class AlreadyExistsError(ScenarioError):
    pass


class NotAFolderError(ScenarioError):
    pass
