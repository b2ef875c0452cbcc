"""
Executes parsed scenario scripts against a World and checks expectations.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Union

from .errors import MacPolicyError
from .models import Decision, Verdict
from .scenario_loader import DECLARATION_VERBS, ScriptStep, apply_declaration, parse_script
from .world import (
    World,
    op_copy,
    op_create,
    op_delete,
    op_move,
    op_read,
    op_write,
    session_start,
    setfmac,
    setpmac,
)

logger = logging.getLogger(__name__)


@dataclass
class StepResult:
    """Outcome of one script step."""
    step: ScriptStep
    decision: Optional[Decision] = None
    error: Optional[str] = None

    @property
    def actual(self) -> Optional[Verdict]:
        return self.decision.verdict if self.decision else None

    @property
    def passed(self) -> bool:
        if self.error is not None:
            return False
        if self.step.expect is None:
            return True
        return self.actual is self.step.expect


@dataclass
class ScriptReport:
    results: List[StepResult] = field(default_factory=list)
    stopped_early: bool = False

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[StepResult]:
        return [result for result in self.results if not result.passed]

    @property
    def first_failure(self) -> Optional[StepResult]:
        failures = self.failures
        return failures[0] if failures else None

    @property
    def steps(self) -> int:
        return len(self.results)


_OPERATIONS: Dict[str, Callable[..., Decision]] = {
    "read": op_read,
    "write": op_write,
    "create": op_create,
    "delete": op_delete,
    "copy": op_copy,
    "move": op_move,
}


def execute_step(world: World, step: ScriptStep) -> StepResult:
    """Run one step. Runtime errors (unknown path, existing target...) become failed results."""
    try:
        if step.verb in DECLARATION_VERBS:
            apply_declaration(world, step)
            return StepResult(step)
        if step.verb == "session":
            session_start(world, step.args[1], sid=step.args[0])
            return StepResult(step)
        if step.verb == "setpmac":
            return StepResult(step, setpmac(world, step.args[0], step.label))
        if step.verb == "setfmac":
            return StepResult(step, setfmac(world, step.args[0], step.args[1], step.label))
        return StepResult(step, _OPERATIONS[step.verb](world, *step.args))
    except MacPolicyError as e:
        logger.warning(f"line {step.line_no}: {step.text}: {e}")
        return StepResult(step, error=str(e))


def run_script(
    world: World,
    script: Union[str, Sequence[ScriptStep]],
    stop_on_failure: bool = False,
) -> ScriptReport:
    """
    Execute a script against a world.

    Args:
        world: World to run in; mutated in place
        script: Script text or already parsed steps
        stop_on_failure: Stop at the first step whose expectation is not met

    Returns:
        ScriptReport with one result per executed step

    Raises:
        ScenarioSyntaxError / ScenarioValidationError: the script text does not
            parse; nothing is executed
    """
    steps = parse_script(script) if isinstance(script, str) else list(script)
    report = ScriptReport()
    for step in steps:
        result = execute_step(world, step)
        report.results.append(result)
        if not result.passed:
            expected = step.expect.value if step.expect else "success"
            actual = result.actual.value if result.actual else result.error
            logger.warning(f"line {step.line_no}: '{step.text}' expected {expected}, got {actual}")
            if stop_on_failure:
                report.stopped_early = True
                break

    logger.info(f"Script finished: {report.steps} steps, {len(report.failures)} failed")
    return report
