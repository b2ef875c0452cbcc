"""
Line-based scenario and script format.

    # comment
    folder <path> label <label> [sticky] [owner <user>]
    user <name> label <label>
    session <sid> user <name>
    setpmac <sid> <label> [expect allow|deny]
    setfmac <sid> <path> <label> [expect allow|deny]
    create|read|write|delete <sid> <path> [expect allow|deny]
    copy|move <sid> <src> <dst> [expect allow|deny]

A scenario (world) file holds folder and user declarations. A script may
hold any line. Labels are parsed while loading, so a bad label is reported
with its line number before anything runs.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

from .config_manager import get_config_manager
from .errors import (
    LabelSyntaxError,
    LabelValidationError,
    MacPolicyError,
    ScenarioSyntaxError,
    ScenarioValidationError,
)
from .label_parser import parse_label
from .models import MacLabel, Verdict
from .world import World, add_folder, add_user

logger = logging.getLogger(__name__)

DECLARATION_VERBS = ("folder", "user")
# verb -> number of positional arguments before the optional label / expect
OPERATION_ARITY = {
    "session": 1,
    "setpmac": 1,
    "setfmac": 2,
    "create": 2,
    "read": 2,
    "write": 2,
    "delete": 2,
    "copy": 3,
    "move": 3,
}


@dataclass(frozen=True)
class ScriptStep:
    """One parsed scenario line."""
    line_no: int
    verb: str
    args: Tuple[str, ...]
    label: Optional[MacLabel] = None
    expect: Optional[Verdict] = None
    sticky: bool = False
    owner: Optional[str] = None

    @property
    def text(self) -> str:
        if self.verb == "session":
            return f"session {self.args[0]} user {self.args[1]}"
        parts = [self.verb, *self.args]
        if self.verb in DECLARATION_VERBS:
            parts.append("label")
        if self.label is not None:
            parts.append(str(self.label))
        if self.expect is not None:
            parts.extend(["expect", self.expect.value])
        return " ".join(parts)


def _parse_label_at(line_no: int, text: str) -> MacLabel:
    try:
        return parse_label(text)
    except LabelSyntaxError as e:
        raise ScenarioSyntaxError(line_no, f"bad label: {e}") from e
    except LabelValidationError as e:
        raise ScenarioValidationError(line_no, str(e)) from e


def _split_expect(line_no: int, tokens: List[str]) -> Tuple[List[str], Optional[Verdict]]:
    if "expect" not in tokens:
        return tokens, None
    index = tokens.index("expect")
    tail = tokens[index + 1:]
    if len(tail) != 1 or tail[0] not in ("allow", "deny"):
        raise ScenarioSyntaxError(line_no, "expect takes exactly one of: allow, deny")
    return tokens[:index], Verdict(tail[0])


def _parse_declaration(line_no: int, verb: str, tokens: List[str]) -> ScriptStep:
    if len(tokens) < 3 or tokens[1] != "label":
        raise ScenarioSyntaxError(line_no, f"expected '{verb} <name> label <label>'")
    name, label = tokens[0], _parse_label_at(line_no, tokens[2])
    sticky, owner = False, None
    extra = tokens[3:]
    while extra:
        if verb == "folder" and extra[0] == "sticky":
            sticky = True
            extra = extra[1:]
        elif verb == "folder" and extra[0] == "owner" and len(extra) >= 2:
            owner = extra[1]
            extra = extra[2:]
        else:
            raise ScenarioSyntaxError(line_no, f"unexpected '{extra[0]}' in {verb} declaration")
    return ScriptStep(line_no, verb, (name,), label=label, sticky=sticky, owner=owner)


def parse_line(line_no: int, line: str) -> Optional[ScriptStep]:
    """Parse one line; None for blanks and comments."""
    line = line.split("#", 1)[0].strip()
    if not line:
        return None
    verb, *tokens = line.split()

    if verb in DECLARATION_VERBS:
        return _parse_declaration(line_no, verb, tokens)
    if verb not in OPERATION_ARITY:
        raise ScenarioSyntaxError(line_no, f"unknown verb '{verb}'")

    tokens, expect = _split_expect(line_no, tokens)
    arity = OPERATION_ARITY[verb]
    if verb == "session":
        if len(tokens) != 3 or tokens[1] != "user":
            raise ScenarioSyntaxError(line_no, "expected 'session <sid> user <name>'")
        if expect is not None:
            raise ScenarioSyntaxError(line_no, "session takes no expectation")
        return ScriptStep(line_no, verb, (tokens[0], tokens[2]))

    wants_label = verb in ("setpmac", "setfmac")
    expected_count = arity + (1 if wants_label else 0)
    if len(tokens) != expected_count:
        raise ScenarioSyntaxError(
            line_no, f"'{verb}' takes {expected_count} arguments, got {len(tokens)}"
        )
    if wants_label:
        return ScriptStep(line_no, verb, tuple(tokens[:-1]), label=_parse_label_at(line_no, tokens[-1]), expect=expect)
    return ScriptStep(line_no, verb, tuple(tokens), expect=expect)


def parse_script(text: str) -> List[ScriptStep]:
    """
    Parse scenario text into steps without executing anything.

    Raises:
        ScenarioSyntaxError: a line is outside the grammar
        ScenarioValidationError: a label breaks an invariant
    """
    steps = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        step = parse_line(line_no, line)
        if step is not None:
            steps.append(step)
    return steps


def apply_declaration(world: World, step: ScriptStep) -> None:
    """Apply a folder or user line, reporting failures against its line number."""
    try:
        if step.verb == "folder":
            add_folder(world, step.args[0], step.label, sticky=step.sticky, owner=step.owner)
        else:
            add_user(world, step.args[0], step.label)
    except MacPolicyError as e:
        raise ScenarioValidationError(step.line_no, str(e)) from e


def load_scenario(text: str, world: Optional[World] = None) -> World:
    """
    Build a World from folder and user declarations.

    Args:
        text: Scenario text
        world: World to extend; a fresh one when omitted

    Returns:
        The populated World
    """
    steps = parse_script(text)
    world = world if world is not None else World()
    for step in steps:
        if step.verb not in DECLARATION_VERBS:
            raise ScenarioSyntaxError(step.line_no, f"'{step.verb}' belongs in a script, not a scenario")
        apply_declaration(world, step)
    logger.debug(f"Loaded scenario: {len(world.folders())} folders, {len(world.users)} users")
    return world


def read_fixture(name_or_path: Union[str, Path]) -> str:
    """Text of a scenario file or bundled fixture ("biba-org")."""
    path = get_config_manager().resolve_fixture(str(name_or_path))
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def load_scenario_file(name_or_path: Union[str, Path]) -> World:
    """Load a scenario from a path or bundled fixture name."""
    world = load_scenario(read_fixture(name_or_path))
    logger.info(f"Loaded {name_or_path}: {len(world.folders())} folders, {len(world.users)} users")
    return world
