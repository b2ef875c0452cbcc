"""
FreeBSD MAC label text <-> in-memory model.

Grammar (no whitespace anywhere):

    label        := policy ("," policy)*
    policy       := name "/" qualifier
    name         := "biba" | "mls"
    qualifier    := element | element "(" element "-" element ")"
    element      := grade (":" compartments)?
    grade        := DECIMAL | "low" | "high" | "equal"
    compartments := DECIMAL ("+" DECIMAL)*

Canonical output sorts compartments ascending, keeps policies in input
order and prints a range whenever the element is ranged, even a
degenerate one such as biba/10(10-10).
"""

import logging
from typing import List, Tuple

from .errors import LabelSyntaxError, LabelValidationError
from .lattice import dominates, in_range
from .models import (
    POLICY_NAMES,
    Element,
    Grade,
    GradeKind,
    MacLabel,
    PolicyElement,
    RangedElement,
    Violation,
)

logger = logging.getLogger(__name__)

MAX_GRADE = 65535
MIN_COMPARTMENT = 1
MAX_COMPARTMENT = 255
_MAX_DIGITS = len(str(MAX_GRADE))

_SENTINELS = {"low": GradeKind.LOW, "high": GradeKind.HIGH, "equal": GradeKind.EQUAL}


class _LabelScanner:
    """Cursor over label text with one-character lookahead."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        # duplicate compartment ids seen while scanning: (field, id)
        self.duplicates: List[Tuple[str, int]] = []

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def fail(self, reason: str) -> LabelSyntaxError:
        return LabelSyntaxError(self.text, self.pos, reason)

    def expect(self, char: str, reason: str) -> None:
        if self.peek() != char:
            raise self.fail(reason)
        self.pos += 1

    def read_while(self, predicate) -> str:
        start = self.pos
        while not self.at_end() and predicate(self.text[self.pos]):
            self.pos += 1
        return self.text[start:self.pos]

    def read_decimal(self, what: str, field: str, rule: str) -> int:
        digits = self.read_while(lambda c: "0" <= c <= "9")
        if not digits:
            found = self.peek()
            raise self.fail(f"expected {what}" + (f", found '{found}'" if found else ", found end of label"))
        # int() refuses very long strings; nothing past _MAX_DIGITS can be in range
        significant = digits.lstrip("0") or "0"
        if len(significant) > _MAX_DIGITS:
            raise LabelValidationError([Violation(field, rule, f"{len(significant)}-digit {what}")], self.text)
        return int(significant)

    def read_policy(self) -> Tuple[str, Element]:
        start = self.pos
        name = self.read_while(lambda c: "a" <= c <= "z")
        if not name:
            raise self.fail("expected policy name")
        if name not in POLICY_NAMES:
            raise LabelSyntaxError(self.text, start, f"unknown policy '{name}'")
        self.expect("/", f"expected '/' after policy name '{name}'")
        if self.at_end() or self.peek() == ",":
            raise self.fail("missing qualifier")
        effective = self.read_element(f"{name}.effective")
        if self.peek() != "(":
            return name, effective
        self.pos += 1
        lo = self.read_element(f"{name}.lo")
        self.expect("-", "expected '-' between range bounds")
        hi = self.read_element(f"{name}.hi")
        self.expect(")", "expected ')' closing the range")
        return name, RangedElement(effective, lo, hi)

    def read_element(self, field: str) -> PolicyElement:
        grade = self.read_grade(field)
        if self.peek() != ":":
            return PolicyElement(grade)
        self.pos += 1
        seen: List[int] = [self.read_decimal("compartment number", field, "compartment-out-of-range")]
        while self.peek() == "+":
            self.pos += 1
            seen.append(self.read_decimal("compartment number", field, "compartment-out-of-range"))
        compartments = frozenset(seen)
        if len(compartments) != len(seen):
            for ident in sorted(compartments):
                if seen.count(ident) > 1:
                    self.duplicates.append((field, ident))
        return PolicyElement(grade, compartments)

    def read_grade(self, field: str) -> Grade:
        if self.peek() and "0" <= self.peek() <= "9":
            return Grade.num(self.read_decimal("grade", field, "grade-out-of-range"))
        start = self.pos
        word = self.read_while(lambda c: "a" <= c <= "z")
        if word in _SENTINELS:
            return Grade(_SENTINELS[word])
        if not word:
            found = self.peek()
            raise self.fail("expected grade" + (f", found '{found}'" if found else ", found end of label"))
        raise LabelSyntaxError(self.text, start, f"unknown grade '{word}'")


def parse_label(text: str) -> MacLabel:
    """
    Parse FreeBSD label text into a MacLabel.

    Args:
        text: Label text such as "biba/5(2-10),mls/50:1(50:1-50:1)"

    Returns:
        The structured label; every invariant of it holds

    Raises:
        LabelSyntaxError: text is outside the grammar (carries the position)
        LabelValidationError: text parses but breaks an invariant
    """
    if not isinstance(text, str) or not text:
        raise LabelSyntaxError(text if isinstance(text, str) else repr(text), 0, "empty label")

    scanner = _LabelScanner(text)
    entries: List[Tuple[str, Element]] = [scanner.read_policy()]
    while not scanner.at_end():
        scanner.expect(",", f"unexpected character '{scanner.peek()}'")
        entries.append(scanner.read_policy())

    label = MacLabel(tuple(entries))
    violations = [
        Violation(field, "duplicate-compartment", f"compartment {ident} listed twice")
        for field, ident in scanner.duplicates
    ]
    violations.extend(validate(label))
    if violations:
        raise LabelValidationError(violations, text)

    logger.debug(f"Parsed label '{text}' with policies {label.policy_names}")
    return label


def format_element(element: PolicyElement) -> str:
    """Canonical text of a single-level element: grade[:c1+c2...]."""
    text = str(element.grade)
    if element.compartments:
        text += ":" + "+".join(str(c) for c in sorted(element.compartments))
    return text


def format_qualifier(element: Element) -> str:
    if isinstance(element, RangedElement):
        return (
            f"{format_element(element.effective)}"
            f"({format_element(element.lo)}-{format_element(element.hi)})"
        )
    return format_element(element)


def format_label(label: MacLabel) -> str:
    """Canonical label text; parse_label(format_label(x)) == x for valid x."""
    return ",".join(f"{name}/{format_qualifier(element)}" for name, element in label.entries)


def _element_violations(field: str, element: PolicyElement) -> List[Violation]:
    violations = []
    grade = element.grade
    if grade.kind is GradeKind.NUM and not (0 <= grade.value <= MAX_GRADE):
        violations.append(Violation(field, "grade-out-of-range", f"{grade.value} not in [0, {MAX_GRADE}]"))
    for ident in sorted(element.compartments):
        if not (MIN_COMPARTMENT <= ident <= MAX_COMPARTMENT):
            violations.append(Violation(
                field, "compartment-out-of-range",
                f"{ident} not in [{MIN_COMPARTMENT}, {MAX_COMPARTMENT}]",
            ))
    if grade.kind is GradeKind.EQUAL and element.compartments:
        violations.append(Violation(field, "compartments-on-equal", "the equal grade takes no compartments"))
    return violations


def validate(label: MacLabel) -> List[Violation]:
    """
    Check every label invariant.

    Returns:
        List of violations, empty iff the label is valid
    """
    violations: List[Violation] = []
    seen = set()
    for name, element in label.entries:
        if name not in POLICY_NAMES:
            violations.append(Violation(name, "unknown-policy", f"known policies: {', '.join(POLICY_NAMES)}"))
        if name in seen:
            violations.append(Violation(name, "duplicate-policy"))
        seen.add(name)

        if isinstance(element, RangedElement):
            violations.extend(_element_violations(f"{name}.effective", element.effective))
            violations.extend(_element_violations(f"{name}.lo", element.lo))
            violations.extend(_element_violations(f"{name}.hi", element.hi))
            if not dominates(element.hi, element.lo):
                violations.append(Violation(
                    name, "lo-not-dominated-by-hi",
                    f"{format_element(element.lo)} vs {format_element(element.hi)}",
                ))
            elif not in_range(element.effective, element):
                violations.append(Violation(
                    name, "effective-outside-range",
                    f"{format_element(element.effective)} outside "
                    f"{format_element(element.lo)}-{format_element(element.hi)}",
                ))
        else:
            violations.extend(_element_violations(name, element))
    return violations


def ensure_valid(label: MacLabel) -> MacLabel:
    """Return label unchanged or raise LabelValidationError."""
    violations = validate(label)
    if violations:
        raise LabelValidationError(violations, format_label(label))
    return label
