"""
Dominance partial order over policy elements.

Grades order as low < numeric ranks < high, with `equal` acting as a
wildcard that matches everything. Compartment sets order by inclusion.
An element dominates another when it dominates in both coordinates.
"""

import logging
from typing import Union

from .errors import LatticeError
from .models import GradeKind, Grade, Ordering, PolicyElement, RangedElement

logger = logging.getLogger(__name__)

_RANK = {GradeKind.LOW: 0, GradeKind.NUM: 1, GradeKind.HIGH: 2}


def _single(element: Union[PolicyElement, RangedElement]) -> PolicyElement:
    if isinstance(element, RangedElement):
        raise LatticeError("dominance is defined on single-level elements, got a ranged element")
    return element


def grade_dominates(a: Grade, b: Grade) -> bool:
    """Grade rule: equal matches anything; otherwise low <= Num(k) <= high."""
    if a.kind is GradeKind.EQUAL or b.kind is GradeKind.EQUAL:
        return True
    rank_a, rank_b = _RANK[a.kind], _RANK[b.kind]
    if rank_a != rank_b:
        return rank_a > rank_b
    if a.kind is GradeKind.NUM:
        return a.value >= b.value
    return True


def dominates(a: PolicyElement, b: PolicyElement) -> bool:
    """
    Check whether element a dominates element b.

    Compartments are ignored when either grade is `equal`, and when a low
    is compared with a high (the sentinels bound each other outright).
    Against numeric grades the compartment rule still applies.

    Args:
        a: Single-level element
        b: Single-level element of the same policy

    Returns:
        True iff a dominates b
    """
    a, b = _single(a), _single(b)
    if a.grade.kind is GradeKind.EQUAL or b.grade.kind is GradeKind.EQUAL:
        return True
    if {a.grade.kind, b.grade.kind} == {GradeKind.LOW, GradeKind.HIGH}:
        return a.grade.kind is GradeKind.HIGH
    return grade_dominates(a.grade, b.grade) and a.compartments >= b.compartments


def compare(a: PolicyElement, b: PolicyElement) -> Ordering:
    """Four-way classification of dominance in both directions."""
    if a.grade.kind is GradeKind.EQUAL or b.grade.kind is GradeKind.EQUAL:
        return Ordering.EQUAL
    forward = dominates(a, b)
    backward = dominates(b, a)
    if forward and backward:
        return Ordering.EQUAL
    if forward:
        return Ordering.DOMINATES
    if backward:
        return Ordering.DOMINATED_BY
    return Ordering.INCOMPARABLE


def in_range(element: PolicyElement, envelope: RangedElement) -> bool:
    """True iff element lies within the lo-hi envelope of a ranged element."""
    return dominates(element, envelope.lo) and dominates(envelope.hi, element)


def _require_numeric(a: PolicyElement, b: PolicyElement, operation: str) -> None:
    for element in (_single(a), _single(b)):
        if element.grade.kind is not GradeKind.NUM:
            raise LatticeError(f"{operation} is only defined for numeric grades, got '{element.grade}'")


def meet(a: PolicyElement, b: PolicyElement) -> PolicyElement:
    """Greatest lower bound of two numeric-grade elements."""
    _require_numeric(a, b, "meet")
    return PolicyElement(Grade.num(min(a.grade.value, b.grade.value)), a.compartments & b.compartments)


def join(a: PolicyElement, b: PolicyElement) -> PolicyElement:
    """Least upper bound of two numeric-grade elements."""
    _require_numeric(a, b, "join")
    return PolicyElement(Grade.num(max(a.grade.value, b.grade.value)), a.compartments | b.compartments)
