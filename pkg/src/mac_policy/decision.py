"""
Access decisions for the Biba and MLS policies and their composition.

Both policies use the liberal star-property:

    biba  read:  object dominates subject   (no read-down)
          write: subject dominates object   (no write-up)
    mls   read:  subject dominates object   (no read-up)
          write: object dominates subject   (no write-down)

A multi-policy label is allowed an operation only when every policy it
carries allows it.
"""

import logging
from typing import Callable, Dict, List, Tuple

from .errors import PolicyMismatchError, RangedObjectError
from .lattice import dominates, in_range
from .models import (
    AccessOp,
    Decision,
    Element,
    GradeKind,
    MacLabel,
    PolicyElement,
    PolicyVerdict,
    RangedElement,
    Verdict,
    effective_of,
)

logger = logging.getLogger(__name__)

RuleFunction = Callable[[PolicyElement, PolicyElement, AccessOp], Verdict]


def biba_decide(subject: PolicyElement, obj: PolicyElement, op: AccessOp) -> Verdict:
    """Biba integrity: no read-down, no write-up."""
    if op is AccessOp.READ:
        return Verdict.of(dominates(obj, subject))
    return Verdict.of(dominates(subject, obj))


def mls_decide(subject: PolicyElement, obj: PolicyElement, op: AccessOp) -> Verdict:
    """MLS confidentiality: no read-up, no write-down."""
    if op is AccessOp.READ:
        return Verdict.of(dominates(subject, obj))
    return Verdict.of(dominates(obj, subject))


# Policy registry: one rule per name in models.POLICY_NAMES.
POLICY_RULES: Dict[str, RuleFunction] = {
    "biba": biba_decide,
    "mls": mls_decide,
}

RULE_IDS: Dict[Tuple[str, AccessOp], str] = {
    ("biba", AccessOp.READ): "no-read-down",
    ("biba", AccessOp.WRITE): "no-write-up",
    ("mls", AccessOp.READ): "no-read-up",
    ("mls", AccessOp.WRITE): "no-write-down",
}


def _require_same_policies(first: MacLabel, second: MacLabel, what: str) -> None:
    if set(first.policy_names) != set(second.policy_names):
        raise PolicyMismatchError(
            f"{what}: policies {sorted(first.policy_names)} vs {sorted(second.policy_names)}"
        )


def _require_single_level(label: MacLabel, what: str) -> None:
    if label.is_ranged:
        raise RangedObjectError(f"{what} must be single-level, got '{label}'")


def _may_take(element: PolicyElement, envelope: RangedElement) -> bool:
    """Relabel target check: `equal` only when the envelope itself carries it."""
    if element.grade.kind is GradeKind.EQUAL:
        return GradeKind.EQUAL in (envelope.lo.grade.kind, envelope.hi.grade.kind)
    return in_range(element, envelope)


def as_range(element: Element) -> RangedElement:
    """Treat a single-level element as the degenerate range [e, e]."""
    if isinstance(element, RangedElement):
        return element
    return RangedElement(element, element, element)


def decide(subject: MacLabel, obj: MacLabel, op: AccessOp) -> Decision:
    """
    Decide an access under every policy the labels carry.

    Args:
        subject: Subject label; ranged elements act through their effective part
        obj: Single-level object label
        op: Read or write

    Returns:
        Decision whose verdict is the conjunction of the per-policy verdicts

    Raises:
        PolicyMismatchError: the labels cover different policies
        RangedObjectError: the object label is ranged
    """
    _require_same_policies(subject, obj, "decide")
    _require_single_level(obj, "object label")

    breakdown: List[PolicyVerdict] = []
    for name, element in subject.entries:
        rule = POLICY_RULES[name]
        verdict = rule(effective_of(element), obj[name], op)
        breakdown.append(PolicyVerdict(name, verdict, RULE_IDS[(name, op)]))

    decision = Decision.from_breakdown(breakdown)
    logger.debug(f"decide {op.value}: subject '{subject}' object '{obj}' -> {decision.verdict.value}")
    return decision


def subject_relabel(current: MacLabel, requested: MacLabel) -> Decision:
    """
    Move a subject's effective label within its envelope (setpmac).

    Args:
        current: Session label; ranged elements give the envelope
        requested: New single-level effective label

    Returns:
        Allow iff every requested element is within the matching envelope;
        `equal` only when the envelope lo or hi is itself `equal`.
        On Allow, `decision.label` is the new session label: old lo/hi, new effective.
    """
    _require_same_policies(current, requested, "setpmac")
    _require_single_level(requested, "requested label")

    breakdown: List[PolicyVerdict] = []
    entries: List[Tuple[str, Element]] = []
    for name, element in current.entries:
        wanted = requested[name]
        envelope = as_range(element)
        verdict = Verdict.of(_may_take(wanted, envelope))
        breakdown.append(PolicyVerdict(name, verdict, "subject-range"))
        if isinstance(element, RangedElement):
            entries.append((name, RangedElement(wanted, element.lo, element.hi)))
        else:
            entries.append((name, wanted))

    return Decision.from_breakdown(breakdown, label=MacLabel(tuple(entries)))


def object_relabel(subject: MacLabel, old: MacLabel, new: MacLabel) -> Decision:
    """
    Relabel an object (setfmac).

    Both the current and the new object label must lie within the subject's
    envelope for every policy. A new `equal` element needs an envelope that
    carries `equal` itself.
    """
    _require_same_policies(subject, old, "setfmac")
    _require_same_policies(subject, new, "setfmac")
    _require_single_level(old, "current object label")
    _require_single_level(new, "new object label")

    breakdown: List[PolicyVerdict] = []
    for name, element in subject.entries:
        envelope = as_range(element)
        old_ok = in_range(old[name], envelope)
        new_ok = _may_take(new[name], envelope)
        if not old_ok:
            breakdown.append(PolicyVerdict(name, Verdict.DENY, "old-label-outside-range"))
        elif not new_ok:
            breakdown.append(PolicyVerdict(name, Verdict.DENY, "new-label-outside-range"))
        else:
            breakdown.append(PolicyVerdict(name, Verdict.ALLOW, "subject-range"))
    return Decision.from_breakdown(breakdown)
