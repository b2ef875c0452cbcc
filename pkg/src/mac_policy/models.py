"""
Data models for the MAC policy engine.

This module defines the core data structures: grades, policy elements,
multi-policy labels, access decisions, and the records of the labeled
filesystem simulation (objects, users, sessions, audit entries).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple, Union

# Policy modules the engine knows about. The label parser rejects any
# other name and decision.POLICY_RULES carries one rule pair per entry.
POLICY_NAMES: Tuple[str, ...] = ("biba", "mls")


class GradeKind(Enum):
    """Kinds of grade: a numeric rank or one of the sentinels."""
    NUM = "num"
    LOW = "low"
    HIGH = "high"
    EQUAL = "equal"


@dataclass(frozen=True)
class Grade:
    """Vertical coordinate of a policy element."""
    kind: GradeKind
    value: Optional[int] = None

    @classmethod
    def num(cls, value: int) -> "Grade":
        return cls(GradeKind.NUM, value)

    @classmethod
    def low(cls) -> "Grade":
        return cls(GradeKind.LOW)

    @classmethod
    def high(cls) -> "Grade":
        return cls(GradeKind.HIGH)

    @classmethod
    def equal(cls) -> "Grade":
        return cls(GradeKind.EQUAL)

    @property
    def is_sentinel(self) -> bool:
        return self.kind is not GradeKind.NUM

    def __str__(self) -> str:
        if self.kind is GradeKind.NUM:
            return str(self.value)
        return self.kind.value


LOW = Grade.low()
HIGH = Grade.high()
EQUAL = Grade.equal()


@dataclass(frozen=True)
class PolicyElement:
    """A grade plus a compartment set, e.g. mls/50:1+2."""
    grade: Grade
    compartments: FrozenSet[int] = frozenset()

    @classmethod
    def of(cls, grade: Union[Grade, int, str], *compartments: int) -> "PolicyElement":
        """Shorthand constructor: PolicyElement.of(50, 1, 2) or PolicyElement.of("low")."""
        if isinstance(grade, int):
            grade = Grade.num(grade)
        elif isinstance(grade, str):
            grade = Grade(GradeKind(grade))
        return cls(grade, frozenset(compartments))


@dataclass(frozen=True)
class RangedElement:
    """Subject element with an effective point inside a lo-hi envelope."""
    effective: PolicyElement
    lo: PolicyElement
    hi: PolicyElement


Element = Union[PolicyElement, RangedElement]


def effective_of(element: Element) -> PolicyElement:
    """Return the single-level element a subject acts with."""
    if isinstance(element, RangedElement):
        return element.effective
    return element


@dataclass(frozen=True)
class MacLabel:
    """Ordered composition of named policy elements (biba/5(2-10),mls/low)."""
    entries: Tuple[Tuple[str, Element], ...] = ()

    @classmethod
    def of(cls, *entries: Tuple[str, Element]) -> "MacLabel":
        return cls(tuple(entries))

    def __iter__(self) -> Iterator[Tuple[str, Element]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def policy_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def get(self, policy: str) -> Optional[Element]:
        for name, element in self.entries:
            if name == policy:
                return element
        return None

    def __getitem__(self, policy: str) -> Element:
        element = self.get(policy)
        if element is None:
            raise KeyError(policy)
        return element

    @property
    def is_ranged(self) -> bool:
        return any(isinstance(element, RangedElement) for _, element in self.entries)

    @property
    def carries_equal(self) -> bool:
        """True if any policy acts at the equal grade."""
        return any(effective_of(element).grade.kind is GradeKind.EQUAL for _, element in self.entries)

    def effective(self) -> "MacLabel":
        """Single-level projection: every ranged element replaced by its effective part."""
        return MacLabel(tuple((name, effective_of(element)) for name, element in self.entries))

    def __str__(self) -> str:
        from .label_parser import format_label
        return format_label(self)


@dataclass(frozen=True)
class Violation:
    """One broken label invariant."""
    field: str
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        if self.detail:
            return f"{self.field}: {self.rule} ({self.detail})"
        return f"{self.field}: {self.rule}"


class Ordering(Enum):
    """Outcome of comparing two policy elements."""
    EQUAL = "equal"
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated-by"
    INCOMPARABLE = "incomparable"


class AccessOp(Enum):
    """Information-flow operations checked by the decision rules."""
    READ = "read"
    WRITE = "write"


class Verdict(Enum):
    ALLOW = "allow"
    DENY = "deny"

    @classmethod
    def of(cls, allowed: bool) -> "Verdict":
        return cls.ALLOW if allowed else cls.DENY


@dataclass(frozen=True)
class PolicyVerdict:
    """Per-policy entry of a decision breakdown."""
    policy: str
    verdict: Verdict
    rule: str
    stage: str = ""

    def __str__(self) -> str:
        prefix = f"{self.stage} " if self.stage else ""
        return f"{prefix}{self.policy}: {self.verdict.value} ({self.rule})"


@dataclass(frozen=True)
class Decision:
    """Composed verdict with its per-policy breakdown.

    `label` carries the resulting subject label for a granted subject relabel.
    """
    verdict: Verdict
    breakdown: Tuple[PolicyVerdict, ...] = ()
    label: Optional[MacLabel] = None

    @classmethod
    def from_breakdown(cls, breakdown: Iterable[PolicyVerdict], label: Optional[MacLabel] = None) -> "Decision":
        entries = tuple(breakdown)
        allowed = all(entry.verdict is Verdict.ALLOW for entry in entries)
        return cls(Verdict.of(allowed), entries, label if allowed else None)

    @classmethod
    def combine(cls, stages: Iterable[Tuple[str, "Decision"]]) -> "Decision":
        """Conjunction of several decisions, each breakdown entry tagged with its stage."""
        entries: List[PolicyVerdict] = []
        for stage, decision in stages:
            for entry in decision.breakdown:
                entries.append(PolicyVerdict(entry.policy, entry.verdict, entry.rule, stage))
        return cls.from_breakdown(entries)

    @property
    def allowed(self) -> bool:
        return self.verdict is Verdict.ALLOW

    def denied_by(self) -> List[PolicyVerdict]:
        return [entry for entry in self.breakdown if entry.verdict is Verdict.DENY]


# --- labeled filesystem simulation ------------------------------------------


@dataclass
class ObjectNode:
    """A folder or file in the simulated filesystem."""
    path: str
    label: MacLabel
    taint: Set[str] = field(default_factory=set)
    is_folder: bool = False
    owner: Optional[str] = None
    sticky: bool = False

    @property
    def parent(self) -> Optional[str]:
        if "/" not in self.path:
            return None
        return self.path.rsplit("/", 1)[0]


@dataclass
class UserAccount:
    """A login class: the label a user receives at login."""
    name: str
    login_label: MacLabel


@dataclass
class Session:
    """A logged-in subject."""
    sid: str
    user: str
    effective: MacLabel
    taint: Set[str] = field(default_factory=set)


class AuditOp(Enum):
    FOLDER = "folder"
    USER = "user"
    SESSION = "session"
    SETPMAC = "setpmac"
    SETFMAC = "setfmac"
    CREATE = "create"
    READ = "read"
    WRITE = "write"
    COPY = "copy"
    MOVE = "move"
    DELETE = "delete"


@dataclass(frozen=True)
class AuditRecord:
    """One append-only audit entry.

    `labels` holds the labels of the involved paths before the operation;
    `new_label` is the label a relabel or create produced.
    """
    step: int
    operation: AuditOp
    session: Optional[str] = None
    user: Optional[str] = None
    paths: Tuple[str, ...] = ()
    decision: Optional[Decision] = None
    subject_label: Optional[MacLabel] = None
    labels: Tuple[Tuple[str, MacLabel], ...] = ()
    new_label: Optional[MacLabel] = None
    metadata: Tuple[Tuple[str, str], ...] = ()

    @property
    def allowed(self) -> bool:
        return self.decision is None or self.decision.allowed

    def label_of(self, path: str) -> Optional[MacLabel]:
        for known, label in self.labels:
            if known == path:
                return label
        return None

    def meta(self) -> Dict[str, str]:
        return dict(self.metadata)


def count_verdicts(records: Iterable[AuditRecord]) -> Tuple[int, int]:
    """
    Count allowed and denied decisions in an audit trail.

    Records without a decision (declarations, session starts) are skipped.

    Returns:
        Tuple of (allowed, denied)
    """
    decided = [record for record in records if record.decision is not None]
    allowed = sum(1 for record in decided if record.decision.allowed)
    return allowed, len(decided) - allowed
