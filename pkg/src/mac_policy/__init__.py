"""
FreeBSD MAC label engine.

Parses and validates Biba/MLS labels, decides accesses on the label
lattice, compiles Chinese Wall policies into MLS labels and replays
labeled-filesystem scenarios with an information-flow audit.
"""

__version__ = "1.0.0"

from .decision import decide, object_relabel, subject_relabel
from .errors import MacPolicyError
from .label_parser import format_label, parse_label, validate
from .lattice import compare, dominates, in_range
from .models import AccessOp, Decision, MacLabel, Ordering, PolicyElement, RangedElement, Verdict

__all__ = [
    "AccessOp",
    "Decision",
    "MacLabel",
    "MacPolicyError",
    "Ordering",
    "PolicyElement",
    "RangedElement",
    "Verdict",
    "compare",
    "decide",
    "dominates",
    "format_label",
    "in_range",
    "object_relabel",
    "parse_label",
    "subject_relabel",
    "validate",
]
