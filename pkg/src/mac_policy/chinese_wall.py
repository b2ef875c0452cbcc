"""
Chinese Wall labels and their compilation into MLS grades + compartments.

A Chinese Wall label is an N-position vector, one position per industry
(conflict-of-interest class). Each position holds the company whose
confidential data the subject has touched in that industry, or ⊥ (None
here) when it has only seen public data. The compiler maps every lattice
node to an MLS element such that Chinese Wall dominance and MLS dominance
coincide, and emits login classes carrying those labels.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    ChineseWallError,
    IncompatibleLabelsError,
    InfeasibleConfigError,
    LengthMismatchError,
    WallViolationError,
)
from .label_parser import MAX_COMPARTMENT, format_label
from .models import Grade, GradeKind, MacLabel, PolicyElement, RangedElement

logger = logging.getLogger(__name__)

COMPARTMENT_LIMIT = MAX_COMPARTMENT + 1


@dataclass(frozen=True)
class CWConfig:
    """N industries with C companies each."""
    n_industries: int
    n_companies: int

    def __post_init__(self):
        if self.n_industries < 1 or self.n_companies < 1:
            raise ChineseWallError(
                f"need at least one industry and one company, got N={self.n_industries}, C={self.n_companies}"
            )


@dataclass(frozen=True)
class CWLabel:
    """Lattice node: one entry per industry, None for ⊥; or the SYSHIGH top."""
    entries: Tuple[Optional[int], ...]
    syshigh: bool = False

    @classmethod
    def of(cls, *entries: Optional[int]) -> "CWLabel":
        return cls(tuple(entries))

    @classmethod
    def bottom(cls, n: int) -> "CWLabel":
        return cls((None,) * n)

    @classmethod
    def top(cls, n: int) -> "CWLabel":
        return cls((None,) * n, syshigh=True)

    @classmethod
    def parse(cls, text: str) -> "CWLabel":
        """Parse "[1,bot,2]", "1,⊥,2" or "SYSHIGH:<n>"."""
        text = text.strip()
        if text.upper().startswith("SYSHIGH"):
            _, _, n = text.partition(":")
            if not n.strip().isdecimal() or int(n) < 1:
                raise ChineseWallError(f"SYSHIGH needs a vector length, as in SYSHIGH:2; got '{text}'")
            return cls.top(int(n))
        entries: List[Optional[int]] = []
        for token in text.strip("[]").split(","):
            token = token.strip()
            if token in ("bot", "⊥", "_", "null"):
                entries.append(None)
            elif token.isdecimal() and int(token) >= 1:
                entries.append(int(token))
            else:
                raise ChineseWallError(f"bad Chinese Wall entry '{token}' in '{text}'")
        return cls(tuple(entries))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def level(self) -> int:
        """Number of non-⊥ positions (N+1 for SYSHIGH)."""
        if self.syshigh:
            return self.n + 1
        return sum(1 for entry in self.entries if entry is not None)

    @property
    def class_name(self) -> str:
        """Login class name such as cw_1_bot."""
        if self.syshigh:
            return "cw_syshigh"
        return "cw_" + "_".join("bot" if entry is None else str(entry) for entry in self.entries)

    def pretty(self) -> str:
        if self.syshigh:
            return "SYSHIGH"
        return "[" + ",".join("⊥" if entry is None else str(entry) for entry in self.entries) + "]"

    def __str__(self) -> str:
        if self.syshigh:
            return "SYSHIGH"
        return "[" + ",".join("bot" if entry is None else str(entry) for entry in self.entries) + "]"


@dataclass(frozen=True)
class Triplet:
    """Compiler output for one lattice node."""
    grade: Grade
    compartments: frozenset
    cw: CWLabel

    @property
    def element(self) -> PolicyElement:
        return PolicyElement(self.grade, frozenset(self.compartments))


@dataclass(frozen=True)
class FeasibilityReport:
    config: CWConfig
    compartments_needed: int
    login_classes_needed: int
    grades_needed: int
    compartment_limit: int = COMPARTMENT_LIMIT

    @property
    def feasible(self) -> bool:
        return self.compartments_needed < self.compartment_limit


class Collection(Enum):
    """Which lower-level triplets contribute compartments to a node."""
    DOMINATED = "dominated"
    COMPATIBLE = "compatible"


class TopGrade(Enum):
    """Grade of the full-vector level: numeric like every level, or `high`."""
    NUMERIC = "numeric"
    HIGH = "high"


@dataclass(frozen=True)
class CompileOptions:
    grade_step: int = 10
    collection: Collection = Collection.DOMINATED
    top_grade: TopGrade = TopGrade.NUMERIC
    max_nodes: int = 1_000_000

    @classmethod
    def from_settings(cls) -> "CompileOptions":
        """Build options from config/engine_settings.json."""
        from .config_manager import get_config_manager
        settings = get_config_manager().chinese_wall_settings()
        return cls(
            grade_step=int(settings.get("grade_step", 10)),
            collection=Collection(settings.get("collection", Collection.DOMINATED.value)),
            top_grade=TopGrade(settings.get("top_grade", TopGrade.NUMERIC.value)),
            max_nodes=int(settings.get("max_nodes", 1_000_000)),
        )


def _check_pair(l1: CWLabel, l2: CWLabel) -> None:
    if l1.n != l2.n:
        raise LengthMismatchError(f"labels cover {l1.n} and {l2.n} industries")


def cw_dominates(l1: CWLabel, l2: CWLabel) -> bool:
    """l1 >= l2: every position equal, or l1 set where l2 is ⊥. SYSHIGH tops everything."""
    _check_pair(l1, l2)
    if l1.syshigh:
        return True
    if l2.syshigh:
        return False
    return all(
        a == b or (a is not None and b is None)
        for a, b in zip(l1.entries, l2.entries)
    )


def cw_compatible(l1: CWLabel, l2: CWLabel) -> bool:
    """Every position agrees or is ⊥ on at least one side."""
    _check_pair(l1, l2)
    if l1.syshigh or l2.syshigh:
        raise ChineseWallError("SYSHIGH takes no part in compatibility")
    return all(a == b or a is None or b is None for a, b in zip(l1.entries, l2.entries))


def cw_join(l1: CWLabel, l2: CWLabel) -> CWLabel:
    """Class-combining join: position-wise l1[k] if set else l2[k]."""
    if not cw_compatible(l1, l2):
        raise IncompatibleLabelsError(f"{l1} and {l2} are not compatible")
    return CWLabel(tuple(a if a is not None else b for a, b in zip(l1.entries, l2.entries)))


def labels_at_level(cfg: CWConfig, level: int) -> List[CWLabel]:
    """All labels with exactly `level` non-⊥ positions, positions then companies ascending."""
    labels = []
    companies = range(1, cfg.n_companies + 1)
    for positions in itertools.combinations(range(cfg.n_industries), level):
        for chosen in itertools.product(companies, repeat=level):
            entries: List[Optional[int]] = [None] * cfg.n_industries
            for position, company in zip(positions, chosen):
                entries[position] = company
            labels.append(CWLabel(tuple(entries)))
    return labels


def lattice_size(cfg: CWConfig) -> int:
    """(C+1)^N vectors plus SYSHIGH."""
    return (cfg.n_companies + 1) ** cfg.n_industries + 1


def _check_size(cfg: CWConfig, max_nodes: int) -> None:
    size = lattice_size(cfg)
    if size > max_nodes:
        raise ChineseWallError(f"lattice for N={cfg.n_industries}, C={cfg.n_companies} has {size} nodes, over {max_nodes}")


def generate_lattice(cfg: CWConfig, max_nodes: int = 1_000_000) -> List[CWLabel]:
    """Every lattice node, bottom first, SYSHIGH last."""
    _check_size(cfg, max_nodes)
    nodes = [CWLabel.bottom(cfg.n_industries)]
    for level in range(1, cfg.n_industries + 1):
        nodes.extend(labels_at_level(cfg, level))
    nodes.append(CWLabel.top(cfg.n_industries))
    return nodes


def feasibility(cfg: CWConfig) -> FeasibilityReport:
    """Resources a FreeBSD rendition of the policy needs."""
    return FeasibilityReport(
        config=cfg,
        compartments_needed=cfg.n_companies * cfg.n_industries,
        login_classes_needed=(cfg.n_companies + 1) ** cfg.n_industries,
        grades_needed=cfg.n_industries + 1,
    )


def compartment_of(cfg: CWConfig, industry: int, company: int) -> int:
    """Compartment of a level-1 node, industry-major then company-minor (1-based)."""
    return (industry - 1) * cfg.n_companies + company


def compile_policy(cfg: CWConfig, options: Optional[CompileOptions] = None) -> List[Triplet]:
    """
    Compile a Chinese Wall lattice into (grade, compartments, label) triplets.

    Level-1 nodes get grade step and a singleton compartment each. A level-i
    node gets grade i*step and the union of the compartment sets of the
    lower triplets it collects: by default those it dominates, found as its
    immediate predecessors (each already holds the union of everything
    below it). With Collection.COMPATIBLE every compatible triplet of the
    previous level is collected instead. ⊥...⊥ maps to (low, {}) and SYSHIGH
    to (high, all compartments).

    Args:
        cfg: Industry and company counts
        options: Grade spacing and variant switches; defaults come from settings

    Returns:
        One triplet per lattice node, in generate_lattice order

    Raises:
        InfeasibleConfigError: C*N compartments do not fit under the limit
    """
    report = feasibility(cfg)
    if not report.feasible:
        raise InfeasibleConfigError(
            f"N={cfg.n_industries}, C={cfg.n_companies} needs {report.compartments_needed} compartments, "
            f"limit is below {report.compartment_limit}",
            report,
        )
    options = options or CompileOptions.from_settings()
    _check_size(cfg, options.max_nodes)

    n = cfg.n_industries
    triplets: List[Triplet] = [Triplet(Grade.low(), frozenset(), CWLabel.bottom(n))]
    by_label: Dict[CWLabel, Triplet] = {}
    previous: List[Triplet] = []

    for label in labels_at_level(cfg, 1):
        position = next(k for k, entry in enumerate(label.entries) if entry is not None)
        triplet = Triplet(
            Grade.num(options.grade_step),
            frozenset({compartment_of(cfg, position + 1, label.entries[position])}),
            label,
        )
        previous.append(triplet)
        by_label[label] = triplet
    triplets.extend(previous)

    for level in range(2, n + 1):
        if options.top_grade is TopGrade.HIGH and level == n:
            grade = Grade.high()
        else:
            grade = Grade.num(level * options.grade_step)
        current: List[Triplet] = []
        for label in labels_at_level(cfg, level):
            if options.collection is Collection.COMPATIBLE:
                collected: Iterable[Triplet] = [t for t in previous if cw_compatible(label, t.cw)]
            else:
                collected = [by_label[predecessor] for predecessor in _predecessors(label)]
            compartments = frozenset().union(*(t.compartments for t in collected))
            triplet = Triplet(grade, compartments, label)
            current.append(triplet)
            by_label[label] = triplet
        triplets.extend(current)
        previous = current

    everything = frozenset(range(1, report.compartments_needed + 1))
    triplets.append(Triplet(Grade.high(), everything, CWLabel.top(n)))
    logger.info(
        f"Compiled Chinese Wall lattice N={n}, C={cfg.n_companies}: {len(triplets)} triplets "
        f"({options.collection.value} collection)"
    )
    return triplets


def _predecessors(label: CWLabel) -> List[CWLabel]:
    """Labels one level down that `label` dominates: one set position nulled."""
    result = []
    for k, entry in enumerate(label.entries):
        if entry is not None:
            entries = list(label.entries)
            entries[k] = None
            result.append(CWLabel(tuple(entries)))
    return result


def triplet_to_label(triplet: Triplet) -> str:
    """MLS label text of a triplet, e.g. mls/20:1+3, mls/low, mls/high:1+2+3+4."""
    return format_label(MacLabel((("mls", triplet.element),)))


def login_class_label(triplet: Triplet) -> str:
    """Single-level ranged form used in login classes: mls/X:S(X:S-X:S)."""
    element = triplet.element
    return format_label(MacLabel((("mls", RangedElement(element, element, element)),)))


def emit_login_classes(cfg: CWConfig, options: Optional[CompileOptions] = None) -> str:
    """
    Login-class stanzas, one per lattice node except SYSHIGH.

    Returns:
        login.conf text, e.g.

            cw_1_bot:\\
                    :label=mls/10:1(10:1-10:1):
    """
    stanzas = []
    for triplet in compile_policy(cfg, options):
        if triplet.cw.syshigh:
            continue
        stanzas.append(f"{triplet.cw.class_name}:\\\n        :label={login_class_label(triplet)}:")
    return "\n".join(stanzas) + "\n"


def format_table(triplets: Sequence[Triplet]) -> str:
    """Machine-readable table: CW label, grade, compartments, tab-separated."""
    lines = []
    for triplet in triplets:
        compartments = "+".join(str(c) for c in sorted(triplet.compartments)) or "-"
        lines.append(f"{triplet.cw}\t{triplet.grade}\t{compartments}")
    return "\n".join(lines) + "\n"


def progress(current: CWLabel, industry: int, company: int, n_companies: Optional[int] = None) -> CWLabel:
    """
    Record access to a company's confidential data.

    Args:
        current: Subject's label
        industry: 1-based industry index
        company: 1-based company index within the industry
        n_companies: Companies per industry; bounds company when given

    Returns:
        The label with the industry position set; unchanged if already set to company

    Raises:
        WallViolationError: the subject already works for another company in the industry
        ChineseWallError: SYSHIGH, or an industry or company index out of bounds
    """
    if current.syshigh:
        raise ChineseWallError("SYSHIGH cannot progress")
    if not 1 <= industry <= current.n:
        raise ChineseWallError(f"industry {industry} outside 1..{current.n}")
    if company < 1:
        raise ChineseWallError(f"company must be positive, got {company}")
    if n_companies is not None and company > n_companies:
        raise ChineseWallError(f"company {company} outside 1..{n_companies}")
    held = current.entries[industry - 1]
    if held == company:
        return current
    if held is not None:
        raise WallViolationError(
            f"industry {industry} already holds company {held}; access to company {company} crosses the wall"
        )
    entries = list(current.entries)
    entries[industry - 1] = company
    return CWLabel(tuple(entries))


def progress_trail(
    user: str,
    n_industries: int,
    steps: Sequence[Tuple[int, int]],
    industry_names: Optional[Sequence[str]] = None,
    company_names: Optional[Sequence[str]] = None,
    n_companies: Optional[int] = None,
) -> List[Tuple[str, CWLabel]]:
    """
    The subjects a user leaves behind while progressing up the lattice.

    With industry_names=["Banks", "Oil"] and company_names=["A", "B"], Mary
    stepping through (1, 1) then (2, 2) yields Mary, Mary.Banks.A and
    Mary.Banks.A.Oil.B. Company indexes are bounded by n_companies, or by
    the number of company names.
    """
    if n_companies is None and company_names:
        n_companies = len(company_names)
    label = CWLabel.bottom(n_industries)
    name = user
    trail = [(name, label)]
    for industry, company in steps:
        updated = progress(label, industry, company, n_companies)
        if updated == label:
            continue
        industry_name = industry_names[industry - 1] if industry_names else f"I{industry}"
        company_name = company_names[company - 1] if company_names else f"C{company}"
        name = f"{name}.{industry_name}.{company_name}"
        label = updated
        trail.append((name, label))
    return trail
