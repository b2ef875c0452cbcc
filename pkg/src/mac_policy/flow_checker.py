"""
Information-flow audit: replays a World's audit trail with origin tags and
reports writes that moved data against the lattice.

Each tag remembers where data came from and the label it had when read.
A tag reaching an object must satisfy, for every policy both labels carry:

    mls:  target dominates origin
    biba: origin dominates target

A relabel is a deliberate exemption: setpmac drops the tags a session
carries, setfmac the tags an object carries. Objects labeled `equal` are
exchange points; reading one hands over only its own tag.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Set

from .lattice import dominates
from .models import AuditOp, AuditRecord, MacLabel, effective_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowTag:
    origin: str
    label: MacLabel


@dataclass(frozen=True)
class FlowViolation:
    step: int
    target: str
    tag: FlowTag
    policy: str
    target_label: MacLabel

    def __str__(self) -> str:
        return (
            f"step {self.step}: data from {self.tag.origin} ({self.tag.label}) "
            f"reached {self.target} ({self.target_label}), breaking {self.policy}"
        )


def flow_allowed(origin: MacLabel, target: MacLabel) -> Optional[str]:
    """Name of the first policy the flow origin -> target breaks, or None."""
    for name, element in target.entries:
        source = origin.get(name)
        if source is None:
            continue
        source, sink = effective_of(source), effective_of(element)
        if name == "mls" and not dominates(sink, source):
            return name
        if name == "biba" and not dominates(source, sink):
            return name
    return None


class FlowReplay:
    """Origin tags held by sessions and objects while an audit is replayed."""

    def __init__(self):
        self.session_tags: Dict[str, Set[FlowTag]] = {}
        self.object_tags: Dict[str, Set[FlowTag]] = {}
        self.violations: List[FlowViolation] = []

    def read(self, record: AuditRecord, path: str) -> None:
        label = record.label_of(path)
        picked = {FlowTag(path, label)}
        if not label.carries_equal:
            picked |= self.object_tags.get(path, set())
        self.session_tags.setdefault(record.session, set()).update(picked)

    def write(self, record: AuditRecord, path: str, label: MacLabel) -> None:
        carried = self.session_tags.get(record.session, set())
        held = self.object_tags.setdefault(path, set())
        for tag in carried - held:
            policy = flow_allowed(tag.label, label)
            if policy is not None:
                self.violations.append(FlowViolation(record.step, path, tag, policy, label))
        held |= carried

    def apply(self, record: AuditRecord) -> None:
        op = record.operation
        if op is AuditOp.FOLDER:
            self.object_tags[record.paths[0]] = set()
        elif op is AuditOp.SESSION:
            self.session_tags[record.session] = set()
        elif not record.allowed:
            return
        elif op is AuditOp.SETPMAC:
            self.session_tags[record.session] = set()
        elif op is AuditOp.SETFMAC:
            self.object_tags[record.paths[0]] = set()
        elif op is AuditOp.READ:
            self.read(record, record.paths[0])
        elif op is AuditOp.WRITE:
            path = record.paths[0]
            self.write(record, path, record.label_of(path))
        elif op is AuditOp.CREATE:
            self.object_tags[record.paths[0]] = set()
        elif op is AuditOp.COPY:
            src, dst = record.paths
            self.read(record, src)
            self.object_tags[dst] = set()
            self.write(record, dst, record.new_label)
        elif op is AuditOp.MOVE:
            src, dst = record.paths
            self.read(record, src)
            self.object_tags[dst] = self.object_tags.pop(src, set())
            self.write(record, dst, record.new_label)
        elif op is AuditOp.DELETE:
            self.object_tags.pop(record.paths[0], None)

    def session_origins(self, sid: str) -> Set[str]:
        return {tag.origin for tag in self.session_tags.get(sid, set())}

    def object_origins(self, path: str) -> Set[str]:
        return {tag.origin for tag in self.object_tags.get(path, set())}


def replay(world) -> FlowReplay:
    """Replay the audit of a World (or any object with an `audit` list)."""
    state = FlowReplay()
    for record in world.audit:
        state.apply(record)
    return state


def flow_check(world) -> List[FlowViolation]:
    """
    Replay the audit of a World (or any object with an `audit` list).

    Returns:
        Violations in audit order; empty for any trail of allowed operations
    """
    state = replay(world)
    if state.violations:
        logger.warning(f"Flow check found {len(state.violations)} violation(s)")
    else:
        logger.debug(f"Flow check clean over {len(world.audit)} audit records")
    return state.violations
