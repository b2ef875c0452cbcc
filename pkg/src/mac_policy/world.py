"""
Virtual labeled filesystem: objects, users, sessions and an audit trail.

Every operation is checked against the MAC rules in decision.py and
appends one AuditRecord, allowed or not. Denied operations change nothing
but the audit. Taint is tracked live as sets of origin paths, by the same
rules flow_checker replays: a read puts the source on the session, plus
what the source carries unless it is labeled `equal`; a write puts the
session's taint on the target; an allowed setpmac clears the session's
taint and an allowed setfmac the object's.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .decision import decide, object_relabel, subject_relabel
from .errors import (
    AlreadyExistsError,
    NotAFolderError,
    RangedObjectError,
    ScenarioError,
    UnknownPathError,
    UnknownSessionError,
    UnknownUserError,
)
from .label_parser import ensure_valid
from .models import (
    AccessOp,
    AuditOp,
    AuditRecord,
    Decision,
    MacLabel,
    ObjectNode,
    RangedElement,
    Session,
    UserAccount,
    Verdict,
)

logger = logging.getLogger(__name__)


@dataclass
class World:
    """Single-owner mutable simulation state."""
    objects: Dict[str, ObjectNode] = field(default_factory=dict)
    users: Dict[str, UserAccount] = field(default_factory=dict)
    sessions: Dict[str, Session] = field(default_factory=dict)
    audit: List[AuditRecord] = field(default_factory=list)

    def folders(self) -> List[ObjectNode]:
        return [node for node in self.objects.values() if node.is_folder]

    def files(self) -> List[ObjectNode]:
        return [node for node in self.objects.values() if not node.is_folder]

    def children(self, path: str) -> List[str]:
        prefix = path + "/"
        return [known for known in self.objects if known.startswith(prefix)]


def _record(
    world: World,
    operation: AuditOp,
    session: Optional[Session] = None,
    paths: Sequence[str] = (),
    decision: Optional[Decision] = None,
    labels: Sequence[Tuple[str, MacLabel]] = (),
    new_label: Optional[MacLabel] = None,
    metadata: Sequence[Tuple[str, str]] = (),
) -> AuditRecord:
    record = AuditRecord(
        step=len(world.audit),
        operation=operation,
        session=session.sid if session else None,
        user=session.user if session else None,
        paths=tuple(paths),
        decision=decision,
        subject_label=session.effective if session else None,
        labels=tuple(labels),
        new_label=new_label,
        metadata=tuple(metadata),
    )
    world.audit.append(record)
    if decision is not None and not decision.allowed:
        denied = ", ".join(str(entry) for entry in decision.denied_by())
        logger.debug(f"Denied {operation.value} {' '.join(paths)} for session {record.session}: {denied}")
    return record


def _session(world: World, sid: str) -> Session:
    try:
        return world.sessions[sid]
    except KeyError:
        raise UnknownSessionError(f"unknown session '{sid}'") from None


def _object(world: World, path: str) -> ObjectNode:
    try:
        return world.objects[path]
    except KeyError:
        raise UnknownPathError(f"no such path '{path}'") from None


def _container(world: World, path: str) -> ObjectNode:
    """Containing folder of a path that is about to be created or removed."""
    parent = path.rsplit("/", 1)[0] if "/" in path else None
    if parent is None:
        raise ScenarioError(f"'{path}' is top-level; top-level folders come from declarations")
    node = _object(world, parent)
    if not node.is_folder:
        raise NotAFolderError(f"'{parent}' is not a folder")
    return node


def _require_absent(world: World, path: str) -> None:
    if path in world.objects:
        raise AlreadyExistsError(f"'{path}' already exists")


def _require_removable(world: World, node: ObjectNode) -> None:
    if node.is_folder and world.children(node.path):
        raise ScenarioError(f"folder '{node.path}' is not empty")


def _picked_up(node: ObjectNode) -> Set[str]:
    """Origins a read of node hands to the session; `equal` objects pass only their own."""
    if node.label.carries_equal:
        return {node.path}
    return {node.path} | node.taint


def _sticky_metadata(container: ObjectNode, node: ObjectNode, session: Session) -> List[Tuple[str, str]]:
    if container.sticky and node.owner is not None and node.owner != session.user:
        return [("sticky-owner-mismatch", f"{node.owner}!={session.user}")]
    return []


def session_label(world: World, session: Session) -> MacLabel:
    """Session's effective label set back into its user's login envelope."""
    login = world.users[session.user].login_label
    entries = []
    for name, element in login.entries:
        current = session.effective[name]
        if isinstance(element, RangedElement):
            entries.append((name, RangedElement(current, element.lo, element.hi)))
        else:
            entries.append((name, current))
    return MacLabel(tuple(entries))


# --- declarations ------------------------------------------------------------


def add_folder(
    world: World,
    path: str,
    label: MacLabel,
    sticky: bool = False,
    owner: Optional[str] = None,
) -> ObjectNode:
    """
    Declare a folder. Administrative: no access decision is taken.

    Raises:
        AlreadyExistsError: the path is taken
        RangedObjectError: the label is ranged
        UnknownPathError / NotAFolderError: a nested path lacks its containing folder
    """
    _require_absent(world, path)
    ensure_valid(label)
    if label.is_ranged:
        raise RangedObjectError(f"folder '{path}' needs a single-level label, got '{label}'")
    if "/" in path:
        _container(world, path)
    node = ObjectNode(path=path, label=label, is_folder=True, owner=owner, sticky=sticky)
    world.objects[path] = node
    metadata = [("sticky", "true")] if sticky else []
    if owner:
        metadata.append(("owner", owner))
    _record(world, AuditOp.FOLDER, paths=[path], new_label=label, metadata=metadata)
    return node


def add_user(world: World, name: str, login_label: MacLabel) -> UserAccount:
    """Declare a user and its login-class label."""
    if name in world.users:
        raise AlreadyExistsError(f"user '{name}' already exists")
    ensure_valid(login_label)
    account = UserAccount(name, login_label)
    world.users[name] = account
    _record(world, AuditOp.USER, new_label=login_label, metadata=[("user", name)])
    return account


def session_start(world: World, user: str, sid: Optional[str] = None) -> str:
    """
    Log a user in.

    Args:
        world: Simulation state
        user: Declared user name
        sid: Session id; generated as s1, s2, ... when omitted

    Returns:
        The session id

    Raises:
        UnknownUserError: user was never declared
    """
    account = world.users.get(user)
    if account is None:
        raise UnknownUserError(f"unknown user '{user}'")
    if sid is None:
        sid = f"s{len(world.sessions) + 1}"
        while sid in world.sessions:
            sid += "'"
    if sid in world.sessions:
        raise AlreadyExistsError(f"session '{sid}' already exists")
    session = Session(sid=sid, user=user, effective=account.login_label.effective())
    world.sessions[sid] = session
    _record(world, AuditOp.SESSION, session=session)
    logger.debug(f"Session {sid} started for {user} at '{session.effective}'")
    return sid


# --- relabels ----------------------------------------------------------------


def setpmac(world: World, sid: str, label: MacLabel) -> Decision:
    """Move a session's effective label inside its login envelope."""
    session = _session(world, sid)
    decision = subject_relabel(session_label(world, session), label)
    previous = session.effective
    if decision.allowed:
        session.effective = decision.label.effective()
        session.taint = set()
    _record(
        world, AuditOp.SETPMAC, session=session, decision=decision,
        new_label=label, metadata=[("previous", str(previous))],
    )
    return decision


def setfmac(world: World, sid: str, path: str, label: MacLabel) -> Decision:
    """Relabel an object; both its old and new label must lie in the session envelope."""
    session = _session(world, sid)
    node = _object(world, path)
    decision = object_relabel(session_label(world, session), node.label, label)
    old = node.label
    if decision.allowed:
        node.label = label
        node.taint = set()
    _record(
        world, AuditOp.SETFMAC, session=session, paths=[path], decision=decision,
        labels=[(path, old)], new_label=label,
    )
    return decision


# --- data operations ---------------------------------------------------------


def op_read(world: World, sid: str, path: str) -> Decision:
    session = _session(world, sid)
    node = _object(world, path)
    decision = decide(session.effective, node.label, AccessOp.READ)
    if decision.allowed:
        session.taint |= _picked_up(node)
    _record(world, AuditOp.READ, session=session, paths=[path], decision=decision, labels=[(path, node.label)])
    return decision


def op_write(world: World, sid: str, path: str) -> Decision:
    session = _session(world, sid)
    node = _object(world, path)
    decision = decide(session.effective, node.label, AccessOp.WRITE)
    if decision.allowed:
        node.taint |= session.taint
    _record(world, AuditOp.WRITE, session=session, paths=[path], decision=decision, labels=[(path, node.label)])
    return decision


def op_create(world: World, sid: str, path: str) -> Decision:
    """Create a file at the session's effective label; needs Write on the containing folder."""
    session = _session(world, sid)
    _require_absent(world, path)
    container = _container(world, path)
    decision = Decision.combine([
        ("folder", decide(session.effective, container.label, AccessOp.WRITE)),
    ])
    if decision.allowed:
        world.objects[path] = ObjectNode(path=path, label=session.effective, owner=session.user)
    _record(
        world, AuditOp.CREATE, session=session, paths=[path], decision=decision,
        labels=[(container.path, container.label)], new_label=session.effective,
        metadata=[("owner", session.user)],
    )
    return decision


def op_copy(world: World, sid: str, src: str, dst: str) -> Decision:
    """
    Copy a file: read the source, create the destination at the session's
    effective label, write into it. All checks happen before any change.
    """
    session = _session(world, sid)
    source = _object(world, src)
    _require_absent(world, dst)
    container = _container(world, dst)
    decision = Decision.combine([
        ("read", decide(session.effective, source.label, AccessOp.READ)),
        ("folder", decide(session.effective, container.label, AccessOp.WRITE)),
        ("write", decide(session.effective, session.effective, AccessOp.WRITE)),
    ])
    if decision.allowed:
        session.taint |= _picked_up(source)
        world.objects[dst] = ObjectNode(
            path=dst, label=session.effective, taint=set(session.taint), owner=session.user,
        )
    _record(
        world, AuditOp.COPY, session=session, paths=[src, dst], decision=decision,
        labels=[(src, source.label), (container.path, container.label)],
        new_label=session.effective, metadata=[("owner", session.user)],
    )
    return decision


def op_move(world: World, sid: str, src: str, dst: str) -> Decision:
    """
    Move a file. The label travels with it: the destination keeps the
    source label and needs Write at that label, plus Write on both folders.
    """
    session = _session(world, sid)
    source = _object(world, src)
    if dst.startswith(src + "/"):
        raise ScenarioError(f"cannot move '{src}' into itself ('{dst}')")
    _require_absent(world, dst)
    _require_removable(world, source)
    src_container = _container(world, src)
    dst_container = _container(world, dst)
    decision = Decision.combine([
        ("read", decide(session.effective, source.label, AccessOp.READ)),
        ("folder", decide(session.effective, dst_container.label, AccessOp.WRITE)),
        ("write", decide(session.effective, source.label, AccessOp.WRITE)),
        ("source-folder", decide(session.effective, src_container.label, AccessOp.WRITE)),
    ])
    metadata = [("owner", source.owner or "")] + _sticky_metadata(src_container, source, session)
    if decision.allowed:
        session.taint |= _picked_up(source)
        del world.objects[src]
        world.objects[dst] = ObjectNode(
            path=dst,
            label=source.label,
            taint=source.taint | session.taint,
            is_folder=source.is_folder,
            owner=source.owner,
        )
    _record(
        world, AuditOp.MOVE, session=session, paths=[src, dst], decision=decision,
        labels=[(src, source.label), (dst_container.path, dst_container.label),
                (src_container.path, src_container.label)],
        new_label=source.label, metadata=metadata,
    )
    return decision


def op_delete(world: World, sid: str, path: str) -> Decision:
    """Remove an object; needs Write on the containing folder."""
    session = _session(world, sid)
    node = _object(world, path)
    _require_removable(world, node)
    container = _container(world, path)
    decision = Decision.combine([
        ("folder", decide(session.effective, container.label, AccessOp.WRITE)),
    ])
    metadata = [("owner", node.owner or "")] + _sticky_metadata(container, node, session)
    if decision.allowed:
        del world.objects[path]
    _record(
        world, AuditOp.DELETE, session=session, paths=[path], decision=decision,
        labels=[(path, node.label), (container.path, container.label)], metadata=metadata,
    )
    return decision


def access_matrix(world: World) -> Dict[Tuple[str, str, AccessOp], Verdict]:
    """
    Decision of every declared user (at its login effective label) against
    every folder, for read and write. Takes no audit entries.
    """
    matrix: Dict[Tuple[str, str, AccessOp], Verdict] = {}
    for user in sorted(world.users):
        subject = world.users[user].login_label.effective()
        for folder in sorted(node.path for node in world.folders()):
            for op in AccessOp:
                matrix[(user, folder, op)] = decide(subject, world.objects[folder].label, op).verdict
    return matrix
