"""
Tests for the labeled filesystem: loading, sessions, operations and scripts.
"""

import pytest

from conftest import fixture_text
from mac_policy.errors import (
    AlreadyExistsError,
    ScenarioError,
    ScenarioSyntaxError,
    ScenarioValidationError,
    UnknownPathError,
    UnknownSessionError,
    UnknownUserError,
)
from mac_policy.flow_checker import replay
from mac_policy.label_parser import parse_label
from mac_policy.models import AuditOp, Verdict, count_verdicts
from mac_policy.scenario_loader import load_scenario, load_scenario_file, parse_script
from mac_policy.script_runner import run_script
from mac_policy.world import (
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


def _snapshot(world):
    objects = {path: (str(node.label), frozenset(node.taint)) for path, node in world.objects.items()}
    sessions = {sid: (str(s.effective), frozenset(s.taint)) for sid, s in world.sessions.items()}
    return objects, sessions


def test_bundled_fixture_sizes(biba_org, mls_org, compart_org):
    assert len(biba_org.folders()) == 14
    assert len(biba_org.users) == 6
    assert len(mls_org.users) == 8
    assert {"John.Sales", "John.Engineering"} <= set(mls_org.users)
    assert len(compart_org.folders()) == 14
    assert len(compart_org.users) == 7
    assert "CommonTechnicalReports" in compart_org.objects


def test_temp_folder_is_sticky(biba_org):
    assert biba_org.objects["Temp"].sticky
    assert str(biba_org.objects["Temp"].label) == "biba/equal"


def test_load_by_fixture_name():
    world = load_scenario_file("mls-org")
    assert len(world.users) == 8


def test_empty_scenario():
    world = load_scenario("")
    assert world.objects == {} and world.users == {} and world.audit == []


def test_scenario_errors_carry_line_numbers():
    with pytest.raises(ScenarioSyntaxError) as excinfo:
        load_scenario("folder A label biba/2\nfolder B lable biba/2\n")
    assert excinfo.value.line_no == 2

    with pytest.raises(ScenarioValidationError) as excinfo:
        load_scenario("# users\n\nuser Eve label biba/1(2-10)\n")
    assert excinfo.value.line_no == 3

    with pytest.raises(ScenarioValidationError) as excinfo:
        load_scenario("folder A label biba/2\nfolder A label biba/5\n")
    assert excinfo.value.line_no == 2

    with pytest.raises(ScenarioValidationError):
        load_scenario("folder A label biba/5(2-10)\n")


def test_scenario_rejects_operations():
    with pytest.raises(ScenarioSyntaxError):
        load_scenario("folder A label biba/2\nread s1 A\n")


@pytest.mark.parametrize("line", [
    "read s1",
    "copy s1 A",
    "read s1 A expect maybe",
    "session s1 Mary",
    "setpmac s1",
    "frobnicate s1 A",
])
def test_script_syntax_errors(line):
    with pytest.raises(ScenarioSyntaxError):
        parse_script(line)


def test_parse_script_steps():
    steps = parse_script("session s user Mary  # log in\nsetpmac s biba/2 expect allow\n")
    assert [step.verb for step in steps] == ["session", "setpmac"]
    assert steps[1].label == parse_label("biba/2")
    assert steps[1].expect is Verdict.ALLOW
    assert steps[0].text == "session s user Mary"


def test_session_start(biba_org, mls_org):
    sid = session_start(biba_org, "Jane")
    assert str(biba_org.sessions[sid].effective) == "biba/5"
    john = session_start(mls_org, "John", sid="john")
    assert str(mls_org.sessions[john].effective) == "biba/10,mls/100"
    with pytest.raises(UnknownUserError):
        session_start(biba_org, "eve")
    with pytest.raises(AlreadyExistsError):
        session_start(mls_org, "Jane", sid="john")


def test_setpmac_and_setfmac(biba_org):
    jane = session_start(biba_org, "Jane", sid="jane")
    mary = session_start(biba_org, "Mary", sid="mary")
    assert setpmac(biba_org, mary, parse_label("biba/5")).verdict is Verdict.DENY
    assert str(biba_org.sessions[mary].effective) == "biba/2"

    assert setpmac(biba_org, jane, parse_label("biba/2")).allowed
    assert str(biba_org.sessions[jane].effective) == "biba/2"
    assert op_create(biba_org, jane, "UAccountingReports/Report1").allowed
    assert setfmac(biba_org, jane, "UAccountingReports/Report1", parse_label("biba/10")).allowed
    assert str(biba_org.objects["UAccountingReports/Report1"].label) == "biba/10"


def test_trusted_entity_workflow(biba_org):
    report = run_script(biba_org, fixture_text("trusted-entity"))
    assert report.passed
    decided = [result for result in report.results if result.decision is not None]
    assert len(decided) == 9
    assert all(result.actual is Verdict.ALLOW for result in decided)
    assert "SummarySalesReports/Report1" in biba_org.objects
    assert "Temp/Report1" in biba_org.objects
    assert "JaneHome/Report1" not in biba_org.objects


def test_workflow_fails_at_setpmac_with_narrow_range():
    text = fixture_text("biba-org").replace("user Jane     label biba/5(2-10)", "user Jane     label biba/5(5-10)")
    world = load_scenario(text)
    report = run_script(world, fixture_text("trusted-entity"))
    assert not report.passed
    assert report.first_failure.step.verb == "setpmac"
    assert report.first_failure.actual is Verdict.DENY

    world = load_scenario(text)
    stopped = run_script(world, fixture_text("trusted-entity"), stop_on_failure=True)
    assert stopped.stopped_early
    assert stopped.steps == 5
    assert len(stopped.failures) == 1


def test_prohibitions_hold(biba_org):
    report = run_script(biba_org, fixture_text("prohibitions"))
    assert report.passed, [result.step.text for result in report.failures]


def test_john_cannot_read_unverified_data(biba_org):
    mary = session_start(biba_org, "Mary")
    john = session_start(biba_org, "John")
    assert op_create(biba_org, mary, "UAccountingReports/x").allowed
    assert op_read(biba_org, john, "UAccountingReports/x").verdict is Verdict.DENY


def test_one_wrong_expectation_fails_once(biba_org):
    script = "session m user Mary\ncreate m USalesReports/a expect allow\nread m USalesReports/a expect deny\n"
    report = run_script(biba_org, script)
    assert len(report.failures) == 1
    assert report.first_failure.step.line_no == 3


def test_empty_script_passes(biba_org):
    report = run_script(biba_org, "")
    assert report.passed and report.steps == 0


def test_runtime_errors_fail_the_step(biba_org):
    report = run_script(biba_org, "session m user Mary\nread m Nowhere/x expect allow\nread ghost Temp\n")
    assert len(report.failures) == 2
    assert "no such path" in report.failures[0].error


def test_denied_operations_do_not_mutate(biba_org):
    mary = session_start(biba_org, "Mary")
    john = session_start(biba_org, "John")
    assert op_create(biba_org, mary, "USalesReports/draft").allowed
    assert op_read(biba_org, mary, "USalesReports/draft").allowed
    before = _snapshot(biba_org)
    audit_size = len(biba_org.audit)

    assert not op_write(biba_org, mary, "SummarySalesReports").allowed
    assert not op_create(biba_org, mary, "SummarySalesReports/x").allowed
    assert not op_copy(biba_org, mary, "USalesReports/draft", "SummarySalesReports/draft").allowed
    assert not op_move(biba_org, mary, "USalesReports/draft", "SalesReports/draft").allowed
    assert not op_read(biba_org, john, "USalesReports/draft").allowed
    assert not setfmac(biba_org, mary, "USalesReports/draft", parse_label("biba/5")).allowed

    assert _snapshot(biba_org) == before
    assert len(biba_org.audit) == audit_size + 6


def test_copy_creates_at_session_label_and_move_keeps_label(biba_org):
    jane = session_start(biba_org, "Jane")
    mary = session_start(biba_org, "Mary")
    assert op_create(biba_org, mary, "Temp/r").allowed
    assert setpmac(biba_org, jane, parse_label("biba/2")).allowed
    assert op_copy(biba_org, jane, "Temp/r", "UTechnicalReports/r").allowed
    copied = biba_org.objects["UTechnicalReports/r"]
    assert str(copied.label) == "biba/2"
    assert copied.owner == "Jane"
    assert "Temp/r" in copied.taint

    assert op_move(biba_org, mary, "Temp/r", "USalesReports/r").allowed
    moved = biba_org.objects["USalesReports/r"]
    assert str(moved.label) == "biba/2"
    assert moved.owner == "Mary"
    assert "Temp/r" not in biba_org.objects


def test_copy_is_atomic(biba_org):
    mary = session_start(biba_org, "Mary")
    assert op_create(biba_org, mary, "USalesReports/a").allowed
    before = _snapshot(biba_org)
    decision = op_copy(biba_org, mary, "USalesReports/a", "SummarySalesReports/a")
    assert not decision.allowed
    assert [entry.stage for entry in decision.denied_by()] == ["folder"]
    assert _snapshot(biba_org) == before


def test_delete(biba_org):
    mary = session_start(biba_org, "Mary")
    john = session_start(biba_org, "John")
    assert op_create(biba_org, mary, "USalesReports/a").allowed
    with pytest.raises(ScenarioError):
        op_delete(biba_org, mary, "USalesReports")
    with pytest.raises(ScenarioError):
        op_delete(biba_org, mary, "Temp")
    assert op_delete(biba_org, john, "USalesReports/a").allowed
    assert "USalesReports/a" not in biba_org.objects
    with pytest.raises(UnknownPathError):
        op_delete(biba_org, mary, "USalesReports/a")


def test_sticky_owner_mismatch_is_recorded(biba_org):
    mary = session_start(biba_org, "Mary")
    alice = session_start(biba_org, "Alice")
    assert op_create(biba_org, mary, "Temp/notes").allowed
    assert op_delete(biba_org, alice, "Temp/notes").allowed
    record = biba_org.audit[-1]
    assert record.operation is AuditOp.DELETE
    assert record.meta()["sticky-owner-mismatch"] == "Mary!=Alice"


def test_unknown_session(biba_org):
    with pytest.raises(UnknownSessionError):
        op_read(biba_org, "ghost", "Temp")


def test_create_needs_a_folder(biba_org):
    mary = session_start(biba_org, "Mary")
    with pytest.raises(ScenarioError):
        op_create(biba_org, mary, "TopLevel")
    with pytest.raises(UnknownPathError):
        op_create(biba_org, mary, "Missing/x")
    with pytest.raises(AlreadyExistsError):
        op_create(biba_org, mary, "Temp")


def test_audit_is_replay_deterministic():
    audits = []
    for _ in range(2):
        world = load_scenario(fixture_text("biba-org"))
        run_script(world, fixture_text("trusted-entity"))
        run_script(world, fixture_text("prohibitions"))
        audits.append(world.audit)
    assert audits[0] == audits[1]
    assert [record.step for record in audits[0]] == list(range(len(audits[0])))


def test_count_verdicts(biba_org):
    run_script(biba_org, fixture_text("prohibitions"))
    allowed, denied = count_verdicts(biba_org.audit)
    assert allowed == 4
    assert denied == 8


def test_world_starts_empty():
    world = World()
    assert world.folders() == [] and world.files() == []


def test_equal_relabel_is_outside_a_narrow_envelope(biba_org):
    mary = session_start(biba_org, "Mary")
    john = session_start(biba_org, "John")
    decision = setpmac(biba_org, mary, parse_label("biba/equal"))
    assert decision.verdict is Verdict.DENY
    assert decision.breakdown[0].rule == "subject-range"
    assert str(biba_org.sessions[mary].effective) == "biba/2"
    assert op_write(biba_org, mary, "SummarySalesReports").verdict is Verdict.DENY

    assert op_create(biba_org, mary, "UAccountingReports/raw").allowed
    decision = setfmac(biba_org, mary, "UAccountingReports/raw", parse_label("biba/equal"))
    assert decision.verdict is Verdict.DENY
    assert decision.breakdown[0].rule == "new-label-outside-range"
    assert str(biba_org.objects["UAccountingReports/raw"].label) == "biba/2"
    assert op_read(biba_org, john, "UAccountingReports/raw").verdict is Verdict.DENY


def test_equal_relabel_is_refused_inside_a_wide_envelope(biba_org):
    jane = session_start(biba_org, "Jane")
    assert not setpmac(biba_org, jane, parse_label("biba/equal")).allowed
    assert setpmac(biba_org, jane, parse_label("biba/2")).allowed
    assert op_create(biba_org, jane, "USalesReports/r").allowed
    assert not setfmac(biba_org, jane, "USalesReports/r", parse_label("biba/equal")).allowed


def test_live_taint_matches_audit_replay(biba_org):
    mary = session_start(biba_org, "Mary", sid="mary")
    jane = session_start(biba_org, "Jane", sid="jane")
    robert = session_start(biba_org, "Robert", sid="robert")

    assert op_create(biba_org, mary, "USalesReports/a").allowed
    assert op_read(biba_org, mary, "USalesReports").allowed
    assert op_write(biba_org, mary, "USalesReports/a").allowed

    assert setpmac(biba_org, jane, parse_label("biba/2")).allowed
    assert op_read(biba_org, jane, "USalesReports/a").allowed
    assert op_write(biba_org, jane, "Temp").allowed
    assert op_read(biba_org, robert, "Temp").allowed

    assert setpmac(biba_org, jane, parse_label("biba/5")).allowed
    assert setfmac(biba_org, jane, "USalesReports/a", parse_label("biba/5")).allowed

    assert biba_org.objects["Temp"].taint == {"USalesReports/a", "USalesReports"}
    assert biba_org.sessions[robert].taint == {"Temp"}
    assert biba_org.sessions[jane].taint == set()
    assert biba_org.objects["USalesReports/a"].taint == set()

    state = replay(biba_org)
    for sid, session in biba_org.sessions.items():
        assert session.taint == state.session_origins(sid), sid
    for path, node in biba_org.objects.items():
        assert node.taint == state.object_origins(path), path


def test_move_into_own_subpath_is_rejected():
    world = load_scenario("folder A label biba/2\nfolder A/B label biba/2\nuser Mary label biba/2(2-2)\n")
    mary = session_start(world, "Mary")
    before = _snapshot(world)
    with pytest.raises(ScenarioError):
        op_move(world, mary, "A/B", "A/B/C")
    with pytest.raises(ScenarioError):
        op_move(world, mary, "A", "A/B/C")
    assert _snapshot(world) == before

    assert op_move(world, mary, "A/B", "A/Bx").allowed
    assert world.objects["A/Bx"].is_folder
    assert "A/B" not in world.objects
