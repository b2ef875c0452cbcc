"""
Tests for the mac-policy command line.
"""

import json

import pytest

from conftest import FIXTURES_DIR
from mac_policy.cli import ExitStatus, main


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_parse_echoes_canonical_form(capsys):
    status, out, _ = run(capsys, "parse", "biba/5(2-10)")
    assert status == ExitStatus.OK
    assert out.splitlines()[0] == "biba/5(2-10)"


def test_parse_error_is_status_two(capsys):
    status, out, err = run(capsys, "parse", "biba/")
    assert status == ExitStatus.ERROR
    assert out == ""
    assert "missing qualifier" in err


def test_parse_json_breakdown(capsys):
    status, out, _ = run(capsys, "parse", "biba/10(10-10),mls/100:1+2(100-100:1+2)", "--format", "json")
    assert status == ExitStatus.OK
    payload = json.loads(out)
    mls = payload["policies"][1]
    assert mls["policy"] == "mls"
    assert mls["effective"]["compartments"] == [1, 2]
    assert mls["hi"]["grade"] == "100"


@pytest.mark.parametrize("a, b, expected", [
    ("mls/50:1+2", "mls/50:1", "dominates"),
    ("mls/10:5+9", "mls/10:5+6+7", "incomparable"),
    ("biba/5", "biba/5", "equal"),
    ("biba/2", "biba/10", "dominated-by"),
])
def test_cmp(capsys, a, b, expected):
    status, out, _ = run(capsys, "cmp", a, b)
    assert status == ExitStatus.OK
    assert out.strip() == expected


def test_cmp_selects_policy(capsys):
    status, out, _ = run(capsys, "cmp", "biba/10,mls/low", "biba/2,mls/50", "--policy", "mls")
    assert out.strip() == "dominated-by"
    status, out, _ = run(capsys, "cmp", "biba/10,mls/low", "biba/2,mls/50")
    assert out.splitlines() == ["biba: dominates", "mls: dominated-by"]


def test_decide_deny_cites_rule(capsys):
    status, out, _ = run(
        capsys, "decide",
        "--subject", "biba/10(10-10),mls/100(100-100)",
        "--object", "biba/2,mls/low",
        "--op", "write",
    )
    assert status == ExitStatus.DENIED
    assert "mls:no-write-down" in out


def test_decide_json(capsys):
    status, out, _ = run(
        capsys, "decide", "--subject", "biba/5,mls/low", "--object", "biba/equal,mls/equal",
        "--op", "read", "--format", "json",
    )
    assert status == ExitStatus.OK
    assert json.loads(out)["verdict"] == "allow"


def test_decide_policy_mismatch_is_input_error(capsys):
    status, _, err = run(capsys, "decide", "--subject", "biba/5", "--object", "mls/5", "--op", "read")
    assert status == ExitStatus.ERROR
    assert err.startswith("❌")


def test_cw_gen(capsys):
    status, out, _ = run(capsys, "cw", "gen", "--industries", "2", "--companies", "2", "--format", "json")
    assert status == ExitStatus.OK
    payload = json.loads(out)
    assert payload["nodes"] == 10
    assert payload["triplets"][-1]["label"] == "mls/high:1+2+3+4"


def test_cw_gen_markdown(capsys):
    status, out, _ = run(capsys, "cw", "gen", "--industries", "2", "--companies", "2", "--format", "markdown")
    assert status == ExitStatus.OK
    assert "`mls/20:1+3`" in out


def test_cw_check_infeasible(capsys):
    status, out, _ = run(capsys, "cw", "check", "--industries", "16", "--companies", "16")
    assert status == ExitStatus.DENIED
    assert "infeasible" in out


def test_cw_classes(capsys):
    status, out, _ = run(capsys, "cw", "classes", "--industries", "2", "--companies", "2")
    assert status == ExitStatus.OK
    assert out.count(":label=") == 9


def test_scenario_run_trusted_entity(capsys):
    status, out, _ = run(capsys, "scenario", "run", "biba-org", "trusted-entity")
    assert status == ExitStatus.OK
    assert "PASS" in out


def test_scenario_run_tampered_expectation(capsys, tmp_path):
    script = (FIXTURES_DIR / "trusted-entity.mac").read_text(encoding="utf-8")
    tampered = tmp_path / "tampered.mac"
    tampered.write_text(script.replace("setpmac jane biba/2 expect allow", "setpmac jane biba/2 expect deny"))
    status, out, _ = run(capsys, "scenario", "run", str(FIXTURES_DIR / "biba-org.mac"), str(tampered), "--format", "json")
    assert status == ExitStatus.DENIED
    payload = json.loads(out)
    assert payload["failures"] == 1
    assert payload["passed"] is False


def test_scenario_run_missing_file(capsys, tmp_path):
    status, _, _ = run(capsys, "scenario", "run", "biba-org", str(tmp_path / "nope.mac"))
    assert status == ExitStatus.ERROR


def test_json_output_is_stable(capsys):
    first = run(capsys, "scenario", "run", "biba-org", "prohibitions", "--format", "json")
    second = run(capsys, "scenario", "run", "biba-org", "prohibitions", "--format", "json")
    assert first[0] == second[0] == ExitStatus.OK
    assert first[1] == second[1]
    assert json.loads(first[1])["flow_violations"] == []


def test_usage_error(capsys):
    status, _, _ = run(capsys, "decide", "--subject", "biba/5")
    assert status == ExitStatus.ERROR


@pytest.mark.parametrize("command", [
    ["parse", "biba/5"],
    ["cmp", "biba/5", "biba/2"],
    ["decide", "--subject", "biba/5", "--object", "biba/2", "--op", "read"],
])
def test_label_commands_refuse_markdown(capsys, command):
    status, out, err = run(capsys, *command, "--format", "markdown")
    assert status == ExitStatus.ERROR
    assert out == ""
    assert "invalid choice" in err


def test_cw_classes_json(capsys):
    status, out, _ = run(capsys, "cw", "classes", "--industries", "2", "--companies", "2", "--format", "json")
    assert status == ExitStatus.OK
    classes = json.loads(out)["classes"]
    assert len(classes) == 9
    assert {"class": "cw_1_2", "label": "mls/20:1+4(20:1+4-20:1+4)"} in classes


def test_cw_classes_markdown(capsys):
    status, out, _ = run(capsys, "cw", "classes", "--industries", "2", "--companies", "2", "--format", "markdown")
    assert status == ExitStatus.OK
    assert out.startswith("# Login Classes")
    assert out.count("```") == 2
    assert out.count(":label=") == 9


def test_cw_check_markdown(capsys):
    status, out, _ = run(capsys, "cw", "check", "--industries", "2", "--companies", "2", "--format", "markdown")
    assert status == ExitStatus.OK
    assert "| compartments | 4 |" in out


def test_scenario_list(capsys):
    status, out, _ = run(capsys, "scenario", "list")
    assert status == ExitStatus.OK
    names = [line.split()[0] for line in out.splitlines()]
    assert {"biba-org", "mls-org", "trusted-entity", "prohibitions"} <= set(names)

    status, out, _ = run(capsys, "scenario", "list", "--format", "json")
    assert json.loads(out)["biba-org"] == str(FIXTURES_DIR / "biba-org.mac")


def test_scenario_run_needs_world_and_script(capsys):
    status, out, err = run(capsys, "scenario", "run", "biba-org")
    assert status == ExitStatus.ERROR
    assert "needs a world and a script" in err


def test_scenario_json_counts_verdicts(capsys):
    status, out, _ = run(capsys, "scenario", "run", "biba-org", "prohibitions", "--format", "json")
    assert status == ExitStatus.OK
    payload = json.loads(out)
    assert payload["allowed"] == 4
    assert payload["denied"] == 8

    status, out, _ = run(capsys, "scenario", "run", "biba-org", "prohibitions")
    assert "(4 allowed, 8 denied)" in out
