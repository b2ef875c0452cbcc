"""
Command-line front end for the MAC policy engine.

    mac-policy parse "biba/5(2-10)"
    mac-policy cmp mls/50:1+2 mls/50:1
    mac-policy decide --subject biba/10 --object biba/2 --op read
    mac-policy cw gen --industries 2 --companies 2
    mac-policy scenario run biba-org trusted-entity

Exit status: 0 success or allow, 1 deny or unmet expectation, 2 usage or
input error.
"""

import argparse
import logging
import sys
from enum import IntEnum
from typing import List, Optional

from dotenv import load_dotenv

from .chinese_wall import (
    Collection,
    CompileOptions,
    CWConfig,
    TopGrade,
    compile_policy,
    emit_login_classes,
    feasibility,
)
from .config_manager import get_config_manager
from .decision import decide
from .errors import MacPolicyError
from .flow_checker import flow_check
from .label_parser import parse_label
from .lattice import compare
from .markdown_formatter import MarkdownFormatter
from .models import AccessOp, MacLabel, count_verdicts, effective_of
from .report_formatter import ReportFormatter
from .scenario_loader import load_scenario_file, read_fixture
from .script_runner import run_script

logger = logging.getLogger(__name__)


PLAIN_FORMATS = ["text", "json"]
ALL_FORMATS = ["text", "json", "markdown"]


class ExitStatus(IntEnum):
    OK = 0
    DENIED = 1
    ERROR = 2


def setup_logging(verbose: bool = False):
    """Set up logging on stderr; stdout is reserved for command output."""
    level = logging.DEBUG if verbose else logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s', stream=sys.stderr)


def _emit(text: str) -> None:
    print(text)


def cmd_parse(args, formatter: ReportFormatter) -> ExitStatus:
    label = parse_label(args.label)
    if args.format == "json":
        _emit(formatter.to_json(formatter.label_to_dict(label)))
    else:
        _emit(formatter.format_label(label))
    return ExitStatus.OK


def _policies_to_compare(a: MacLabel, b: MacLabel, policy: Optional[str]) -> List[str]:
    if policy:
        for label in (a, b):
            if label.get(policy) is None:
                raise MacPolicyError(f"label '{label}' has no {policy} element")
        return [policy]
    common = [name for name in a.policy_names if b.get(name) is not None]
    if not common:
        raise MacPolicyError("labels share no policy")
    return common


def cmd_cmp(args, formatter: ReportFormatter) -> ExitStatus:
    a, b = parse_label(args.a), parse_label(args.b)
    results = []
    for name in _policies_to_compare(a, b, args.policy):
        ordering = compare(effective_of(a[name]), effective_of(b[name]))
        results.append((name, ordering))

    if args.format == "json":
        payload = [formatter.ordering_to_dict(args.a, args.b, name, ordering) for name, ordering in results]
        _emit(formatter.to_json(payload[0] if len(payload) == 1 else {"results": payload}))
    elif len(results) == 1:
        _emit(results[0][1].value)
    else:
        for name, ordering in results:
            _emit(f"{name}: {ordering.value}")
    return ExitStatus.OK


def cmd_decide(args, formatter: ReportFormatter) -> ExitStatus:
    decision = decide(parse_label(args.subject), parse_label(args.object), AccessOp(args.op))
    if args.format == "json":
        _emit(formatter.to_json(formatter.decision_to_dict(decision)))
    else:
        _emit(formatter.format_decision(decision))
    return ExitStatus.OK if decision.allowed else ExitStatus.DENIED


def _compile_options(args) -> CompileOptions:
    options = CompileOptions.from_settings()
    return CompileOptions(
        grade_step=options.grade_step,
        collection=Collection(args.collection) if args.collection else options.collection,
        top_grade=TopGrade(args.top_grade) if args.top_grade else options.top_grade,
        max_nodes=options.max_nodes,
    )


def cmd_cw(args, formatter: ReportFormatter) -> ExitStatus:
    cfg = CWConfig(args.industries, args.companies)
    report = feasibility(cfg)

    if args.action == "check":
        if args.format == "json":
            _emit(formatter.to_json(formatter.feasibility_to_dict(report)))
        elif args.format == "markdown":
            sys.stdout.write(MarkdownFormatter().format_feasibility(report))
        else:
            _emit(formatter.format_feasibility(report))
        return ExitStatus.OK if report.feasible else ExitStatus.DENIED

    options = _compile_options(args)
    triplets = compile_policy(cfg, options)
    if args.action == "classes":
        if args.format == "json":
            _emit(formatter.to_json(formatter.login_classes_to_dict(triplets)))
        elif args.format == "markdown":
            sys.stdout.write(MarkdownFormatter().format_login_classes(emit_login_classes(cfg, options)))
        else:
            sys.stdout.write(emit_login_classes(cfg, options))
        return ExitStatus.OK

    if args.format == "json":
        _emit(formatter.to_json(formatter.cw_table_to_dict(triplets)))
    elif args.format == "markdown":
        sys.stdout.write(MarkdownFormatter().format_cw_table(triplets, report))
    else:
        _emit(formatter.format_cw_table(triplets))
    return ExitStatus.OK


def _list_fixtures(args, formatter: ReportFormatter) -> ExitStatus:
    fixtures = get_config_manager().list_fixtures()
    if args.format == "json":
        _emit(formatter.to_json({name: str(path) for name, path in fixtures.items()}))
    elif args.format == "markdown":
        for name, path in fixtures.items():
            _emit(f"- `{name}`: {path}")
    else:
        for name, path in fixtures.items():
            _emit(f"{name:<16} {path}")
    return ExitStatus.OK


def cmd_scenario(args, formatter: ReportFormatter) -> ExitStatus:
    if args.action == "list":
        return _list_fixtures(args, formatter)
    if not args.world or not args.script:
        raise MacPolicyError("scenario run needs a world and a script")

    world = load_scenario_file(args.world)
    report = run_script(world, read_fixture(args.script), stop_on_failure=args.stop_on_failure)
    violations = flow_check(world)
    verdicts = count_verdicts(world.audit)
    for violation in violations:
        logger.warning(f"flow violation: {violation}")

    if args.format == "json":
        _emit(formatter.to_json(formatter.script_report_to_dict(report, violations, verdicts)))
    elif args.format == "markdown":
        sys.stdout.write(MarkdownFormatter().format_script_report(
            report, title=f"Scenario {args.script}", violations=violations, verdicts=verdicts,
        ))
    else:
        _emit(formatter.format_script_report(report, violations, verdicts))
    return ExitStatus.OK if report.passed else ExitStatus.DENIED


def build_parser() -> argparse.ArgumentParser:
    default_format = get_config_manager().get_setting("output", "default_format")

    def add_format(command: argparse.ArgumentParser, choices: List[str]) -> None:
        default = default_format if default_format in choices else "text"
        command.add_argument('--format', choices=choices, default=default,
                             help=f'Output format (default: {default})')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', '-v', action='store_true',
                        help='Enable verbose logging')

    parser = argparse.ArgumentParser(
        prog="mac-policy",
        description="FreeBSD MAC label engine - parse, compare and decide on Biba/MLS labels",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Canonical form and breakdown of a label
  mac-policy parse "biba/10(10-10),mls/100:1+2(100-100:1+2)"

  # Can John (biba/10) read a biba/2 folder?
  mac-policy decide --subject biba/10 --object biba/2 --op read

  # Chinese Wall lattice for 2 industries with 2 companies each
  mac-policy cw gen --industries 2 --companies 2

  # Replay the trusted-entity workflow on the bundled organization
  mac-policy scenario run biba-org trusted-entity
        """
    )
    commands = parser.add_subparsers(dest="command", required=True)

    parse_cmd = commands.add_parser("parse", parents=[common], help="Parse and canonicalize a label")
    parse_cmd.add_argument("label")
    add_format(parse_cmd, PLAIN_FORMATS)
    parse_cmd.set_defaults(handler=cmd_parse)

    cmp_cmd = commands.add_parser("cmp", parents=[common], help="Compare two labels")
    cmp_cmd.add_argument("a")
    cmp_cmd.add_argument("b")
    cmp_cmd.add_argument("--policy", help="Compare only this policy (default: every shared policy)")
    add_format(cmp_cmd, PLAIN_FORMATS)
    cmp_cmd.set_defaults(handler=cmd_cmp)

    decide_cmd = commands.add_parser("decide", parents=[common], help="Decide a read or write")
    decide_cmd.add_argument("--subject", required=True)
    decide_cmd.add_argument("--object", required=True)
    decide_cmd.add_argument("--op", choices=[op.value for op in AccessOp], required=True)
    add_format(decide_cmd, PLAIN_FORMATS)
    decide_cmd.set_defaults(handler=cmd_decide)

    cw_cmd = commands.add_parser("cw", parents=[common], help="Chinese Wall compiler")
    cw_cmd.add_argument("action", choices=["gen", "check", "classes"])
    cw_cmd.add_argument("--industries", type=int, required=True)
    cw_cmd.add_argument("--companies", type=int, required=True)
    cw_cmd.add_argument("--collection", choices=[c.value for c in Collection],
                        help="Compartment collection rule (default from settings)")
    cw_cmd.add_argument("--top-grade", choices=[t.value for t in TopGrade],
                        help="Grade of the full-vector level (default from settings)")
    add_format(cw_cmd, ALL_FORMATS)
    cw_cmd.set_defaults(handler=cmd_cw)

    scenario_cmd = commands.add_parser("scenario", parents=[common], help="Run scenario scripts")
    scenario_cmd.add_argument("action", choices=["run", "list"])
    scenario_cmd.add_argument("world", nargs="?", help="Scenario file or bundled fixture name")
    scenario_cmd.add_argument("script", nargs="?", help="Script file or bundled fixture name")
    scenario_cmd.add_argument("--stop-on-failure", action="store_true",
                              help="Stop at the first unmet expectation")
    add_format(scenario_cmd, ALL_FORMATS)
    scenario_cmd.set_defaults(handler=cmd_scenario)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI function."""
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else ExitStatus.ERROR

    setup_logging(args.verbose)
    try:
        return int(args.handler(args, ReportFormatter()))
    except (MacPolicyError, OSError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return int(ExitStatus.ERROR)


if __name__ == "__main__":
    sys.exit(main())
