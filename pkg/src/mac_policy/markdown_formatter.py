"""
Markdown formatting for scenario reports and compiled Chinese Wall tables.
"""

import logging
from typing import List, Optional, Sequence, Tuple

from .chinese_wall import FeasibilityReport, Triplet, triplet_to_label
from .flow_checker import FlowViolation
from .script_runner import ScriptReport

logger = logging.getLogger(__name__)


def _escape(text: str) -> str:
    return text.replace("|", "\\|")


class MarkdownFormatter:
    """Formats engine results as Markdown."""

    def format_script_report(
        self,
        report: ScriptReport,
        title: str = "Scenario Report",
        violations: Optional[List[FlowViolation]] = None,
        verdicts: Optional[Tuple[int, int]] = None,
    ) -> str:
        status = "✅ PASS" if report.passed else "❌ FAIL"
        counts = f", {verdicts[0]} allowed, {verdicts[1]} denied" if verdicts else ""
        lines = [
            f"# {title}",
            "",
            f"**Result:** {status} ({report.steps} steps, {len(report.failures)} failed{counts})",
            "",
            "| Line | Step | Expected | Actual | |",
            "|-----:|------|----------|--------|---|",
        ]
        for result in report.results:
            expected = result.step.expect.value if result.step.expect else ""
            actual = result.actual.value if result.actual else ("error" if result.error else "ok")
            mark = "✅" if result.passed else "❌"
            lines.append(
                f"| {result.step.line_no} | `{_escape(result.step.text)}` | {expected} | {actual} | {mark} |"
            )

        failures = report.failures
        if failures:
            lines.extend(["", "## Failures", ""])
            for result in failures:
                reason = result.error or ", ".join(str(entry) for entry in result.decision.denied_by()) or "unexpected allow"
                lines.append(f"- line {result.step.line_no}: `{_escape(result.step.text)}`: {reason}")

        if violations:
            lines.extend(["", "## Flow Violations", ""])
            lines.extend(f"- {violation}" for violation in violations)
        return "\n".join(lines) + "\n"

    def format_cw_table(self, triplets: Sequence[Triplet], report: Optional[FeasibilityReport] = None) -> str:
        lines = ["# Chinese Wall Compilation", ""]
        if report is not None:
            lines.extend([
                f"- industries: {report.config.n_industries}",
                f"- companies per industry: {report.config.n_companies}",
                f"- compartments: {report.compartments_needed}",
                f"- login classes: {report.login_classes_needed}",
                "",
            ])
        lines.extend([
            "| Level | CW label | Login class | MLS label |",
            "|------:|----------|-------------|-----------|",
        ])
        for triplet in triplets:
            login_class = "" if triplet.cw.syshigh else f"`{triplet.cw.class_name}`"
            lines.append(
                f"| {triplet.cw.level} | {triplet.cw.pretty()} | {login_class} | `{triplet_to_label(triplet)}` |"
            )
        return "\n".join(lines) + "\n"

    def format_feasibility(self, report: FeasibilityReport) -> str:
        verdict = "✅ feasible" if report.feasible else "❌ infeasible"
        return "\n".join([
            f"# Chinese Wall Feasibility: N={report.config.n_industries}, C={report.config.n_companies}",
            "",
            f"**Result:** {verdict}",
            "",
            "| Resource | Needed | Limit |",
            "|----------|-------:|------:|",
            f"| compartments | {report.compartments_needed} | < {report.compartment_limit} |",
            f"| login classes | {report.login_classes_needed} | |",
            f"| grades | {report.grades_needed} | |",
        ]) + "\n"

    def format_login_classes(self, stanzas: str) -> str:
        return "# Login Classes\n\n```\n" + stanzas + "```\n"
