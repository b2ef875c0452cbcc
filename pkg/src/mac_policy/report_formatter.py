"""
Report formatting for the MAC policy engine.

Human output is aligned plain text; machine output is one JSON document
per invocation, keys sorted so repeated runs print identical bytes.
"""

import json
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .chinese_wall import FeasibilityReport, Triplet, login_class_label, triplet_to_label
from .flow_checker import FlowViolation
from .label_parser import format_element, format_label
from .models import Decision, Element, MacLabel, Ordering, PolicyElement, RangedElement
from .script_runner import ScriptReport, StepResult

logger = logging.getLogger(__name__)


def _element_to_dict(element: PolicyElement) -> Dict[str, Any]:
    return {
        "grade": str(element.grade),
        "compartments": sorted(element.compartments),
    }


def _qualifier_to_dict(element: Element) -> Dict[str, Any]:
    if isinstance(element, RangedElement):
        return {
            "effective": _element_to_dict(element.effective),
            "lo": _element_to_dict(element.lo),
            "hi": _element_to_dict(element.hi),
        }
    return {"effective": _element_to_dict(element)}


class ReportFormatter:
    """Formats engine results as text or JSON-ready dictionaries."""

    STATUS_ICONS = {
        True: "✅",
        False: "❌",
    }

    def to_json(self, payload: Dict[str, Any]) -> str:
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)

    # --- labels ----------------------------------------------------------------

    def label_to_dict(self, label: MacLabel) -> Dict[str, Any]:
        return {
            "canonical": format_label(label),
            "policies": [
                {"policy": name, **_qualifier_to_dict(element)}
                for name, element in label.entries
            ],
        }

    def format_label(self, label: MacLabel) -> str:
        """Canonical form followed by one breakdown line per policy."""
        lines = [format_label(label)]
        for name, element in label.entries:
            if isinstance(element, RangedElement):
                lines.append(
                    f"  {name:<5} effective {format_element(element.effective):<12} "
                    f"range {format_element(element.lo)} .. {format_element(element.hi)}"
                )
            else:
                lines.append(f"  {name:<5} effective {format_element(element)}")
            compartments = sorted((element.effective if isinstance(element, RangedElement) else element).compartments)
            if compartments:
                lines.append(f"        compartments {{{', '.join(str(c) for c in compartments)}}}")
        return "\n".join(lines)

    # --- comparisons and decisions -------------------------------------------

    def ordering_to_dict(self, a: str, b: str, policy: str, ordering: Ordering) -> Dict[str, Any]:
        return {"a": a, "b": b, "policy": policy, "ordering": ordering.value}

    def decision_to_dict(self, decision: Decision) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "verdict": decision.verdict.value,
            "breakdown": [
                {
                    "policy": entry.policy,
                    "verdict": entry.verdict.value,
                    "rule": f"{entry.policy}:{entry.rule}",
                    **({"stage": entry.stage} if entry.stage else {}),
                }
                for entry in decision.breakdown
            ],
        }
        if decision.label is not None:
            payload["label"] = format_label(decision.label)
        return payload

    def format_decision(self, decision: Decision) -> str:
        lines = [f"{self.STATUS_ICONS[decision.allowed]} {decision.verdict.value}"]
        for entry in decision.breakdown:
            stage = f"[{entry.stage}] " if entry.stage else ""
            lines.append(
                f"  {stage}{entry.policy:<5} {entry.verdict.value:<6} {entry.policy}:{entry.rule}"
            )
        return "\n".join(lines)

    # --- chinese wall ----------------------------------------------------------

    def cw_table_to_dict(self, triplets: Sequence[Triplet]) -> Dict[str, Any]:
        return {
            "nodes": len(triplets),
            "triplets": [
                {
                    "cw": str(triplet.cw),
                    "grade": str(triplet.grade),
                    "compartments": sorted(triplet.compartments),
                    "label": triplet_to_label(triplet),
                }
                for triplet in triplets
            ],
        }

    def format_cw_table(self, triplets: Sequence[Triplet]) -> str:
        width = max(len(triplet.cw.pretty()) for triplet in triplets)
        lines = [f"{'CW label':<{width}}  MLS label", "-" * (width + 2 + 9)]
        for triplet in triplets:
            lines.append(f"{triplet.cw.pretty():<{width}}  {triplet_to_label(triplet)}")
        lines.append(f"{len(triplets)} nodes")
        return "\n".join(lines)

    def login_classes_to_dict(self, triplets: Sequence[Triplet]) -> Dict[str, Any]:
        return {
            "classes": [
                {"class": triplet.cw.class_name, "label": login_class_label(triplet)}
                for triplet in triplets
                if not triplet.cw.syshigh
            ],
        }

    def feasibility_to_dict(self, report: FeasibilityReport) -> Dict[str, Any]:
        return {
            "industries": report.config.n_industries,
            "companies": report.config.n_companies,
            "compartments_needed": report.compartments_needed,
            "compartment_limit": report.compartment_limit,
            "login_classes_needed": report.login_classes_needed,
            "grades_needed": report.grades_needed,
            "feasible": report.feasible,
        }

    def format_feasibility(self, report: FeasibilityReport) -> str:
        verdict = "feasible" if report.feasible else "infeasible"
        return "\n".join([
            f"{self.STATUS_ICONS[report.feasible]} N={report.config.n_industries}, "
            f"C={report.config.n_companies}: {verdict}",
            f"  compartments needed  {report.compartments_needed} (must stay below {report.compartment_limit})",
            f"  login classes needed {report.login_classes_needed}",
            f"  grades needed        {report.grades_needed}",
        ])

    # --- scenarios ---------------------------------------------------------------

    def _step_to_dict(self, result: StepResult) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "line": result.step.line_no,
            "step": result.step.text,
            "passed": result.passed,
            "expected": result.step.expect.value if result.step.expect else None,
            "actual": result.actual.value if result.actual else None,
        }
        if result.decision is not None:
            payload["breakdown"] = self.decision_to_dict(result.decision)["breakdown"]
        if result.error is not None:
            payload["error"] = result.error
        return payload

    def script_report_to_dict(
        self,
        report: ScriptReport,
        violations: Optional[List[FlowViolation]] = None,
        verdicts: Optional[Tuple[int, int]] = None,
    ) -> Dict[str, Any]:
        first = report.first_failure
        allowed, denied = verdicts if verdicts else (None, None)
        return {
            "allowed": allowed,
            "denied": denied,
            "passed": report.passed,
            "steps": [self._step_to_dict(result) for result in report.results],
            "failures": len(report.failures),
            "first_failure": first.step.line_no if first else None,
            "stopped_early": report.stopped_early,
            "flow_violations": [str(violation) for violation in violations or []],
        }

    def format_script_report(
        self,
        report: ScriptReport,
        violations: Optional[List[FlowViolation]] = None,
        verdicts: Optional[Tuple[int, int]] = None,
    ) -> str:
        lines = []
        width = max((len(result.step.text) for result in report.results), default=0)
        for result in report.results:
            outcome = result.actual.value if result.actual else ("error" if result.error else "ok")
            expected = f" (expected {result.step.expect.value})" if result.step.expect else ""
            lines.append(
                f"{self.STATUS_ICONS[result.passed]} {result.step.line_no:>4}  "
                f"{result.step.text:<{width}}  {outcome}{expected}"
            )
            if result.error:
                lines.append(f"        {result.error}")
            elif result.decision is not None and not result.decision.allowed:
                for entry in result.decision.denied_by():
                    lines.append(f"        denied by {entry}")

        lines.append("")
        summary = "PASS" if report.passed else "FAIL"
        counts = f" ({verdicts[0]} allowed, {verdicts[1]} denied)" if verdicts else ""
        lines.append(f"{summary}: {report.steps} steps, {len(report.failures)} failed{counts}")
        if report.first_failure is not None:
            lines.append(f"First failure at line {report.first_failure.step.line_no}: {report.first_failure.step.text}")
        for violation in violations or []:
            lines.append(f"⚠️ flow violation: {violation}")
        return "\n".join(lines)
