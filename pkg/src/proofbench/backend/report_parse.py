"""Parse raw checker output into a normalized verification report.

Two dialects are supported: the machine-readable JSON interface (an array
of record objects) and the XML interface. Parsing is lossless: property
results, coverage goals, trace steps and solver statistics map into the
normalized model, and any record type the parser does not recognize is
preserved verbatim in the report's diagnostics side channel.

Truncated or malformed input always raises ``ReportUnparseable`` with a
byte offset; a partial report is never returned.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from enum import Enum
from typing import Any, Optional

from .. import model as m
from ..errors import ReportUnparseable


class ReportDialect(str, Enum):
    JSON_UI = "json_ui"
    XML_UI = "xml_ui"


_SOLVER_SIZE_RE = re.compile(r"(\d+)\s+variables,\s+(\d+)\s+clauses")
_SOLVER_TIME_RE = re.compile(r"Runtime (?:Solver|decision procedure):\s*([0-9.]+)s")

_PROPERTY_CLASS_MAP = (
    ("pointer_dereference", m.PropertyClass.POINTER_DEREFERENCE),
    ("pointer", m.PropertyClass.POINTER_DEREFERENCE),
    ("array_bounds", m.PropertyClass.ARRAY_BOUNDS),
    ("bounds", m.PropertyClass.ARRAY_BOUNDS),
    ("overflow", m.PropertyClass.ARITHMETIC_OVERFLOW),
    ("unwind", m.PropertyClass.UNWINDING_ASSERTION),
    ("assertion", m.PropertyClass.USER_ASSERTION),
)

_GOAL_STATUS_MAP = {
    "satisfied": m.CoverageStatus.COVERED,
    "failed": m.CoverageStatus.UNCOVERED,
    "unreachable": m.CoverageStatus.UNREACHABLE,
}


def classify_property_id(property_id: str, description: str = "") -> tuple[m.PropertyClass, str]:
    """Collapse the checker's open-ended property classes into the closed
    five-class set the diagnosis engine works over. Unknown classes map to
    user assertions with the original tag preserved."""
    parts = property_id.rsplit(".", 2)
    raw = parts[-2] if len(parts) >= 2 else ""
    haystack = f"{raw} {description}".lower()
    for needle, klass in _PROPERTY_CLASS_MAP:
        if needle in haystack:
            return klass, raw if raw not in needle else ""
    return m.PropertyClass.USER_ASSERTION, raw


def parse_report(raw: bytes, dialect: ReportDialect = ReportDialect.JSON_UI,
                 ) -> m.VerificationReport:
    if dialect is ReportDialect.JSON_UI:
        return _parse_json_ui(raw)
    return _parse_xml_ui(raw)


def validate_report(report: m.VerificationReport) -> list[str]:
    """Structural invariants every report (parsed or scripted) must satisfy."""
    out: list[str] = []
    seen: set[str] = set()
    for p in report.properties:
        if p.id in seen:
            out.append(f"duplicate property id {p.id}")
        seen.add(p.id)
    failed = {p.id for p in report.failed_properties()}
    for pid in report.traces:
        if pid not in failed:
            out.append(f"trace recorded for non-failed property {pid}")
    for pid, trace in report.traces.items():
        prev = 0
        for step in trace.steps:
            if step.index != prev + 1:
                out.append(f"trace {pid} step indices are not 1..n")
                break
            prev = step.index
    return out


# ---------------------------------------------------------------------------
# JSON dialect
# ---------------------------------------------------------------------------


def _decode_text(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ReportUnparseable(exc.start, "invalid UTF-8") from exc


def _parse_json_ui(raw: bytes) -> m.VerificationReport:
    text = _decode_text(raw)
    stripped = text.lstrip()
    lead = len(text) - len(stripped)
    if not stripped:
        raise ReportUnparseable(0, "empty output")
    decoder = json.JSONDecoder()
    try:
        records, end = decoder.raw_decode(stripped)
    except json.JSONDecodeError as exc:
        raise ReportUnparseable(lead + exc.pos, exc.msg) from exc
    if stripped[end:].strip():
        raise ReportUnparseable(lead + end, "trailing data after report")
    if not isinstance(records, list):
        raise ReportUnparseable(lead, "expected a JSON array of records")

    properties: list[m.PropertyResult] = []
    traces: dict[str, m.Trace] = {}
    coverage: list[m.LineCoverage] = []
    diagnostics: list[str] = []
    stats = m.SolverStats()

    for record in records:
        if not isinstance(record, dict):
            diagnostics.append(f"unknown-record: {json.dumps(record, sort_keys=True)}")
            continue
        if "result" in record:
            for entry in record["result"]:
                prop, trace = _parse_json_property(entry)
                properties.append(prop)
                if trace is not None and prop.status is m.PropertyStatus.FAIL:
                    traces[prop.id] = trace
        elif "goals" in record:
            for goal in record["goals"]:
                cov = _parse_json_goal(goal)
                if cov is not None:
                    coverage.append(cov)
        elif "messageText" in record:
            stats = _scan_solver_stats(str(record["messageText"]), stats)
            sentinel = _stage_sentinel(str(record["messageText"]))
            if sentinel:
                diagnostics.append(sentinel)
        elif "program" in record or "cProverStatus" in record:
            pass
        else:
            diagnostics.append(f"unknown-record: {json.dumps(record, sort_keys=True)}")

    report = m.VerificationReport(
        run_status=m.RunStatus.completed(),
        properties=tuple(properties),
        coverage=tuple(coverage),
        traces=traces,
        solver_stats=stats,
        diagnostics=tuple(diagnostics),
    )
    problems = validate_report(report)
    if problems:
        raise ReportUnparseable(0, "; ".join(problems))
    return report


def _parse_json_property(entry: dict) -> tuple[m.PropertyResult, Optional[m.Trace]]:
    pid = str(entry.get("property", ""))
    description = str(entry.get("description", ""))
    klass, raw_class = classify_property_id(pid, description)
    status_text = str(entry.get("status", "")).upper()
    if status_text == "SUCCESS":
        status = m.PropertyStatus.PASS
    elif status_text == "FAILURE":
        status = m.PropertyStatus.FAIL
    elif status_text == "UNREACHABLE":
        status = m.PropertyStatus.UNREACHABLE
    else:
        status = m.PropertyStatus.FAIL
    prop = m.PropertyResult(
        id=pid, klass=klass, status=status,
        location=_parse_json_location(entry.get("sourceLocation")),
        description=description, raw_class=raw_class)
    trace = None
    if "trace" in entry:
        trace = _parse_json_trace(entry["trace"])
    return prop, trace


def _parse_json_location(loc: Any) -> m.SourceLocation:
    if not isinstance(loc, dict):
        return m.SourceLocation()
    line_text = str(loc.get("line", "0"))
    try:
        line = int(line_text)
    except ValueError:
        line = 0
    return m.SourceLocation(str(loc.get("file", "")), line, str(loc.get("function", "")))


def _parse_json_trace(steps: list) -> m.Trace:
    out: list[m.TraceStep] = []
    index = 0
    for step in steps:
        if not isinstance(step, dict):
            continue
        kind = step.get("stepType", "")
        lhs = ""
        value = ""
        call = ""
        if kind == "assignment":
            lhs = str(step.get("lhs", ""))
            raw_value = step.get("value")
            if isinstance(raw_value, dict):
                value = str(raw_value.get("data", ""))
            elif raw_value is not None:
                value = str(raw_value)
        elif kind == "function-call":
            fn = step.get("function", {})
            if isinstance(fn, dict):
                call = str(fn.get("displayName") or fn.get("identifier") or "")
            else:
                call = str(fn)
        elif kind not in ("function-return", "location-only", ""):
            continue
        index += 1
        out.append(m.TraceStep(
            index=index, location=_parse_json_location(step.get("sourceLocation")),
            lhs=lhs, value=value, call=call))
    return m.Trace(tuple(out))


def _parse_json_goal(goal: Any) -> Optional[m.LineCoverage]:
    if not isinstance(goal, dict):
        return None
    status = _GOAL_STATUS_MAP.get(str(goal.get("status", "")).lower())
    if status is None:
        return None
    loc = _parse_json_location(goal.get("sourceLocation"))
    return m.LineCoverage(loc.file, loc.line, loc.function, status)


def _scan_solver_stats(text: str, stats: m.SolverStats) -> m.SolverStats:
    size = _SOLVER_SIZE_RE.search(text)
    if size:
        stats = m.SolverStats(int(size.group(1)), int(size.group(2)),
                              stats.solve_seconds)
    took = _SOLVER_TIME_RE.search(text)
    if took:
        stats = m.SolverStats(stats.variable_count, stats.clause_count,
                              float(took.group(1)))
    return stats


def _stage_sentinel(text: str) -> str:
    low = text.lower()
    if "post-processing" in low or "postprocessing" in low:
        return "stage: post-processing"
    if "sat solving" in low or "solving with" in low:
        return "stage: sat-solving"
    return ""


# ---------------------------------------------------------------------------
# XML dialect
# ---------------------------------------------------------------------------


def _parse_xml_ui(raw: bytes) -> m.VerificationReport:
    text = _decode_text(raw)
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, column = exc.position
        lines = text.splitlines(keepends=True)
        offset = sum(len(x) for x in lines[:line - 1]) + column
        raise ReportUnparseable(offset, str(exc)) from exc
    if root.tag != "cprover":
        raise ReportUnparseable(0, f"unexpected root element {root.tag!r}")

    properties: list[m.PropertyResult] = []
    traces: dict[str, m.Trace] = {}
    coverage: list[m.LineCoverage] = []
    diagnostics: list[str] = []
    stats = m.SolverStats()

    for child in root:
        if child.tag == "result":
            prop, trace = _parse_xml_property(child)
            properties.append(prop)
            if trace is not None and prop.status is m.PropertyStatus.FAIL:
                traces[prop.id] = trace
        elif child.tag == "goal":
            status = _GOAL_STATUS_MAP.get(child.get("status", "").lower())
            loc = _parse_xml_location(child.find("location"))
            if status is not None:
                coverage.append(m.LineCoverage(loc.file, loc.line, loc.function, status))
        elif child.tag == "message":
            text_el = child.find("text")
            if text_el is not None and text_el.text:
                stats = _scan_solver_stats(text_el.text, stats)
                sentinel = _stage_sentinel(text_el.text)
                if sentinel:
                    diagnostics.append(sentinel)
        elif child.tag in ("program", "cprover-status"):
            pass
        else:
            diagnostics.append(f"unknown-record: <{child.tag}>")

    report = m.VerificationReport(
        run_status=m.RunStatus.completed(),
        properties=tuple(properties),
        coverage=tuple(coverage),
        traces=traces,
        solver_stats=stats,
        diagnostics=tuple(diagnostics),
    )
    problems = validate_report(report)
    if problems:
        raise ReportUnparseable(0, "; ".join(problems))
    return report


def _parse_xml_location(el: Optional[ET.Element]) -> m.SourceLocation:
    if el is None:
        return m.SourceLocation()
    try:
        line = int(el.get("line", "0"))
    except ValueError:
        line = 0
    return m.SourceLocation(el.get("file", ""), line, el.get("function", ""))


def _parse_xml_property(el: ET.Element) -> tuple[m.PropertyResult, Optional[m.Trace]]:
    pid = el.get("property", "")
    desc_el = el.find("description")
    description = desc_el.text if desc_el is not None and desc_el.text else ""
    klass, raw_class = classify_property_id(pid, description)
    status_text = el.get("status", "").upper()
    status = {"SUCCESS": m.PropertyStatus.PASS,
              "UNREACHABLE": m.PropertyStatus.UNREACHABLE}.get(
        status_text, m.PropertyStatus.FAIL)
    prop = m.PropertyResult(
        id=pid, klass=klass, status=status,
        location=_parse_xml_location(el.find("location")),
        description=description, raw_class=raw_class)

    trace_el = el.find("goto_trace")
    trace = None
    if trace_el is not None:
        steps = []
        index = 0
        for step_el in trace_el:
            index += 1
            if step_el.tag == "assignment":
                steps.append(m.TraceStep(
                    index=index, location=_parse_xml_location(step_el.find("location")),
                    lhs=step_el.get("lhs", ""),
                    value=step_el.findtext("full_lhs_value", default="")))
            elif step_el.tag == "function_call":
                steps.append(m.TraceStep(
                    index=index, location=_parse_xml_location(step_el.find("location")),
                    call=step_el.get("identifier", "")))
            else:
                steps.append(m.TraceStep(
                    index=index, location=_parse_xml_location(step_el.find("location"))))
        trace = m.Trace(tuple(steps))
    return prop, trace
