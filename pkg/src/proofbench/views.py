"""Canonical JSON documents shared by the CLI's --json mode and the HTTP
API. Both surfaces serialize through ``jsonio.canonical_bytes``, so the same
query yields byte-identical output either way."""

from __future__ import annotations

from typing import Sequence

from . import analytics, jsonio
from . import model as m
from .errors import DegenerateInput, SessionNotFound
from .session import SessionStore


def sessions_doc(store: SessionStore) -> dict:
    rows = []
    for sid in store.list_ids():
        session = store.load(sid)
        rows.append({
            "id": session.id,
            "function": session.target.name,
            "project": session.project,
            "iterations": session.metrics.iteration_count,
            "verdict": session.completeness.verdict,
            "version": session.version,
        })
    return jsonio.as_document({"sessions": rows})


def session_doc(session: m.ProofSession) -> dict:
    return jsonio.as_document(jsonio.encode_session(session))


def report_doc(session: m.ProofSession, revision: int) -> dict:
    if not 0 <= revision < len(session.revisions):
        raise SessionNotFound(f"{session.id} has no revision {revision}")
    report = session.revisions[revision].report
    if report is None:
        raise SessionNotFound(f"revision {revision} has not been run")
    return jsonio.as_document(jsonio.encode_report(report))


def diagnoses_doc(session: m.ProofSession) -> dict:
    revision = session.latest_diagnosed_index
    diagnoses = (session.revisions[revision].diagnoses if revision >= 0 else ())
    return jsonio.as_document({
        "revision": revision,
        "diagnoses": [jsonio.encode_diagnosis(d) for d in diagnoses],
    })


def coverage_doc(session: m.ProofSession) -> dict:
    revision = session.latest_diagnosed_index
    lines = []
    percent = 0.0
    if revision >= 0:
        report = session.revisions[revision].report
        assert report is not None
        lines = [jsonio.encode_coverage_line(c)
                 for c in sorted(report.coverage, key=lambda c: (c.file, c.line))]
        percent = analytics.coverage_percent(report)
    return jsonio.as_document({
        "revision": revision,
        "coverage_percent": percent,
        "lines": lines,
    })


def review_doc(session: m.ProofSession) -> dict:
    return jsonio.as_document({
        "items": [jsonio.encode_review_item(i) for i in session.review_items],
    })


def metrics_doc(store: SessionStore) -> dict:
    sessions = [store.load(sid) for sid in store.list_ids()]
    return metrics_doc_for(sessions)


def metrics_doc_for(sessions: Sequence[m.ProofSession]) -> dict:
    table = analytics.characterize(sessions)
    payload: dict = {
        "characteristics": analytics.characteristics_doc(table),
        "sessions": [
            {
                "id": s.id,
                "project": s.project,
                "metrics": jsonio.encode_metrics(s.metrics),
                "verdict": s.completeness.verdict,
            }
            for s in sessions
        ],
    }
    points = analytics.regression_points(sessions)
    if len(points) >= 3:
        try:
            fit = analytics.regress_time(points)
        except DegenerateInput:
            fit = None
        if fit is not None:
            payload["time_regression"] = {
                "r2_formula": fit.r2_formula,
                "r2_program": fit.r2_program,
                "formula": {"slope": fit.formula.slope,
                            "intercept": fit.formula.intercept},
                "program": {"slope": fit.program.slope,
                            "intercept": fit.program.intercept},
            }
    return jsonio.as_document(payload)
