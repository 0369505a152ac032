"""The iterate loop: scaffold, run, diagnose, accept, apply, re-run.

A session is a persisted, append-only sequence of harness revisions. Every
accepted intervention lands in the accept log first and is folded into a
new revision on the next run, so replaying the log from revision 0 always
reproduces the latest spec (the event-sourcing check in the tests).

Persistence is a per-session directory of JSON files plus the rendered
artifacts: inspectable, diff-able, and crash-safe via write-temp-then-rename.
"""

from __future__ import annotations

import os
import time
import uuid
from dataclasses import replace
from pathlib import Path
from typing import Optional

from . import backend as be
from . import codegen, diagnosis, jsonio
from . import model as m
from .errors import Inapplicable, SessionNotFound, StaleRevision

SESSION_FILE = "session.json"


class SessionStore:
    """Directory-backed store: ``<root>/<id>/session.json`` plus
    ``rev-<n>/{harness.c,Makefile,report.json,diagnoses.json}``."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def session_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def list_ids(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(p.name for p in self.root.iterdir()
                      if (p / SESSION_FILE).exists())

    def load(self, session_id: str) -> m.ProofSession:
        path = self.session_dir(session_id) / SESSION_FILE
        if not path.exists():
            raise SessionNotFound(session_id)
        import json

        return jsonio.decode_session(json.loads(path.read_text()))

    def save(self, session: m.ProofSession) -> None:
        folder = self.session_dir(session.id)
        folder.mkdir(parents=True, exist_ok=True)
        for index, revision in enumerate(session.revisions):
            self._write_revision(folder / f"rev-{index}", revision)
        doc = jsonio.as_document(jsonio.encode_session(session))
        self._atomic_write(folder / SESSION_FILE, jsonio.canonical_bytes(doc))

    def _write_revision(self, folder: Path, revision: m.Revision) -> None:
        folder.mkdir(parents=True, exist_ok=True)
        rendered = codegen.render(revision.spec)
        self._atomic_write(folder / "harness.c", rendered.harness_source.encode())
        self._atomic_write(folder / "Makefile", rendered.makefile.encode())
        if revision.report is not None:
            doc = jsonio.as_document(jsonio.encode_report(revision.report))
            self._atomic_write(folder / "report.json", jsonio.canonical_bytes(doc))
        diags = jsonio.as_document(
            {"diagnoses": [jsonio.encode_diagnosis(d) for d in revision.diagnoses]})
        self._atomic_write(folder / "diagnoses.json", jsonio.canonical_bytes(diags))

    @staticmethod
    def _atomic_write(path: Path, data: bytes) -> None:
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_bytes(data)
        os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Lifecycle operations
# ---------------------------------------------------------------------------


def start(function: str, scope: m.UnitScope, cfg: be.BackendConfig,
          store: SessionStore, session_id: Optional[str] = None,
          project: str = "") -> m.ProofSession:
    """Extract the target's symbols, scaffold the first harness revision and
    persist the session, not yet run."""
    started = time.monotonic()
    target = be.extract_symbols(scope, function, cfg)
    spec = codegen.scaffold_initial(target, scope)
    elapsed = time.monotonic() - started

    step_seconds = {k: 0.0 for k in m.STEP_KEYS}
    step_seconds["step1"] = elapsed
    session = m.ProofSession(
        id=session_id or f"{function}-{uuid.uuid4().hex[:8]}",
        target=target,
        revisions=(m.Revision(spec=spec),),
        metrics=m.CostMetrics(step_seconds=step_seconds),
        project=project,
    )
    store.save(session)
    return session


def iterate(store: SessionStore, session_id: str, cfg: be.BackendConfig,
            ) -> tuple[m.VerificationReport, tuple[m.Diagnosis, ...]]:
    """Fold any pending interventions into a new revision, render it, run
    the backend, store report and diagnoses, and refresh metrics and
    completeness. On backend failure the session stays at its prior state."""
    session = store.load(session_id)
    spec = session.latest_revision.spec

    pending = session.pending_interventions()
    applied = list(session.applied)
    revisions = list(session.revisions)
    if pending:
        for entry in pending:
            spec = codegen.apply(spec, entry.intervention)
        new_index = len(revisions)
        revisions.append(m.Revision(spec=spec))
        applied = [replace(a, applied_in=new_index) if a.applied_in < 0 else a
                   for a in applied]

    rendered = codegen.render(spec)
    started = time.monotonic()
    report = be.run(rendered, cfg)
    measured = time.monotonic() - started
    execution_seconds = report.wall_seconds if report.wall_seconds > 0 else measured

    diagnoses = _diagnose(report, spec)
    revisions[-1] = replace(revisions[-1], report=report,
                            diagnoses=tuple(diagnoses))

    session = replace(
        session, revisions=tuple(revisions), applied=tuple(applied),
        version=session.version + 1)
    session = replace(
        session,
        completeness=_completeness(session),
        metrics=_refresh_metrics(session, rendered, report, diagnoses,
                                 execution_seconds))
    store.save(session)
    return report, tuple(diagnoses)


def _diagnose(report: m.VerificationReport,
              spec: m.HarnessSpec) -> list[m.Diagnosis]:
    if report.run_status.kind is not m.RunStatusKind.COMPLETED:
        return diagnosis.diagnose_nontermination(report, spec)
    out = diagnosis.diagnose_coverage(report, spec)
    for prop in report.failed_properties():
        if prop.klass is m.PropertyClass.UNWINDING_ASSERTION:
            continue  # folded into the coverage diagnoses
        if prop.id not in report.traces:
            continue
        out.append(diagnosis.diagnose_violation(report, spec, prop.id))
    return out


def _completeness(session: m.ProofSession) -> m.CompletenessStatus:
    latest = session.latest_revision
    if latest.report is None:
        return m.CompletenessStatus()
    return diagnosis.evaluate_completeness(
        latest.report,
        dead_code_acks=session.acknowledged_dead_code(),
        defect_acks=session.acknowledged_defects())


_STEP_BY_FINDING = {
    m.FindingKind.NON_TERMINATION: "step2",
    m.FindingKind.COVERAGE_GAP: "step3",
    m.FindingKind.VIOLATION: "step4",
}


def _attribute_step(diagnoses: list[m.Diagnosis]) -> str:
    """Build/termination work is step 2, coverage work step 3, model work
    step 4; a run surfacing several kinds counts toward the earliest step."""
    kinds = {d.finding.kind for d in diagnoses}
    for kind in (m.FindingKind.NON_TERMINATION, m.FindingKind.COVERAGE_GAP,
                 m.FindingKind.VIOLATION):
        if kind in kinds:
            return _STEP_BY_FINDING[kind]
    return "step2"


def _refresh_metrics(session: m.ProofSession, rendered: codegen.RenderedHarness,
                     report: m.VerificationReport, diagnoses: list[m.Diagnosis],
                     execution_seconds: float) -> m.CostMetrics:
    spec = session.latest_revision.spec
    step_seconds = dict(session.metrics.step_seconds)
    step = _attribute_step(diagnoses)
    step_seconds[step] = step_seconds.get(step, 0.0) + execution_seconds
    return m.CostMetrics(
        step_seconds=step_seconds,
        iteration_count=sum(1 for r in session.revisions if r.report is not None),
        harness_loc=m.count_harness_loc(rendered.harness_source),
        variable_model_counts=m.tally_variable_models(spec),
        function_model_counts=m.tally_function_models(spec),
        loop_bound_histogram=m.tally_loop_bounds(spec),
        last_execution_seconds=execution_seconds,
        last_solver_stats=report.solver_stats,
    )


# ---------------------------------------------------------------------------
# Accepting suggestions
# ---------------------------------------------------------------------------


def accept(store: SessionStore, session_id: str, revision: int,
           diagnosis_index: int, suggestion_index: int,
           by: m.Acceptor = m.Acceptor.HUMAN) -> m.ProofSession:
    """Queue one suggested intervention for the next run.

    ``revision`` must be the newest diagnosed revision: accepting against an
    older view raises StaleRevision, as does re-accepting a suggestion that
    was already consumed, so concurrent duplicate accepts resolve to exactly
    one winner.
    """
    session = store.load(session_id)
    latest = session.latest_diagnosed_index
    if revision != latest or latest < 0:
        raise StaleRevision(f"diagnoses are for revision {latest}, not {revision}")
    diagnoses = session.revisions[latest].diagnoses
    if not 0 <= diagnosis_index < len(diagnoses):
        raise Inapplicable(f"no diagnosis {diagnosis_index}")
    diag = diagnoses[diagnosis_index]
    if not 0 <= suggestion_index < len(diag.suggestions):
        raise Inapplicable(f"diagnosis {diagnosis_index} has no "
                           f"suggestion {suggestion_index}")
    intervention = diag.suggestions[suggestion_index]

    # Applying a given intervention is idempotent, so re-accepting one that
    # is already in the log is never useful; concurrent duplicate accepts
    # resolve to exactly one winner this way.
    for entry in session.applied:
        if entry.intervention == intervention:
            raise StaleRevision("suggestion was already accepted")

    if intervention.kind is m.InterventionKind.MARK_REAL_DEFECT:
        report = session.revisions[latest].report
        failed = {p.id for p in report.failed_properties()} if report else set()
        if intervention.property_id not in failed:
            raise Inapplicable(
                f"no failed property {intervention.property_id} to mark")

    # Dry-run against the spec the next revision will start from.
    preview = session.latest_revision.spec
    for entry in session.pending_interventions():
        preview = codegen.apply(preview, entry.intervention)
    codegen.apply(preview, intervention)

    applied = session.applied + (
        m.AppliedIntervention(revision, intervention, by),)
    review_items = session.review_items
    if intervention.kind is m.InterventionKind.ADD_MODEL and intervention.model:
        review_items = review_items + (m.ReviewItem(
            model=intervention.model,
            origin_property=diag.evidence.property_id),)

    session = replace(session, applied=applied, review_items=review_items,
                      version=session.version + 1)
    session = replace(session, completeness=_completeness(session))
    store.save(session)
    return session


def review_queue(session: m.ProofSession) -> tuple[m.ReviewItem, ...]:
    return session.review_items


def review_mark(store: SessionStore, session_id: str, item_index: int,
                status: m.ReviewStatus) -> m.ProofSession:
    """Record the human's caller-analysis verdict on a derived assumption.
    A violated assumption means the unit can really receive the bad value:
    the item gains a mark-real-defect suggestion."""
    session = store.load(session_id)
    if not 0 <= item_index < len(session.review_items):
        raise Inapplicable(f"no review item {item_index}")
    item = session.review_items[item_index]
    suggestion = item.suggestion
    if status is m.ReviewStatus.VIOLATED_ASSUMPTION:
        suggestion = m.Intervention.mark_real_defect(
            item.origin_property, note=item.model.subject,
            rationale="callers can violate the derived assumption")
    items = list(session.review_items)
    items[item_index] = replace(item, status=status, suggestion=suggestion)
    session = replace(session, review_items=tuple(items),
                      version=session.version + 1)
    store.save(session)
    return session


# ---------------------------------------------------------------------------
# Event-sourcing check and the automatic policy
# ---------------------------------------------------------------------------


def replay_spec(session: m.ProofSession) -> m.HarnessSpec:
    """Rebuild the latest spec by replaying the accept log from revision 0."""
    spec = session.revisions[0].spec
    by_revision: dict[int, list[m.AppliedIntervention]] = {}
    for entry in session.applied:
        if entry.applied_in >= 0:
            by_revision.setdefault(entry.applied_in, []).append(entry)
    for index in range(1, len(session.revisions)):
        for entry in by_revision.get(index, []):
            spec = codegen.apply(spec, entry.intervention)
    return spec


def autopilot(store: SessionStore, session_id: str, cfg: be.BackendConfig,
              max_iterations: int = 16) -> m.ProofSession:
    """Run the refine loop automatically: every exact-confidence suggestion
    is auto-accepted; when a round yields no exact suggestion, the first
    applicable remaining suggestion is accepted greedily on the human's
    behalf. Stops at a complete proof or a fixed point."""
    for _ in range(max_iterations):
        iterate(store, session_id, cfg)
        session = store.load(session_id)
        if session.completeness.complete:
            return session
        revision = session.latest_diagnosed_index
        diagnoses = session.revisions[revision].diagnoses

        accepted_any = False
        for d_index, diag in enumerate(diagnoses):
            for s_index, suggestion in enumerate(diag.suggestions):
                if suggestion.confidence is not m.Confidence.EXACT:
                    continue
                if _try_accept(store, session_id, revision, d_index, s_index,
                               m.Acceptor.AUTO):
                    accepted_any = True
        if not accepted_any:
            for d_index, diag in enumerate(diagnoses):
                for s_index, _ in enumerate(diag.suggestions):
                    if _try_accept(store, session_id, revision, d_index, s_index,
                                   m.Acceptor.HUMAN):
                        accepted_any = True
                        break
                if accepted_any:
                    break
        if not accepted_any:
            return store.load(session_id)
    return store.load(session_id)


def _try_accept(store: SessionStore, session_id: str, revision: int,
                diagnosis_index: int, suggestion_index: int,
                by: m.Acceptor) -> bool:
    try:
        accept(store, session_id, revision, diagnosis_index, suggestion_index, by)
        return True
    except (Inapplicable, StaleRevision):
        return False
