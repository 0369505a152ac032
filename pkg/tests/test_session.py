"""Session lifecycle: persistence, accept/iterate, review queue, the
event-sourcing replay check and crash safety."""

from __future__ import annotations

import os
import random

import pytest

from proofbench import codegen
from proofbench import model as m
from proofbench import session as sess
from proofbench.errors import FunctionNotFound, Inapplicable, StaleRevision

from .conftest import UNITS


class TestStart:
    def test_initial_session_state(self, unit_session):
        store, session, _, meta = unit_session("oob_write_len")
        assert len(session.revisions) == 1
        assert session.revisions[0].report is None
        assert not session.completeness.complete
        assert session.completeness.unmet == (
            "graceful_termination", "full_coverage", "violations_resolved")
        folder = store.session_dir(session.id)
        assert (folder / "session.json").exists()
        assert (folder / "rev-0" / "harness.c").exists()
        assert (folder / "rev-0" / "Makefile").exists()

    def test_missing_function(self, tmp_path):
        from proofbench.backend import BackendConfig, BackendKind

        cfg = BackendConfig(
            kind=BackendKind.MOCK, workdir=str(tmp_path),
            scenario=str(UNITS / "oob_write_len" / "scenario.json"))
        store = sess.SessionStore(tmp_path / "s")
        with pytest.raises(FunctionNotFound):
            sess.start("missing", m.UnitScope(linked_sources=("x.c",)),
                       cfg, store)


class TestIterateAccept:
    def test_iterate_stores_report_and_diagnoses(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        report, diagnoses = sess.iterate(store, session.id, cfg)
        assert report.run_status.kind is m.RunStatusKind.COMPLETED
        loaded = store.load(session.id)
        assert loaded.latest_revision.report == report
        assert loaded.latest_revision.diagnoses == diagnoses
        assert loaded.metrics.iteration_count == 1

    def test_accept_queues_then_iterate_applies(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        sess.iterate(store, session.id, cfg)
        updated = sess.accept(store, session.id, 0, 0, 0)
        assert len(updated.pending_interventions()) == 1
        sess.iterate(store, session.id, cfg)
        final = store.load(session.id)
        assert len(final.revisions) == 2
        assert final.pending_interventions() == ()
        makefile = codegen.render(final.latest_revision.spec).makefile
        assert "frame_store.0:4" in makefile

    def test_accept_on_stale_revision(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        sess.iterate(store, session.id, cfg)
        sess.accept(store, session.id, 0, 0, 0)
        sess.iterate(store, session.id, cfg)
        with pytest.raises(StaleRevision):
            sess.accept(store, session.id, 0, 0, 0)

    def test_double_accept_single_winner(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        sess.iterate(store, session.id, cfg)
        sess.accept(store, session.id, 0, 0, 0)
        with pytest.raises(StaleRevision):
            sess.accept(store, session.id, 0, 0, 0)

    def test_accept_bad_indices(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        sess.iterate(store, session.id, cfg)
        with pytest.raises(Inapplicable):
            sess.accept(store, session.id, 0, 9, 0)
        with pytest.raises(Inapplicable):
            sess.accept(store, session.id, 0, 0, 9)

    def test_mark_real_defect_requires_failed_property(self, unit_session):
        store, session, cfg, _ = unit_session("null_deref_alloc")
        _, diagnoses = sess.iterate(store, session.id, cfg)
        assert diagnoses[0].suggestions[0].kind is \
            m.InterventionKind.MARK_REAL_DEFECT
        updated = sess.accept(store, session.id, 0, 0, 0)
        assert updated.acknowledged_defects()

    def test_metrics_match_recomputation(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        session = sess.autopilot(store, session.id, cfg)
        spec = session.latest_revision.spec
        assert session.metrics.variable_model_counts == \
            m.tally_variable_models(spec)
        assert session.metrics.function_model_counts == \
            m.tally_function_models(spec)
        assert session.metrics.loop_bound_histogram == m.tally_loop_bounds(spec)
        rendered = codegen.render(spec)
        assert session.metrics.harness_loc == \
            m.count_harness_loc(rendered.harness_source)
        assert session.metrics.iteration_count == sum(
            1 for r in session.revisions if r.report is not None)

    def test_step_attribution_accumulates(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        session = sess.autopilot(store, session.id, cfg)
        steps = session.metrics.step_seconds
        assert steps["step3"] > 0  # the coverage-gap iteration
        assert steps["step4"] > 0  # the violation iterations


class TestReviewQueue:
    def test_accepted_model_enters_queue(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        session = sess.autopilot(store, session.id, cfg)
        queue = sess.review_queue(session)
        assert len(queue) == 1
        item = queue[0]
        assert item.status is m.ReviewStatus.PENDING_CALLER_REVIEW
        assert item.model.kind is m.ModelKind.INTEGER_RELATIONSHIP
        assert item.origin_property == "frame_store.array_bounds.1"

    def test_violated_assumption_suggests_real_defect(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        sess.autopilot(store, session.id, cfg)
        updated = sess.review_mark(store, session.id, 0,
                                   m.ReviewStatus.VIOLATED_ASSUMPTION)
        item = updated.review_items[0]
        assert item.status is m.ReviewStatus.VIOLATED_ASSUMPTION
        assert item.suggestion is not None
        assert item.suggestion.kind is m.InterventionKind.MARK_REAL_DEFECT
        assert item.suggestion.property_id == "frame_store.array_bounds.1"

    def test_empty_session_queue(self, unit_session):
        _, session, _, _ = unit_session("oob_write_len")
        assert sess.review_queue(session) == ()


def pool_of_interventions(spec: m.HarnessSpec) -> list[m.Intervention]:
    """Interventions applicable to the given spec (and to any spec derived
    from it by this pool: they stay applicable in any order)."""
    pool = [
        m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.INTEGER_RANGE, "len", m.IntegerRangeDetail(upper="64"))),
        m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.POINTER_NOT_NULL, "data")),
        m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.INTEGER_RELATIONSHIP, "len",
            m.IntegerRelationshipDetail("<=", "32"))),
        m.Intervention.add_stub(m.FunctionModel(
            "get_ctx", m.FunctionModelKind.TYPE1_RETURN_ONLY,
            m.NondetByType("void *"))),
        m.Intervention.add_stub(m.FunctionModel(
            "get_ctx", m.FunctionModelKind.TYPE1_RETURN_ONLY,
            m.FreshAllocationNotNull(pointee="struct ctx"))),
        m.Intervention.set_config("CFG_A", "1"),
        m.Intervention.set_config("CFG_A", "0"),
        m.Intervention.expand_scope("net/extra.c"),
        m.Intervention.mark_dead_code(m.SourceLocation("t.c", 9, "f")),
    ]
    for loop in spec.target.reachable_loops:
        for bound in (2, 3, 9):
            pool.append(m.Intervention.set_loop_bound(
                m.LoopBoundSpec(loop.id, bound, m.BoundRationale.MANUAL)))
    return pool


class TestEventSourcing:
    def base_spec(self) -> m.HarnessSpec:
        target = m.TargetFunction(
            name="targetFunc", source_file="net/target.c",
            parameters=(
                m.Parameter("data", m.ParamKind.PRIMITIVE_POINTER,
                            m.CTypeRef("char *", pointee="char")),
                m.Parameter("len", m.ParamKind.PRIMITIVE_SCALAR,
                            m.CTypeRef("size_t")),
            ),
            return_type=m.CTypeRef("int"),
            reachable_loops=(m.LoopRef("targetFunc.0", line=7,
                                       condition="i < 3", step="i++"),))
        return codegen.scaffold_initial(
            target, m.UnitScope(linked_sources=("net/target.c",)))

    def test_replay_reproduces_latest_spec_for_random_sequences(self):
        base = self.base_spec()
        pool = pool_of_interventions(base)
        rng = random.Random(20260810)
        for _ in range(1000):
            spec = base
            revisions = [m.Revision(spec=spec)]
            applied: list[m.AppliedIntervention] = []
            for batch in range(rng.randint(1, 4)):
                batch_ivs = [rng.choice(pool)
                             for _ in range(rng.randint(1, 3))]
                for iv in batch_ivs:
                    spec = codegen.apply(spec, iv)
                    applied.append(m.AppliedIntervention(
                        revision=len(revisions) - 1, intervention=iv,
                        accepted_by=m.Acceptor.AUTO,
                        applied_in=len(revisions)))
                revisions.append(m.Revision(spec=spec))
            session = m.ProofSession(
                id="replay", target=base.target, revisions=tuple(revisions),
                applied=tuple(applied))
            assert sess.replay_spec(session) == session.latest_revision.spec

    def test_replay_on_a_real_session(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        session = sess.autopilot(store, session.id, cfg)
        assert sess.replay_spec(session) == session.latest_revision.spec

    def test_revision_history_append_only(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len")
        seen: list[m.HarnessSpec] = []
        session = sess.autopilot(store, session.id, cfg)
        for revision in session.revisions:
            seen.append(revision.spec)
        reloaded = store.load(session.id)
        for index, revision in enumerate(reloaded.revisions):
            assert revision.spec == seen[index]


class TestCrashSafety:
    def test_interrupted_save_keeps_previous_state_readable(
            self, unit_session, monkeypatch):
        store, session, cfg, _ = unit_session("oob_write_len")
        sess.iterate(store, session.id, cfg)
        before = store.load(session.id)

        real_replace = os.replace
        calls = {"n": 0}

        def exploding_replace(src, dst):
            calls["n"] += 1
            if str(dst).endswith("session.json") and calls["n"] > 0:
                raise OSError("simulated crash before commit")
            return real_replace(src, dst)

        monkeypatch.setattr(os, "replace", exploding_replace)
        with pytest.raises((OSError, StaleRevision)):
            sess.accept(store, session.id, 0, 0, 0)
        monkeypatch.setattr(os, "replace", real_replace)
        after = store.load(session.id)
        assert after == before  # the half-written update never landed


class TestAutopilot:
    def test_complete_on_clean_scenario(self, unit_session, tmp_path):
        import json as jsonlib

        from proofbench.backend import BackendConfig, BackendKind

        scenario = tmp_path / "clean.json"
        meta_scope = str(UNITS / "null_deref_alloc" / "patched" / "unit.c")
        src_doc = jsonlib.loads(
            (UNITS / "null_deref_alloc" / "scenario_patched.json").read_text())
        scenario.write_text(jsonlib.dumps(src_doc))
        cfg = BackendConfig(kind=BackendKind.MOCK, workdir=str(tmp_path / "w"),
                            scenario=str(scenario))
        store = sess.SessionStore(tmp_path / "s")
        scope = m.UnitScope(linked_sources=(
            "tests/fixtures/units/null_deref_alloc/patched/unit.c",))
        session = sess.start("conn_open", scope, cfg, store, session_id="clean")
        session = sess.autopilot(store, "clean", cfg)
        assert session.completeness.complete
        assert session.metrics.iteration_count == 1
        del meta_scope

    def test_stops_at_fixed_point_when_no_suggestions(self, unit_session):
        store, session, cfg, _ = unit_session("recursion_pair")
        session = sess.autopilot(store, session.id, cfg)
        assert not session.completeness.complete
        assert any(p.klass is m.PropertyClass.ARRAY_BOUNDS
                   for rev in session.revisions if rev.report
                   for p in rev.report.failed_properties())
