"""Report parsing (lossless on the captured corpus, total on truncation)
and the scenario-driven mock backend."""

from __future__ import annotations

import json

import pytest

from proofbench import codegen
from proofbench import model as m
from proofbench.backend import (
    BackendConfig,
    BackendKind,
    MockBackend,
    MockScenario,
    ReportDialect,
    parse_report,
    validate_report,
)
from proofbench.errors import FunctionNotFound, ReportUnparseable, ScenarioMissing

from .conftest import FIXTURES, UNITS

REPORTS = FIXTURES / "reports"


def report_cases() -> list[str]:
    return sorted(p.name.removesuffix(".meta.json")
                  for p in REPORTS.glob("*.meta.json"))


def load_case(name: str) -> tuple[bytes, dict, ReportDialect]:
    meta = json.loads((REPORTS / f"{name}.meta.json").read_text())
    raw = (REPORTS / meta["file"]).read_bytes()
    dialect = ReportDialect(meta["dialect"])
    return raw, meta, dialect


class TestParseReport:
    @pytest.mark.parametrize("case", report_cases())
    def test_lossless_against_metadata(self, case):
        raw, meta, dialect = load_case(case)
        report = parse_report(raw, dialect)
        assert validate_report(report) == []
        assert len(report.properties) == meta["properties"]
        assert len(report.failed_properties()) == meta["failed"]
        assert len(report.traces) == meta["traces"]
        if meta.get("trace_steps"):
            assert sum(len(t.steps) for t in report.traces.values()) == \
                meta["trace_steps"]
        assert report.solver_stats.variable_count == meta["variables"]
        assert report.solver_stats.clause_count == meta["clauses"]
        assert report.solver_stats.solve_seconds == pytest.approx(
            meta["solve_seconds"])

    @pytest.mark.parametrize("case", report_cases())
    def test_coverage_accounting(self, case):
        raw, meta, dialect = load_case(case)
        report = parse_report(raw, dialect)
        counts = {status: 0 for status in m.CoverageStatus}
        for line in report.coverage:
            counts[line.status] += 1
        expected = meta["coverage"]
        assert counts[m.CoverageStatus.COVERED] == expected["covered"]
        assert counts[m.CoverageStatus.UNCOVERED] == expected["uncovered"]
        assert counts[m.CoverageStatus.UNREACHABLE] == expected["unreachable"]
        assert sum(counts.values()) == sum(expected.values())

    @pytest.mark.parametrize("case", report_cases())
    def test_truncation_never_yields_a_partial_report(self, case):
        raw, _, dialect = load_case(case)
        offsets = set(range(0, len(raw)))
        for offset in offsets:
            with pytest.raises(ReportUnparseable) as err:
                parse_report(raw[:offset], dialect)
            assert err.value.offset >= 0

    def test_empty_result_array_completes_with_zero_properties(self):
        raw, _, dialect = load_case("empty_result")
        report = parse_report(raw, dialect)
        assert report.run_status.kind is m.RunStatusKind.COMPLETED
        assert report.properties == ()

    def test_unknown_records_preserved_not_dropped(self):
        raw, meta, dialect = load_case("unknown_records")
        report = parse_report(raw, dialect)
        unknown = [d for d in report.diagnostics if d.startswith("unknown-record:")]
        assert len(unknown) == meta["unknown_records"]
        prop = report.properties[0]
        assert prop.klass is m.PropertyClass.USER_ASSERTION
        assert prop.raw_class == meta["unknown_class"]

    def test_trailing_garbage_rejected(self):
        raw, _, dialect = load_case("clean_pass")
        with pytest.raises(ReportUnparseable):
            parse_report(raw + b" []", dialect)

    def test_invalid_utf8_rejected_with_offset(self):
        with pytest.raises(ReportUnparseable) as err:
            parse_report(b'[{"program": "x\xff"}]', ReportDialect.JSON_UI)
        assert err.value.offset == 15

    def test_xml_trace_and_goals(self):
        raw, meta, dialect = load_case("xml_dialect")
        report = parse_report(raw, dialect)
        trace = report.traces["g.pointer_dereference.1"]
        assert trace.steps[0].lhs == "p"
        assert trace.steps[1].call == "g"
        assert [s.index for s in trace.steps] == [1, 2]


def unit_scenarios() -> list[str]:
    out = []
    for unit in sorted(UNITS.iterdir()):
        if (unit / "scenario.json").exists():
            out.append(str(unit / "scenario.json"))
            out.append(str(unit / "scenario_patched.json"))
    return out


class TestMockBackend:
    def make(self, tmp_path, scenario: str) -> MockBackend:
        cfg = BackendConfig(kind=BackendKind.MOCK, workdir=str(tmp_path),
                            scenario=scenario)
        return MockBackend(cfg)

    @pytest.mark.parametrize("scenario", unit_scenarios())
    def test_every_scripted_report_is_well_formed(self, scenario):
        loaded = MockScenario.load(scenario)
        assert loaded.stages
        for stage in loaded.stages:
            assert validate_report(stage.report) == []

    def test_deterministic_per_rendered_harness(self, tmp_path, unit_session):
        store, session, cfg, meta = unit_session("oob_write_len")
        backend = MockBackend(cfg)
        rendered = codegen.render(session.latest_revision.spec)
        first = backend.run(rendered)
        second = backend.run(rendered)
        assert first == second

    def test_clean_scenario_passthrough(self, tmp_path):
        scenario = tmp_path / "clean.json"
        scenario.write_text(json.dumps({
            "schema": 1, "id": "clean",
            "symbols": {},
            "stages": [{"name": "clean", "when": {}, "report": {
                "run_status": {"kind": "completed", "message": "",
                               "elapsed_seconds": 0.0},
                "properties": [], "coverage": [
                    {"file": "u.c", "line": 3, "function": "f",
                     "status": "covered"}],
                "traces": {}, "solver_stats": {
                    "variable_count": 10, "clause_count": 40,
                    "solve_seconds": 0.1},
                "wall_seconds": 0.2, "diagnostics": []}}],
        }))
        backend = self.make(tmp_path, str(scenario))
        rendered = codegen.RenderedHarness("x", "y", {})
        report = backend.run(rendered)
        assert report.run_status.kind is m.RunStatusKind.COMPLETED
        assert report.failed_properties() == ()

    def test_scenario_missing_stage(self, tmp_path):
        scenario = tmp_path / "narrow.json"
        scenario.write_text(json.dumps({
            "schema": 1, "id": "narrow", "symbols": {},
            "stages": [{"name": "only",
                        "when": {"harness_contains": ["not-there"]},
                        "report": {"run_status": {"kind": "completed",
                                                  "message": "",
                                                  "elapsed_seconds": 0.0}}}],
        }))
        backend = self.make(tmp_path, str(scenario))
        with pytest.raises(ScenarioMissing):
            backend.run(codegen.RenderedHarness("a", "b", {}))

    def test_extract_symbols_unknown_function(self, tmp_path, unit_session):
        _, _, cfg, _ = unit_session("oob_write_len")
        backend = MockBackend(cfg)
        with pytest.raises(FunctionNotFound):
            backend.extract_symbols(m.UnitScope(linked_sources=("x.c",)),
                                    "missing")

    def test_extract_symbols_resolves_kinds_and_loops(self, unit_session):
        _, session, _, _ = unit_session("oob_write_len")
        target = session.target
        kinds = [p.kind for p in target.parameters]
        assert kinds == [m.ParamKind.PRIMITIVE_POINTER,
                         m.ParamKind.PRIMITIVE_SCALAR]
        assert [lp.id for lp in target.reachable_loops] == ["frame_store.0"]


class TestFrontEndFailures:
    def test_scripted_front_end_failure_lists_messages(self, tmp_path):
        import json as jsonlib

        from proofbench.errors import FrontEndFailure

        scenario = tmp_path / "gated.json"
        scenario.write_text(jsonlib.dumps({
            "schema": 1, "id": "gated", "symbols": {}, "stages": [],
            "front_end_failures": {
                "net_recv": ["missing configuration define CONFIG_NET_BUFS",
                             "net_buf.h: no such header"]},
        }))
        cfg = BackendConfig(kind=BackendKind.MOCK, workdir=str(tmp_path),
                            scenario=str(scenario))
        backend = MockBackend(cfg)
        with pytest.raises(FrontEndFailure) as err:
            backend.extract_symbols(m.UnitScope(linked_sources=("x.c",)),
                                    "net_recv")
        assert "CONFIG_NET_BUFS" in err.value.messages[0]

    def test_session_start_propagates_front_end_failure(self, tmp_path):
        import json as jsonlib

        from proofbench import session as sess
        from proofbench.errors import FrontEndFailure

        scenario = tmp_path / "gated.json"
        scenario.write_text(jsonlib.dumps({
            "schema": 1, "id": "gated", "symbols": {}, "stages": [],
            "front_end_failures": {"net_recv": ["missing define CONFIG_X"]},
        }))
        cfg = BackendConfig(kind=BackendKind.MOCK, workdir=str(tmp_path / "w"),
                            scenario=str(scenario))
        store = sess.SessionStore(tmp_path / "s")
        with pytest.raises(FrontEndFailure):
            sess.start("net_recv", m.UnitScope(linked_sources=("x.c",)),
                       cfg, store)
