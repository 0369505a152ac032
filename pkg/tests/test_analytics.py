"""Characteristics tallies, the execution-time regression (with an
independent textbook-formula oracle) and group comparison."""

from __future__ import annotations

import random

import pytest

from proofbench import analytics
from proofbench import model as m
from proofbench import session as sess
from proofbench.analytics import RegressionPoint, compare, regress_time
from proofbench.errors import DegenerateInput


def ols_oracle(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
    """Independent least-squares fit from the summation formulas."""
    n = len(xs)
    sx = sum(xs)
    sy = sum(ys)
    sxx = sum(x * x for x in xs)
    sxy = sum(x * y for x, y in zip(xs, ys))
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    intercept = (sy - slope * sx) / n
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    mean_y = sy / n
    ss_tot = sum((y - mean_y) ** 2 for y in ys)
    r2 = 0.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r2


class TestRegressTime:
    def test_exact_linear_fit(self):
        points = [RegressionPoint(float(c), float(c % 7), 2.0 * c)
                  for c in range(10, 40, 3)]
        result = regress_time(points)
        assert result.r2_formula == pytest.approx(1.0, abs=1e-12)
        assert result.formula.slope == pytest.approx(2.0, abs=1e-9)

    def test_constant_outcome_gives_zero_r2(self):
        points = [RegressionPoint(float(c), float(c), 5.0)
                  for c in (10, 20, 30, 40)]
        result = regress_time(points)
        assert result.r2_formula == 0.0
        assert result.r2_program == 0.0

    def test_agrees_with_independent_oracle_on_seeded_noise(self):
        rng = random.Random(42)
        for trial in range(100):
            n = rng.randint(5, 30)
            xs = [rng.uniform(100, 10_000) for _ in range(n)]
            zs = [rng.uniform(50, 800) for _ in range(n)]
            ys = [0.002 * x + rng.gauss(0, 3.0) for x in xs]
            points = [RegressionPoint(x, z, y) for x, z, y in zip(xs, zs, ys)]
            result = regress_time(points)
            slope, intercept, r2 = ols_oracle(xs, ys)
            assert result.formula.slope == pytest.approx(slope, abs=1e-9)
            assert result.formula.intercept == pytest.approx(intercept, abs=1e-9)
            assert result.formula.r2 == pytest.approx(r2, abs=1e-9)
            _, _, r2_program = ols_oracle(zs, ys)
            assert result.program.r2 == pytest.approx(r2_program, abs=1e-9)

    def test_r2_in_unit_interval_and_scale_invariant(self):
        rng = random.Random(7)
        for _ in range(50):
            n = rng.randint(3, 20)
            xs = [rng.uniform(1, 100) for _ in range(n)]
            ys = [rng.uniform(1, 100) for _ in range(n)]
            if len(set(xs)) < 2:
                continue
            points = [RegressionPoint(x, x + 1.0, y) for x, y in zip(xs, ys)]
            result = regress_time(points)
            assert 0.0 <= result.r2_formula <= 1.0
            scaled = [RegressionPoint(x, x + 1.0, 37.5 * y)
                      for x, y in zip(xs, ys)]
            assert regress_time(scaled).r2_formula == pytest.approx(
                result.r2_formula, abs=1e-9)

    def test_degenerate_inputs(self):
        with pytest.raises(DegenerateInput):
            regress_time([RegressionPoint(1, 1, 1)])
        flat = [RegressionPoint(5.0, float(i), float(i)) for i in range(4)]
        with pytest.raises(DegenerateInput):
            regress_time(flat)


def run_units(unit_session, names, project=""):
    sessions = []
    for name in names:
        store, session, cfg, _ = unit_session(name, session_id=f"{project}{name}")
        session = sess.autopilot(store, session.id, cfg)
        if project:
            session = m.with_replaced(session, project=project)
        sessions.append(session)
    return sessions


class TestCharacterize:
    def test_counts_equal_hand_tallies(self, unit_session):
        sessions = run_units(unit_session,
                             ["oob_write_len", "oob_read_loop", "fnptr_dispatch"])
        table = analytics.characterize(sessions)
        [row] = table.rows
        assert row.unit_proofs == 3

        # Independent recount straight off the session specs.
        expected_var: dict[str, int] = {k.value: 0 for k in m.ModelKind}
        expected_fn: dict[str, int] = {k.value: 0 for k in m.FunctionModelKind}
        expected_b2 = 0
        max_bound = 0
        for session in sessions:
            spec = session.latest_revision.spec
            for model in spec.preconditions + spec.global_models:
                expected_var[model.kind.value] += 1
                detail = model.detail
                while isinstance(detail, m.ConditionalDetail):
                    expected_var[detail.inner.kind.value] += 1
                    detail = detail.inner.detail
            for stub in spec.stubs:
                expected_fn[stub.kind.value] += 1
            for lb in spec.loop_bounds:
                max_bound = max(max_bound, lb.bound)
                if lb.rationale is not m.BoundRationale.DEFAULT and lb.bound == 2:
                    expected_b2 += 1
        assert row.variable_model_counts == expected_var
        assert row.function_model_counts == expected_fn
        assert row.bounds_at_2 == expected_b2
        assert row.max_bound == max_bound

    def test_empty_session_list(self):
        table = analytics.characterize([])
        assert table.rows == ()

    def test_permutation_invariant(self, unit_session):
        sessions = run_units(unit_session,
                             ["oob_write_len", "list_walk", "struct_hack"])
        forward = analytics.characterize(sessions)
        backward = analytics.characterize(list(reversed(sessions)))
        assert forward == backward

    def test_single_proof_row_mirrors_its_models(self, unit_session):
        [session] = run_units(unit_session, ["oob_write_len"])
        table = analytics.characterize([session])
        [row] = table.rows
        assert row.total_variable_models == 1
        assert row.variable_model_counts["integer_relationship"] == 1
        assert row.total_function_models == 1
        assert row.function_model_counts["type1_return_only"] == 1
        assert row.max_bound == 4

    def test_text_rendering_is_aligned(self, unit_session):
        sessions = run_units(unit_session, ["oob_write_len"])
        text = analytics.characteristics_text(analytics.characterize(sessions))
        lines = text.splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("project")


class TestCompare:
    def test_known_medians_and_zero_deltas(self, unit_session):
        alpha = run_units(unit_session, ["oob_write_len", "oob_read_loop"],
                          project="a-")
        report = compare([("alpha", alpha), ("beta", alpha)])
        col_a, col_b = report.columns
        assert col_a.label == "alpha" and col_b.label == "beta"
        assert col_a.files_in_scope == col_b.files_in_scope
        assert col_a.coverage_percent == col_b.coverage_percent
        files = sorted(len(s.latest_revision.spec.scope.linked_sources)
                       for s in alpha)
        expected_median = (files[0] + files[1]) / 2
        assert col_a.files_in_scope.median == expected_median

    def test_low_coverage_session_is_flagged(self, unit_session):
        store, session, cfg, _ = unit_session("oob_write_len", session_id="low")
        session = sess.autopilot(store, session.id, cfg)
        report = session.latest_revision.report
        total = len(report.coverage)
        keep = max(1, round(total * 0.1076))
        skew = tuple(
            m.LineCoverage(c.file, c.line, c.function,
                           m.CoverageStatus.COVERED if i < keep
                           else m.CoverageStatus.UNCOVERED)
            for i, c in enumerate(report.coverage))
        low = m.with_replaced(
            session,
            revisions=session.revisions[:-1] + (m.with_replaced(
                session.revisions[-1],
                report=m.with_replaced(report, coverage=skew)),))
        result = compare([("ours", [session]), ("theirs", [low])])
        assert result.columns[0].below_threshold == ()
        assert result.columns[1].below_threshold == ("low",)
        assert result.columns[1].coverage_percent.max < 95.0

    def test_needs_two_sets(self, unit_session):
        with pytest.raises(DegenerateInput):
            compare([("only", [])])

    def test_coverage_percent_excludes_unreachable(self):
        report = m.VerificationReport(
            run_status=m.RunStatus.completed(),
            coverage=(
                m.LineCoverage("u.c", 1, "f", m.CoverageStatus.COVERED),
                m.LineCoverage("u.c", 2, "f", m.CoverageStatus.UNCOVERED),
                m.LineCoverage("u.c", 3, "f", m.CoverageStatus.UNREACHABLE),
            ))
        assert analytics.coverage_percent(report) == pytest.approx(50.0)


class TestRegressionPoints:
    def test_points_built_from_sessions(self, unit_session):
        sessions = run_units(unit_session,
                             ["oob_write_len", "oob_read_loop", "struct_hack",
                              "fnptr_dispatch"])
        points = analytics.regression_points(sessions)
        assert len(points) == 4
        for point, session in zip(points, sessions):
            assert point.formula_size == \
                session.metrics.last_solver_stats.clause_count
            assert point.seconds == session.metrics.last_execution_seconds
            assert point.program_size > 0  # the fixture sources exist
