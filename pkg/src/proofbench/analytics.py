"""Proof-characteristics and cost statistics across sessions.

``characterize`` tallies what the harnesses contain (model kinds, stub
kinds, loop bounds, harness size) per project; ``regress_time`` fits
execution time against formula size and program size with ordinary least
squares; ``compare`` puts two or more groups of sessions side by side.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import model as m
from .errors import DegenerateInput

COVERAGE_COMPLETENESS_THRESHOLD = 95.0  # percent of reachable lines


# ---------------------------------------------------------------------------
# Characteristics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocStats:
    mean: float = 0.0
    median: float = 0.0
    max: int = 0


@dataclass(frozen=True)
class ProjectRow:
    project: str
    unit_proofs: int
    total_variable_models: int
    variable_model_counts: dict[str, int]
    total_function_models: int
    function_model_counts: dict[str, int]
    custom_bound_loops: int
    bounds_at_2: int
    bounds_at_3: int
    max_bound: int
    loc: LocStats


@dataclass(frozen=True)
class CharacteristicsTable:
    rows: tuple[ProjectRow, ...]
    notes: tuple[str, ...] = (
        "harness LOC counts non-blank, non-comment lines of the harness "
        "source only; the makefile is excluded",
    )


def _latest_spec(session: m.ProofSession) -> m.HarnessSpec:
    return session.latest_revision.spec


def characterize(sessions: Sequence[m.ProofSession]) -> CharacteristicsTable:
    groups: dict[str, list[m.ProofSession]] = {}
    for session in sessions:
        groups.setdefault(session.project or "default", []).append(session)

    rows = []
    for project in sorted(groups):
        rows.append(_project_row(project, groups[project]))
    return CharacteristicsTable(rows=tuple(rows))


def _project_row(project: str, sessions: list[m.ProofSession]) -> ProjectRow:
    var_counts = {kind.value: 0 for kind in m.ModelKind}
    fn_counts = {kind.value: 0 for kind in m.FunctionModelKind}
    bounds_at = {2: 0, 3: 0}
    custom = 0
    max_bound = 0
    locs = []
    for session in sessions:
        spec = _latest_spec(session)
        for kind, count in m.tally_variable_models(spec).items():
            var_counts[kind] += count
        for kind, count in m.tally_function_models(spec).items():
            fn_counts[kind] += count
        for lb in spec.loop_bounds:
            max_bound = max(max_bound, lb.bound)
            if lb.rationale is not m.BoundRationale.DEFAULT:
                custom += 1
                if lb.bound in bounds_at:
                    bounds_at[lb.bound] += 1
        locs.append(session.metrics.harness_loc)
    return ProjectRow(
        project=project,
        unit_proofs=len(sessions),
        total_variable_models=sum(var_counts.values()),
        variable_model_counts=var_counts,
        total_function_models=sum(fn_counts.values()),
        function_model_counts=fn_counts,
        custom_bound_loops=custom,
        bounds_at_2=bounds_at[2],
        bounds_at_3=bounds_at[3],
        max_bound=max_bound,
        loc=LocStats(
            mean=float(statistics.fmean(locs)) if locs else 0.0,
            median=float(statistics.median(locs)) if locs else 0.0,
            max=max(locs) if locs else 0,
        ),
    )


def characteristics_doc(table: CharacteristicsTable) -> dict:
    return {
        "rows": [
            {
                "project": r.project,
                "unit_proofs": r.unit_proofs,
                "total_variable_models": r.total_variable_models,
                "variable_model_counts": dict(sorted(r.variable_model_counts.items())),
                "total_function_models": r.total_function_models,
                "function_model_counts": dict(sorted(r.function_model_counts.items())),
                "custom_bound_loops": r.custom_bound_loops,
                "bounds_at_2": r.bounds_at_2,
                "bounds_at_3": r.bounds_at_3,
                "max_bound": r.max_bound,
                "harness_loc": {"mean": r.loc.mean, "median": r.loc.median,
                                "max": r.loc.max},
            }
            for r in table.rows
        ],
        "notes": list(table.notes),
    }


def characteristics_text(table: CharacteristicsTable) -> str:
    headers = ["project", "proofs", "var models", "fn models",
               "b=2", "b=3", "max b", "loc(mean)"]
    lines = []
    data = [
        [r.project, str(r.unit_proofs), str(r.total_variable_models),
         str(r.total_function_models), str(r.bounds_at_2), str(r.bounds_at_3),
         str(r.max_bound), f"{r.loc.mean:.1f}"]
        for r in table.rows
    ]
    widths = [max(len(h), *(len(row[i]) for row in data)) if data else len(h)
              for i, h in enumerate(headers)]
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)))
    for row in data:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Execution-time regression
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegressionPoint:
    formula_size: float  # solver clause count
    program_size: float  # lines of code in scope
    seconds: float


@dataclass(frozen=True)
class SinglePredictorFit:
    slope: float
    intercept: float
    r2: float


@dataclass(frozen=True)
class RegressionResult:
    formula: SinglePredictorFit
    program: SinglePredictorFit

    @property
    def r2_formula(self) -> float:
        return self.formula.r2

    @property
    def r2_program(self) -> float:
        return self.program.r2


def _ols(x: np.ndarray, y: np.ndarray) -> SinglePredictorFit:
    var = float(np.var(x))
    if var == 0.0:
        raise DegenerateInput("predictor has zero variance")
    slope = float(np.cov(x, y, bias=True)[0, 1] / var)
    intercept = float(np.mean(y) - slope * np.mean(x))
    residuals = y - (slope * x + intercept)
    ss_res = float(np.sum(residuals ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 0.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SinglePredictorFit(slope=slope, intercept=intercept, r2=r2)


def regress_time(points: Sequence[RegressionPoint]) -> RegressionResult:
    """Per-predictor ordinary least squares; R^2 = 1 - SSres/SStot."""
    if len(points) < 3:
        raise DegenerateInput(f"need at least 3 points, got {len(points)}")
    formula = np.array([p.formula_size for p in points], dtype=float)
    program = np.array([p.program_size for p in points], dtype=float)
    seconds = np.array([p.seconds for p in points], dtype=float)
    return RegressionResult(formula=_ols(formula, seconds),
                            program=_ols(program, seconds))


def regression_points(sessions: Iterable[m.ProofSession]) -> list[RegressionPoint]:
    points = []
    for session in sessions:
        stats = session.metrics.last_solver_stats
        program_loc = _scope_loc(_latest_spec(session))
        if stats.clause_count > 0:
            points.append(RegressionPoint(
                formula_size=float(stats.clause_count),
                program_size=float(program_loc),
                seconds=session.metrics.last_execution_seconds))
    return points


def _scope_loc(spec: m.HarnessSpec) -> int:
    from pathlib import Path

    total = 0
    for src in spec.scope.linked_sources:
        try:
            total += sum(1 for line in Path(src).read_text().splitlines()
                         if line.strip())
        except OSError:
            continue
    return total


# ---------------------------------------------------------------------------
# Group comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Distribution:
    min: float = 0.0
    median: float = 0.0
    mean: float = 0.0
    max: float = 0.0

    @classmethod
    def of(cls, values: Sequence[float]) -> "Distribution":
        if not values:
            return cls()
        return cls(min=float(min(values)), median=float(statistics.median(values)),
                   mean=float(statistics.fmean(values)), max=float(max(values)))


@dataclass(frozen=True)
class ComparisonColumn:
    label: str
    sessions: int
    files_in_scope: Distribution
    modeled_variables: Distribution
    max_loop_bound: Distribution
    execution_seconds: Distribution
    coverage_percent: Distribution
    below_threshold: tuple[str, ...] = ()


@dataclass(frozen=True)
class ComparisonReport:
    columns: tuple[ComparisonColumn, ...]
    threshold: float = COVERAGE_COMPLETENESS_THRESHOLD


def coverage_percent(report: m.VerificationReport) -> float:
    """Covered share of reachable lines; unreachable lines do not count."""
    covered = sum(1 for c in report.coverage
                  if c.status is m.CoverageStatus.COVERED)
    uncovered = sum(1 for c in report.coverage
                    if c.status is m.CoverageStatus.UNCOVERED)
    reachable = covered + uncovered
    if reachable == 0:
        return 100.0
    return 100.0 * covered / reachable


def compare(sets: Sequence[tuple[str, Sequence[m.ProofSession]]]) -> ComparisonReport:
    if len(sets) < 2:
        raise DegenerateInput("comparison needs at least two session sets")
    columns = []
    for label, sessions in sets:
        files, modeled, bounds, seconds, coverages = [], [], [], [], []
        flagged = []
        for session in sessions:
            spec = _latest_spec(session)
            files.append(float(len(spec.scope.linked_sources)))
            modeled.append(float(sum(m.tally_variable_models(spec).values())))
            bounds.append(float(max((lb.bound for lb in spec.loop_bounds),
                                    default=0)))
            seconds.append(session.metrics.last_execution_seconds)
            report = session.latest_revision.report
            pct = coverage_percent(report) if report else 0.0
            coverages.append(pct)
            if pct < COVERAGE_COMPLETENESS_THRESHOLD:
                flagged.append(session.id)
        columns.append(ComparisonColumn(
            label=label, sessions=len(sessions),
            files_in_scope=Distribution.of(files),
            modeled_variables=Distribution.of(modeled),
            max_loop_bound=Distribution.of(bounds),
            execution_seconds=Distribution.of(seconds),
            coverage_percent=Distribution.of(coverages),
            below_threshold=tuple(flagged)))
    return ComparisonReport(columns=tuple(columns))


def comparison_doc(report: ComparisonReport) -> dict:
    def dist(d: Distribution) -> dict:
        return {"min": d.min, "median": d.median, "mean": d.mean, "max": d.max}

    return {
        "threshold_percent": report.threshold,
        "columns": [
            {
                "label": c.label,
                "sessions": c.sessions,
                "files_in_scope": dist(c.files_in_scope),
                "modeled_variables": dist(c.modeled_variables),
                "max_loop_bound": dist(c.max_loop_bound),
                "execution_seconds": dist(c.execution_seconds),
                "coverage_percent": dist(c.coverage_percent),
                "below_threshold": list(c.below_threshold),
            }
            for c in report.columns
        ],
    }
