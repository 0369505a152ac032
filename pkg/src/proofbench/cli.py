"""Command-line surface for the whole workflow, usable headless.

Exit codes: 0 success, 1 domain error (the typed error name is printed),
2 usage error. Every command also speaks JSON via --json; those documents
are byte-identical to the HTTP API's responses for the same queries.

Configuration precedence: command-line flag, then environment
(WORKBENCH_BACKEND, WORKBENCH_TIMEOUT_S), then workbench.toml in the
working directory. Documented config keys: backend, timeout_seconds,
sessions_dir, scenario.
"""

from __future__ import annotations

import csv
import json
import os
import re
import sys
from pathlib import Path
from typing import Optional

import click

from . import analytics, figures, jsonio, views
from . import model as m
from . import session as sess
from .backend import BackendConfig, BackendKind, DEFAULT_TIMEOUT_SECONDS
from .errors import WorkbenchError

CONFIG_FILE = "workbench.toml"
BACKEND_FILE = "backend.json"

_CONFIG_LINE_RE = re.compile(
    r"""^\s*([A-Za-z_][\w]*)\s*=\s*(?:"([^"]*)"|'([^']*)'|([^#\s]+))\s*(?:#.*)?$""")


def load_config(path: Optional[Path] = None) -> dict[str, str]:
    """Flat key/value config; only the documented keys are consulted."""
    path = path or Path(CONFIG_FILE)
    if not path.exists():
        return {}
    out: dict[str, str] = {}
    for line in path.read_text().splitlines():
        match = _CONFIG_LINE_RE.match(line)
        if match:
            value = next(v for v in match.groups()[1:] if v is not None)
            out[match.group(1)] = value
    return out


def _emit(doc: dict) -> None:
    sys.stdout.buffer.write(jsonio.canonical_bytes(doc))


class _Context:
    def __init__(self, sessions_dir: str, config: dict[str, str]):
        self.store = sess.SessionStore(sessions_dir)
        self.config = config

    def backend_config(self, session_id: str = "",
                       scenario: Optional[str] = None,
                       workdir: Optional[str] = None) -> BackendConfig:
        saved: dict = {}
        if session_id:
            saved_path = self.store.session_dir(session_id) / BACKEND_FILE
            if saved_path.exists():
                saved = json.loads(saved_path.read_text())
        scenario = scenario or saved.get("scenario") or self.config.get("scenario")
        executable = (os.environ.get("WORKBENCH_BACKEND")
                      or saved.get("executable") or self.config.get("backend"))
        timeout = int(os.environ.get("WORKBENCH_TIMEOUT_S", "0") or 0)
        if not timeout:
            timeout = int(saved.get("timeout_seconds", 0)
                          or self.config.get("timeout_seconds", 0)
                          or DEFAULT_TIMEOUT_SECONDS)
        if scenario:
            kind = BackendKind.MOCK
        elif executable:
            kind = BackendKind.EXTERNAL_CHECKER
        else:
            raise WorkbenchError(
                "no backend configured: pass --scenario or set WORKBENCH_BACKEND")
        return BackendConfig(
            kind=kind,
            workdir=workdir or str(self.store.session_dir(session_id) / "work"),
            executable=executable,
            timeout_seconds=timeout,
            scenario=scenario,
        )

    def save_backend(self, session_id: str, cfg: BackendConfig) -> None:
        folder = self.store.session_dir(session_id)
        folder.mkdir(parents=True, exist_ok=True)
        (folder / BACKEND_FILE).write_text(json.dumps({
            "scenario": cfg.scenario,
            "executable": cfg.executable,
            "timeout_seconds": cfg.timeout_seconds,
        }, indent=2, sort_keys=True) + "\n")


def _wrap(fn):
    """Map domain errors to exit code 1 with the typed name printed."""
    import functools

    @functools.wraps(fn)
    def runner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except WorkbenchError as exc:
            click.echo(str(exc), err=True)
            raise SystemExit(1)

    return runner


@click.group()
@click.option("--sessions-dir", default=None,
              help="Directory holding session state (default ./sessions).")
@click.option("--config", "config_path", type=click.Path(path_type=Path),
              default=None, help="Path to the key/value config file.")
@click.pass_context
def main(ctx: click.Context, sessions_dir: Optional[str],
         config_path: Optional[Path]) -> None:
    """Workbench for developing per-function memory-safety proofs."""
    config = load_config(config_path)
    sessions_dir = sessions_dir or config.get("sessions_dir") or "sessions"
    ctx.obj = _Context(sessions_dir, config)


@main.command()
@click.option("--function", required=True, help="Entry function of the unit.")
@click.option("--source", "sources", multiple=True, required=True,
              help="Source file linked into the unit (repeatable).")
@click.option("--include", "includes", multiple=True, help="Include directory.")
@click.option("--define", "defines", multiple=True, metavar="KEY=VALUE",
              help="Configuration define.")
@click.option("--scenario", default=None,
              help="Mock-backend scenario file for this unit.")
@click.option("--project", default="", help="Project label for analytics.")
@click.option("--id", "session_id", default=None, help="Explicit session id.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@_wrap
def init(ctx: _Context, function: str, sources: tuple[str, ...],
         includes: tuple[str, ...], defines: tuple[str, ...],
         scenario: Optional[str], project: str, session_id: Optional[str],
         as_json: bool) -> None:
    """Start a session: extract symbols and scaffold the first harness."""
    config_defines = {}
    for item in defines:
        if "=" not in item:
            raise click.UsageError(f"--define expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        config_defines[key] = value
    scope = m.UnitScope(linked_sources=tuple(sources),
                        include_dirs=tuple(includes),
                        config_defines=config_defines)
    cfg = ctx.backend_config(session_id or "", scenario=scenario)
    session = sess.start(function, scope, cfg, ctx.store,
                         session_id=session_id, project=project)
    ctx.save_backend(session.id, cfg)
    if as_json:
        _emit(views.session_doc(session))
    else:
        click.echo(session.id)


@main.command()
@click.argument("session_id")
@click.option("--auto", is_flag=True,
              help="Accept exact suggestions automatically and the rest "
                   "greedily until complete or stuck.")
@click.option("--max-iter", default=16, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@_wrap
def run(ctx: _Context, session_id: str, auto: bool, max_iter: int,
        as_json: bool) -> None:
    """Render the current revision, run the checker, store the diagnosis."""
    cfg = ctx.backend_config(session_id)
    if auto:
        session = sess.autopilot(ctx.store, session_id, cfg,
                                 max_iterations=max_iter)
        report = session.latest_revision.report
        diagnoses = session.latest_revision.diagnoses
    else:
        report, diagnoses = sess.iterate(ctx.store, session_id, cfg)
        session = ctx.store.load(session_id)
    if as_json:
        _emit(views.session_doc(session))
        return
    failed = len(report.failed_properties()) if report else 0
    click.echo(f"status: {report.run_status.kind.value}" if report else "status: -")
    click.echo(f"failed properties: {failed}")
    click.echo(f"diagnoses: {len(diagnoses)}")
    click.echo(f"verdict: {session.completeness.verdict}")


@main.command()
@click.argument("session_id")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@_wrap
def status(ctx: _Context, session_id: str, as_json: bool) -> None:
    """Show a session's revisions, completeness and metrics."""
    session = ctx.store.load(session_id)
    if as_json:
        _emit(views.session_doc(session))
        return
    click.echo(f"session {session.id} target {session.target.name}")
    click.echo(f"revisions: {len(session.revisions)} "
               f"(iterations {session.metrics.iteration_count})")
    click.echo(f"verdict: {session.completeness.verdict}"
               + (f" missing {', '.join(session.completeness.unmet)}"
                  if not session.completeness.complete else ""))


@main.command()
@click.argument("session_id")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@_wrap
def suggest(ctx: _Context, session_id: str, as_json: bool) -> None:
    """List the latest diagnoses and their ranked suggestions."""
    session = ctx.store.load(session_id)
    if as_json:
        _emit(views.diagnoses_doc(session))
        return
    revision = session.latest_diagnosed_index
    if revision < 0:
        click.echo("no diagnosed revision yet; use `run` first")
        return
    for d_index, diag in enumerate(session.revisions[revision].diagnoses):
        finding = diag.finding
        subject = f" {finding.subject}" if finding.subject else ""
        click.echo(f"[{d_index}] {finding.kind.value}: {finding.cause}{subject}")
        for s_index, iv in enumerate(diag.suggestions):
            click.echo(f"    ({s_index}) {iv.kind.value} "
                       f"[{iv.confidence.value}] {iv.rationale}")


@main.command(name="apply")
@click.argument("session_id")
@click.argument("diagnosis_index", type=int)
@click.argument("suggestion_index", type=int)
@click.option("--revision", default=None, type=int,
              help="Revision the diagnosis list was read from "
                   "(defaults to the latest diagnosed revision).")
@click.option("--by", default="human", type=click.Choice(["human", "auto"]))
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@_wrap
def apply_cmd(ctx: _Context, session_id: str, diagnosis_index: int,
              suggestion_index: int, revision: Optional[int], by: str,
              as_json: bool) -> None:
    """Accept one suggestion; it is applied on the next run."""
    session = ctx.store.load(session_id)
    if revision is None:
        revision = session.latest_diagnosed_index
    session = sess.accept(ctx.store, session_id, revision, diagnosis_index,
                          suggestion_index, m.Acceptor(by))
    if as_json:
        _emit(views.session_doc(session))
    else:
        click.echo(f"accepted {diagnosis_index}/{suggestion_index} "
                   f"at revision {revision}; pending "
                   f"{len(session.pending_interventions())}")


@main.command()
@click.argument("session_id")
@click.option("--mark", nargs=2, default=None,
              metavar="INDEX STATUS",
              help="Mark item INDEX validated_assumption|violated_assumption.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@_wrap
def review(ctx: _Context, session_id: str, mark: Optional[tuple[str, str]],
           as_json: bool) -> None:
    """Show (or update) the caller-review queue of derived assumptions."""
    if mark is not None:
        index, status = mark
        session = sess.review_mark(ctx.store, session_id, int(index),
                                   m.ReviewStatus(status))
    else:
        session = ctx.store.load(session_id)
    if as_json:
        _emit(views.review_doc(session))
        return
    if not session.review_items:
        click.echo("review queue is empty")
        return
    for index, item in enumerate(session.review_items):
        click.echo(f"[{index}] {item.model.kind.value} on {item.model.subject}: "
                   f"{item.status.value}")
        if item.suggestion is not None:
            click.echo(f"    suggests {item.suggestion.kind.value} "
                       f"({item.suggestion.rationale})")


@main.command()
@click.argument("session_id")
@click.option("--revision", default=None, type=int,
              help="Revision to report on (defaults to latest with a report).")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None,
              help="Write report.json, metrics.csv and figures here.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@_wrap
def report(ctx: _Context, session_id: str, revision: Optional[int],
           out_dir: Optional[Path], as_json: bool) -> None:
    """Emit one session's verification report, with figures on request."""
    session = ctx.store.load(session_id)
    if revision is None:
        revision = session.latest_diagnosed_index
    doc = views.report_doc(session, revision)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_bytes(jsonio.canonical_bytes(doc))
        _write_metrics_csv(out_dir / "metrics.csv", [session])
        rev_report = session.revisions[revision].report
        assert rev_report is not None
        figures.coverage_heat_strip(rev_report, out_dir)
        figures.step_time_chart(session, out_dir)
        click.echo(f"wrote report bundle to {out_dir}")
        return
    if as_json:
        _emit(doc)
        return
    rev_report = session.revisions[revision].report
    assert rev_report is not None
    click.echo(f"revision {revision}: {rev_report.run_status.kind.value}, "
               f"{len(rev_report.failed_properties())} failed, "
               f"{analytics.coverage_percent(rev_report):.2f}% coverage")


@main.command()
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None,
              help="Write characteristics.csv/.json and figures here.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
@click.option("--json", "as_json", is_flag=True,
              help="Shorthand for --format json.")
@click.option("--compare", "compare_projects", is_flag=True,
              help="Compare session groups by project label.")
@click.pass_obj
@_wrap
def metrics(ctx: _Context, out_dir: Optional[Path], fmt: str, as_json: bool,
            compare_projects: bool) -> None:
    """Cross-session characteristics, costs and the time regression."""
    sessions = [ctx.store.load(sid) for sid in ctx.store.list_ids()]
    if compare_projects:
        groups: dict[str, list] = {}
        for s in sessions:
            groups.setdefault(s.project or "default", []).append(s)
        report = analytics.compare(sorted(groups.items()))
        doc = jsonio.as_document(analytics.comparison_doc(report))
        if as_json or fmt == "json":
            _emit(doc)
        else:
            for column in report.columns:
                click.echo(f"{column.label}: {column.sessions} proofs, median "
                           f"coverage {column.coverage_percent.median:.2f}%, "
                           f"median execution "
                           f"{column.execution_seconds.median:.2f}s")
                if column.below_threshold:
                    click.echo(f"  below {report.threshold:.0f}% coverage: "
                               + ", ".join(column.below_threshold))
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / "comparison.json").write_bytes(jsonio.canonical_bytes(doc))
            figures.comparison_chart(report, out_dir)
            click.echo(f"wrote comparison bundle to {out_dir}")
        return

    doc = views.metrics_doc(ctx.store)
    if as_json or fmt == "json":
        _emit(doc)
        return
    table = analytics.characterize(sessions)
    click.echo(analytics.characteristics_text(table))
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "characteristics.json").write_bytes(jsonio.canonical_bytes(doc))
        _write_metrics_csv(out_dir / "characteristics.csv", sessions)
        figures.model_kind_bars(table, out_dir)
        figures.loop_bound_histogram(sessions, out_dir)
        points = analytics.regression_points(sessions)
        if len(points) >= 3:
            figures.regression_scatter(points, analytics.regress_time(points),
                                       out_dir)
        click.echo(f"wrote metrics bundle to {out_dir}")


def _write_metrics_csv(path: Path, sessions: list[m.ProofSession]) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "session", "project", "function", "iterations", "harness_loc",
            "variable_models", "function_models", "max_bound",
            "execution_seconds", "verdict"])
        for s in sessions:
            writer.writerow([
                s.id, s.project, s.target.name, s.metrics.iteration_count,
                s.metrics.harness_loc,
                sum(s.metrics.variable_model_counts.values()),
                sum(s.metrics.function_model_counts.values()),
                max(s.metrics.loop_bound_histogram, default=0),
                f"{s.metrics.last_execution_seconds:.6f}",
                s.completeness.verdict])


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8642, show_default=True)
@click.option("--ui", "serve_ui", is_flag=True,
              help="Also serve the built dashboard assets if present.")
@click.pass_obj
@_wrap
def serve(ctx: _Context, host: str, port: int, serve_ui: bool) -> None:
    """Start the local JSON API (and optionally the dashboard)."""
    import uvicorn

    from .service import create_app

    app = create_app(ctx.store, ctx.backend_config, serve_ui=serve_ui)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
