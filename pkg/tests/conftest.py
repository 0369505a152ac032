"""Shared fixtures: repo-rooted cwd, unit-scenario loaders, and a terminal
summary that prints one pass/fail line per acceptance criterion."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = Path(__file__).resolve().parent / "fixtures"
UNITS = FIXTURES / "units"


@pytest.fixture(autouse=True)
def _repo_cwd(monkeypatch):
    # Unit scenarios and scopes use repo-relative paths.
    monkeypatch.chdir(REPO_ROOT)


def unit_names() -> list[str]:
    return sorted(p.name for p in UNITS.iterdir() if (p / "meta.json").exists())


def load_meta(name: str) -> dict:
    return json.loads((UNITS / name / "meta.json").read_text())


@pytest.fixture
def unit_session(tmp_path):
    """Factory: start a session for a fixture unit on the mock backend."""
    from proofbench import model as m
    from proofbench import session as sess
    from proofbench.backend import BackendConfig, BackendKind

    def build(name: str, patched: bool = False, session_id: str | None = None):
        meta = load_meta(name)
        scenario = meta["scenario_patched" if patched else "scenario"]
        cfg = BackendConfig(
            kind=BackendKind.MOCK,
            workdir=str(tmp_path / "work" / name),
            scenario=str(UNITS / name / scenario))
        scope = m.UnitScope(linked_sources=tuple(
            meta["scope_patched" if patched else "scope"]))
        store = sess.SessionStore(tmp_path / "sessions")
        session = sess.start(meta["function"], scope, cfg, store,
                             session_id=session_id or f"{name}-test")
        return store, session, cfg, meta

    return build


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            verdict = "PASS" if outcome == "passed" else "FAIL"
            lines.append(f"  {verdict}  {name}")
    if lines:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in sorted(set(lines)):
            terminalreporter.write_line(line)
