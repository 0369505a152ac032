"""HTTP API: endpoints, error mapping, iterate-with-poll, long-poll events,
concurrency, and byte parity with the CLI's --json output."""

from __future__ import annotations

import json
import threading
import time

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from proofbench import model as m
from proofbench import session as sess
from proofbench.backend import BackendConfig, BackendKind
from proofbench.cli import main as cli_main
from proofbench.service import SCHEMA_HEADER, create_app

from .conftest import UNITS


@pytest.fixture
def api(tmp_path):
    """A store with one started oob_write_len session plus the app client."""
    scenario = str(UNITS / "oob_write_len" / "scenario.json")
    meta = json.loads((UNITS / "oob_write_len" / "meta.json").read_text())
    store = sess.SessionStore(tmp_path / "sessions")

    def backend_for(session_id: str) -> BackendConfig:
        return BackendConfig(kind=BackendKind.MOCK,
                             workdir=str(tmp_path / "work" / session_id),
                             scenario=scenario)

    cfg = backend_for("api1")
    scope = m.UnitScope(linked_sources=tuple(meta["scope"]))
    sess.start(meta["function"], scope, cfg, store, session_id="api1")
    app = create_app(store, backend_for)
    client = TestClient(app)
    return client, store, cfg


def wait_done(client, session_id: str, token: str, timeout: float = 5.0) -> dict:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        poll = client.get(f"/sessions/{session_id}/iterations/{token}")
        doc = poll.json()
        if doc.get("state") != "running":
            return doc
        time.sleep(0.02)
    raise AssertionError("iterate did not finish")


class TestEndpoints:
    def test_empty_store_lists_nothing(self, tmp_path):
        store = sess.SessionStore(tmp_path / "none")
        client = TestClient(create_app(store, lambda sid: None))
        response = client.get("/sessions")
        assert response.status_code == 200
        assert response.json()["sessions"] == []
        assert response.headers[SCHEMA_HEADER] == "1"

    def test_unknown_session_is_404(self, api):
        client, _, _ = api
        assert client.get("/sessions/ghost").status_code == 404

    def test_iterate_returns_202_then_report(self, api):
        client, _, _ = api
        response = client.post("/sessions/api1/iterate")
        assert response.status_code == 202
        token = response.json()["token"]
        done = wait_done(client, "api1", token)
        assert done["state"] == "done"
        assert done["revision"] == 0
        assert done["report"]["run_status"]["kind"] == "completed"
        assert done["verdict"] == "incomplete"

    def test_accept_grows_applied_log(self, api):
        client, _, _ = api
        token = client.post("/sessions/api1/iterate").json()["token"]
        wait_done(client, "api1", token)
        before = client.get("/sessions/api1").json()
        response = client.post("/sessions/api1/accept",
                               json={"diagnosis": 0, "suggestion": 0})
        assert response.status_code == 200
        after = client.get("/sessions/api1").json()
        assert len(after["applied"]) == len(before["applied"]) + 1

    def test_accept_errors_map_to_409_and_422(self, api):
        client, _, _ = api
        token = client.post("/sessions/api1/iterate").json()["token"]
        wait_done(client, "api1", token)
        bad = client.post("/sessions/api1/accept",
                          json={"diagnosis": 7, "suggestion": 0})
        assert bad.status_code == 422
        stale = client.post("/sessions/api1/accept",
                            json={"diagnosis": 0, "suggestion": 0,
                                  "revision": 5})
        assert stale.status_code == 409
        assert stale.json()["error"] == "StaleRevision"

    def test_concurrent_double_accept_single_winner(self, api):
        client, _, _ = api
        token = client.post("/sessions/api1/iterate").json()["token"]
        wait_done(client, "api1", token)
        codes: list[int] = []
        barrier = threading.Barrier(2)

        def accept_once():
            barrier.wait()
            response = client.post("/sessions/api1/accept",
                                   json={"diagnosis": 0, "suggestion": 0,
                                         "revision": 0})
            codes.append(response.status_code)

        threads = [threading.Thread(target=accept_once) for _ in range(2)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(codes) == [200, 409]

    def test_events_long_poll_sees_accept(self, api):
        client, _, _ = api
        token = client.post("/sessions/api1/iterate").json()["token"]
        wait_done(client, "api1", token)
        events = client.get("/sessions/api1/events",
                            params={"cursor": 0, "timeout": 0.1}).json()
        cursor = events["cursor"]
        assert any(e["type"] == "iterated" for e in events["events"])
        client.post("/sessions/api1/accept",
                    json={"diagnosis": 0, "suggestion": 0})
        more = client.get("/sessions/api1/events",
                          params={"cursor": cursor, "timeout": 2}).json()
        assert [e["type"] for e in more["events"]] == ["accepted"]

    def test_coverage_and_harness_views(self, api):
        client, _, _ = api
        token = client.post("/sessions/api1/iterate").json()["token"]
        wait_done(client, "api1", token)
        coverage = client.get("/sessions/api1/coverage").json()
        assert coverage["revision"] == 0
        assert coverage["lines"]
        assert 0 < coverage["coverage_percent"] < 100

        harness = client.get("/sessions/api1/harness").json()
        assert "void harness(void)" in harness["harness_source"]

        client.post("/sessions/api1/accept",
                    json={"diagnosis": 0, "suggestion": 0})
        preview = client.get("/sessions/api1/harness").json()
        assert preview["pending"] == 1
        assert "frame_store.0:4" in preview["makefile"]

    def test_review_flow(self, api):
        client, store, cfg = api
        sess.autopilot(store, "api1", cfg)
        review = client.get("/sessions/api1/review").json()
        assert len(review["items"]) == 1
        marked = client.post(
            "/sessions/api1/review",
            json={"item": 0, "status": "violated_assumption"})
        assert marked.status_code == 200
        assert marked.json()["items"][0]["suggestion"]["kind"] == \
            "mark_real_defect"


class TestParity:
    """CLI --json output and API responses are byte-identical."""

    def test_views_byte_equal(self, api, tmp_path):
        client, store, cfg = api
        sess.autopilot(store, "api1", cfg)
        runner = CliRunner()
        base = ["--sessions-dir", str(store.root)]
        pairs = [
            (["status", "api1", "--json"], "/sessions/api1"),
            (["suggest", "api1", "--json"], "/sessions/api1/diagnoses"),
            (["report", "api1", "--json"],
             f"/sessions/api1/revisions/"
             f"{store.load('api1').latest_diagnosed_index}/report"),
            (["review", "api1", "--json"], "/sessions/api1/review"),
            (["metrics", "--json"], "/metrics"),
        ]
        for cli_args, endpoint in pairs:
            cli_result = runner.invoke(cli_main, base + cli_args)
            assert cli_result.exit_code == 0, cli_result.output
            api_response = client.get(endpoint)
            assert api_response.status_code == 200
            assert cli_result.stdout_bytes == api_response.content, endpoint


class TestDashboardSupport:
    def test_harness_diff_is_server_computed(self, api):
        client, _, _ = api
        token = client.post("/sessions/api1/iterate").json()["token"]
        wait_done(client, "api1", token)
        before = client.get("/sessions/api1/harness").json()
        assert before["diff"] == ""  # nothing pending
        client.post("/sessions/api1/accept",
                    json={"diagnosis": 0, "suggestion": 0})
        preview = client.get("/sessions/api1/harness").json()
        assert preview["pending"] == 1
        assert "+++ " in preview["diff"] and "frame_store.0:4" in preview["diff"]

    def test_source_endpoint_scoped(self, api):
        client, _, _ = api
        response = client.get("/sessions/api1/source",
                              params={"file": "unit.c"})
        assert response.status_code == 200
        doc = response.json()
        assert any("memcpy(ctx->payload, data, len);" in line
                   for line in doc["lines"])
        outside = client.get("/sessions/api1/source",
                             params={"file": "/etc/passwd"})
        assert outside.status_code == 404
