// End-to-end against the real workbench service on the seeded fixture's
// scripted scenario: the accept -> iterate flow flips the violating memcpy
// line from failing to passing and the completeness badge to 3/3, and a
// concurrent double-accept yields exactly one 409 surfaced as a conflict.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { Dashboard } from "../src/store.js";
import { buildHeatMaps, lineState } from "../src/heatmap.js";
import { badgeSummary } from "../src/views/badge.js";

const REPO_ROOT = path.resolve(__dirname, "..", "..");
const UNIT = "tests/fixtures/units/oob_write_len";
const PORT = 8891;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let sessionsDir: string;

function cli(...args: string[]): string {
  return execFileSync("proofbench", ["--sessions-dir", sessionsDir, ...args], {
    cwd: REPO_ROOT,
    encoding: "utf-8",
  });
}

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/sessions`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  sessionsDir = mkdtempSync(path.join(tmpdir(), "pb-e2e-"));
  cli(
    "init",
    "--function", "frame_store",
    "--source", `${UNIT}/unit.c`,
    "--scenario", `${UNIT}/scenario.json`,
    "--id", "e2e",
  );
  server = spawn(
    "proofbench",
    ["--sessions-dir", sessionsDir, "serve", "--port", String(PORT)],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
  rmSync(sessionsDir, { recursive: true, force: true });
});

describe("accept -> iterate flow on the seeded fixture", () => {
  const meta = JSON.parse(
    readFileSync(path.join(REPO_ROOT, UNIT, "meta.json"), "utf-8"),
  );
  const defectFile: string = meta.defect.file;
  const defectLine: number = meta.defect.line;

  function currentLineState(store: Dashboard) {
    const failed = (store.view.report?.properties ?? []).filter(
      (p) => p.status === "fail",
    );
    const maps = buildHeatMaps(store.view.coverage!, failed, store.view.sources);
    return lineState(maps, defectFile, defectLine);
  }

  it("drives the session to a complete proof", async () => {
    const api = new ApiClient(BASE);
    const store = new Dashboard(api);
    await store.loadSessions();
    expect(store.sessions.map((s) => s.id)).toContain("e2e");

    await store.openSession("e2e");
    await store.iterate(); // first run: the constant loop hides the tail

    // Concurrent double-accept of the same suggestion: the server lets
    // exactly one through; the loser surfaces as a conflict toast.
    const revision = store.view.diagnoses!.revision;
    const outcomes = await Promise.allSettled([
      api.accept("e2e", 0, 0, revision),
      api.accept("e2e", 0, 0, revision),
    ]);
    const conflicts = outcomes.filter(
      (o): o is PromiseRejectedResult =>
        o.status === "rejected" &&
        o.reason instanceof ApiError &&
        o.reason.status === 409,
    );
    const wins = outcomes.filter((o) => o.status === "fulfilled");
    expect(wins).toHaveLength(1);
    expect(conflicts).toHaveLength(1);

    // The same conflict path through the store produces the in-UI toast.
    const echo = await store.accept(0, 0);
    expect(echo).toBe(false);
    expect(store.view.toasts.filter((t) => t.kind === "conflict")).toHaveLength(1);

    await store.iterate(); // bound 4 applied: the memcpy line now fails
    expect(currentLineState(store)).toBe("failing");
    expect(badgeSummary(store.view.session!.completeness)).not.toBe("3/3");

    // Accept the stub for the undefined context source, rerun.
    await store.acceptAndIterate(0, 0);
    expect(currentLineState(store)).toBe("failing");

    // Accept the length-vs-capacity relationship, rerun: red turns green.
    const diagnoses = store.view.diagnoses!.diagnoses;
    expect(diagnoses[0].suggestions[0].model?.kind).toBe(
      "integer_relationship",
    );
    await store.acceptAndIterate(0, 0);

    expect(currentLineState(store)).toBe("covered");
    expect(badgeSummary(store.view.session!.completeness)).toBe("3/3");
    expect(store.view.session!.completeness.verdict).toBe("complete");
    expect(store.view.diagnoses!.diagnoses).toHaveLength(0);
  });

  it("serves the what-if diff before accepting", async () => {
    // A fresh session on the same scenario so a suggestion is pending.
    cli(
      "init",
      "--function", "frame_store",
      "--source", `${UNIT}/unit.c`,
      "--scenario", `${UNIT}/scenario.json`,
      "--id", "whatif",
    );
    const api = new ApiClient(BASE);
    const store = new Dashboard(api);
    await store.openSession("whatif");
    await store.iterate();
    const preview = await api.harness("whatif", { diagnosis: 0, suggestion: 0 });
    expect(preview.pending).toBe(0); // nothing accepted yet
    expect(preview.diff).toContain("frame_store.0:4");
    // Previewing changed nothing server-side.
    const after = await api.harness("whatif");
    expect(after.diff).toBe("");
  });
});
