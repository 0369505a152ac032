// Session list: one row per proof session with its verdict.

import { clear, el } from "../dom.js";
import type { SessionSummary } from "../types.js";

export function renderSessionList(
  root: HTMLElement,
  sessions: SessionSummary[],
  onOpen: (id: string) => void,
): void {
  clear(root);
  root.append(el("h2", {}, ["Proof sessions"]));
  if (sessions.length === 0) {
    root.append(
      el("p", { class: "empty-state", "data-role": "empty" }, [
        "No sessions yet. Start one with: proofbench init --function …",
      ]),
    );
    return;
  }
  const table = el("table", { class: "session-table" });
  table.append(
    el("tr", {}, [
      el("th", {}, ["session"]),
      el("th", {}, ["function"]),
      el("th", {}, ["project"]),
      el("th", {}, ["iterations"]),
      el("th", {}, ["verdict"]),
    ]),
  );
  for (const session of sessions) {
    const row = el("tr", { class: "session-row", "data-id": session.id });
    const link = el("a", { href: `#/session/${session.id}` }, [session.id]);
    link.addEventListener("click", (event) => {
      event.preventDefault();
      onOpen(session.id);
    });
    row.append(
      el("td", {}, [link]),
      el("td", {}, [el("code", {}, [session.function])]),
      el("td", {}, [session.project || "—"]),
      el("td", {}, [String(session.iterations)]),
      el("td", { class: `verdict ${session.verdict}` }, [session.verdict]),
    );
    table.append(row);
  }
  root.append(table);
}
