// Session detail: coverage heat map, diagnosis cards grouped by finding
// kind, completeness badge, per-step cost, review queue and the what-if
// harness diff panel. All numbers shown come straight from the documents.

import { clear, el, button } from "../dom.js";
import { buildHeatMaps } from "../heatmap.js";
import type { Dashboard } from "../store.js";
import type { Diagnosis, Intervention } from "../types.js";
import { renderBadge } from "./badge.js";
import { makeStepper, renderStepper } from "./trace.js";

const FINDING_LABELS: Record<string, string> = {
  non_termination: "Non-termination",
  coverage_gap: "Coverage gaps",
  violation: "Violations",
};

const STEP_LABELS: [string, string][] = [
  ["step1", "setup"],
  ["step2", "termination"],
  ["step3", "coverage"],
  ["step4", "models"],
];

export function describeSuggestion(iv: Intervention): string {
  switch (iv.kind) {
    case "add_model":
      return `assume ${iv.model?.kind ?? "model"} on ${iv.model?.subject ?? "?"}`;
    case "add_stub":
      return `stub ${iv.stub?.target ?? "?"} (${iv.stub?.kind ?? ""})`;
    case "set_loop_bound":
      return `unwind ${iv.loop_bound?.loop ?? "?"} to ${iv.loop_bound?.bound ?? "?"}`;
    case "expand_scope":
      return `link ${iv.path}`;
    case "set_config":
      return `define ${iv.define}=${iv.value}`;
    case "raise_string_max":
      return `raise string bound to ${iv.string_max}`;
    case "mark_real_defect":
      return `mark ${iv.property_id} as a real defect`;
    case "mark_dead_code":
      return `mark ${iv.location?.file ?? "?"}:${iv.location?.line ?? "?"} dead`;
    default:
      return iv.kind;
  }
}

export function renderDetail(root: HTMLElement, store: Dashboard): void {
  clear(root);
  const view = store.view;
  const session = view.session;
  if (!session) {
    root.append(el("p", { class: "muted" }, ["loading session…"]));
    return;
  }

  const header = el("div", { class: "detail-header" });
  header.append(
    el("h2", {}, [`${session.target.name} `, el("small", {}, [session.id])]),
    renderBadge(session.completeness),
  );
  const runButton = button(
    view.runInFlight ? "running…" : "run verification",
    () => void store.iterate(),
    { class: "primary", "data-role": "iterate" },
  );
  runButton.disabled = view.runInFlight;
  header.append(runButton);
  root.append(header);

  root.append(renderCostStrip(store));
  root.append(renderCoverage(store));
  root.append(renderDiagnoses(store));
  root.append(renderReview(store));
}

function renderCostStrip(store: Dashboard): HTMLElement {
  const session = store.view.session!;
  const strip = el("div", { class: "cost-strip" });
  const seconds = session.metrics.step_seconds;
  const total = Math.max(
    Object.values(seconds).reduce((a, b) => a + b, 0),
    1e-9,
  );
  for (const [key, label] of STEP_LABELS) {
    const value = seconds[key] ?? 0;
    const bar = el("div", { class: "cost-bar" });
    bar.style.width = `${Math.max((value / total) * 100, 2)}%`;
    strip.append(
      el("div", { class: "cost-item" }, [
        el("span", { class: "cost-label" }, [
          `${label} ${value.toFixed(2)}s`,
        ]),
        bar,
      ]),
    );
  }
  strip.append(
    el("span", { class: "muted" }, [
      ` iterations: ${session.metrics.iteration_count}, harness ${session.metrics.harness_loc} loc`,
    ]),
  );
  return strip;
}

function renderCoverage(store: Dashboard): HTMLElement {
  const view = store.view;
  const panel = el("section", { class: "panel coverage-panel" });
  panel.append(el("h3", {}, ["Coverage"]));
  if (!view.coverage || view.coverage.revision < 0) {
    panel.append(el("p", { class: "muted" }, ["no run yet"]));
    return panel;
  }
  // The percentage is the API's number, shown verbatim.
  panel.append(
    el("p", { class: "coverage-percent", "data-role": "coverage-percent" }, [
      `${view.coverage.coverage_percent}% of reachable lines covered`,
    ]),
  );
  const failed = (view.report?.properties ?? []).filter(
    (p) => p.status === "fail",
  );
  const maps = buildHeatMaps(view.coverage, failed, view.sources);
  for (const map of maps) {
    const table = el("table", { class: "heatmap" });
    for (const line of map.lines) {
      const row = el("tr", {
        class: `heat-${line.state}`,
        "data-file": line.file,
        "data-line": String(line.line),
        "data-state": line.state,
      });
      row.append(
        el("td", { class: "lineno" }, [String(line.line)]),
        el("td", { class: "line-state" }, [line.state]),
        el("td", { class: "line-text" }, [el("code", {}, [line.text])]),
      );
      table.append(row);
    }
    panel.append(
      el("details", { class: "heatmap-file", open: "" }, [
        el("summary", {}, [map.file]),
        table,
      ]),
    );
  }
  return panel;
}

function renderDiagnoses(store: Dashboard): HTMLElement {
  const view = store.view;
  const panel = el("section", { class: "panel" });
  panel.append(el("h3", {}, ["Diagnoses"]));
  const diagnoses = view.diagnoses?.diagnoses ?? [];
  if (diagnoses.length === 0) {
    panel.append(el("p", { class: "muted" }, ["nothing to fix"]));
    return panel;
  }
  const groups = new Map<string, [number, Diagnosis][]>();
  diagnoses.forEach((diag, index) => {
    const list = groups.get(diag.finding.kind) ?? [];
    list.push([index, diag]);
    groups.set(diag.finding.kind, list);
  });
  for (const [kind, label] of Object.entries(FINDING_LABELS)) {
    const entries = groups.get(kind);
    if (!entries) continue;
    panel.append(el("h4", {}, [label]));
    for (const [index, diag] of entries) {
      panel.append(renderDiagnosisCard(store, index, diag));
    }
  }
  return panel;
}

function renderDiagnosisCard(
  store: Dashboard,
  index: number,
  diag: Diagnosis,
): HTMLElement {
  const view = store.view;
  const card = el("div", {
    class: "card",
    "data-diagnosis": String(index),
    "data-cause": diag.finding.cause,
  });
  const subject = diag.finding.subject ? ` — ${diag.finding.subject}` : "";
  card.append(el("div", { class: "card-title" }, [
    `${diag.finding.cause.replaceAll("_", " ")}${subject}`,
  ]));
  if (diag.evidence.notes) {
    card.append(el("p", { class: "muted" }, [diag.evidence.notes]));
  }

  const trace = diag.evidence.property_id
    ? view.report?.traces[diag.evidence.property_id]
    : undefined;
  if (trace) {
    card.append(
      renderStepper(makeStepper(trace.steps, diag.evidence.trace_steps)),
    );
  }

  diag.suggestions.forEach((suggestion, sIndex) => {
    const row = el("div", { class: "suggestion" });
    row.append(
      el("span", { class: `confidence ${suggestion.confidence}` }, [
        suggestion.confidence,
      ]),
      el("span", { class: "suggestion-text" }, [
        describeSuggestion(suggestion),
      ]),
    );
    const preview = button(
      "what if?",
      () => void showWhatIf(store, card, index, sIndex),
      { class: "ghost", "data-role": "whatif" },
    );
    const accept = button(
      "accept + rerun",
      () => void store.acceptAndIterate(index, sIndex),
      { class: "accept", "data-role": "accept" },
    );
    accept.disabled = view.runInFlight;
    row.append(preview, accept);
    if (suggestion.rationale) {
      row.append(el("div", { class: "rationale" }, [suggestion.rationale]));
    }
    card.append(row);
  });
  return card;
}

async function showWhatIf(
  store: Dashboard,
  card: HTMLElement,
  diagnosis: number,
  suggestion: number,
): Promise<void> {
  const id = store.currentId;
  if (!id) return;
  const doc = await store.api.harness(id, { diagnosis, suggestion });
  const existing = card.querySelector(".whatif");
  existing?.remove();
  const panel = el("div", { class: "whatif" });
  panel.append(
    el("h5", {}, ["Harness diff if accepted"]),
    el("pre", { class: "diff", "data-role": "diff" }, [
      doc.diff || "(no rendered change)",
    ]),
    button("close", () => panel.remove(), { class: "ghost" }),
  );
  card.append(panel);
}

function renderReview(store: Dashboard): HTMLElement {
  const view = store.view;
  const panel = el("section", { class: "panel" });
  panel.append(el("h3", {}, ["Caller review queue"]));
  const items = view.review?.items ?? [];
  if (items.length === 0) {
    panel.append(el("p", { class: "muted" }, ["no derived assumptions yet"]));
    return panel;
  }
  items.forEach((item, index) => {
    const row = el("div", { class: "review-item", "data-item": String(index) });
    row.append(
      el("code", {}, [`${item.model.kind} on ${item.model.subject}`]),
      el("span", { class: `review-status ${item.status}` }, [item.status]),
    );
    if (item.status === "pending_caller_review") {
      row.append(
        button("validated", () =>
          void store.markReview(index, "validated_assumption"),
        ),
        button("violated", () =>
          void store.markReview(index, "violated_assumption"),
        ),
      );
    }
    if (item.suggestion) {
      row.append(
        el("div", { class: "rationale" }, [
          `suggests: ${describeSuggestion(item.suggestion)}`,
        ]),
      );
    }
    panel.append(row);
  });
  return panel;
}
