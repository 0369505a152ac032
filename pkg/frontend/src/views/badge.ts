// Completeness badge: the three criteria and an n/3 summary.

import { el } from "../dom.js";
import type { Completeness } from "../types.js";

const CRITERIA: [keyof Completeness, string][] = [
  ["graceful_termination", "terminates"],
  ["full_coverage", "full coverage"],
  ["violations_resolved", "violations resolved"],
];

export function badgeSummary(completeness: Completeness): string {
  const met = CRITERIA.filter(([key]) => completeness[key] === true).length;
  return `${met}/3`;
}

export function renderBadge(completeness: Completeness): HTMLElement {
  const summary = badgeSummary(completeness);
  const root = el("div", {
    class: `badge ${completeness.verdict === "complete" ? "badge-complete" : "badge-incomplete"}`,
    "data-summary": summary,
  });
  root.append(el("span", { class: "badge-count" }, [summary]));
  for (const [key, label] of CRITERIA) {
    const met = completeness[key] === true;
    root.append(
      el("span", { class: `criterion ${met ? "met" : "unmet"}` }, [
        `${met ? "✓" : "✗"} ${label}`,
      ]),
    );
  }
  return root;
}
