// Coverage heat-map model: one row per reported source line, with failed
// memory-safety properties overlaid so violating lines read as failing
// rather than merely covered. Pure data mapping; the DOM layer renders it.

import type { CoverageDoc, PropertyResult, SourceDoc } from "./types.js";

export type LineState = "covered" | "uncovered" | "unreachable" | "failing";

export interface HeatLine {
  file: string;
  line: number;
  state: LineState;
  text: string;
  propertyIds: string[];
}

export interface FileHeatMap {
  file: string;
  lines: HeatLine[];
}

const MEMORY_SAFETY = new Set([
  "pointer_dereference",
  "array_bounds",
  "arithmetic_overflow",
]);

function basename(path: string): string {
  const parts = path.split("/");
  return parts[parts.length - 1];
}

export function buildHeatMaps(
  coverage: CoverageDoc,
  failed: PropertyResult[],
  sources: Map<string, SourceDoc>,
): FileHeatMap[] {
  const failing = new Map<string, string[]>();
  for (const prop of failed) {
    if (prop.status !== "fail" || !MEMORY_SAFETY.has(prop.class)) continue;
    const key = `${basename(prop.location.file)}:${prop.location.line}`;
    const existing = failing.get(key) ?? [];
    existing.push(prop.id);
    failing.set(key, existing);
  }

  const byFile = new Map<string, HeatLine[]>();
  for (const entry of coverage.lines) {
    const key = `${basename(entry.file)}:${entry.line}`;
    const propertyIds = failing.get(key) ?? [];
    let state: LineState;
    if (propertyIds.length > 0) {
      state = "failing";
    } else {
      state = entry.status as LineState;
    }
    const source = sources.get(entry.file);
    const text = source?.lines[entry.line - 1] ?? "";
    const rows = byFile.get(entry.file) ?? [];
    rows.push({ file: entry.file, line: entry.line, state, text, propertyIds });
    byFile.set(entry.file, rows);
  }

  return [...byFile.entries()]
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([file, lines]) => ({
      file,
      lines: lines.sort((a, b) => a.line - b.line),
    }));
}

export function lineState(
  maps: FileHeatMap[],
  file: string,
  line: number,
): LineState | null {
  for (const map of maps) {
    if (basename(map.file) !== basename(file)) continue;
    for (const row of map.lines) {
      if (row.line === line) return row.state;
    }
  }
  return null;
}
