import { describe, expect, it } from "vitest";

import { buildHeatMaps, lineState } from "../src/heatmap.js";
import type { CoverageDoc, PropertyResult, SourceDoc } from "../src/types.js";

function coverageDoc(): CoverageDoc {
  return {
    schema: 1,
    revision: 1,
    coverage_percent: 75.0,
    lines: [
      { file: "units/x/unit.c", line: 3, function: "f", status: "covered" },
      { file: "units/x/unit.c", line: 4, function: "f", status: "covered" },
      { file: "units/x/unit.c", line: 5, function: "f", status: "uncovered" },
      { file: "units/x/unit.c", line: 6, function: "f", status: "unreachable" },
    ],
  };
}

function failedProperty(line: number): PropertyResult {
  return {
    id: "f.array_bounds.1",
    class: "array_bounds",
    status: "fail",
    location: { file: "unit.c", line, function: "f" },
    description: "",
    raw_class: "",
  };
}

describe("buildHeatMaps", () => {
  it("overlays failing properties on covered lines", () => {
    const maps = buildHeatMaps(coverageDoc(), [failedProperty(4)], new Map());
    expect(maps).toHaveLength(1);
    const states = maps[0].lines.map((l) => l.state);
    expect(states).toEqual(["covered", "failing", "uncovered", "unreachable"]);
    expect(maps[0].lines[1].propertyIds).toEqual(["f.array_bounds.1"]);
  });

  it("matches files by basename (report paths may differ from scope paths)", () => {
    const maps = buildHeatMaps(coverageDoc(), [failedProperty(3)], new Map());
    expect(lineState(maps, "some/other/prefix/unit.c", 3)).toBe("failing");
    expect(lineState(maps, "unit.c", 5)).toBe("uncovered");
    expect(lineState(maps, "unit.c", 99)).toBeNull();
  });

  it("ignores user-assertion failures for the red overlay", () => {
    const assertion: PropertyResult = {
      ...failedProperty(3),
      class: "user_assertion",
    };
    const maps = buildHeatMaps(coverageDoc(), [assertion], new Map());
    expect(lineState(maps, "unit.c", 3)).toBe("covered");
  });

  it("attaches source text when available", () => {
    const sources = new Map<string, SourceDoc>([
      ["units/x/unit.c", {
        schema: 1,
        file: "units/x/unit.c",
        lines: ["l1", "l2", "int x;", "x++;", "y++;", "z++;"],
      }],
    ]);
    const maps = buildHeatMaps(coverageDoc(), [], sources);
    expect(maps[0].lines[0].text).toBe("int x;");
    expect(maps[0].lines[3].text).toBe("z++;");
  });
});
