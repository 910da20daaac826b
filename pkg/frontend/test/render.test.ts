import { describe, expect, it } from "vitest";

import { diagnosticLine, previewText, tableLines, valueText } from "../src/render";
import type { RenderedPreview } from "../src/protocol";

describe("previewText", () => {
  it("says so when there is nothing to show", () => {
    expect(previewText(null)).toBe("no preview here");
    expect(previewText(undefined)).toBe("no preview here");
  });

  it("marks previews that ran out of time", () => {
    expect(previewText({ state: "pending" })).toBe("working...");
  });

  it("shows a delayed expression with the names it waits on", () => {
    const p: RenderedPreview = {
      state: "delayed",
      kind: "delayed",
      text: "fun x -> math.add(x, 1)",
      needs: ["x"],
    };
    expect(previewText(p)).toBe("fun x -> math.add(x, 1)  needs: x");
  });

  it("prefers the display text the service shipped", () => {
    const p: RenderedPreview = { state: "evaluated", kind: "number", text: "42" };
    expect(previewText(p)).toBe("42");
  });

  it("falls back to a derived rendering without one", () => {
    const p: RenderedPreview = { state: "evaluated", kind: "module", name: "math" };
    expect(previewText(p)).toBe("module math");
  });
});

describe("valueText", () => {
  it.each<[RenderedPreview, string]>([
    [{ state: "evaluated", kind: "number", text: "3.5" }, "3.5"],
    [{ state: "evaluated", kind: "string", text: "hi" }, "hi"],
    [{ state: "evaluated", kind: "function", text: "fun x -> x" }, "fun x -> x"],
    [{ state: "evaluated", kind: "error", message: "argument must be a num" },
     "error: argument must be a num"],
    [{ state: "evaluated", kind: "module", name: "image" }, "module image"],
    [{ state: "evaluated", kind: "image", width: 96, height: 96, png: "" }, "image 96x96"],
    [{ state: "evaluated", kind: "table", columns: ["a"], rows: [], total_rows: 12 },
     "table (12 rows)"],
  ])("renders %o", (value, expected) => {
    expect(valueText(value)).toBe(expected);
  });

  it("renders lists from their item prefix and true length", () => {
    const v: RenderedPreview = {
      state: "evaluated",
      kind: "list",
      items: [
        { state: "evaluated", kind: "number", text: "1" },
        { state: "evaluated", kind: "number", text: "2" },
      ],
      length: 40,
    };
    expect(valueText(v)).toBe("[1, 2] (40 items)");
  });
});

describe("tableLines", () => {
  const table: RenderedPreview = {
    state: "evaluated",
    kind: "table",
    columns: ["Team", "Gold"],
    rows: [
      ["USA", 39],
      ["China", 38],
    ],
    total_rows: 2,
  };

  it("pads columns into an aligned grid", () => {
    expect(tableLines(table)).toEqual([
      "Team  | Gold",
      "------+-----",
      "USA   | 39  ",
      "China | 38  ",
    ]);
  });

  it("notes when rows were cut off", () => {
    const cut = { ...table, total_rows: 93 };
    expect(tableLines(cut).at(-1)).toBe("(2 of 93 rows)");
  });
});

describe("diagnosticLine", () => {
  it("folds span, source and message into one line", () => {
    const d = { start: 4, end: 9, severity: "error", message: "expected a term", source: "parse" as const };
    expect(diagnosticLine(d)).toBe("error [parse] 4..9: expected a term");
  });
});
