/**
 * Text rendering for preview payloads.
 *
 * The service already ships a display string with most previews; these
 * helpers fill the gaps (cursor pane wording, tables as text grids) and
 * never compute values themselves.
 */

import type { DiagnosticEntry, RenderedPreview } from "./protocol";

/** Fallback display text derived from the rendered value fields. */
export function valueText(v: RenderedPreview): string {
  switch (v.kind) {
    case "number":
    case "string":
    case "function":
      return v.text ?? "";
    case "error":
      return `error: ${v.message ?? "error"}`;
    case "module":
      return `module ${v.name ?? ""}`;
    case "list": {
      const items = (v.items ?? []).map(valueText).join(", ");
      return `[${items}] (${v.length ?? 0} items)`;
    }
    case "image":
      return `image ${v.width}x${v.height}`;
    case "table":
      return `table (${v.total_rows ?? 0} rows)`;
    default:
      return v.text ?? "";
  }
}

/** What the cursor pane shows for a preview response. */
export function previewText(p: RenderedPreview | null | undefined): string {
  if (p === null || p === undefined) {
    return "no preview here";
  }
  if (p.state === "pending") {
    return "working...";
  }
  if (p.state === "delayed") {
    const needs = (p.needs ?? []).join(", ");
    return `${p.text ?? ""}  needs: ${needs}`;
  }
  return p.text ?? valueText(p);
}

/** Render a table payload as header, rule, and one line per row. */
export function tableLines(p: RenderedPreview): string[] {
  const columns = p.columns ?? [];
  const rows = p.rows ?? [];
  const widths = columns.map((c, i) => {
    const cells = rows.map((r) => String(r[i] ?? ""));
    return Math.max(c.length, ...cells.map((s) => s.length), 1);
  });
  const pad = (s: string, i: number) => s.padEnd(widths[i]);
  const lines = [
    columns.map(pad).join(" | "),
    widths.map((w) => "-".repeat(w)).join("-+-"),
    ...rows.map((r) => r.map((c, i) => pad(String(c), i)).join(" | ")),
  ];
  const total = p.total_rows ?? rows.length;
  if (total > rows.length) {
    lines.push(`(${rows.length} of ${total} rows)`);
  }
  return lines;
}

export function diagnosticLine(d: DiagnosticEntry): string {
  return `${d.severity} [${d.source}] ${d.start}..${d.end}: ${d.message}`;
}
