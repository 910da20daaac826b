/**
 * Wire types for the editor websocket protocol.
 *
 * Every frame in both directions shares one envelope: a request kind, the
 * session id, the generation the frame is about, and a payload whose shape
 * depends on the kind. The editor never computes values itself; everything
 * shown on screen arrives through these frames.
 */

export interface Envelope {
  kind: string;
  session: string | null;
  generation: number | null;
  payload: Record<string, unknown>;
}

/** One rendered value, as flattened into preview payloads by the service. */
export interface RenderedPreview {
  state: "evaluated" | "delayed" | "pending";
  kind?: string;
  /** display text; for delayed previews this is the pretty-printed expression */
  text?: string;
  /** names a delayed preview is waiting on */
  needs?: string[];
  message?: string;
  name?: string;
  items?: RenderedPreview[];
  length?: number;
  width?: number;
  height?: number;
  png?: string;
  columns?: string[];
  rows?: Array<Array<string | number>>;
  total_rows?: number;
}

/** A command preview plus the source span it belongs to. */
export interface PreviewEntry extends RenderedPreview {
  index: number;
  start: number;
  end: number;
}

export interface SpanError {
  start: number;
  end: number;
  message: string;
}

export interface CompletionItem {
  name: string;
  params: string[];
  result: string;
  /** ready-to-render signature, e.g. "take(num) -> table" */
  text: string;
}

export interface DiagnosticEntry {
  start: number;
  end: number;
  severity: string;
  message: string;
  source: "parse" | "type";
}

export interface StatsPayload {
  counts: Record<string, number>;
  generation: number;
  cached_previews: number;
  cached_nodes: number;
}

export interface OpenPayload {
  roots: string[];
}

export interface EditAckPayload {
  errors: SpanError[];
  boundCommands: number;
}

export interface PreviewsPayload {
  previews?: PreviewEntry[];
  boundGeneration?: number;
  superseded?: boolean;
}

export interface PreviewAtPayload {
  preview?: RenderedPreview | null;
  superseded?: boolean;
}

export interface CompletePayload {
  items: CompletionItem[];
}

export interface DiagnosticsPayload {
  diagnostics: DiagnosticEntry[];
}

// request constructors

export function openRequest(): Envelope {
  return { kind: "open", session: null, generation: null, payload: {} };
}

export function editRequest(session: string, generation: number, text: string): Envelope {
  return { kind: "edit", session, generation, payload: { text } };
}

export function previewsRequest(session: string, generation: number): Envelope {
  return { kind: "previews", session, generation, payload: {} };
}

export function previewAtRequest(session: string, generation: number, offset: number): Envelope {
  return { kind: "previewAt", session, generation, payload: { offset } };
}

export function completeRequest(session: string, generation: number, offset: number): Envelope {
  return { kind: "complete", session, generation, payload: { offset } };
}

export function diagnosticsRequest(session: string, generation: number): Envelope {
  return { kind: "diagnostics", session, generation, payload: {} };
}

export function statsRequest(session: string, generation: number): Envelope {
  return { kind: "stats", session, generation, payload: {} };
}
