/**
 * Editor state and its pure transitions.
 *
 * The state is a plain immutable object; every event (keystroke, server
 * frame, connection change) maps an old state to a new one. Two rules are
 * enforced here and nowhere else:
 *
 *  - previews carry the generation they were computed for, and a panel
 *    never replaces its contents with an older generation;
 *  - a panel older than the current text is stale and must render dimmed,
 *    never as if it were current.
 */

import type {
  CompletionItem,
  DiagnosticEntry,
  PreviewEntry,
  RenderedPreview,
} from "./protocol";

export interface PreviewPanel {
  /** generation these previews were computed for */
  generation: number;
  entries: PreviewEntry[];
}

export interface CursorPane {
  generation: number;
  preview: RenderedPreview | null;
}

export interface CompletionPopup {
  /** offset just after the dot; inserted text replaces anchor..cursor */
  anchor: number;
  items: CompletionItem[];
  selected: number;
}

export interface EditorState {
  text: string;
  cursor: number;
  session: string | null;
  /** number of edit frames sent for this session; mirrors the server */
  generation: number;
  /** keystrokes exist that have not been sent yet */
  dirty: boolean;
  connected: boolean;
  panel: PreviewPanel | null;
  cursorPane: CursorPane | null;
  popup: CompletionPopup | null;
  diagnostics: DiagnosticEntry[];
}

export function initialState(): EditorState {
  return {
    text: "",
    cursor: 0,
    session: null,
    generation: 0,
    dirty: false,
    connected: false,
    panel: null,
    cursorPane: null,
    popup: null,
    diagnostics: [],
  };
}

export function withText(state: EditorState, text: string, cursor: number): EditorState {
  return { ...state, text, cursor, dirty: true, popup: null };
}

export function withCursor(state: EditorState, cursor: number): EditorState {
  return { ...state, cursor };
}

export function withConnection(state: EditorState, connected: boolean): EditorState {
  return connected
    ? { ...state, connected }
    : { ...state, connected, popup: null };
}

/**
 * A new session starts counting generations from zero again. Panes keep
 * their old contents so the screen does not blank out on reconnect, but
 * their generations drop to zero so the first fresh frames replace them.
 */
export function withSession(state: EditorState, session: string): EditorState {
  return {
    ...state,
    session,
    generation: 0,
    panel: state.panel === null ? null : { ...state.panel, generation: 0 },
    cursorPane:
      state.cursorPane === null ? null : { ...state.cursorPane, generation: 0 },
  };
}

export function withEditSent(state: EditorState): EditorState {
  return { ...state, generation: state.generation + 1, dirty: false };
}

/** Frames older than what the panel already shows are dropped. */
export function applyPreviews(
  state: EditorState,
  generation: number,
  entries: PreviewEntry[],
): EditorState {
  if (state.panel !== null && generation < state.panel.generation) {
    return state;
  }
  return { ...state, panel: { generation, entries } };
}

export function applyCursorPreview(
  state: EditorState,
  generation: number,
  preview: RenderedPreview | null,
): EditorState {
  if (state.cursorPane !== null && generation < state.cursorPane.generation) {
    return state;
  }
  return { ...state, cursorPane: { generation, preview } };
}

/** An empty member list means no popup at all. */
export function applyCompletion(
  state: EditorState,
  anchor: number,
  items: CompletionItem[],
): EditorState {
  if (items.length === 0) {
    return { ...state, popup: null };
  }
  return { ...state, popup: { anchor, items, selected: 0 } };
}

export function applyDiagnostics(
  state: EditorState,
  diagnostics: DiagnosticEntry[],
): EditorState {
  return { ...state, diagnostics };
}

export function moveSelection(state: EditorState, delta: number): EditorState {
  if (state.popup === null) return state;
  const n = state.popup.items.length;
  const selected = (state.popup.selected + delta + n) % n;
  return { ...state, popup: { ...state.popup, selected } };
}

/** True when the panel no longer matches the text on screen. */
export function panelIsStale(state: EditorState): boolean {
  if (state.dirty) return true;
  return state.panel !== null && state.panel.generation < state.generation;
}

/** Index of the command whose source span contains the cursor, or -1. */
export function activeCommandIndex(state: EditorState): number {
  if (state.panel === null) return -1;
  for (const entry of state.panel.entries) {
    if (entry.start <= state.cursor && state.cursor <= entry.end) {
      return entry.index;
    }
  }
  return -1;
}

const PLAIN_NAME = /^[A-Za-z_][A-Za-z0-9_]*$/;

/** Member names with spaces or punctuation get quoted on insertion. */
export function completionInsertText(item: CompletionItem): string {
  return PLAIN_NAME.test(item.name) ? item.name : `'${item.name}'`;
}

/**
 * Insert the selected member at the popup anchor, replacing whatever
 * partial name was typed after the dot, and close the popup.
 */
export function insertCompletion(state: EditorState): EditorState {
  if (state.popup === null) return state;
  const { anchor, items, selected } = state.popup;
  const inserted = completionInsertText(items[selected]);
  const text = state.text.slice(0, anchor) + inserted + state.text.slice(state.cursor);
  return {
    ...state,
    text,
    cursor: anchor + inserted.length,
    dirty: true,
    popup: null,
  };
}
