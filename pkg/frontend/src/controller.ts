/**
 * Orchestrates the editor: keystrokes in, protocol frames out, one state
 * object all the way through.
 *
 * Keystrokes are debounced into full-text edit frames. Each acknowledged
 * edit triggers requests for command previews, the cursor preview, and
 * diagnostics at the new generation. Responses pass through a generation
 * filter in the state module, so late frames can never overwrite newer
 * ones. All evaluation happens on the other end of the socket.
 */

import type { LiveClient } from "./client";
import {
  completeRequest,
  diagnosticsRequest,
  editRequest,
  openRequest,
  previewAtRequest,
  previewsRequest,
  statsRequest,
} from "./protocol";
import type {
  CompletePayload,
  DiagnosticsPayload,
  EditAckPayload,
  Envelope,
  PreviewAtPayload,
  PreviewsPayload,
  StatsPayload,
} from "./protocol";
import {
  applyCompletion,
  applyCursorPreview,
  applyDiagnostics,
  applyPreviews,
  initialState,
  insertCompletion,
  moveSelection,
  withConnection,
  withCursor,
  withEditSent,
  withSession,
  withText,
} from "./state";
import type { EditorState } from "./state";

export class Debouncer {
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(private readonly delayMs: number) {}

  get pending(): boolean {
    return this.timer !== null;
  }

  schedule(fn: () => void): void {
    this.cancel();
    this.timer = setTimeout(() => {
      this.timer = null;
      fn();
    }, this.delayMs);
  }

  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }
}

export interface ControllerOptions {
  /** keystroke settle time before an edit frame goes out */
  debounceMs?: number;
  onChange?: (state: EditorState) => void;
}

export class EditorController {
  state: EditorState;
  lastError: string | null = null;
  onChange: ((state: EditorState) => void) | null;

  private readonly debounce: Debouncer;
  private completionAnchor = 0;
  private statsWaiters: Array<(s: StatsPayload) => void> = [];

  constructor(private readonly client: LiveClient, options: ControllerOptions = {}) {
    this.state = initialState();
    this.debounce = new Debouncer(options.debounceMs ?? 150);
    this.onChange = options.onChange ?? null;
    client.onFrame = (msg) => this.handleFrame(msg);
    client.onStatus = (up) => this.handleStatus(up);
  }

  start(): void {
    this.client.connect();
  }

  stop(): void {
    this.debounce.cancel();
    this.client.close();
  }

  /** The document changed; previews will refresh once typing settles. */
  setText(text: string, cursor: number): void {
    this.state = withText(this.state, text, cursor);
    this.emit();
    this.debounce.schedule(() => this.flushEdit());
  }

  /** Cursor moved without a text change; refresh the cursor pane. */
  moveCursor(cursor: number): void {
    this.state = withCursor(this.state, cursor);
    this.emit();
    const { session, generation, dirty } = this.state;
    if (session !== null && !dirty) {
      this.client.send(previewAtRequest(session, generation, cursor));
    }
  }

  /** A dot was typed at cursor; ask for members of the expression before it. */
  dotTyped(cursor: number): void {
    this.debounce.cancel();
    this.flushEdit();
    const { session, generation } = this.state;
    if (session === null) {
      return;
    }
    this.completionAnchor = cursor;
    this.client.send(completeRequest(session, generation, cursor));
  }

  /** Accept the highlighted completion item. */
  selectCompletion(): void {
    if (this.state.popup === null) {
      return;
    }
    this.state = insertCompletion(this.state);
    this.emit();
    this.debounce.schedule(() => this.flushEdit());
  }

  /** Accept a specific completion item by its position in the popup. */
  chooseCompletion(index: number): void {
    if (this.state.popup === null) {
      return;
    }
    this.state = { ...this.state, popup: { ...this.state.popup, selected: index } };
    this.selectCompletion();
  }

  movePopupSelection(delta: number): void {
    this.state = moveSelection(this.state, delta);
    this.emit();
  }

  dismissPopup(): void {
    if (this.state.popup === null) {
      return;
    }
    this.state = { ...this.state, popup: null };
    this.emit();
  }

  /** Resolves with the service counters once all earlier frames settled. */
  requestStats(): Promise<StatsPayload> {
    return new Promise((resolve, reject) => {
      const { session, generation } = this.state;
      if (session === null || !this.client.send(statsRequest(session, generation))) {
        reject(new Error("not connected"));
        return;
      }
      this.statsWaiters.push(resolve);
    });
  }

  private flushEdit(): void {
    if (!this.state.dirty) {
      return;
    }
    const { session } = this.state;
    if (session === null || !this.client.connected) {
      return; // still dirty; the open handler resyncs after reconnect
    }
    this.state = withEditSent(this.state);
    this.client.send(editRequest(session, this.state.generation, this.state.text));
    this.emit();
  }

  private handleStatus(up: boolean): void {
    this.state = withConnection(this.state, up);
    this.emit();
    if (up) {
      this.client.send(openRequest());
    }
  }

  private handleFrame(msg: Envelope): void {
    switch (msg.kind) {
      case "open": {
        this.state = withSession(this.state, msg.session ?? "");
        if (this.state.text !== "") {
          // replay what was typed before the session existed
          this.state = { ...this.state, dirty: true };
          this.emit();
          this.flushEdit();
        } else {
          this.emit();
        }
        break;
      }
      case "edit": {
        void (msg.payload as unknown as EditAckPayload);
        const gen = msg.generation ?? 0;
        const { session } = this.state;
        // only chase the newest acknowledged generation
        if (session !== null && gen === this.state.generation) {
          this.client.send(previewsRequest(session, gen));
          this.client.send(previewAtRequest(session, gen, this.state.cursor));
          this.client.send(diagnosticsRequest(session, gen));
        }
        break;
      }
      case "previews": {
        const payload = msg.payload as unknown as PreviewsPayload;
        if (payload.superseded || payload.previews === undefined) {
          break;
        }
        // previews are labeled with the generation they were computed for;
        // after a broken edit that is older than the text, so the panel dims
        const computedFor = payload.boundGeneration ?? msg.generation ?? 0;
        this.state = applyPreviews(this.state, computedFor, payload.previews);
        this.emit();
        break;
      }
      case "previewAt": {
        const payload = msg.payload as unknown as PreviewAtPayload;
        if (payload.superseded) {
          break;
        }
        this.state = applyCursorPreview(
          this.state,
          msg.generation ?? 0,
          payload.preview ?? null,
        );
        this.emit();
        break;
      }
      case "complete": {
        const payload = msg.payload as unknown as CompletePayload;
        this.state = applyCompletion(this.state, this.completionAnchor, payload.items);
        this.emit();
        break;
      }
      case "diagnostics": {
        const payload = msg.payload as unknown as DiagnosticsPayload;
        this.state = applyDiagnostics(this.state, payload.diagnostics);
        this.emit();
        break;
      }
      case "stats": {
        const waiter = this.statsWaiters.shift();
        waiter?.(msg.payload as unknown as StatsPayload);
        break;
      }
      case "error": {
        this.lastError = String((msg.payload as { message?: unknown }).message ?? "");
        break;
      }
      default:
        break;
    }
  }

  private emit(): void {
    this.onChange?.(this.state);
  }
}
