/**
 * One websocket connection with automatic reconnect.
 *
 * The client knows nothing about editor state; it turns frames into parsed
 * envelopes and reports connection status. Sockets are injected through a
 * factory so tests and the browser can supply different implementations.
 */

import type { Envelope } from "./protocol";

export interface SocketLike {
  onopen: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: ((err: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientOptions {
  /** pause before dialing again after a drop */
  reconnectDelayMs?: number;
}

export class LiveClient {
  onFrame: ((msg: Envelope) => void) | null = null;
  onStatus: ((connected: boolean) => void) | null = null;

  private socket: SocketLike | null = null;
  private open = false;
  private stopped = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private readonly reconnectDelayMs: number;

  constructor(
    private readonly url: string,
    private readonly factory: SocketFactory,
    options: ClientOptions = {},
  ) {
    this.reconnectDelayMs = options.reconnectDelayMs ?? 1000;
  }

  get connected(): boolean {
    return this.open;
  }

  connect(): void {
    this.stopped = false;
    let sock: SocketLike;
    try {
      sock = this.factory(this.url);
    } catch {
      this.scheduleRetry();
      return;
    }
    this.socket = sock;
    sock.onopen = () => {
      this.open = true;
      this.onStatus?.(true);
    };
    sock.onmessage = (ev) => {
      let msg: Envelope;
      try {
        msg = JSON.parse(String(ev.data)) as Envelope;
      } catch {
        return; // not a protocol frame; drop it
      }
      this.onFrame?.(msg);
    };
    sock.onclose = () => {
      const wasOpen = this.open;
      this.open = false;
      this.socket = null;
      if (wasOpen) {
        this.onStatus?.(false);
      }
      this.scheduleRetry();
    };
    sock.onerror = () => {
      // the close event that follows drives the retry
    };
  }

  /** Returns false when there is no live connection to write to. */
  send(msg: Envelope): boolean {
    if (!this.open || this.socket === null) {
      return false;
    }
    this.socket.send(JSON.stringify(msg));
    return true;
  }

  close(): void {
    this.stopped = true;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    const sock = this.socket;
    this.socket = null;
    this.open = false;
    sock?.close();
  }

  private scheduleRetry(): void {
    if (this.stopped || this.retryTimer !== null) {
      return;
    }
    this.retryTimer = setTimeout(() => {
      this.retryTimer = null;
      if (!this.stopped) {
        this.connect();
      }
    }, this.reconnectDelayMs);
  }
}
