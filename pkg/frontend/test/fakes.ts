/** In-memory socket doubles for driving the client without a network. */

import type { SocketLike } from "../src/client";
import type { Envelope } from "../src/protocol";

export class FakeSocket implements SocketLike {
  onopen: (() => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: ((err: unknown) => void) | null = null;

  sent: Envelope[] = [];
  closedByClient = false;

  send(data: string): void {
    this.sent.push(JSON.parse(data) as Envelope);
  }

  close(): void {
    this.closedByClient = true;
    this.onclose?.();
  }

  // test-side drivers

  accept(): void {
    this.onopen?.();
  }

  receive(msg: Envelope): void {
    this.onmessage?.({ data: JSON.stringify(msg) });
  }

  receiveRaw(data: unknown): void {
    this.onmessage?.({ data });
  }

  drop(): void {
    this.onclose?.();
  }

  ofKind(kind: string): Envelope[] {
    return this.sent.filter((m) => m.kind === kind);
  }
}

export function socketRig(): { sockets: FakeSocket[]; factory: (url: string) => FakeSocket } {
  const sockets: FakeSocket[] = [];
  return {
    sockets,
    factory: () => {
      const sock = new FakeSocket();
      sockets.push(sock);
      return sock;
    },
  };
}
