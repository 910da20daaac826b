import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { LiveClient } from "../src/client";
import { socketRig } from "./fakes";

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("LiveClient", () => {
  it("cannot send before the socket opens", () => {
    const { sockets, factory } = socketRig();
    const client = new LiveClient("ws://test", factory);
    client.connect();
    expect(client.send({ kind: "open", session: null, generation: null, payload: {} })).toBe(false);
    sockets[0].accept();
    expect(client.send({ kind: "open", session: null, generation: null, payload: {} })).toBe(true);
    expect(sockets[0].sent).toHaveLength(1);
  });

  it("reports status changes and parses frames", () => {
    const { sockets, factory } = socketRig();
    const client = new LiveClient("ws://test", factory);
    const status: boolean[] = [];
    const kinds: string[] = [];
    client.onStatus = (up) => status.push(up);
    client.onFrame = (msg) => kinds.push(msg.kind);
    client.connect();
    sockets[0].accept();
    sockets[0].receive({ kind: "open", session: "s1", generation: 0, payload: {} });
    sockets[0].drop();
    expect(status).toEqual([true, false]);
    expect(kinds).toEqual(["open"]);
  });

  it("ignores frames that are not protocol JSON", () => {
    const { sockets, factory } = socketRig();
    const client = new LiveClient("ws://test", factory);
    const kinds: string[] = [];
    client.onFrame = (msg) => kinds.push(msg.kind);
    client.connect();
    sockets[0].accept();
    expect(() => sockets[0].receiveRaw("not json at all {")).not.toThrow();
    expect(kinds).toEqual([]);
  });

  it("redials after a drop, but not after close()", () => {
    const { sockets, factory } = socketRig();
    const client = new LiveClient("ws://test", factory, { reconnectDelayMs: 500 });
    client.connect();
    sockets[0].accept();
    sockets[0].drop();
    expect(sockets).toHaveLength(1);
    vi.advanceTimersByTime(500);
    expect(sockets).toHaveLength(2);
    sockets[1].accept();
    client.close();
    vi.advanceTimersByTime(5000);
    expect(sockets).toHaveLength(2);
    expect(sockets[1].closedByClient).toBe(true);
  });

  it("keeps retrying when the dial itself fails", () => {
    let attempts = 0;
    const { sockets, factory } = socketRig();
    const flaky = (url: string) => {
      attempts += 1;
      if (attempts === 1) throw new Error("refused");
      return factory(url);
    };
    const client = new LiveClient("ws://test", flaky, { reconnectDelayMs: 200 });
    client.connect();
    expect(sockets).toHaveLength(0);
    vi.advanceTimersByTime(200);
    expect(sockets).toHaveLength(1);
    client.close();
  });
});
