/**
 * End-to-end tests against the real websocket service.
 *
 * A fresh server process is spawned for the file; every scenario drives
 * the controller exactly the way the DOM layer does, over a real socket.
 */

import { spawn } from "node:child_process";
import type { ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { LiveClient } from "../src/client";
import type { SocketFactory, SocketLike } from "../src/client";
import { EditorController } from "../src/controller";
import type { Envelope } from "../src/protocol";
import { activeCommandIndex, panelIsStale } from "../src/state";

const PORT = 20000 + Math.floor(Math.random() * 20000);
const WS_URL = `ws://127.0.0.1:${PORT}/ws`;
const PROGRAM = "let x = 15\ndata.skip(10).take(x)";

let server: ChildProcess;
let serverErr = "";

function nodeSocket(url: string): SocketLike {
  const ws = new WebSocket(url);
  const like: SocketLike = {
    onopen: null,
    onmessage: null,
    onclose: null,
    onerror: null,
    send: (data) => ws.send(data),
    close: () => ws.close(),
  };
  ws.on("open", () => like.onopen?.());
  ws.on("message", (data) => like.onmessage?.({ data: String(data) }));
  ws.on("close", () => like.onclose?.());
  ws.on("error", (err) => like.onerror?.(err));
  return like;
}

async function waitUntil(cond: () => boolean, timeoutMs = 10000): Promise<void> {
  const start = Date.now();
  while (!cond()) {
    if (Date.now() - start > timeoutMs) {
      throw new Error(`timed out after ${timeoutMs}ms`);
    }
    await new Promise((r) => setTimeout(r, 10));
  }
}

interface Rig {
  controller: EditorController;
  sent: Envelope[];
}

async function openEditor(debounceMs = 150): Promise<Rig> {
  const sent: Envelope[] = [];
  const factory: SocketFactory = (url) => {
    const sock = nodeSocket(url);
    const raw = sock.send.bind(sock);
    sock.send = (data) => {
      sent.push(JSON.parse(data) as Envelope);
      raw(data);
    };
    return sock;
  };
  const client = new LiveClient(WS_URL, factory);
  const controller = new EditorController(client, { debounceMs });
  controller.start();
  await waitUntil(() => controller.state.session !== null);
  return { controller, sent };
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "dexp.cli", "serve", "--port", String(PORT)]);
  server.stderr?.on("data", (chunk) => {
    serverErr += String(chunk);
  });
  const deadline = Date.now() + 20000;
  for (;;) {
    if (server.exitCode !== null) {
      throw new Error(`server died during startup:\n${serverErr}`);
    }
    try {
      const res = await fetch(`http://127.0.0.1:${PORT}/health`);
      if (res.ok) break;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      throw new Error(`server never became healthy:\n${serverErr}`);
    }
    await new Promise((r) => setTimeout(r, 100));
  }
});

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("live editing loop", () => {
  it("types a program, sees previews fast, and an edit redoes only changed work", async () => {
    const { controller, sent } = await openEditor();
    try {
      for (let i = 1; i <= PROGRAM.length; i++) {
        controller.setText(PROGRAM.slice(0, i), i);
      }
      const typed = Date.now();
      await waitUntil(() => {
        const p = controller.state.panel;
        return (
          p !== null &&
          p.generation === 1 &&
          p.entries.length === 2 &&
          p.entries.every((e) => e.state === "evaluated")
        );
      });
      // one debounce interval plus a generous local round trip
      expect(Date.now() - typed).toBeLessThan(150 + 2500);

      // the whole burst collapsed into a single full-text edit frame
      expect(sent.filter((m) => m.kind === "edit")).toHaveLength(1);

      const entries = controller.state.panel!.entries;
      expect(entries[0].text).toBe("15");
      expect(entries[1].kind).toBe("list");
      expect(entries[1].length).toBe(15);
      expect(panelIsStale(controller.state)).toBe(false);
      // the cursor sits in the second command, so that is the active one
      expect(activeCommandIndex(controller.state)).toBe(1);

      const before = (await controller.requestStats()).counts;
      controller.setText(PROGRAM.replace("15", "10"), PROGRAM.length);
      await waitUntil(() => {
        const p = controller.state.panel;
        return p !== null && p.generation === 2 && p.entries[1]?.length === 10;
      });
      expect(panelIsStale(controller.state)).toBe(false);
      const after = (await controller.requestStats()).counts;

      // the unchanged skip stage was answered from cache; only take reran
      expect((after["skip"] ?? 0) - (before["skip"] ?? 0)).toBe(0);
      expect((after["take"] ?? 0) - (before["take"] ?? 0)).toBe(1);
    } finally {
      controller.stop();
    }
  });

  it("keeps the old previews dimmed while the text does not parse", async () => {
    const { controller } = await openEditor();
    try {
      controller.setText(PROGRAM, PROGRAM.length);
      await waitUntil(() => controller.state.panel?.generation === 1);
      controller.setText("let = ", 6);
      await waitUntil(() => controller.state.diagnostics.some((d) => d.source === "parse"));
      // previews still come from the last binding that bound anything
      expect(controller.state.panel?.generation).toBe(1);
      expect(controller.state.panel?.entries[1].length).toBe(15);
      expect(panelIsStale(controller.state)).toBe(true);
    } finally {
      controller.stop();
    }
  });
});

describe("member completion", () => {
  it("a dot after a table expression lists exactly its members with signatures", async () => {
    const { controller } = await openEditor();
    try {
      const base = 'table.sortByDesc("Gold")';
      controller.setText(base, base.length);
      controller.setText(`${base}.`, base.length + 1);
      controller.dotTyped(base.length + 1);
      await waitUntil(() => controller.state.popup !== null);

      const items = controller.state.popup!.items;
      expect(items.map((i) => i.name)).toEqual([
        "countDistinct",
        "filterEq",
        "groupBy",
        "skip",
        "sortByDesc",
        "sum",
        "take",
      ]);
      expect(items.map((i) => i.text)).toEqual([
        "countDistinct(str) -> table",
        "filterEq(str, str) -> table",
        "groupBy(str) -> table",
        "skip(num) -> table",
        "sortByDesc(str) -> table",
        "sum(str) -> table",
        "take(num) -> table",
      ]);

      controller.chooseCompletion(items.length - 1);
      expect(controller.state.text).toBe(`${base}.take`);
      expect(controller.state.popup).toBeNull();
    } finally {
      controller.stop();
    }
  });

  it("a dot after a number offers nothing", async () => {
    const { controller } = await openEditor();
    try {
      controller.setText("42.", 3);
      controller.dotTyped(3);
      // stats ride the same ordered socket, so this fences the completion
      await controller.requestStats();
      expect(controller.state.popup).toBeNull();
    } finally {
      controller.stop();
    }
  });
});

describe("connection loss", () => {
  // keep this last: it takes the shared server down
  it("shows the banner and still accepts keystrokes", async () => {
    const { controller } = await openEditor();
    try {
      controller.setText("data", 4);
      await waitUntil(() => controller.state.panel !== null);
      server.kill("SIGTERM");
      await waitUntil(() => !controller.state.connected);
      controller.setText("data.take(2)", 12);
      expect(controller.state.text).toBe("data.take(2)");
      expect(controller.state.dirty).toBe(true);
      expect(panelIsStale(controller.state)).toBe(true);
    } finally {
      controller.stop();
    }
  });
});
