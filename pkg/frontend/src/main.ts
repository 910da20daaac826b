/** Browser entry point: connect to the service hosting this page. */

import { LiveClient } from "./client";
import type { SocketLike } from "./client";
import { EditorController } from "./controller";
import { mountEditor } from "./editor";

function browserSocket(url: string): SocketLike {
  const ws = new WebSocket(url);
  const like: SocketLike = {
    onopen: null,
    onmessage: null,
    onclose: null,
    onerror: null,
    send: (data) => ws.send(data),
    close: () => ws.close(),
  };
  ws.onopen = () => like.onopen?.();
  ws.onmessage = (ev) => like.onmessage?.({ data: ev.data });
  ws.onclose = () => like.onclose?.();
  ws.onerror = (ev) => like.onerror?.(ev);
  return like;
}

const client = new LiveClient(`ws://${location.host}/ws`, browserSocket);
const controller = new EditorController(client);
mountEditor(document, controller);
controller.start();
