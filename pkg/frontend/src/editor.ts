/**
 * DOM wiring: a textarea on the left, live panes on the right.
 *
 * This layer only forwards events to the controller and paints whatever
 * state comes back. All decisions (debouncing, staleness, generation
 * filtering) live in the controller and state modules so they stay
 * testable without a browser.
 */

import type { EditorController } from "./controller";
import { diagnosticLine, previewText, tableLines, valueText } from "./render";
import { activeCommandIndex, panelIsStale } from "./state";
import type { EditorState } from "./state";
import type { PreviewEntry } from "./protocol";

interface Panes {
  input: HTMLTextAreaElement;
  previews: HTMLElement;
  cursorPane: HTMLElement;
  popup: HTMLElement;
  banner: HTMLElement;
  diagnostics: HTMLElement;
}

function grabPanes(doc: Document): Panes {
  const byId = (id: string) => {
    const el = doc.getElementById(id);
    if (el === null) throw new Error(`missing #${id}`);
    return el;
  };
  return {
    input: byId("input") as HTMLTextAreaElement,
    previews: byId("previews"),
    cursorPane: byId("cursor-preview"),
    popup: byId("popup"),
    banner: byId("banner"),
    diagnostics: byId("diagnostics"),
  };
}

function entryNode(doc: Document, entry: PreviewEntry, active: boolean): HTMLElement {
  const div = doc.createElement("div");
  div.className = active ? "preview-entry active" : "preview-entry";
  const label = doc.createElement("span");
  label.className = "cmd-label";
  label.textContent = `#${entry.index}`;
  div.appendChild(label);
  if (entry.state === "evaluated" && entry.kind === "image" && entry.png) {
    const img = doc.createElement("img");
    img.src = `data:image/png;base64,${entry.png}`;
    img.alt = valueText(entry);
    div.appendChild(img);
  } else {
    const pre = doc.createElement("pre");
    pre.textContent =
      entry.state === "evaluated" && entry.kind === "table"
        ? tableLines(entry).join("\n")
        : previewText(entry);
    div.appendChild(pre);
  }
  return div;
}

export function mountEditor(doc: Document, controller: EditorController): void {
  const panes = grabPanes(doc);
  let lastText = panes.input.value;

  const syncInput = () => {
    panes.input.value = controller.state.text;
    panes.input.selectionStart = controller.state.cursor;
    panes.input.selectionEnd = controller.state.cursor;
    lastText = controller.state.text;
    panes.input.focus();
  };

  panes.input.addEventListener("input", () => {
    const text = panes.input.value;
    const cursor = panes.input.selectionStart ?? text.length;
    const dotTyped = text.length === lastText.length + 1 && text[cursor - 1] === ".";
    lastText = text;
    controller.setText(text, cursor);
    if (dotTyped) {
      controller.dotTyped(cursor);
    }
  });

  const cursorMoved = () => {
    const cursor = panes.input.selectionStart ?? 0;
    if (panes.input.value === controller.state.text && cursor !== controller.state.cursor) {
      controller.moveCursor(cursor);
    }
  };
  panes.input.addEventListener("keyup", cursorMoved);
  panes.input.addEventListener("click", cursorMoved);

  panes.input.addEventListener("keydown", (ev) => {
    if (controller.state.popup === null) return;
    if (ev.key === "Enter" || ev.key === "Tab") {
      ev.preventDefault();
      controller.selectCompletion();
      syncInput();
    } else if (ev.key === "Escape") {
      controller.dismissPopup();
    } else if (ev.key === "ArrowDown") {
      ev.preventDefault();
      controller.movePopupSelection(1);
    } else if (ev.key === "ArrowUp") {
      ev.preventDefault();
      controller.movePopupSelection(-1);
    }
  });

  const render = (state: EditorState) => {
    panes.banner.hidden = state.connected;

    panes.previews.classList.toggle("stale", panelIsStale(state));
    panes.previews.replaceChildren();
    const active = activeCommandIndex(state);
    for (const entry of state.panel?.entries ?? []) {
      panes.previews.appendChild(entryNode(doc, entry, entry.index === active));
    }

    panes.cursorPane.textContent =
      state.cursorPane === null
        ? "move the cursor into an expression"
        : previewText(state.cursorPane.preview);

    panes.popup.hidden = state.popup === null;
    panes.popup.replaceChildren();
    if (state.popup !== null) {
      const list = doc.createElement("ul");
      state.popup.items.forEach((item, i) => {
        const li = doc.createElement("li");
        li.className = i === state.popup?.selected ? "selected" : "";
        li.textContent = item.text;
        li.addEventListener("mousedown", (ev) => {
          ev.preventDefault();
          controller.chooseCompletion(i);
          syncInput();
        });
        list.appendChild(li);
      });
      panes.popup.appendChild(list);
    }

    panes.diagnostics.replaceChildren();
    for (const d of state.diagnostics) {
      const li = doc.createElement("div");
      li.className = `diag ${d.severity}`;
      li.textContent = diagnosticLine(d);
      panes.diagnostics.appendChild(li);
    }
  };

  controller.onChange = render;
  render(controller.state);
}
