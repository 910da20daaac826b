"""Edit sessions and the JSON wire protocol.

A LiveSession owns one program text plus every session-lived cache: the
node cache, the accumulated dependency graph, the preview cache and the
type cache.  Each edit re-parses the full text, binds it against the
node cache and bumps the generation counter; previews, completions and
diagnostics are then answered on demand.

LiveService speaks the protocol: dict in, dict out, every message shaped
{kind, session, generation, payload}.  Requests that quote an older
generation than the session's current one are answered with a
superseded marker instead of stale data.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional

from .depgraph import DepGraph, NodeCache, rebind
from .extlibs import CountingLib, standard_library
from .objects import ExternalLibrary, Obj, is_bottom
from .preview import (Budget, Evaluated, PreviewCache, PreviewInterrupted,
                      eval_preview, preview_at_cursor, preview_text,
                      render_preview)
from .typecheck import TypeCache, check_program, completions


class LiveSession:
    """One editing session: text, caches, generation counter."""

    def __init__(self, session_id: str, lib: Optional[ExternalLibrary] = None,
                 asset_dir=None, preview_time_limit: Optional[float] = None):
        self.id = session_id
        inner = lib if lib is not None else standard_library(asset_dir)
        self.lib = inner if isinstance(inner, CountingLib) else CountingLib(inner)
        self.roots = list(self.lib.root_bindings)
        self.node_cache = NodeCache()
        self.graph = DepGraph()  # union of every generation's graph
        self.preview_cache = PreviewCache()
        self.type_cache = TypeCache()
        self.preview_time_limit = preview_time_limit
        self.generation = 0
        self.text = ""
        self.binding, self.node_cache = rebind(self.node_cache, "", self.roots)
        self.graph.merge(self.binding.graph)
        # the newest binding that actually bound something; command
        # previews are served from it so a half-typed broken edit does
        # not blank the preview panel
        self.good_binding = self.binding
        self.good_generation = 0

    def _budget(self) -> Optional[Budget]:
        if self.preview_time_limit is None:
            return None
        return Budget(time_limit=self.preview_time_limit)

    def edit(self, text: str) -> List[dict]:
        self.generation += 1
        self.text = text
        self.binding, self.node_cache = rebind(self.node_cache, text, self.roots)
        self.graph.merge(self.binding.graph)
        program = self.binding.program
        if program.commands or not program.errors:
            self.good_binding = self.binding
            self.good_generation = self.generation
        return [{"start": e.span.start, "end": e.span.end,
                 "message": e.message} for e in program.errors]

    def command_previews(self) -> List[dict]:
        """Rendered previews of the last binding that bound anything."""

        binding = self.good_binding
        budget = self._budget()
        out = []
        for index, vertex in enumerate(binding.command_vertices):
            cmd = binding.program.commands[index]
            entry = {"index": index,
                     "start": cmd.token_span.start,
                     "end": cmd.token_span.end}
            try:
                p = eval_preview(vertex, self.graph, self.preview_cache,
                                 self.lib, budget)
            except PreviewInterrupted:
                entry["state"] = "pending"
            else:
                entry.update(render_preview(p))
                entry["text"] = preview_text(p)
            out.append(entry)
        return out

    def preview_at(self, offset: int) -> Optional[dict]:
        try:
            p = preview_at_cursor(self.binding, offset, self.graph,
                                  self.preview_cache, self.lib, self._budget())
        except PreviewInterrupted:
            return {"state": "pending"}
        if p is None:
            return None
        rendered = render_preview(p)
        rendered["text"] = preview_text(p)
        return rendered

    def complete(self, offset: int) -> List[dict]:
        items = completions(self.binding.program, self.binding, offset,
                            self.lib, self.node_cache, self.type_cache)
        return [{"name": it.name, "params": list(it.params),
                 "result": it.result, "text": it.text} for it in items]

    def diagnostics(self) -> List[dict]:
        out = [{"start": e.span.start, "end": e.span.end, "severity": "error",
                "message": e.message, "source": "parse"}
               for e in self.binding.program.errors]
        _, type_diags = check_program(self.binding, self.graph, self.lib,
                                      self.type_cache)
        out.extend({"start": d.span.start, "end": d.span.end,
                    "severity": d.severity, "message": d.message,
                    "source": "type"} for d in type_diags)
        return out

    def stats(self) -> dict:
        return {"counts": self.lib.snapshot(),
                "generation": self.generation,
                "cached_previews": len(self.preview_cache),
                "cached_nodes": len(self.node_cache.entries)}

    def command_values(self) -> List[dict]:
        """(span, text, error flag) per command; the CLI's run output."""

        binding = self.binding
        rows = []
        for index, vertex in enumerate(binding.command_vertices):
            p = eval_preview(vertex, self.graph, self.preview_cache, self.lib)
            is_err = (isinstance(p, Evaluated) and isinstance(p.value, Obj)
                      and is_bottom(p.value))
            rows.append({"index": index, "text": preview_text(p),
                         "error": is_err})
        return rows


class LiveService:
    """Protocol handler: owns sessions, maps request dicts to responses."""

    def __init__(self, asset_dir=None, preview_time_limit=None):
        self.asset_dir = asset_dir
        self.preview_time_limit = preview_time_limit
        self.sessions: Dict[str, LiveSession] = {}
        self._ids = itertools.count(1)

    def open_session(self) -> LiveSession:
        session = LiveSession(f"s{next(self._ids)}", asset_dir=self.asset_dir,
                              preview_time_limit=self.preview_time_limit)
        self.sessions[session.id] = session
        return session

    def handle(self, msg: dict) -> dict:
        kind = msg.get("kind")
        if kind == "open":
            session = self.open_session()
            return {"kind": "open", "session": session.id, "generation": 0,
                    "payload": {"roots": sorted(session.roots)}}

        session = self.sessions.get(msg.get("session", ""))
        if session is None:
            return {"kind": "error", "session": msg.get("session"),
                    "generation": None,
                    "payload": {"message": "unknown session"}}

        def reply(payload: dict, generation: Optional[int] = None) -> dict:
            gen = session.generation if generation is None else generation
            return {"kind": kind, "session": session.id,
                    "generation": gen, "payload": payload}

        requested = msg.get("generation")
        if kind in ("previews", "previewAt") and requested is not None \
                and requested < session.generation:
            return reply({"superseded": True}, generation=requested)

        payload = msg.get("payload") or {}
        if kind == "edit":
            errors = session.edit(payload.get("text", ""))
            return reply({"errors": errors,
                          "boundCommands": len(session.binding.command_vertices)})
        if kind == "previews":
            return reply({"previews": session.command_previews(),
                          "boundGeneration": session.good_generation})
        if kind == "previewAt":
            return reply({"preview": session.preview_at(int(payload.get("offset", 0)))})
        if kind == "complete":
            return reply({"items": session.complete(int(payload.get("offset", 0)))})
        if kind == "diagnostics":
            return reply({"diagnostics": session.diagnostics()})
        if kind == "stats":
            return reply(session.stats())
        if kind == "eval":
            scratch = LiveSession("eval", asset_dir=self.asset_dir)
            scratch.edit(payload.get("text", ""))
            return reply({"previews": scratch.command_previews()})
        return {"kind": "error", "session": session.id,
                "generation": session.generation,
                "payload": {"message": f"unknown request kind: {kind!r}"}}
