"""Demand-driven preview evaluation over the dependency graph.

A preview is either Evaluated (a finished value) or Delayed (an expression
that still mentions unapplied lambda parameters, together with exactly the
names it needs).  Evaluating a vertex consults the preview cache first, so
work done for one edit is never repeated for the next one as long as the
binder handed out the same vertex.

Rules, by vertex kind:

* a value vertex previews as itself;
* a variable vertex previews as the library root it names, as an
  unbound-variable error if the name is bound nowhere, and otherwise as a
  delayed reference to the lambda parameter it stands for;
* a call vertex with all dependencies Evaluated performs the library call;
  if any dependency is Delayed the call is re-assembled as a delayed
  expression instead (finished dependencies are spliced back in as
  literals, which is the "lift" step);
* a lambda vertex whose body finished, or needs only its own parameter,
  previews as a closure; a body needing outer names makes the lambda
  itself Delayed.

Cache entries are only written after a preview is complete, so abandoning
an evaluation midway (budget or cancellation) can never leave a partial
entry behind, and an entry is never replaced by a different preview.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from . import refeval
from .depgraph import (Binding, DepGraph, FunVertex, MemVertex, ValVertex,
                       VarVertex, Vertex)
from .objects import (Closure, ExternalLibrary, Obj, bottom, is_bottom,
                      serialize_value, unbound_variable)
from .syntax import (Expr, Lambda, MemberAccess, Value, Var, copy_expr,
                     expr_to_text, node_at_cursor, structurally_equal)


@dataclass(eq=False)
class Evaluated:
    value: Union[Obj, Closure]


@dataclass(eq=False)
class Delayed:
    expr: Expr
    required: Tuple[str, ...]  # free names of expr, first-occurrence order


Preview = Union[Evaluated, Delayed]


def previews_equal(a: Preview, b: Preview) -> bool:
    if isinstance(a, Evaluated) and isinstance(b, Evaluated):
        if isinstance(a.value, Closure) and isinstance(b.value, Closure):
            return (a.value.param == b.value.param
                    and structurally_equal(a.value.body, b.value.body))
        if isinstance(a.value, Obj) and isinstance(b.value, Obj):
            return a.value == b.value
        return False
    if isinstance(a, Delayed) and isinstance(b, Delayed):
        return a.required == b.required and structurally_equal(a.expr, b.expr)
    return False


def serialize_preview(p: Preview):
    if isinstance(p, Evaluated):
        return {"evaluated": serialize_value(p.value)}
    return {"delayed": [expr_to_text(p.expr), list(p.required)]}


class PreviewInterrupted(Exception):
    """The evaluation budget ran out; nothing partial was cached."""


class Budget:
    """Cooperative limit checked between rules."""

    def __init__(self, max_steps: Optional[int] = None,
                 time_limit: Optional[float] = None,
                 cancelled: Optional[Callable[[], bool]] = None):
        self.max_steps = max_steps
        self.deadline = None if time_limit is None else time.monotonic() + time_limit
        self.cancelled = cancelled
        self.steps = 0

    def check(self):
        self.steps += 1
        if self.max_steps is not None and self.steps > self.max_steps:
            raise PreviewInterrupted("preview step budget exhausted")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise PreviewInterrupted("preview time budget exhausted")
        if self.cancelled is not None and self.cancelled():
            raise PreviewInterrupted("preview cancelled")


class PreviewCache:
    """Vertex to Preview; grows only, entries are never rewritten."""

    def __init__(self):
        self.entries: Dict[Vertex, Preview] = {}

    def get(self, v: Vertex) -> Optional[Preview]:
        return self.entries.get(v)

    def store(self, v: Vertex, p: Preview) -> None:
        existing = self.entries.get(v)
        if existing is not None:
            if not previews_equal(existing, p):
                raise AssertionError(f"preview cache overwrite for {v!r}")
            return
        self.entries[v] = p

    def __len__(self):
        return len(self.entries)


def value_to_expr(value: Union[Obj, Closure]) -> Expr:
    if isinstance(value, Closure):
        return Lambda(value.param, copy_expr(value.body))
    return Value(value)


def lift(p: Preview) -> Delayed:
    """View any preview as a delayed expression; finished values become
    literals needing nothing."""

    if isinstance(p, Delayed):
        return p
    return Delayed(value_to_expr(p.value), ())


def eval_preview(vertex: Vertex, graph: DepGraph, cache: PreviewCache,
                 lib: ExternalLibrary, budget: Optional[Budget] = None) -> Preview:
    """Preview of one vertex, caching every completed intermediate."""

    if vertex not in graph.vertices:
        raise ValueError(f"vertex {vertex!r} is not part of the graph")
    return _eval(vertex, graph, cache, lib, budget)


def _eval(vertex, graph, cache, lib, budget) -> Preview:
    hit = cache.get(vertex)
    if hit is not None:
        return hit
    if budget is not None:
        budget.check()

    if isinstance(vertex, ValVertex):
        result: Preview = Evaluated(vertex.obj)

    elif isinstance(vertex, VarVertex):
        if vertex.unresolved:
            result = Evaluated(unbound_variable(vertex.name))
        elif vertex.name in lib.root_bindings:
            result = Evaluated(lib.root_bindings[vertex.name])
        else:
            result = Delayed(Var(vertex.name), (vertex.name,))

    elif isinstance(vertex, MemVertex):
        deps = graph.args_of(vertex)
        if not deps:
            raise ValueError(f"call vertex {vertex!r} has no instance edge")
        previews = [_eval(d, graph, cache, lib, budget) for d in deps]
        if all(isinstance(p, Evaluated) for p in previews):
            receiver = previews[0].value
            if isinstance(receiver, Closure):
                value = bottom("a function value has no members")
            else:
                apply = lambda c, a: refeval.apply_closure(c, a, lib)
                value = lib.eval_member(receiver, vertex.member,
                                        [p.value for p in previews[1:]], apply)
            result = Evaluated(value)
        else:
            parts = [lift(p) for p in previews]
            expr = MemberAccess(parts[0].expr, vertex.member,
                                [d.expr for d in parts[1:]])
            required: List[str] = []
            for part in parts:
                for name in part.required:
                    if name not in required:
                        required.append(name)
            result = Delayed(expr, tuple(required))

    elif isinstance(vertex, FunVertex):
        body_vertex = graph.body_of(vertex)
        if body_vertex is None:
            raise ValueError(f"lambda vertex {vertex!r} has no body edge")
        body = _eval(body_vertex, graph, cache, lib, budget)
        if isinstance(body, Evaluated):
            result = Evaluated(Closure(vertex.param, value_to_expr(body.value)))
        elif body.required == (vertex.param,):
            result = Evaluated(Closure(vertex.param, body.expr))
        else:
            rest = tuple(n for n in body.required if n != vertex.param)
            result = Delayed(Lambda(vertex.param, body.expr), rest)

    else:
        raise TypeError(f"not a graph vertex: {vertex!r}")

    cache.store(vertex, result)
    return result


def command_previews(binding: Binding, graph: DepGraph, cache: PreviewCache,
                     lib: ExternalLibrary,
                     budget: Optional[Budget] = None) -> List[Tuple[int, Preview]]:
    """(command index, preview) for every bound command, in order.  The
    graph may be any graph containing the binding's vertices (a session
    passes its accumulated one)."""

    return [(i, eval_preview(v, graph, cache, lib, budget))
            for i, v in enumerate(binding.command_vertices)]


def preview_at_cursor(binding: Binding, offset: int, graph: DepGraph,
                      cache: PreviewCache, lib: ExternalLibrary,
                      budget: Optional[Budget] = None) -> Optional[Preview]:
    """Preview of the innermost expression at the cursor, if any."""

    node = node_at_cursor(binding.program, offset)
    if node is None:
        return None
    vertex = binding.expr_vertex.get(node)
    if vertex is None:
        return None
    return eval_preview(vertex, graph, cache, lib, budget)


# ---------------------------------------------------------------------------
# Display forms

_LIST_PREFIX = 20
_TABLE_ROWS = 10


def _table_payload(obj: Obj):
    if obj.tag == "grouped":
        from .extlibs.tablelib import materialize

        return materialize(obj.payload)
    return obj.payload


def value_text(value: Union[Obj, Closure]) -> str:
    """Compact one-value rendering used by the command line."""

    if isinstance(value, Closure):
        return expr_to_text(Lambda(value.param, value.body))
    if value.tag == "num":
        return repr(value.payload)
    if value.tag == "str":
        return '"' + str(value.payload) + '"'
    if value.tag == "bottom":
        return "error" + (f": {value.payload}" if value.payload else "")
    if value.tag == "module":
        return f"<module {value.payload}>"
    if value.tag == "list":
        items = [value_text(v) for v in value.payload[:_LIST_PREFIX]]
        more = ", ..." if len(value.payload) > _LIST_PREFIX else ""
        return f"[{', '.join(items)}{more}] ({len(value.payload)} items)"
    if value.tag == "image":
        img = value.payload
        return f"<image {img.width}x{img.height}>"
    if value.tag in ("table", "grouped"):
        data = _table_payload(value)
        lines = [" | ".join(str(c) for c in data.columns)]
        for row in data.rows[:_TABLE_ROWS]:
            lines.append(" | ".join(str(c) for c in row))
        if len(data.rows) > _TABLE_ROWS:
            lines.append("...")
        lines.append(f"({len(data.rows)} rows)")
        return "\n".join(lines)
    return f"<{value.tag}>"


def preview_text(p: Preview) -> str:
    if isinstance(p, Evaluated):
        return value_text(p.value)
    needs = ", ".join(p.required)
    return f"{expr_to_text(p.expr)}  [needs {needs}]"


def render_value(value: Union[Obj, Closure]) -> dict:
    """JSON-ready rendering for the editor."""

    if isinstance(value, Closure):
        return {"kind": "function",
                "text": expr_to_text(Lambda(value.param, value.body))}
    if value.tag == "num":
        return {"kind": "number", "text": repr(value.payload)}
    if value.tag == "str":
        return {"kind": "string", "text": str(value.payload)}
    if value.tag == "bottom":
        return {"kind": "error", "message": value.payload or "error"}
    if value.tag == "module":
        return {"kind": "module", "name": value.payload}
    if value.tag == "list":
        return {"kind": "list",
                "items": [render_value(v) for v in value.payload[:_LIST_PREFIX]],
                "length": len(value.payload)}
    if value.tag == "image":
        from .extlibs.imagelib import encode_png_base64

        img = value.payload
        return {"kind": "image", "width": img.width, "height": img.height,
                "png": encode_png_base64(img)}
    if value.tag in ("table", "grouped"):
        data = _table_payload(value)
        return {"kind": "table", "columns": list(data.columns),
                "rows": [list(r) for r in data.rows[:_TABLE_ROWS]],
                "total_rows": len(data.rows)}
    return {"kind": value.tag, "text": repr(value.payload)}


def render_preview(p: Preview) -> dict:
    if isinstance(p, Evaluated):
        out = render_value(p.value)
        out["state"] = "evaluated"
        return out
    return {"kind": "delayed", "state": "delayed",
            "text": expr_to_text(p.expr), "needs": list(p.required)}
