"""Binding programs to a dependency graph with cross-edit node reuse.

Every expression occurrence is assigned a graph vertex:

* Val(o)      literal values, shared whenever the value is equal;
* Var(x)      variable references, shared per name (a separate pool holds
              names that are bound nowhere, so broken programs still bind);
* Mem(m, s)   a member call, distinguished by a fresh symbol;
* Fun(x, s)   a lambda, likewise.

Edges carry labels: Arg(0) points at the call instance, Arg(i) at the i-th
argument, Body at a lambda's body.  For a lambda in argument position i of
a call on instance v0, Callsite(m, i) edges run from both the Fun vertex
and its parameter's Var vertex to v0; the type checker walks them to give
parameters their types.  Callsite edges are bookkeeping on the side: they
never participate in the node cache.

The node cache maps (vertex kind, exact labeled dependency list) to the
vertex allocated for it, so rebinding edited text reaches equal
sub-expressions through equal dependency lists and reuses their vertices,
which in turn keeps their cached previews and types valid.  Symbols count
up monotonically per session and entries are never evicted or replaced.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .objects import Obj, serialize_value
from .syntax import (Command, Expr, Lambda, LetBinding, MemberAccess, Program,
                     Value, Var, parse)


@dataclass(frozen=True)
class Symbol:
    id: int

    def __repr__(self):
        return f"s{self.id}"


class SymbolSource:
    """Monotone symbol supply; one per session, shared by cache snapshots."""

    def __init__(self):
        self._next = 0

    def fresh(self) -> Symbol:
        sym = Symbol(self._next)
        self._next += 1
        return sym


# -- vertices ---------------------------------------------------------------

@dataclass(frozen=True)
class ValVertex:
    obj: Obj


@dataclass(frozen=True)
class VarVertex:
    name: str
    unresolved: bool = False


@dataclass(frozen=True)
class MemVertex:
    member: str
    symbol: Symbol


@dataclass(frozen=True)
class FunVertex:
    param: str
    symbol: Symbol


Vertex = object  # union of the four above

# -- edge labels ------------------------------------------------------------

@dataclass(frozen=True)
class Arg:
    index: int  # 0 is the call instance


@dataclass(frozen=True)
class Body:
    pass


@dataclass(frozen=True)
class Callsite:
    member: str
    index: int  # argument position of the lambda, always >= 1


BODY = Body()


class DepGraph:
    """Vertices plus labeled edges, with indexed lookups for evaluation."""

    def __init__(self):
        self.vertices: Set[Vertex] = set()
        self.edges: Set[Tuple[Vertex, Vertex, object]] = set()
        self._args: Dict[Vertex, Dict[int, Vertex]] = {}
        self._body: Dict[Vertex, Vertex] = {}
        self._callsites: Dict[Vertex, Set[Tuple[Vertex, str, int]]] = {}

    def add_vertex(self, v: Vertex) -> Vertex:
        self.vertices.add(v)
        return v

    def add_edge(self, src: Vertex, dst: Vertex, label) -> None:
        self.vertices.add(src)
        self.vertices.add(dst)
        self.edges.add((src, dst, label))
        if isinstance(label, Arg):
            slots = self._args.setdefault(src, {})
            if label.index in slots and slots[label.index] != dst:
                raise AssertionError(
                    f"vertex {src!r} rebound argument {label.index}")
            slots[label.index] = dst
        elif isinstance(label, Body):
            if src in self._body and self._body[src] != dst:
                raise AssertionError(f"vertex {src!r} rebound its body")
            self._body[src] = dst
        elif isinstance(label, Callsite):
            self._callsites.setdefault(src, set()).add(
                (dst, label.member, label.index))
        else:
            raise TypeError(f"unknown edge label: {label!r}")

    def args_of(self, v: Vertex) -> List[Vertex]:
        """Dependencies of a call vertex ordered by argument index."""

        slots = self._args.get(v, {})
        if not slots:
            return []
        count = max(slots) + 1
        if sorted(slots) != list(range(count)):
            raise AssertionError(f"vertex {v!r} has gaps in its arguments")
        return [slots[i] for i in range(count)]

    def body_of(self, v: Vertex) -> Optional[Vertex]:
        return self._body.get(v)

    def callsites_of(self, v: Vertex) -> List[Tuple[Vertex, str, int]]:
        return sorted(self._callsites.get(v, ()),
                      key=lambda t: (t[1], t[2], _vertex_sort_key(t[0])))

    def merge(self, other: "DepGraph") -> None:
        for v in other.vertices:
            self.add_vertex(v)
        for src, dst, label in other.edges:
            self.add_edge(src, dst, label)

    def copy(self) -> "DepGraph":
        out = DepGraph()
        out.merge(self)
        return out

    def is_acyclic(self) -> bool:
        state: Dict[Vertex, int] = {}  # 1 visiting, 2 done

        def visit(v) -> bool:
            if state.get(v) == 2:
                return True
            if state.get(v) == 1:
                return False
            state[v] = 1
            deps = list(self._args.get(v, {}).values())
            if v in self._body:
                deps.append(self._body[v])
            ok = all(visit(d) for d in deps)
            state[v] = 2
            return ok

        return all(visit(v) for v in self.vertices)


def graphs_equal(a: DepGraph, b: DepGraph, ignore_callsites: bool = False) -> bool:
    ea = {e for e in a.edges if not (ignore_callsites and isinstance(e[2], Callsite))}
    eb = {e for e in b.edges if not (ignore_callsites and isinstance(e[2], Callsite))}
    return a.vertices == b.vertices and ea == eb


# -- node cache -------------------------------------------------------------

def _dep_key(deps: Sequence[Tuple[Vertex, object]]) -> tuple:
    parts = []
    for vertex, label in deps:
        if isinstance(label, Arg):
            parts.append((vertex, ("arg", label.index)))
        elif isinstance(label, Body):
            parts.append((vertex, ("body",)))
        else:
            raise TypeError(f"label {label!r} cannot appear in a cache key")
    return tuple(parts)


def mem_key(member: str, deps: Sequence[Tuple[Vertex, object]]) -> tuple:
    return ("mem", member, _dep_key(deps))


def fun_key(param: str, deps: Sequence[Tuple[Vertex, object]]) -> tuple:
    return ("fun", param, _dep_key(deps))


class NodeCache:
    """Session-lived map from (kind, dependency list) to allocated vertex.

    Snapshots share one symbol source, so a cache lineage hands out each
    symbol at most once however many times it is copied.
    """

    def __init__(self, entries: Optional[Dict[tuple, Vertex]] = None,
                 symbols: Optional[SymbolSource] = None):
        self.entries: Dict[tuple, Vertex] = dict(entries or {})
        self.symbols = symbols or SymbolSource()

    def lookup(self, key: tuple) -> Optional[Vertex]:
        return self.entries.get(key)

    def fresh_symbol(self) -> Symbol:
        return self.symbols.fresh()

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        return key in self.entries


def update_cache(cache: NodeCache, graph: DepGraph) -> NodeCache:
    """Register every call and lambda vertex of the graph under its exact
    labeled dependency list.  Existing entries always win; when one program
    contains the same sub-expression twice, both occurrences carry the same
    key and only the first allocation is remembered."""

    entries = dict(cache.entries)
    for v in sorted((v for v in graph.vertices
                     if isinstance(v, (MemVertex, FunVertex))),
                    key=lambda v: v.symbol.id):
        if isinstance(v, MemVertex):
            deps = [(d, Arg(i)) for i, d in enumerate(graph.args_of(v))]
            entries.setdefault(mem_key(v.member, deps), v)
        else:
            body = graph.body_of(v)
            if body is not None:
                entries.setdefault(fun_key(v.param, [(body, BODY)]), v)
    return NodeCache(entries, cache.symbols)


# -- binding ----------------------------------------------------------------

@dataclass(eq=False)
class Binding:
    program: Program
    command_vertices: List[Vertex]
    expr_vertex: Dict[Expr, Vertex]  # keyed by node identity
    graph: DepGraph
    initial_context: Dict[str, Vertex]
    contexts_after: List[Dict[str, Vertex]]  # scope after each command

    def vertex_for(self, node: Expr) -> Vertex:
        return self.expr_vertex[node]

    def context_at(self, offset: int) -> Dict[str, Vertex]:
        """Names in scope at a source offset (bindings of commands that end
        before it)."""

        ctx = self.initial_context
        for cmd, after in zip(self.program.commands, self.contexts_after):
            if cmd.token_span.end <= offset:
                ctx = after
            else:
                break
        return ctx


class _Binder:
    def __init__(self, cache: NodeCache, graph: DepGraph,
                 expr_vertex: Dict[Expr, Vertex]):
        self.cache = cache
        self.graph = graph
        self.expr_vertex = expr_vertex
        # allocations made during this pass, so identical sub-expressions
        # within one program share a vertex immediately
        self.fresh: Dict[tuple, Vertex] = {}

    def _lookup(self, key: tuple) -> Optional[Vertex]:
        hit = self.cache.lookup(key)
        return hit if hit is not None else self.fresh.get(key)

    def bind(self, expr: Expr, ctx: Mapping[str, Vertex]) -> Vertex:
        if isinstance(expr, Value):
            v = self.graph.add_vertex(ValVertex(expr.obj))
        elif isinstance(expr, Var):
            known = ctx.get(expr.name)
            v = known if known is not None else VarVertex(expr.name, unresolved=True)
            self.graph.add_vertex(v)
        elif isinstance(expr, MemberAccess):
            v = self.bind_member(expr, ctx)
        elif isinstance(expr, Lambda):
            v = self.bind_lambda(expr, ctx)
        else:
            raise TypeError(f"not an expression: {expr!r}")
        self.expr_vertex[expr] = v
        return v

    def bind_member(self, expr: MemberAccess, ctx: Mapping[str, Vertex]) -> Vertex:
        instance_v = self.bind(expr.instance, ctx)
        arg_vertices: List[Vertex] = []
        lambda_args: List[Tuple[int, Vertex, Vertex]] = []  # (pos, fun, var)
        for i, arg in enumerate(expr.args, start=1):
            av = self.bind(arg, ctx)
            arg_vertices.append(av)
            if isinstance(arg, Lambda):
                lambda_args.append((i, av, VarVertex(arg.param)))
        deps = [(instance_v, Arg(0))]
        deps += [(av, Arg(i)) for i, av in enumerate(arg_vertices, start=1)]
        key = mem_key(expr.member, deps)
        v = self._lookup(key)
        if v is None:
            v = MemVertex(expr.member, self.cache.fresh_symbol())
            self.fresh[key] = v
        self.graph.add_vertex(v)
        for dep, label in deps:
            self.graph.add_edge(v, dep, label)
        for pos, fun_v, var_v in lambda_args:
            self.graph.add_edge(fun_v, instance_v, Callsite(expr.member, pos))
            self.graph.add_edge(var_v, instance_v, Callsite(expr.member, pos))
        return v

    def bind_lambda(self, expr: Lambda, ctx: Mapping[str, Vertex]) -> Vertex:
        var_v = self.graph.add_vertex(VarVertex(expr.param))
        inner = dict(ctx)
        inner[expr.param] = var_v
        body_v = self.bind(expr.body, inner)
        key = fun_key(expr.param, [(body_v, BODY)])
        v = self._lookup(key)
        if v is None:
            v = FunVertex(expr.param, self.cache.fresh_symbol())
            self.fresh[key] = v
        self.graph.add_vertex(v)
        self.graph.add_edge(v, body_v, BODY)
        return v


def bind_expr(expr: Expr, ctx: Mapping[str, Vertex],
              cache: NodeCache) -> Tuple[Vertex, DepGraph]:
    """Bind one expression under the given scope.  Names outside the scope
    bind to tagged unresolved-variable vertices; binding never fails."""

    graph = DepGraph()
    binder = _Binder(cache, graph, {})
    vertex = binder.bind(expr, ctx)
    return vertex, graph


def bind_prog(program: Program, cache: NodeCache,
              roots: Iterable[str] = ()) -> Binding:
    """Bind every cleanly parsed command, threading let bindings through
    the scope so a bound name reuses its defining expression's vertex.
    Root names (library globals) enter the scope as plain Var vertices."""

    graph = DepGraph()
    expr_vertex: Dict[Expr, Vertex] = {}
    binder = _Binder(cache, graph, expr_vertex)
    ctx: Dict[str, Vertex] = {name: VarVertex(name) for name in roots}
    initial = dict(ctx)
    command_vertices: List[Vertex] = []
    contexts_after: List[Dict[str, Vertex]] = []
    for cmd in program.commands:
        v = binder.bind(cmd.body, ctx)
        command_vertices.append(v)
        if isinstance(cmd, LetBinding):
            ctx = dict(ctx)
            ctx[cmd.name] = v
        contexts_after.append(ctx)
    return Binding(program, command_vertices, expr_vertex, graph,
                   initial, contexts_after)


def rebind(cache: NodeCache, text: str,
           roots: Iterable[str] = ()) -> Tuple[Binding, NodeCache]:
    """Parse, bind against the session cache, return the refreshed cache."""

    program = parse(text)
    binding = bind_prog(program, cache, roots)
    return binding, update_cache(cache, binding.graph)


# -- debug export -----------------------------------------------------------

def _vertex_sort_key(v: Vertex) -> tuple:
    if isinstance(v, ValVertex):
        return (0, json.dumps(serialize_value(v.obj), sort_keys=True))
    if isinstance(v, VarVertex):
        return (1, v.name, v.unresolved)
    if isinstance(v, MemVertex):
        return (2, v.symbol.id)
    return (3, v.symbol.id)


def _label_text(label) -> str:
    if isinstance(label, Arg):
        return f"arg({label.index})"
    if isinstance(label, Body):
        return "body"
    return f"callsite({label.member},{label.index})"


def export_graph(graph: DepGraph) -> str:
    """Plain-text dump: one `id kind payload` line per vertex followed by
    one `from to label` line per edge, both deterministically ordered."""

    ordered = sorted(graph.vertices, key=_vertex_sort_key)
    ids = {v: i for i, v in enumerate(ordered)}
    lines = []
    for v, i in ids.items():
        if isinstance(v, ValVertex):
            payload = json.dumps(serialize_value(v.obj), sort_keys=True)
        elif isinstance(v, VarVertex):
            payload = v.name + (" unresolved" if v.unresolved else "")
        elif isinstance(v, MemVertex):
            payload = f"{v.member} s{v.symbol.id}"
        else:
            payload = f"{v.param} s{v.symbol.id}"
        kind = {ValVertex: "val", VarVertex: "var",
                MemVertex: "mem", FunVertex: "fun"}[type(v)]
        lines.append(f"{i} {kind} {payload}")
    edge_lines = sorted((ids[src], ids[dst], _label_text(label))
                        for src, dst, label in graph.edges)
    lines += [f"{s} {d} {label}" for s, d, label in edge_lines]
    return "\n".join(lines)
