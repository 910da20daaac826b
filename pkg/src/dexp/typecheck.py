"""Types over the dependency graph.

The type language is small: primitive types, function types and object
types, where an object type is a named bag of member signatures.  Object
types compare by name (their member maps are recursive, e.g. a list's
members return lists), primitives and function types structurally; there
is no subtyping and no polymorphism, every premise is an exact match.

Checking walks the graph rather than the source: a call vertex looks up
the member on its instance's object type and matches argument types
exactly; a lambda parameter takes its type from the callsite edges its
vertex carries, i.e. from the declared parameter type of the member the
lambda is passed to.  Because parameter vertices are shared per name, a
variable reached by several callsites only types when all of them derive
the same parameter type; disagreement is reported as ambiguity.

Results are memoized per vertex, so vertices reused across edits keep
their types without recomputation (the cache counts misses, which tests
use to prove it).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Set, Tuple

from .depgraph import (Binding, DepGraph, FunVertex, MemVertex, NodeCache,
                       ValVertex, VarVertex, Vertex, bind_expr)
from .objects import ExternalLibrary, Obj, is_bottom
from .syntax import (DOT, IDENT, LPAREN, NUM, RPAREN, STR, Program, Span,
                     iter_exprs, parse, tokenize)


@dataclass(frozen=True)
class Prim:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class FunType:
    input: "Type"
    output: "Type"


class ObjType:
    """Named member bag; equality and hash follow the name so recursive
    member maps stay well-founded."""

    def __init__(self, name: str, members: Optional[Mapping[str, "MemberSig"]] = None):
        self.name = name
        self.members: Dict[str, MemberSig] = dict(members or {})

    def __eq__(self, other):
        return isinstance(other, ObjType) and other.name == self.name

    def __hash__(self):
        return hash(("objtype", self.name))

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class ErrorType:
    message: str


Type = object  # Prim | FunType | ObjType | ErrorType

# the two primitives backed by literal syntax, shared by every library
NUM = Prim("num")
TEXT = Prim("str")


@dataclass(frozen=True)
class MemberSig:
    params: Tuple[Type, ...]
    result: Type


def type_name(t: Type) -> str:
    if isinstance(t, Prim):
        return t.name
    if isinstance(t, ObjType):
        return t.name
    if isinstance(t, FunType):
        left = type_name(t.input)
        if isinstance(t.input, FunType):
            left = f"({left})"
        return f"{left} -> {type_name(t.output)}"
    if isinstance(t, ErrorType):
        return "error"
    return repr(t)


class TypedLibrary(ExternalLibrary):
    """An external library that also describes its objects' types."""

    @property
    def root_types(self) -> Mapping[str, Type]:
        return {}

    def type_of(self, obj: Obj) -> Optional[Type]:
        """Type of a runtime value; None when the library cannot say."""

        return None


def library_type_of(lib: ExternalLibrary, obj: Obj) -> Type:
    if is_bottom(obj):
        return ErrorType(obj.payload or "failed computation")
    type_of = getattr(lib, "type_of", None)
    t = type_of(obj) if type_of is not None else None
    if t is None:
        return ErrorType(f"no type for value of kind {obj.tag!r}")
    return t


def library_root_types(lib: ExternalLibrary) -> Mapping[str, Type]:
    return getattr(lib, "root_types", {}) or {}


class TypeCache:
    """Vertex to Type, session-lived; counts misses for reuse checks.

    Only types that cannot change as the graph grows are stored: value
    vertices, root and unresolved variables, and member chains built from
    those.  Types inferred from callsites are recomputed every pass, since
    a later edit can add a callsite and flip them."""

    def __init__(self):
        self.entries: Dict[Vertex, Type] = {}
        self.misses = 0

    def get(self, v: Vertex) -> Optional[Type]:
        return self.entries.get(v)

    def store(self, v: Vertex, t: Type) -> None:
        self.entries[v] = t


def typecheck_vertex(vertex: Vertex, graph: DepGraph, lib: ExternalLibrary,
                     cache: Optional[TypeCache] = None) -> Type:
    cache = cache if cache is not None else TypeCache()
    return _check(vertex, graph, lib, cache, set())[0]


def _callsite_param_type(target_type: Type, member: str, index: int) -> Type:
    """Declared type of argument `index` of `member` on the given instance
    type; ErrorType when the callsite itself cannot type."""

    if isinstance(target_type, ErrorType):
        return target_type
    if not isinstance(target_type, ObjType):
        return ErrorType(f"type {type_name(target_type)} has no members")
    sig = target_type.members.get(member)
    if sig is None:
        return ErrorType(f"unknown member {member!r} on {target_type.name}")
    if index - 1 >= len(sig.params):
        return ErrorType(f"{member} takes {len(sig.params)} arguments")
    return sig.params[index - 1]


def _check(vertex, graph, lib, cache: TypeCache,
           visiting: Set[Vertex]) -> Tuple[Type, bool]:
    """Type of a vertex plus a stability flag: stable types hold in every
    future graph and may be cached, callsite-derived ones may not."""

    hit = cache.get(vertex)
    if hit is not None:
        return hit, True
    if vertex in visiting:
        # only parameters and function literals can be reached twice in
        # one walk (via callsite jumps; the rest of the graph is acyclic),
        # and their derivations skip in-progress targets, so a re-run
        # terminates on whatever is already resolvable
        if isinstance(vertex, (VarVertex, FunVertex)):
            return _check_inner(vertex, graph, lib, cache, visiting)
        return ErrorType("circular type dependency"), False
    visiting.add(vertex)
    try:
        t, stable = _check_inner(vertex, graph, lib, cache, visiting)
    finally:
        visiting.discard(vertex)
    cache.misses += 1
    if stable:
        cache.store(vertex, t)
    return t, stable


def _check_inner(vertex, graph, lib, cache, visiting) -> Tuple[Type, bool]:
    if isinstance(vertex, ValVertex):
        return library_type_of(lib, vertex.obj), True

    if isinstance(vertex, VarVertex):
        if vertex.unresolved:
            return ErrorType(f"unbound variable: {vertex.name}"), True
        roots = library_root_types(lib)
        if vertex.name in roots:
            return roots[vertex.name], True
        callsites = graph.callsites_of(vertex)
        if not callsites:
            return (ErrorType(
                f"no type information for variable {vertex.name!r}"), False)
        derived: List[Type] = []
        for target, member, index in callsites:
            if target in visiting:
                # an enclosing call still being checked; its own argument
                # comparison enforces this constraint, so it cannot vote
                continue
            target_t, _ = _check(target, graph, lib, cache, visiting)
            param_t = _callsite_param_type(target_t, member, index)
            if isinstance(param_t, ErrorType):
                return param_t, False
            if not isinstance(param_t, FunType):
                return (ErrorType(
                    f"argument {index} of {member} is not a function"), False)
            derived.append(param_t.input)
        if not derived:
            return (ErrorType(
                f"no type information for variable {vertex.name!r}"), False)
        if any(d != derived[0] for d in derived[1:]):
            return (ErrorType(
                f"ambiguous parameter type for {vertex.name!r}"), False)
        return derived[0], False

    if isinstance(vertex, MemVertex):
        deps = graph.args_of(vertex)
        instance_t, stable = _check(deps[0], graph, lib, cache, visiting)
        if isinstance(instance_t, ErrorType):
            return instance_t, stable
        if not isinstance(instance_t, ObjType):
            return (ErrorType(
                f"type {type_name(instance_t)} has no members"), stable)
        sig = instance_t.members.get(vertex.member)
        if sig is None:
            return (ErrorType(
                f"unknown member {vertex.member!r} on {instance_t.name}"),
                stable)
        if len(sig.params) != len(deps) - 1:
            return (ErrorType(f"{vertex.member} expects {len(sig.params)} "
                              f"arguments, got {len(deps) - 1}"), stable)
        for i, dep in enumerate(deps[1:], start=1):
            arg_t, arg_stable = _check(dep, graph, lib, cache, visiting)
            stable = stable and arg_stable
            if isinstance(arg_t, ErrorType):
                return arg_t, arg_stable
            if arg_t != sig.params[i - 1]:
                return (ErrorType(
                    f"argument {i} of {vertex.member}: expected "
                    f"{type_name(sig.params[i - 1])}, got {type_name(arg_t)}"),
                    arg_stable)
        return sig.result, stable

    if isinstance(vertex, FunVertex):
        callsites = graph.callsites_of(vertex)
        if not callsites:
            return ErrorType("function literal outside argument position"), False
        expected: List[FunType] = []
        for target, member, index in callsites:
            if target in visiting:
                # an enclosing call still being checked; its own argument
                # comparison enforces this constraint, so it cannot vote
                continue
            target_t, _ = _check(target, graph, lib, cache, visiting)
            param_t = _callsite_param_type(target_t, member, index)
            if isinstance(param_t, ErrorType):
                return param_t, False
            if not isinstance(param_t, FunType):
                return (ErrorType(
                    f"argument {index} of {member} is not a function"), False)
            expected.append(param_t)
        if not expected:
            return ErrorType("function literal outside argument position"), False
        if any(e != expected[0] for e in expected[1:]):
            return (ErrorType(
                f"ambiguous parameter type for {vertex.param!r}"), False)
        fn = expected[0]
        body_vertex = graph.body_of(vertex)
        if body_vertex is None:
            return ErrorType("function literal without a body"), False
        body_t, _ = _check(body_vertex, graph, lib, cache, visiting)
        if isinstance(body_t, ErrorType):
            return body_t, False
        if body_t != fn.output:
            return (ErrorType(
                f"function body: expected {type_name(fn.output)},"
                f" got {type_name(body_t)}"), False)
        return fn, False

    raise TypeError(f"not a graph vertex: {vertex!r}")


# ---------------------------------------------------------------------------
# Whole-program checking and diagnostics

@dataclass(frozen=True)
class Diagnostic:
    span: Span
    severity: str
    message: str


def check_program(binding: Binding, graph: DepGraph, lib: ExternalLibrary,
                  cache: Optional[TypeCache] = None
                  ) -> Tuple[List[Type], List[Diagnostic]]:
    """Types for every bound command plus one diagnostic per error source.

    A vertex whose type is an error counts as a source when none of its
    graph dependencies is also an error (those propagate).  Each source is
    reported once, at its first appearance in the text; parse errors are
    the parser's business and do not show up here.
    """

    cache = cache if cache is not None else TypeCache()
    types = [typecheck_vertex(v, graph, lib, cache)
             for v in binding.command_vertices]
    diagnostics: List[Diagnostic] = []
    reported: Set[Vertex] = set()
    for cmd in binding.program.commands:
        for node in iter_exprs(cmd):
            vertex = binding.expr_vertex.get(node)
            if vertex is None or vertex in reported:
                continue
            t = typecheck_vertex(vertex, graph, lib, cache)
            if not isinstance(t, ErrorType):
                continue
            deps = list(graph.args_of(vertex)) if isinstance(vertex, MemVertex) else []
            body = graph.body_of(vertex)
            if body is not None:
                deps.append(body)
            if any(isinstance(typecheck_vertex(d, graph, lib, cache), ErrorType)
                   for d in deps):
                continue  # propagated, the source reports itself
            reported.add(vertex)
            span = node.span if node.span is not None else cmd.token_span
            diagnostics.append(Diagnostic(span, "error", t.message))
    return types, diagnostics


# ---------------------------------------------------------------------------
# Completions

@dataclass(frozen=True)
class CompletionItem:
    name: str
    params: Tuple[str, ...]
    result: str

    @property
    def text(self) -> str:
        return f"{self.name}({', '.join(self.params)}) -> {self.result}"


def _instance_start(tokens, last: int) -> Optional[int]:
    """Token index where the member chain ending at tokens[last] begins.

    Walks backwards over `atom (.member(args)?)*`; returns None when the
    text before the dot is not a chain."""

    k = last
    while True:
        tok = tokens[k]
        if tok.kind == RPAREN:
            depth = 1
            k -= 1
            while k >= 0 and depth > 0:
                if tokens[k].kind == RPAREN:
                    depth += 1
                elif tokens[k].kind == LPAREN:
                    depth -= 1
                k -= 1
            if depth > 0 or k < 0 or tokens[k].kind != IDENT:
                return None
        elif tok.kind in (IDENT, NUM, STR):
            pass
        else:
            return None
        if k - 1 >= 0 and tokens[k - 1].kind == DOT and k - 2 >= 0:
            k -= 2
        else:
            return k


def completions(program: Program, binding: Binding, offset: int,
                lib: ExternalLibrary, cache: Optional[NodeCache] = None,
                type_cache: Optional[TypeCache] = None) -> List[CompletionItem]:
    """Members of the expression before the dot at (or just before) the
    cursor, sorted by name.  Works on text that does not parse as a whole:
    the chain in front of the dot is parsed and bound on its own, under
    the scope the surrounding program establishes at that offset."""

    text = program.source
    i = min(offset, len(text))
    while i > 0 and (text[i - 1].isalnum() or text[i - 1] == "_"):
        i -= 1
    if i == 0 or text[i - 1] != ".":
        return []
    dot = i - 1

    tokens = [t for t in tokenize(text) if t.end <= dot]
    if not tokens:
        return []
    start_idx = _instance_start(tokens, len(tokens) - 1)
    if start_idx is None:
        return []
    instance_text = text[tokens[start_idx].start:dot]
    chain = parse(instance_text)
    if chain.errors or len(chain.commands) != 1:
        return []
    ctx = binding.context_at(tokens[start_idx].start)
    vertex, subgraph = bind_expr(chain.commands[0].body, ctx,
                                 cache if cache is not None else NodeCache())
    # vertices pulled from the surrounding scope carry their dependency
    # edges in the binding's graph, not the chain's; check the union
    subgraph.merge(binding.graph)
    t = typecheck_vertex(vertex, subgraph, lib, type_cache)
    if not isinstance(t, ObjType):
        return []
    items = []
    for name in sorted(t.members):
        sig = t.members[name]
        items.append(CompletionItem(name,
                                    tuple(type_name(p) for p in sig.params),
                                    type_name(sig.result)))
    return items
