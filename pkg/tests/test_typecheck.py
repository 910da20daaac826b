"""Graph-based type checking, diagnostics and member completion."""

from typing import Mapping

from dexp.depgraph import DepGraph, FunVertex, NodeCache, VarVertex, rebind
from dexp.extlibs import standard_library
from dexp.extlibs.listmath import LIST_MODULE, NUM_LIST
from dexp.extlibs.tablelib import TABLE
from dexp.objects import Obj, bottom
from dexp.typecheck import (NUM, TEXT, ErrorType, FunType, MemberSig, ObjType,
                            TypeCache, TypedLibrary, check_program,
                            completions, library_type_of, type_name,
                            typecheck_vertex)

ROOTS = ("data", "image", "list", "math", "table")


def bind(text: str, cache=None, roots=ROOTS):
    cache = cache if cache is not None else NodeCache()
    return rebind(cache, text, list(roots))


class HigherOrderLib(TypedLibrary):
    """One object o with m : (num -> num) -> num and a str-flavoured twin."""

    def __init__(self):
        self.obj_type = ObjType("widget")
        self.obj_type.members.update({
            "m": MemberSig((FunType(NUM, NUM),), NUM),
            "s": MemberSig((FunType(TEXT, TEXT),), NUM),
        })
        self._roots = {"o": Obj("widget")}

    @property
    def root_bindings(self):
        return self._roots

    @property
    def root_types(self) -> Mapping[str, object]:
        return {"o": self.obj_type}

    def owns(self, receiver: Obj) -> bool:
        return receiver.tag == "widget"

    def type_of(self, obj: Obj):
        return self.obj_type if obj.tag == "widget" else None

    def eval_member(self, receiver, member, args, apply):
        return bottom("static-only library")


def test_parameter_type_inferred_from_callsite():
    lib = HigherOrderLib()
    binding, _ = bind("o.m(fun x -> x)", roots=("o",))
    graph = binding.graph
    assert typecheck_vertex(VarVertex("x"), graph, lib) == NUM
    (fun_v,) = [v for v in graph.vertices if isinstance(v, FunVertex)]
    assert typecheck_vertex(fun_v, graph, lib) == FunType(NUM, NUM)
    assert typecheck_vertex(binding.command_vertices[0], graph, lib) == NUM


def test_chained_lambdas_sharing_a_parameter_name():
    # both params are "y", so one vertex collects both callsites; the
    # walk reaches it again through the inner call and must not report
    # a circular dependency
    lib = standard_library()
    binding, _ = bind("data.map(fun y -> y).map(fun y -> math.add(y, 1))")
    graph = binding.graph
    assert typecheck_vertex(binding.command_vertices[0], graph, lib) == NUM_LIST
    assert typecheck_vertex(VarVertex("y"), graph, lib) == NUM
    for fun_v in (v for v in graph.vertices if isinstance(v, FunVertex)):
        assert typecheck_vertex(fun_v, graph, lib) == FunType(NUM, NUM)


def test_conflicting_callsites_make_parameter_ambiguous():
    lib = HigherOrderLib()
    binding, _ = bind("o.m(fun x -> x)\no.s(fun x -> x)", roots=("o",))
    t = typecheck_vertex(VarVertex("x"), binding.graph, lib)
    assert isinstance(t, ErrorType)
    assert "ambiguous" in t.message


def test_identity_lambda_adapts_to_the_callsite():
    lib = HigherOrderLib()
    binding, _ = bind("o.s(fun x -> x)", roots=("o",))
    (fun_v,) = [v for v in binding.graph.vertices if isinstance(v, FunVertex)]
    assert typecheck_vertex(fun_v, binding.graph, lib) == FunType(TEXT, TEXT)


def test_chain_types_through_root_signatures():
    lib = standard_library()
    binding, _ = bind("data.skip(3).take(2)")
    assert typecheck_vertex(binding.command_vertices[0], binding.graph, lib) == NUM_LIST
    binding2, _ = bind("list")
    assert typecheck_vertex(binding2.command_vertices[0], binding2.graph, lib) == LIST_MODULE


def test_unknown_member_is_an_error():
    lib = standard_library()
    binding, _ = bind("data.frobnicate(1)")
    t = typecheck_vertex(binding.command_vertices[0], binding.graph, lib)
    assert isinstance(t, ErrorType)
    assert "frobnicate" in t.message


def test_wrong_argument_type_is_an_error():
    lib = standard_library()
    binding, _ = bind('data.take("three")')
    t = typecheck_vertex(binding.command_vertices[0], binding.graph, lib)
    assert isinstance(t, ErrorType)
    assert "expected num" in t.message


def test_wrong_arity_is_an_error():
    lib = standard_library()
    binding, _ = bind("data.take(1, 2)")
    t = typecheck_vertex(binding.command_vertices[0], binding.graph, lib)
    assert isinstance(t, ErrorType)


def test_unbound_variable_type_error():
    lib = standard_library()
    binding, _ = bind("mystery.take(1)")
    t = typecheck_vertex(binding.command_vertices[0], binding.graph, lib)
    assert isinstance(t, ErrorType)
    assert "unbound" in t.message


def test_library_type_of_failure_and_unknown():
    lib = standard_library()
    t = library_type_of(lib, bottom("boom"))
    assert isinstance(t, ErrorType) and "boom" in t.message
    u = library_type_of(lib, Obj("alien", None))
    assert isinstance(u, ErrorType)


def test_type_name_parenthesizes_function_inputs():
    assert type_name(FunType(NUM, NUM)) == "num -> num"
    assert type_name(FunType(FunType(NUM, NUM), NUM)) == "(num -> num) -> num"


def test_check_program_reports_each_source_once():
    lib = standard_library()
    binding, _ = bind('let xs = data.take("x")\nxs.skip(1)\nxs.skip(2)')
    types, diags = check_program(binding, binding.graph, lib)
    assert all(isinstance(t, ErrorType) for t in types)
    assert len(diags) == 1  # the bad take is the only source
    d = diags[0]
    source = binding.program.source
    assert "take" in source[d.span.start:d.span.end]
    assert d.severity == "error"


def test_check_program_clean_program_has_no_diagnostics():
    lib = standard_library()
    binding, _ = bind("let xs = data.skip(3)\nxs.take(2)")
    types, diags = check_program(binding, binding.graph, lib)
    assert diags == []
    assert types == [NUM_LIST, NUM_LIST]


def test_grouped_values_type_as_table():
    lib = standard_library()
    binding, _ = bind('table.groupBy("Team")')
    assert typecheck_vertex(binding.command_vertices[0], binding.graph, lib) == TABLE


def test_type_cache_reuses_stable_results():
    lib = standard_library()
    cache = TypeCache()
    binding, _ = bind("data.skip(3).take(2)")
    typecheck_vertex(binding.command_vertices[0], binding.graph, lib, cache)
    misses = cache.misses
    assert misses > 0
    typecheck_vertex(binding.command_vertices[0], binding.graph, lib, cache)
    assert cache.misses == misses


def test_callsite_derived_types_not_frozen_by_the_cache():
    lib = HigherOrderLib()
    cache = TypeCache()
    node_cache = NodeCache()
    b1, node_cache = bind("o.m(fun x -> x)", node_cache, roots=("o",))
    union = DepGraph()
    union.merge(b1.graph)
    assert typecheck_vertex(VarVertex("x"), union, lib, cache) == NUM
    # a later edit adds a conflicting callsite; the cached answer must not
    # shadow the new ambiguity
    b2, node_cache = bind("o.m(fun x -> x)\no.s(fun x -> x)",
                          node_cache, roots=("o",))
    union.merge(b2.graph)
    t = typecheck_vertex(VarVertex("x"), union, lib, cache)
    assert isinstance(t, ErrorType) and "ambiguous" in t.message


def complete(text: str, offset=None, roots=ROOTS):
    lib = standard_library()
    binding, cache = bind(text, roots=roots)
    offset = len(text) if offset is None else offset
    return completions(binding.program, binding, offset, lib, cache)


def test_completion_after_table_dot_lists_every_member():
    items = complete("table.")
    assert [c.name for c in items] == ["countDistinct", "filterEq", "groupBy",
                                       "skip", "sortByDesc", "sum", "take"]
    by_name = {c.name: c for c in items}
    assert by_name["filterEq"].params == ("str", "str")
    assert by_name["filterEq"].result == "table"
    assert by_name["take"].text == "take(num) -> table"


def test_completion_on_list_chain():
    items = complete("let xs = list.range(0, 9)\nxs.")
    assert [c.name for c in items] == ["map", "skip", "take"]
    assert items[0].text == "map(num -> num) -> list of num"


def test_completion_mid_identifier_uses_the_chain_before_the_dot():
    text = "data.skip(1).ta"
    items = complete(text, offset=len(text))
    assert [c.name for c in items] == ["map", "skip", "take"]


def test_completion_on_module():
    assert [c.name for c in complete("list.")] == ["range"]
    assert [c.name for c in complete("math.")] == ["add", "mul", "sub"]


def test_completion_on_number_is_empty():
    assert complete("42.") == []


def test_completion_without_dot_is_empty():
    assert complete("data") == []
    assert complete("") == []


def test_completion_inside_broken_program_still_works():
    text = "let = 3\ndata."
    items = complete(text)
    assert [c.name for c in items] == ["map", "skip", "take"]
