"""Demand-driven previews over the dependency graph."""

import pytest

from dexp.depgraph import FunVertex, NodeCache, VarVertex, rebind
from dexp.extlibs import CountingLib, standard_library
from dexp.objects import Closure, is_bottom, num
from dexp.preview import (Budget, Delayed, Evaluated, PreviewCache,
                          PreviewInterrupted, command_previews, eval_preview,
                          lift, preview_at_cursor, preview_text,
                          previews_equal, render_preview, serialize_preview)
from dexp.syntax import MemberAccess, Value, Var, parse

ROOTS = ("data", "image", "list", "math", "table")


def setup(text: str, lib=None):
    lib = lib if lib is not None else standard_library()
    binding, cache = rebind(NodeCache(), text, list(lib.root_bindings))
    return binding, binding.graph, PreviewCache(), lib


def preview_of(text: str, lib=None):
    binding, graph, pcache, lib = setup(text, lib)
    return eval_preview(binding.command_vertices[0], graph, pcache, lib)


def test_literal_previews_to_its_value():
    p = preview_of("42")
    assert isinstance(p, Evaluated) and p.value.payload == 42


def test_root_name_previews_to_library_binding():
    p = preview_of("data")
    assert isinstance(p, Evaluated)
    assert [o.payload for o in p.value.payload] == list(range(100))
    q = preview_of("image")
    assert q.value.tag == "module"


def test_unresolved_name_previews_to_error():
    p = preview_of("mystery")
    assert isinstance(p, Evaluated) and is_bottom(p.value)
    assert "unbound variable" in p.value.payload


def test_member_call_on_finished_inputs_runs_the_library():
    p = preview_of("list.range(2, 6)")
    assert [o.payload for o in p.value.payload] == [2, 3, 4, 5]


def test_lambda_body_previews_delayed_with_requirements():
    text = "data.map(fun x -> math.mul(x, 2))"
    binding, graph, pcache, lib = setup(text)
    offset = text.index("mul") + 1
    p = preview_at_cursor(binding, offset, graph, pcache, lib)
    assert isinstance(p, Delayed)
    assert p.required == ("x",)
    assert "needs x" in preview_text(p)


def test_lambda_previews_to_closure_over_its_parameter():
    text = "data.map(fun x -> math.mul(x, 2))"
    binding, graph, pcache, lib = setup(text)
    (fun_v,) = [v for v in graph.vertices if isinstance(v, FunVertex)]
    p = eval_preview(fun_v, graph, pcache, lib)
    assert isinstance(p, Evaluated) and isinstance(p.value, Closure)
    assert p.value.param == "x"


def test_constant_lambda_closes_over_the_finished_body():
    text = "data.map(fun x -> math.add(2, 3))"
    binding, graph, pcache, lib = setup(text)
    (fun_v,) = [v for v in graph.vertices if isinstance(v, FunVertex)]
    p = eval_preview(fun_v, graph, pcache, lib)
    assert isinstance(p.value, Closure)
    assert isinstance(p.value.body, Value)
    assert p.value.body.obj.payload == 5


def test_lambda_with_outer_requirement_stays_delayed():
    # y is not this lambda's parameter, so the lambda cannot finish
    text = "data.map(fun x -> math.add(x, y))"
    binding, graph, pcache, lib = setup(text)
    (fun_v,) = [v for v in graph.vertices if isinstance(v, FunVertex)]
    p = eval_preview(fun_v, graph, pcache, lib)
    assert isinstance(p, Evaluated) and isinstance(p.value, Closure)


def test_free_use_of_a_parameter_name_stays_unbound():
    # a free x is a different vertex from any lambda's parameter x, so the
    # first command fails while the map still closes over its own x
    text = "math.add(x, 1)\ndata.map(fun x -> math.mul(x, 2))"
    binding, graph, pcache, lib = setup(text)
    p = eval_preview(binding.command_vertices[0], graph, pcache, lib)
    assert isinstance(p, Evaluated) and is_bottom(p.value)
    assert "unbound variable: x" in p.value.payload
    q = eval_preview(binding.command_vertices[1], graph, pcache, lib)
    assert isinstance(q, Evaluated) and q.value.tag == "list"


def test_lift_finished_value():
    lifted = lift(Evaluated(num(3)))
    assert isinstance(lifted, Delayed)
    assert lifted.required == ()
    assert isinstance(lifted.expr, Value)
    delayed = Delayed(Var("x"), ("x",))
    assert lift(delayed) is delayed


def test_whole_command_chain_previews_like_refeval():
    text = "let xs = list.range(10, 25)\nxs.skip(15)"
    binding, graph, pcache, lib = setup(text)
    previews = command_previews(binding, graph, pcache, lib)
    assert [i for i, _ in previews] == [0, 1]
    assert [o.payload for o in previews[1][1].value.payload] == list(range(25))[25:]


def test_preview_at_cursor_on_intermediate_subchain():
    text = "data.skip(10).take(15)"
    binding, graph, pcache, lib = setup(text)
    p = preview_at_cursor(binding, text.index("skip") + 2, graph, pcache, lib)
    assert isinstance(p, Evaluated)
    assert [o.payload for o in p.value.payload] == list(range(10, 100))


def test_preview_at_cursor_in_error_region():
    text = "data.take(2)\nlet = 3"
    binding, graph, pcache, lib = setup(text)
    assert preview_at_cursor(binding, text.index("3"), graph, pcache, lib) is None


def test_eval_preview_rejects_foreign_vertex():
    binding, graph, pcache, lib = setup("data.take(1)")
    with pytest.raises(ValueError):
        eval_preview(VarVertex("ghost", unresolved=True), graph, pcache, lib)


def test_cached_previews_cost_no_library_calls():
    lib = CountingLib(standard_library())
    binding, graph, pcache, _ = setup("data.skip(10).take(15)", lib)
    command_previews(binding, graph, pcache, lib)
    snapshot = lib.snapshot()
    command_previews(binding, graph, pcache, lib)
    assert lib.snapshot() == snapshot


def test_preview_cache_refuses_conflicting_overwrite():
    cache = PreviewCache()
    v = VarVertex("v")
    cache.store(v, Evaluated(num(1)))
    cache.store(v, Evaluated(num(1)))  # equal rewrite is fine
    with pytest.raises(AssertionError):
        cache.store(v, Evaluated(num(2)))


def test_step_budget_interrupts_and_later_completes():
    text = "data.skip(1).take(2).map(fun x -> math.add(x, 1))"
    binding, graph, pcache, lib = setup(text)
    with pytest.raises(PreviewInterrupted):
        eval_preview(binding.command_vertices[0], graph, pcache, lib,
                     Budget(max_steps=2))
    # completed intermediates stayed cached; a fresh budget finishes
    done = eval_preview(binding.command_vertices[0], graph, pcache, lib,
                        Budget(max_steps=100))
    fresh_binding, fresh_graph, fresh_cache, fresh_lib = setup(text)
    reference = eval_preview(fresh_binding.command_vertices[0], fresh_graph,
                             fresh_cache, fresh_lib)
    assert previews_equal(done, reference)


def test_cancel_flag_interrupts():
    binding, graph, pcache, lib = setup("data.skip(3).take(4)")
    with pytest.raises(PreviewInterrupted):
        eval_preview(binding.command_vertices[0], graph, pcache, lib,
                     Budget(cancelled=lambda: True))


def test_expired_deadline_interrupts():
    binding, graph, pcache, lib = setup("data.skip(3)")
    with pytest.raises(PreviewInterrupted):
        eval_preview(binding.command_vertices[0], graph, pcache, lib,
                     Budget(time_limit=-1.0))


def test_serialize_preview_shapes():
    assert serialize_preview(Evaluated(num(4))) == {"evaluated": {"num": 4}}
    delayed = Delayed(MemberAccess(Var("x"), "take", [Value(num(1))]), ("x",))
    assert serialize_preview(delayed) == {"delayed": ["x.take(1)", ["x"]]}


def test_render_preview_states():
    done = render_preview(Evaluated(num(4)))
    assert done["state"] == "evaluated" and done["kind"] == "number"
    pending = render_preview(Delayed(Var("x"), ("x",)))
    assert pending["state"] == "delayed" and pending["needs"] == ["x"]


def test_previews_equal_distinguishes_values_and_shapes():
    assert previews_equal(Evaluated(num(1)), Evaluated(num(1)))
    assert not previews_equal(Evaluated(num(1)), Evaluated(num(2)))
    assert not previews_equal(Evaluated(num(1)), Delayed(Value(num(1)), ()))
    assert previews_equal(Delayed(Var("x"), ("x",)), Delayed(Var("x"), ("x",)))
