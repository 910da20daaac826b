"""Lists of numbers and integer arithmetic.

Roots: `list` (constructor module) and `math` (binary arithmetic), plus
any extra list-valued roots handed to the constructor, which is how a
session gets a ready-made `data` collection.  Lists support map, and the
paging pair skip/take; map is the classic one, skip/take are small
extensions so list programs can do something before mapping.
"""

from __future__ import annotations

from typing import Mapping, Optional

from ..objects import (ApplyFn, Closure, Obj, bottom, is_bottom, module,
                       num, num_list)
from ..typecheck import (ErrorType, FunType, MemberSig, NUM, ObjType, TEXT,
                         Type, TypedLibrary)

NUM_LIST = ObjType("list of num")
NUM_LIST.members.update({
    "map": MemberSig((FunType(NUM, NUM),), NUM_LIST),
    "skip": MemberSig((NUM,), NUM_LIST),
    "take": MemberSig((NUM,), NUM_LIST),
})

LIST_MODULE = ObjType("list module", {
    "range": MemberSig((NUM, NUM), NUM_LIST),
})

MATH_MODULE = ObjType("math module", {
    "add": MemberSig((NUM, NUM), NUM),
    "sub": MemberSig((NUM, NUM), NUM),
    "mul": MemberSig((NUM, NUM), NUM),
})

_RANGE_LIMIT = 1_000_000


def _whole(value, minimum: Optional[int] = None) -> Optional[int]:
    """Integer content of a num Obj, or None when it is not a whole number
    (or falls below the given floor)."""

    if not (isinstance(value, Obj) and value.tag == "num"):
        return None
    n = value.payload
    if isinstance(n, float):
        if not n.is_integer():
            return None
        n = int(n)
    if minimum is not None and n < minimum:
        return None
    return n


class ListMathLib(TypedLibrary):
    def __init__(self, extra_roots: Optional[Mapping[str, Obj]] = None):
        self._extra = dict(extra_roots or {})
        for name, obj in self._extra.items():
            if not (isinstance(obj, Obj) and obj.tag == "list"):
                raise ValueError(f"root {name!r} must be a list")

    @property
    def root_bindings(self) -> Mapping[str, Obj]:
        roots = {"list": module("list"), "math": module("math")}
        roots.update(self._extra)
        return roots

    @property
    def root_types(self) -> Mapping[str, Type]:
        types = {"list": LIST_MODULE, "math": MATH_MODULE}
        for name in self._extra:
            types[name] = NUM_LIST
        return types

    def owns(self, receiver: Obj) -> bool:
        if not isinstance(receiver, Obj):
            return False
        if receiver.tag in ("num", "str", "list"):
            return True
        return receiver.tag == "module" and receiver.payload in ("list", "math")

    def type_of(self, obj: Obj) -> Optional[Type]:
        if is_bottom(obj):
            return ErrorType(obj.payload or "failed computation")
        if obj.tag == "num":
            return NUM
        if obj.tag == "str":
            return TEXT
        if obj.tag == "list":
            if all(isinstance(el, Obj) and el.tag == "num" for el in obj.payload):
                return NUM_LIST
            return None
        if obj.tag == "module":
            return {"list": LIST_MODULE, "math": MATH_MODULE}.get(obj.payload)
        return None

    def eval_member(self, receiver: Obj, member: str, args, apply: ApplyFn) -> Obj:
        if not isinstance(receiver, Obj):  # a bare closure value
            return bottom(f"a function has no member {member!r}")
        if is_bottom(receiver):
            return receiver
        for a in args:
            if isinstance(a, Obj) and is_bottom(a):
                return a

        if receiver.tag == "module" and receiver.payload == "list":
            if member == "range":
                return self._range(args)
            return bottom(f"list module has no member {member!r}")

        if receiver.tag == "module" and receiver.payload == "math":
            if member in ("add", "sub", "mul"):
                return self._arith(member, args)
            return bottom(f"math module has no member {member!r}")

        if receiver.tag == "list":
            if member == "map":
                return self._map(receiver, args, apply)
            if member in ("skip", "take"):
                return self._page(receiver, member, args)
            return bottom(f"a list has no member {member!r}")

        return bottom(f"{receiver.tag} has no member {member!r}")

    def _range(self, args) -> Obj:
        if len(args) != 2:
            return bottom("range expects two numbers")
        lo, hi = _whole(args[0]), _whole(args[1])
        if lo is None or hi is None:
            return bottom("range expects whole numbers")
        if hi - lo > _RANGE_LIMIT:
            return bottom("range too large")
        return num_list(range(lo, hi))

    def _arith(self, member: str, args) -> Obj:
        if len(args) != 2 or not all(
                isinstance(a, Obj) and a.tag == "num" for a in args):
            return bottom(f"{member} expects two numbers")
        a, b = args[0].payload, args[1].payload
        if member == "add":
            return num(a + b)
        if member == "sub":
            return num(a - b)
        return num(a * b)

    def _map(self, receiver: Obj, args, apply: ApplyFn) -> Obj:
        if len(args) != 1 or not isinstance(args[0], Closure):
            return bottom("map expects a function")
        # per-element failures stay in place: the result is a list whose
        # elements are whatever the function produced, including errors
        return Obj("list", tuple(apply(args[0], el) for el in receiver.payload))

    def _page(self, receiver: Obj, member: str, args) -> Obj:
        if len(args) != 1:
            return bottom(f"{member} expects one number")
        n = _whole(args[0], minimum=0)
        if n is None:
            return bottom(f"{member} expects a whole number of elements")
        items = receiver.payload
        return Obj("list", items[n:] if member == "skip" else items[:n])
