"""Runtime values and the external-library interface.

Everything a script can compute is an Obj: a tagged, immutable value owned
by some external library (numbers, strings, lists, images, tables) plus the
distinguished error value produced when a library is misused.  Lambdas
evaluate to Closure, which is deliberately not an Obj: libraries receive
closures only as arguments and can do nothing with them except apply them
through the callback they are handed.
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Sequence

BOTTOM_TAG = "bottom"


@dataclass(frozen=True)
class ImageData:
    """Raster payload: mode is "L" or "RGB", pixels packed row-major."""

    width: int
    height: int
    mode: str
    pixels: bytes


@dataclass(frozen=True)
class TableData:
    columns: tuple
    rows: tuple  # tuple of row tuples; cells are int, float or str


@dataclass(frozen=True)
class GroupedData:
    """A table grouped by one column with pending aggregations.

    aggs is a tuple of ("sum" | "countDistinct", column) pairs in the order
    they were requested; materialisation emits one column per entry.
    """

    table: TableData
    key: str
    aggs: tuple = ()


def _freeze(payload: Any) -> Any:
    if isinstance(payload, list):
        return tuple(_freeze(p) for p in payload)
    if isinstance(payload, tuple):
        return tuple(_freeze(p) for p in payload)
    return payload


def _payload_key(payload: Any) -> Any:
    # int and float compare equal in Python (1 == 1.0); keep them distinct
    # so literals render back exactly as written.
    if isinstance(payload, bool):
        raise TypeError("bool is not a script value")
    if isinstance(payload, int):
        return ("i", payload)
    if isinstance(payload, float):
        return ("f", payload)
    if isinstance(payload, tuple):
        return tuple(_payload_key(p) for p in payload)
    return payload


class Obj:
    """An immutable library-owned value; hash/equality follow content."""

    __slots__ = ("tag", "payload", "_key")

    def __init__(self, tag: str, payload: Any = None):
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "payload", _freeze(payload))
        object.__setattr__(self, "_key", (tag, _payload_key(self.payload)))

    def __setattr__(self, name, value):
        raise AttributeError("Obj is immutable")

    def __eq__(self, other):
        return isinstance(other, Obj) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Obj({self.tag!r}, {self.payload!r})"

    def key(self):
        return self._key


def num(value) -> Obj:
    return Obj("num", value)


def string(value: str) -> Obj:
    return Obj("str", value)


def num_list(values: Iterable) -> Obj:
    return Obj("list", tuple(num(v) for v in values))


def module(name: str) -> Obj:
    return Obj("module", name)


def bottom(message: Optional[str] = None) -> Obj:
    """The error value.  Carries an optional diagnostic message."""

    return Obj(BOTTOM_TAG, message)


def is_bottom(obj: Obj) -> bool:
    return isinstance(obj, Obj) and obj.tag == BOTTOM_TAG


def unbound_variable(name: str) -> Obj:
    # shared by the evaluator and the preview engine so both report the
    # same value for the same mistake
    return bottom(f"unbound variable: {name}")


@dataclass(eq=False)
class Closure:
    """A lambda value: parameter name plus un-evaluated body expression.

    The body has no free variables other than the parameter (and parameters
    of lambdas nested inside it); let-bound names are substituted away
    before a closure is ever formed.
    """

    param: str
    body: Any  # syntax.Expr; untyped here to avoid an import cycle


Value = Any  # Obj | Closure
ApplyFn = Callable[[Closure, Obj], Obj]


def serialize_value(value: Value) -> Any:
    """Canonical JSON-ready form; used for equality checks in tests.

    Two values serialize equal iff the engine treats them as the same
    result.  Image pixels are folded to a digest to keep payloads small.
    """

    if isinstance(value, Closure):
        from . import syntax  # local import; syntax depends on this module

        return {"closure": [value.param, syntax.expr_to_text(value.body)]}
    if not isinstance(value, Obj):
        raise TypeError(f"not a script value: {value!r}")
    tag, payload = value.tag, value.payload
    if tag == "num":
        return {"num": payload}
    if tag == "str":
        return {"str": payload}
    if tag == BOTTOM_TAG:
        return {"error": payload}
    if tag == "module":
        return {"module": payload}
    if tag == "list":
        return {"list": [serialize_value(v) for v in payload]}
    if tag == "image":
        digest = hashlib.sha256(payload.pixels).hexdigest()
        return {"image": [payload.width, payload.height, payload.mode, digest]}
    if tag == "table":
        return {"table": {"columns": list(payload.columns),
                          "rows": [list(r) for r in payload.rows]}}
    if tag == "grouped":
        return {"grouped": {"table": serialize_value(Obj("table", payload.table)),
                            "key": payload.key,
                            "aggs": [list(a) for a in payload.aggs]}}
    return {tag: repr(payload)}


class ExternalLibrary(ABC):
    """A total, deterministic member-call interpreter over its own objects.

    Contract, which every bundled library and every test double honours:

    * totality: eval_member always returns an Obj; misuse (unknown member,
      wrong arity, wrong argument kinds, error receiver/arguments) returns
      bottom(), never raises;
    * determinism: equal receiver and arguments give an equal result;
    * the apply callback is only used during the call and never retained.
    """

    @property
    @abstractmethod
    def root_bindings(self) -> Mapping[str, Obj]:
        """Names this library injects into the top-level scope."""

    @abstractmethod
    def owns(self, receiver: Obj) -> bool:
        """Whether member calls on this receiver belong to this library."""

    @abstractmethod
    def eval_member(self, receiver: Obj, member: str,
                    args: Sequence[Value], apply: ApplyFn) -> Obj:
        ...


class CompositeLibrary(ExternalLibrary):
    """Routes each call to the first component that owns the receiver."""

    def __init__(self, libs: Sequence[ExternalLibrary]):
        self.libs = list(libs)
        roots: Dict[str, Obj] = {}
        for lib in self.libs:
            for name, obj in lib.root_bindings.items():
                if name in roots and roots[name] != obj:
                    raise ValueError(f"conflicting root binding: {name}")
                roots[name] = obj
        self._roots = roots

    @property
    def root_bindings(self) -> Mapping[str, Obj]:
        return self._roots

    def owns(self, receiver: Obj) -> bool:
        return any(lib.owns(receiver) for lib in self.libs)

    def eval_member(self, receiver, member, args, apply):
        if is_bottom(receiver):
            return receiver
        for lib in self.libs:
            if lib.owns(receiver):
                return lib.eval_member(receiver, member, args, apply)
        return bottom(f"no library handles receiver of kind {receiver.tag!r}")

    # Type information is optional on components; the composite exposes
    # whatever its members declare (duck-typed so this module stays free
    # of the type checker).

    def type_of(self, obj):
        for lib in self.libs:
            if lib.owns(obj):
                fn = getattr(lib, "type_of", None)
                return fn(obj) if fn is not None else None
        return None

    @property
    def root_types(self):
        merged: Dict[str, Any] = {}
        for lib in self.libs:
            for name, t in (getattr(lib, "root_types", None) or {}).items():
                merged.setdefault(name, t)
        return merged
