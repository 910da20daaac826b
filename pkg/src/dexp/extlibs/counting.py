"""Call-counting wrapper around any external library.

Forwarding is exact: results, roots and ownership are the inner
library's.  The wrapper only records how many times each member name was
asked for, which is what the benchmark and the reuse tests measure.
"""

from __future__ import annotations

from typing import Dict, Mapping, Optional

from ..objects import ApplyFn, ExternalLibrary, Obj


class CountingLib(ExternalLibrary):
    def __init__(self, inner: ExternalLibrary):
        self.inner = inner
        self.counts: Dict[str, int] = {}

    @property
    def root_bindings(self) -> Mapping[str, Obj]:
        return self.inner.root_bindings

    def owns(self, receiver: Obj) -> bool:
        return self.inner.owns(receiver)

    def eval_member(self, receiver: Obj, member: str, args, apply: ApplyFn) -> Obj:
        self.counts[member] = self.counts.get(member, 0) + 1
        return self.inner.eval_member(receiver, member, args, apply)

    def type_of(self, obj: Obj):
        fn = getattr(self.inner, "type_of", None)
        return fn(obj) if fn is not None else None

    @property
    def root_types(self):
        return getattr(self.inner, "root_types", None) or {}

    def reset(self) -> None:
        self.counts.clear()

    def snapshot(self) -> Dict[str, int]:
        return dict(self.counts)

    def total(self, members: Optional[set] = None) -> int:
        if members is None:
            return sum(self.counts.values())
        return sum(n for m, n in self.counts.items() if m in members)

    def since(self, snapshot: Dict[str, int]) -> Dict[str, int]:
        """Per-member growth since a snapshot (zero entries omitted)."""

        delta = {}
        for member, count in self.counts.items():
            grown = count - snapshot.get(member, 0)
            if grown:
                delta[member] = grown
        return delta
