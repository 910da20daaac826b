"""Strategy benchmark: replay an edit script, counting external calls.

An edit script is a list of full program texts, one per editing step
(token-level snapshots, so many steps do not parse).  Three strategies
replay it:

* cbv: parse and evaluate every recovered command from scratch each step;
* lazy: like cbv, but image operations build thunks and the real pixel
  work happens once per step when results are forced for display;
* live: one engine session threaded across steps, so the node and
  preview caches persist and unchanged sub-expressions cost nothing.

Per step we record wall time and per-member call counts; for cbv and
lazy the counter covers that step only, for live it is the growth of the
session counter.  Time is reported but deliberately never asserted
anywhere; call counts are the portable signal.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

from . import refeval
from .depgraph import NodeCache, rebind
from .extlibs import CountingLib, ImageLib, ListMathLib, TableLib, standard_library
from .objects import (ApplyFn, CompositeLibrary, Obj, bottom, is_bottom,
                      module, num_list, serialize_value)
from .preview import (Evaluated, PreviewCache, command_previews,
                      serialize_preview)
from .syntax import Program, parse

IMAGE_MEMBERS = frozenset({"load", "greyScale", "blur", "combine"})
STRATEGIES = ("cbv", "lazy", "live")

_THUNK = "imagethunk"


@dataclass(frozen=True)
class EditStep:
    text: str
    label: str = ""


@dataclass
class StepReport:
    index: int  # 1-based, matching the published step numbering
    label: str
    parse_ok: bool
    ms: float
    calls: Dict[str, int]
    total: int
    values: List[object] = field(default_factory=list)  # serialized results


def load_script(path) -> List[EditStep]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ValueError("edit script must be a JSON array")
    steps = []
    for entry in raw:
        steps.append(EditStep(entry["text"], entry.get("label", "")))
    return steps


def save_script(steps: Sequence[EditStep], path) -> None:
    raw = [{"text": s.text, **({"label": s.label} if s.label else {})}
           for s in steps]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(raw, fh, indent=2)
        fh.write("\n")


def bundled_edit_script() -> List[EditStep]:
    """Token-by-token construction of a two-image program, 38 snapshots.

    The session builds a load/greyScale/blur chain (changing the blur
    radius once it works), introduces a let binding, combines with a
    second image (changing the ratio), and finally extracts the ratio
    into its own binding.  Labels a..h mark the steps the analysis calls
    out.
    """

    chain4 = 'image.load("shadow.png").greyScale().blur(4)'
    chain8 = 'image.load("shadow.png").greyScale().blur(8)'
    let_line = f"let shadow = {chain8}"
    combine_20 = 'shadow.combine(image.load("poppe.png"), 20)'
    combine_80 = 'shadow.combine(image.load("poppe.png"), 80)'
    combine_ratio = 'shadow.combine(image.load("poppe.png"), ratio)'

    steps = [
        EditStep("image"),
        EditStep("image."),
        EditStep("image.load"),
        EditStep("image.load("),
        EditStep('image.load("shadow.png"'),
        EditStep('image.load("shadow.png")', "a"),
        EditStep('image.load("shadow.png").'),
        EditStep('image.load("shadow.png").greyScale', "b"),
        EditStep('image.load("shadow.png").greyScale('),
        EditStep('image.load("shadow.png").greyScale()'),
        EditStep('image.load("shadow.png").greyScale().'),
        EditStep('image.load("shadow.png").greyScale().blur', "c"),
        EditStep('image.load("shadow.png").greyScale().blur('),
        EditStep(chain4),
        EditStep(chain8, "d"),
        EditStep(f"let {chain8}"),
        EditStep(f"let shadow {chain8}"),
        EditStep(let_line, "e"),
        EditStep(f"{let_line}\nshadow"),
        EditStep(f"{let_line}\nshadow."),
        EditStep(f"{let_line}\nshadow.combine", "f"),
        EditStep(f"{let_line}\nshadow.combine("),
        EditStep(f"{let_line}\nshadow.combine(image"),
        EditStep(f"{let_line}\nshadow.combine(image."),
        EditStep(f"{let_line}\nshadow.combine(image.load"),
        EditStep(f"{let_line}\nshadow.combine(image.load("),
        EditStep(f'{let_line}\nshadow.combine(image.load("poppe.png"'),
        EditStep(f'{let_line}\nshadow.combine(image.load("poppe.png")'),
        EditStep(f'{let_line}\nshadow.combine(image.load("poppe.png"),'),
        EditStep(f'{let_line}\nshadow.combine(image.load("poppe.png"), 20'),
        EditStep(f"{let_line}\n{combine_20}"),
        EditStep(f'{let_line}\nshadow.combine(image.load("poppe.png"), )'),
        EditStep(f"{let_line}\n{combine_80}", "g"),
        EditStep(f"let\n{let_line}\n{combine_80}"),
        EditStep(f"let ratio\n{let_line}\n{combine_80}"),
        EditStep(f"let ratio =\n{let_line}\n{combine_80}"),
        EditStep(f"let ratio = 80\n{let_line}\n{combine_80}", "h"),
        EditStep(f"let ratio = 80\n{let_line}\n{combine_ratio}"),
    ]
    assert len(steps) == 38
    return steps


# ---------------------------------------------------------------------------
# The lazy image library: thunks at call time, pixel work at force time

def _reject(member: str, args) -> Optional[Obj]:
    """Argument validation matching the eager image library's messages."""

    if member == "load":
        if len(args) != 1 or not (isinstance(args[0], Obj)
                                  and args[0].tag == "str"):
            return bottom("load expects one file name")
    elif member == "greyScale":
        if args:
            return bottom("greyScale expects no arguments")
    elif member == "blur":
        if len(args) != 1:
            return bottom("blur expects one radius")
        n = args[0]
        ok = (isinstance(n, Obj) and n.tag == "num"
              and float(n.payload).is_integer() and n.payload >= 0)
        if not ok:
            return bottom("blur expects a whole radius >= 0")
    elif member == "combine":
        if len(args) != 2:
            return bottom("combine expects an image and a ratio")
        if not (isinstance(args[0], Obj) and args[0].tag in ("image", _THUNK)):
            return bottom("combine expects an image as its first argument")
        if not (isinstance(args[1], Obj) and args[1].tag == "num"):
            return bottom("combine expects a numeric ratio")
        if not 0 <= args[1].payload <= 100:
            return bottom("combine ratio must be between 0 and 100")
    return None


class LazyImageLib:
    """Thunk-building variant of the image library.

    eval_member validates arguments (so failures cost nothing) and
    returns a thunk Obj; force() walks a thunk bottom-up through the
    wrapped eager library, memoising within the pass.  Wrap the inner
    library in a counter and the counts reflect actual pixel work.
    """

    def __init__(self, inner):
        self.inner = inner  # eager ImageLib, possibly counted

    @property
    def root_bindings(self) -> Mapping[str, Obj]:
        return {"image": module("image")}

    def owns(self, receiver: Obj) -> bool:
        if not isinstance(receiver, Obj):
            return False
        if receiver.tag in (_THUNK, "image"):
            return True
        return receiver.tag == "module" and receiver.payload == "image"

    def eval_member(self, receiver: Obj, member: str, args, apply: ApplyFn) -> Obj:
        if is_bottom(receiver):
            return receiver
        for a in args:
            if isinstance(a, Obj) and is_bottom(a):
                return a
        if receiver.tag == "module":
            if member != "load":
                return bottom(f"image module has no member {member!r}")
            return _reject(member, args) or Obj(_THUNK, ("load", tuple(args)))
        if member not in ("greyScale", "blur", "combine"):
            return bottom(f"an image has no member {member!r}")
        failure = _reject(member, args)
        if failure is not None:
            return failure
        return Obj(_THUNK, (member, (receiver,) + tuple(args)))

    def force(self, value, memo: Optional[Dict[Obj, Obj]] = None) -> Obj:
        if memo is None:
            memo = {}
        if not (isinstance(value, Obj) and value.tag == _THUNK):
            return value
        if value in memo:
            return memo[value]
        op, operands = value.payload
        no_apply = lambda c, a: bottom("image operations take no functions")
        if op == "load":
            result = self.inner.eval_member(module("image"), "load",
                                            list(operands), no_apply)
        else:
            receiver = self.force(operands[0], memo)
            args = [self.force(a, memo) for a in operands[1:]]
            result = self.inner.eval_member(receiver, op, args, no_apply)
        memo[value] = result
        return result


# ---------------------------------------------------------------------------
# Replay

def _clean(program: Program) -> Program:
    """The recovered commands alone, evaluable even when the text had
    broken regions."""

    return Program(program.source, program.commands, [])


def _data_values():
    return range(100)


def replay(script: Sequence[EditStep], strategy: str,
           asset_dir=None) -> List[StepReport]:
    if strategy == "cbv":
        return _replay_cbv(script, asset_dir)
    if strategy == "lazy":
        return _replay_lazy(script, asset_dir)
    if strategy == "live":
        return _replay_live(script, asset_dir)
    raise ValueError(f"unknown strategy: {strategy}")


def _replay_cbv(script, asset_dir) -> List[StepReport]:
    lib = CountingLib(standard_library(asset_dir))
    reports = []
    for i, step in enumerate(script, start=1):
        lib.reset()
        t0 = time.perf_counter()
        program = parse(step.text)
        values = refeval.evaluate(_clean(program), lib)
        ms = (time.perf_counter() - t0) * 1000.0
        reports.append(StepReport(i, step.label, not program.errors, ms,
                                  lib.snapshot(), lib.total(),
                                  [serialize_value(v) for v in values]))
    return reports


def _replay_lazy(script, asset_dir) -> List[StepReport]:
    counted = CountingLib(ImageLib(asset_dir))
    lazy = LazyImageLib(counted)
    lib = CompositeLibrary([ListMathLib({"data": num_list(_data_values())}),
                            lazy, TableLib()])
    reports = []
    for i, step in enumerate(script, start=1):
        counted.reset()
        t0 = time.perf_counter()
        program = parse(step.text)
        raw = refeval.evaluate(_clean(program), lib)
        memo: Dict[Obj, Obj] = {}
        values = [lazy.force(v, memo) if isinstance(v, Obj) else v
                  for v in raw]
        ms = (time.perf_counter() - t0) * 1000.0
        reports.append(StepReport(i, step.label, not program.errors, ms,
                                  counted.snapshot(), counted.total(),
                                  [serialize_value(v) for v in values]))
    return reports


def _replay_live(script, asset_dir) -> List[StepReport]:
    lib = CountingLib(standard_library(asset_dir))
    roots = list(lib.root_bindings)
    node_cache = NodeCache()
    preview_cache = PreviewCache()
    reports = []
    for i, step in enumerate(script, start=1):
        snap = lib.snapshot()
        t0 = time.perf_counter()
        binding, node_cache = rebind(node_cache, step.text, roots)
        previews = command_previews(binding, binding.graph, preview_cache, lib)
        ms = (time.perf_counter() - t0) * 1000.0
        calls = lib.since(snap)
        values = [serialize_value(p.value) if isinstance(p, Evaluated)
                  else serialize_preview(p) for _, p in previews]
        reports.append(StepReport(i, step.label, not binding.program.errors,
                                  ms, calls, sum(calls.values()), values))
    return reports


# ---------------------------------------------------------------------------
# Summaries

def histogram(delays: Iterable[float], bin_width: float = 10.0,
              minimum: Optional[float] = None) -> Dict[int, int]:
    """Delay counts per bin (keyed by the bin's lower edge); an optional
    strict lower cut-off drops small delays first."""

    bins: Dict[int, int] = {}
    for d in delays:
        if minimum is not None and d <= minimum:
            continue
        lo = int(d // bin_width) * int(bin_width)
        bins[lo] = bins.get(lo, 0) + 1
    return bins


@dataclass
class Summary:
    rows: List[Dict[str, object]]
    histogram: Dict[str, Dict[int, int]]
    histogram_over_15: Dict[str, Dict[int, int]]


def summarize(runs: Mapping[str, Sequence[StepReport]]) -> Summary:
    rows = []
    hist = {}
    hist15 = {}
    for strategy, reports in runs.items():
        for r in reports:
            rows.append({
                "step": r.index,
                "label": r.label,
                "strategy": strategy,
                "ms": round(r.ms, 3),
                "total_calls": r.total,
                "calls_json": json.dumps(r.calls, sort_keys=True),
            })
        delays = [r.ms for r in reports]
        hist[strategy] = histogram(delays)
        hist15[strategy] = histogram(delays, minimum=15.0)
    rows.sort(key=lambda row: (row["step"], row["strategy"]))
    return Summary(rows, hist, hist15)


CSV_COLUMNS = ("step", "label", "strategy", "ms", "total_calls", "calls_json")


def write_csv(rows: Sequence[Mapping[str, object]], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
