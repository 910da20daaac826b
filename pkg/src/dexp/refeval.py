"""Reference evaluator: small-step semantics run to completion.

This is the slow, obviously-correct interpreter the incremental engine is
measured against.  Commands evaluate left to right; a let binding
evaluates its term once and substitutes the resulting value into every
later command that sees the binding.  Member calls evaluate the instance
and the arguments left to right, then hand the call to the external
library; lambdas in argument position become closures.

Evaluation is total as long as the library is: every command produces an
Obj, with the error value standing in for all misuse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional

from .objects import (Closure, ExternalLibrary, Obj, bottom, is_bottom,
                      unbound_variable)
from .syntax import (Command, Expr, ExprCommand, Lambda, LetBinding,
                     MemberAccess, Program, Value, Var, copy_expr, subst)

DEFAULT_APPLY_DEPTH = 10_000


class EvalBudgetExceeded(RuntimeError):
    """Raised only when an explicit step guard is given and exhausted."""


@dataclass
class _State:
    lib: ExternalLibrary
    max_steps: Optional[int]
    apply_limit: int
    steps: int = 0
    apply_depth: int = 0

    def step(self):
        self.steps += 1
        if self.max_steps is not None and self.steps > self.max_steps:
            raise EvalBudgetExceeded(f"exceeded {self.max_steps} reduction steps")


def _eval_value(expr: Expr, state: _State):
    """Obj for terms, Closure for lambdas."""

    if isinstance(expr, Lambda):
        return Closure(expr.param, expr.body)
    return _eval_term(expr, state)


def _eval_term(expr: Expr, state: _State) -> Obj:
    if isinstance(expr, Value):
        return expr.obj
    if isinstance(expr, Var):
        roots = state.lib.root_bindings
        if expr.name in roots:
            return roots[expr.name]
        return unbound_variable(expr.name)
    if isinstance(expr, MemberAccess):
        receiver = _eval_term(expr.instance, state)
        args = [_eval_value(a, state) for a in expr.args]
        state.step()
        return state.lib.eval_member(receiver, expr.member, args,
                                     _make_apply(state))
    if isinstance(expr, Lambda):
        # grammar keeps lambdas out of term position; guard anyway
        return bottom("a function value cannot be used as a result")
    raise TypeError(f"not an expression: {expr!r}")


def _apply(closure: Closure, arg: Obj, state: _State) -> Obj:
    if state.apply_depth >= state.apply_limit:
        return bottom("application depth limit exceeded")
    state.apply_depth += 1
    try:
        state.step()
        body = subst(closure.body, closure.param, Value(arg))
        result = _eval_value(body, state)
    except RecursionError:
        return bottom("evaluation too deep")
    finally:
        state.apply_depth -= 1
    if isinstance(result, Closure):
        return bottom("a function value cannot be used as a result")
    return result


def _make_apply(state: _State) -> Callable[[Closure, Obj], Obj]:
    return lambda closure, arg: _apply(closure, arg, state)


def apply_closure(closure: Closure, arg: Obj, lib: ExternalLibrary,
                  max_steps: Optional[int] = None,
                  apply_limit: int = DEFAULT_APPLY_DEPTH) -> Obj:
    """Apply a closure to an object value; this is also the callback handed
    to libraries during evaluation."""

    return _apply(closure, arg, _State(lib, max_steps, apply_limit))


def _subst_commands(bodies: List[Expr], commands: List[Command], start: int,
                    name: str, replacement: Expr) -> None:
    """Substitute into bodies[start:], stopping after a let that rebinds
    name (its own term is still in the outer scope)."""

    for j in range(start, len(bodies)):
        bodies[j] = subst(bodies[j], name, replacement)
        if isinstance(commands[j], LetBinding) and commands[j].name == name:
            break


def evaluate(program: Program, lib: ExternalLibrary,
             max_steps: Optional[int] = None,
             apply_limit: int = DEFAULT_APPLY_DEPTH) -> List[Obj]:
    """One result per command, in order.

    Requires a program that parsed cleanly; run the commands you have and
    skip error regions at the call site if you want partial results.
    """

    if program.errors:
        raise ValueError("cannot evaluate a program with parse errors")
    state = _State(lib, max_steps, apply_limit)
    bodies = [copy_expr(c.body) for c in program.commands]
    results: List[Obj] = []
    for i, cmd in enumerate(program.commands):
        value = _eval_term(bodies[i], state)
        results.append(value)
        if isinstance(cmd, LetBinding):
            state.step()
            _subst_commands(bodies, program.commands, i + 1, cmd.name, Value(value))
    return results


# ---------------------------------------------------------------------------
# Let elimination: rewrite `let x = t` to a bare `t`, substituting the
# un-evaluated term (not its value) into the commands that used x.  Used to
# relate programs with and without bindings; evaluation results agree.

def let_eliminate(program: Program) -> Program:
    """Remove the first let binding; identity if there is none."""

    if program.errors:
        raise ValueError("cannot transform a program with parse errors")
    idx = next((i for i, c in enumerate(program.commands)
                if isinstance(c, LetBinding)), None)
    if idx is None:
        return program
    target = program.commands[idx]
    commands: List[Command] = []
    for i, cmd in enumerate(program.commands):
        body = copy_expr(cmd.body)
        if i == idx:
            commands.append(ExprCommand(body, cmd.span, cmd.token_span))
        elif isinstance(cmd, LetBinding):
            commands.append(LetBinding(cmd.name, body, cmd.span, cmd.token_span))
        else:
            commands.append(ExprCommand(body, cmd.span, cmd.token_span))
    bodies = [c.body for c in commands]
    _subst_commands(bodies, commands, idx + 1, target.name, target.body)
    for cmd, body in zip(commands, bodies):
        cmd.body = body
    out = Program("", commands, [])
    from .syntax import pretty
    out.source = pretty(out)
    return out


def let_eliminate_all(program: Program) -> Program:
    """Fixpoint of let_eliminate; terminates because every pass removes a
    binding."""

    current = program
    for _ in range(len(program.commands) + 1):
        nxt = let_eliminate(current)
        if nxt is current:
            return current
        current = nxt
    return current
