"""Surface syntax: tokenizer, error-tolerating parser, printer, cursor math.

A script is a sequence of commands separated by newlines (or `;`).  A
command is either `let name = term` or a bare term.  Terms are literals,
variables and member-call chains `t.m(e, ...)`; arguments may additionally
be lambdas `fun x -> e`.  There are no operators, grouping parentheses or
collection literals.

The parser never gives up on the whole text: a malformed region is turned
into a ParseError and parsing resumes at the next command boundary, i.e.
the next newline at zero parenthesis/bracket depth.  Spans of commands and
errors tile the entire input (leading trivia attaches to the following
item, separators and trailing trivia to the preceding one), which the
editor relies on to map offsets back to commands.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from .objects import Obj, num, string

_BARE_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_KEYWORDS = {"let", "fun"}


@dataclass(frozen=True)
class Span:
    start: int
    end: int

    def contains(self, offset: int) -> bool:
        return self.start <= offset < self.end

    def size(self) -> int:
        return self.end - self.start


# ---------------------------------------------------------------------------
# AST.  Nodes compare by identity (they double as graph-binding keys);
# structural comparison is the explicit function further down.

@dataclass(eq=False)
class Expr:
    span: Optional[Span] = field(default=None, init=False)


@dataclass(eq=False)
class Value(Expr):
    obj: Obj

    def __init__(self, obj: Obj, span: Optional[Span] = None):
        self.obj = obj
        self.span = span


@dataclass(eq=False)
class Var(Expr):
    name: str

    def __init__(self, name: str, span: Optional[Span] = None):
        self.name = name
        self.span = span


@dataclass(eq=False)
class MemberAccess(Expr):
    instance: Expr
    member: str
    args: List[Expr]

    def __init__(self, instance: Expr, member: str, args: Sequence[Expr],
                 span: Optional[Span] = None, member_span: Optional[Span] = None):
        self.instance = instance
        self.member = member
        self.args = list(args)
        self.span = span
        self.member_span = member_span


@dataclass(eq=False)
class Lambda(Expr):
    param: str
    body: Expr

    def __init__(self, param: str, body: Expr, span: Optional[Span] = None):
        self.param = param
        self.body = body
        self.span = span


@dataclass(eq=False)
class Command:
    body: Expr
    span: Span        # tiling span, includes surrounding trivia
    token_span: Span  # first to last token, used for cursor lookup


@dataclass(eq=False)
class LetBinding(Command):
    name: str

    def __init__(self, name: str, body: Expr, span: Span, token_span: Span):
        self.name = name
        self.body = body
        self.span = span
        self.token_span = token_span


@dataclass(eq=False)
class ExprCommand(Command):
    def __init__(self, body: Expr, span: Span, token_span: Span):
        self.body = body
        self.span = span
        self.token_span = token_span


@dataclass(frozen=True)
class ParseError:
    span: Span
    message: str
    recovered_at: int  # offset where parsing resumed; lies at a command boundary


@dataclass(eq=False)
class Program:
    source: str
    commands: List[Command]
    errors: List[ParseError]

    def regions(self) -> List[Tuple[Span, object]]:
        """Commands and errors in source order."""

        items: List[Tuple[Span, object]] = [(c.span, c) for c in self.commands]
        items += [(e.span, e) for e in self.errors]
        items.sort(key=lambda pair: pair[0].start)
        return items


# ---------------------------------------------------------------------------
# Tokenizer

IDENT, NUM, STR, DOT, LPAREN, RPAREN, COMMA, EQ, ARROW, LET, FUN, NEWLINE, \
    SEMI, BAD, EOF = range(15)

_KIND_DESC = {
    IDENT: "identifier", NUM: "number", STR: "string", DOT: "'.'",
    LPAREN: "'('", RPAREN: "')'", COMMA: "','", EQ: "'='", ARROW: "'->'",
    LET: "'let'", FUN: "'fun'", NEWLINE: "end of line", SEMI: "';'",
    BAD: "invalid token", EOF: "end of input",
}


@dataclass(frozen=True)
class Token:
    kind: int
    start: int
    end: int
    value: object = None  # identifier text, numeric value, string value or error note


def tokenize(source: str) -> List[Token]:
    """Full tokenization; never raises.  Newlines inside parentheses are
    treated as whitespace so argument lists may wrap."""

    tokens: List[Token] = []
    i, n, depth = 0, len(source), 0
    while i < n:
        c = source[i]
        if c == "\n":
            if depth == 0:
                tokens.append(Token(NEWLINE, i, i + 1))
            i += 1
        elif c in " \t\r":
            i += 1
        elif c == "#":
            while i < n and source[i] != "\n":
                i += 1
        elif c.isdigit() or (c == "-" and i + 1 < n and source[i + 1].isdigit()):
            start = i
            if c == "-":
                i += 1
            while i < n and source[i].isdigit():
                i += 1
            is_float = False
            if i + 1 < n and source[i] == "." and source[i + 1].isdigit():
                is_float = True
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
            text = source[start:i]
            tokens.append(Token(NUM, start, i, float(text) if is_float else int(text)))
        elif c == "λ":  # λ, synonym for fun
            tokens.append(Token(FUN, i, i + 1, "fun"))
            i += 1
        elif c.isalpha() or c == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_") \
                    and source[i] != "λ":
                i += 1
            text = source[start:i]
            if text == "let":
                tokens.append(Token(LET, start, i, text))
            elif text == "fun":
                tokens.append(Token(FUN, start, i, text))
            elif not text.isascii():
                tokens.append(Token(BAD, start, i, f"unexpected character {text[0]!r}"))
            else:
                tokens.append(Token(IDENT, start, i, text))
        elif c in "'\"":
            quote, start = c, i
            i += 1
            chars: List[str] = []
            closed = False
            while i < n and source[i] != "\n":
                if source[i] == "\\" and i + 1 < n and source[i + 1] != "\n":
                    chars.append(source[i + 1])
                    i += 2
                elif source[i] == quote:
                    i += 1
                    closed = True
                    break
                else:
                    chars.append(source[i])
                    i += 1
            if not closed:
                what = "string" if quote == '"' else "quoted identifier"
                tokens.append(Token(BAD, start, i, f"unterminated {what}"))
            elif quote == '"':
                tokens.append(Token(STR, start, i, "".join(chars)))
            else:
                text = "".join(chars)
                if text:
                    tokens.append(Token(IDENT, start, i, text))
                else:
                    tokens.append(Token(BAD, start, i, "empty quoted identifier"))
        elif c == ".":
            tokens.append(Token(DOT, i, i + 1))
            i += 1
        elif c == "(":
            depth += 1
            tokens.append(Token(LPAREN, i, i + 1))
            i += 1
        elif c == ")":
            depth = max(0, depth - 1)
            tokens.append(Token(RPAREN, i, i + 1))
            i += 1
        elif c == ",":
            tokens.append(Token(COMMA, i, i + 1))
            i += 1
        elif c == "=":
            tokens.append(Token(EQ, i, i + 1))
            i += 1
        elif c == "-" and i + 1 < n and source[i + 1] == ">":
            tokens.append(Token(ARROW, i, i + 2))
            i += 2
        elif c == "→":  # →
            tokens.append(Token(ARROW, i, i + 1))
            i += 1
        elif c == ";":
            if depth == 0:
                tokens.append(Token(SEMI, i, i + 1))
            else:
                tokens.append(Token(BAD, i, i + 1, "';' inside an argument list"))
            i += 1
        else:
            tokens.append(Token(BAD, i, i + 1, f"unexpected character {c!r}"))
            i += 1
    tokens.append(Token(EOF, n, n))
    return tokens


# ---------------------------------------------------------------------------
# Parser

class _Fail(Exception):
    def __init__(self, offset: int, message: str):
        super().__init__(message)
        self.offset = offset
        self.message = message


def _recovery_point(source: str, start: int) -> int:
    """Next command boundary at or after start: the first newline at zero
    bracket depth (depth counted from start, never below zero), else EOF."""

    i, n, depth = start, len(source), 0
    while i < n:
        c = source[i]
        if c in "([":
            depth += 1
        elif c in ")]":
            depth = max(0, depth - 1)
        elif c == "\n" and depth == 0:
            return i + 1
        elif c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        elif c in "'\"":
            quote = c
            i += 1
            while i < n and source[i] not in ("\n", quote):
                i += 2 if source[i] == "\\" else 1
            if i < n and source[i] == quote:
                i += 1
            continue
        i += 1
    return n


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0

    def cur(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def fail(self, message: str) -> "_Fail":
        tok = self.cur()
        if tok.kind == BAD:
            return _Fail(tok.start, str(tok.value))
        return _Fail(tok.start, message)

    def expect(self, kind: int, message: str) -> Token:
        if self.cur().kind != kind:
            raise self.fail(message + f", found {_KIND_DESC[self.cur().kind]}")
        return self.advance()

    # -- grammar ---------------------------------------------------------

    def parse_program(self) -> Program:
        commands: List[Command] = []
        errors: List[ParseError] = []
        last_item = None
        boundary = 0
        n = len(self.source)
        while self.cur().kind != EOF:
            if self.cur().kind in (NEWLINE, SEMI):
                self.advance()
                continue
            token_start = self.cur().start
            try:
                cmd = self.parse_command(boundary, token_start)
                commands.append(cmd)
                last_item = cmd
                boundary = cmd.span.end
            except _Fail as f:
                resume = _recovery_point(self.source, f.offset)
                err = ParseError(Span(boundary, resume), f.message, resume)
                errors.append(err)
                last_item = err
                boundary = resume
                while self.cur().kind != EOF and self.cur().start < resume:
                    self.advance()
        if last_item is not None and boundary < n:
            # trailing trivia joins the final command or error
            if isinstance(last_item, ParseError):
                errors[-1] = ParseError(Span(last_item.span.start, n),
                                        last_item.message, last_item.recovered_at)
            else:
                last_item.span = Span(last_item.span.start, n)
        return Program(self.source, commands, errors)

    def parse_command(self, boundary: int, token_start: int) -> Command:
        if self.cur().kind == LET:
            self.advance()
            name_tok = self.expect(IDENT, "expected a name after 'let'")
            self.expect(EQ, "expected '=' in let binding")
            body = self.parse_term()
            make = lambda span, tspan: LetBinding(str(name_tok.value), body, span, tspan)
        else:
            body = self.parse_term()
            make = lambda span, tspan: ExprCommand(body, span, tspan)
        token_end = self.tokens[self.pos - 1].end
        tok = self.cur()
        if tok.kind in (NEWLINE, SEMI):
            self.advance()
            span_end = tok.end
        elif tok.kind == EOF:
            span_end = tok.start
        else:
            raise self.fail("expected end of command")
        return make(Span(boundary, span_end), Span(token_start, token_end))

    def parse_term(self) -> Expr:
        expr = self.parse_atom()
        while self.cur().kind == DOT:
            self.advance()
            member_tok = self.expect(IDENT, "expected a member name after '.'")
            member_span = Span(member_tok.start, member_tok.end)
            args: List[Expr] = []
            end = member_tok.end
            if self.cur().kind == LPAREN:
                self.advance()
                if self.cur().kind != RPAREN:
                    args.append(self.parse_arg())
                    while self.cur().kind == COMMA:
                        self.advance()
                        args.append(self.parse_arg())
                end = self.expect(RPAREN, "expected ')' after arguments").end
            expr = MemberAccess(expr, str(member_tok.value), args,
                                Span(expr.span.start, end), member_span)
        return expr

    def parse_arg(self) -> Expr:
        if self.cur().kind == FUN:
            fun_tok = self.advance()
            param_tok = self.expect(IDENT, "expected a parameter name")
            self.expect(ARROW, "expected '->' in function literal")
            body = self.parse_arg()
            return Lambda(str(param_tok.value), body,
                          Span(fun_tok.start, body.span.end))
        return self.parse_term()

    def parse_atom(self) -> Expr:
        tok = self.cur()
        if tok.kind == NUM:
            self.advance()
            return Value(num(tok.value), Span(tok.start, tok.end))
        if tok.kind == STR:
            self.advance()
            return Value(string(tok.value), Span(tok.start, tok.end))
        if tok.kind == IDENT:
            self.advance()
            return Var(str(tok.value), Span(tok.start, tok.end))
        if tok.kind == FUN:
            raise _Fail(tok.start,
                        "a function literal is only allowed as a call argument")
        raise self.fail("expected a value or variable")


def parse(source: str) -> Program:
    return _Parser(source).parse_program()


# ---------------------------------------------------------------------------
# Printing

def _ident_text(name: str) -> str:
    if _BARE_IDENT.match(name) and name not in _KEYWORDS:
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def _literal_text(obj: Obj) -> str:
    if obj.tag == "num":
        return repr(obj.payload)
    if obj.tag == "str":
        escaped = obj.payload.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    # Non-literal values only appear in synthesized display expressions.
    if obj.tag == "list":
        return "[...]"
    if obj.tag == "bottom":
        return "<error>"
    return f"<{obj.tag}>"


def expr_to_text(expr: Expr) -> str:
    if isinstance(expr, Value):
        return _literal_text(expr.obj)
    if isinstance(expr, Var):
        return _ident_text(expr.name)
    if isinstance(expr, MemberAccess):
        args = ", ".join(expr_to_text(a) for a in expr.args)
        return f"{expr_to_text(expr.instance)}.{_ident_text(expr.member)}({args})"
    if isinstance(expr, Lambda):
        return f"fun {_ident_text(expr.param)} -> {expr_to_text(expr.body)}"
    raise TypeError(f"not an expression: {expr!r}")


def command_to_text(cmd: Command) -> str:
    if isinstance(cmd, LetBinding):
        return f"let {_ident_text(cmd.name)} = {expr_to_text(cmd.body)}"
    return expr_to_text(cmd.body)


def pretty(program: Program) -> str:
    """Canonical text; refuses programs that did not parse cleanly."""

    if program.errors:
        raise ValueError("cannot pretty-print a program with parse errors")
    return "\n".join(command_to_text(c) for c in program.commands)


# ---------------------------------------------------------------------------
# Structure helpers

def structurally_equal(a, b) -> bool:
    """Equality of shape and content, ignoring spans."""

    if isinstance(a, Program) and isinstance(b, Program):
        return (len(a.commands) == len(b.commands)
                and len(a.errors) == len(b.errors)
                and all(structurally_equal(x, y)
                        for x, y in zip(a.commands, b.commands)))
    if isinstance(a, LetBinding) and isinstance(b, LetBinding):
        return a.name == b.name and structurally_equal(a.body, b.body)
    if isinstance(a, ExprCommand) and isinstance(b, ExprCommand):
        return structurally_equal(a.body, b.body)
    if isinstance(a, Value) and isinstance(b, Value):
        return a.obj == b.obj
    if isinstance(a, Var) and isinstance(b, Var):
        return a.name == b.name
    if isinstance(a, MemberAccess) and isinstance(b, MemberAccess):
        return (a.member == b.member and len(a.args) == len(b.args)
                and structurally_equal(a.instance, b.instance)
                and all(structurally_equal(x, y) for x, y in zip(a.args, b.args)))
    if isinstance(a, Lambda) and isinstance(b, Lambda):
        return a.param == b.param and structurally_equal(a.body, b.body)
    return False


def copy_expr(expr: Expr) -> Expr:
    """Fresh tree with the same structure (and spans, for what they are worth)."""

    if isinstance(expr, Value):
        return Value(expr.obj, expr.span)
    if isinstance(expr, Var):
        return Var(expr.name, expr.span)
    if isinstance(expr, MemberAccess):
        return MemberAccess(copy_expr(expr.instance), expr.member,
                            [copy_expr(a) for a in expr.args],
                            expr.span, expr.member_span)
    if isinstance(expr, Lambda):
        return Lambda(expr.param, copy_expr(expr.body), expr.span)
    raise TypeError(f"not an expression: {expr!r}")


def free_vars(expr: Expr) -> List[str]:
    """Free variable names in first-occurrence order."""

    out: List[str] = []

    def walk(e: Expr, bound: frozenset):
        if isinstance(e, Var):
            if e.name not in bound and e.name not in out:
                out.append(e.name)
        elif isinstance(e, MemberAccess):
            walk(e.instance, bound)
            for a in e.args:
                walk(a, bound)
        elif isinstance(e, Lambda):
            walk(e.body, bound | {e.param})

    walk(expr, frozenset())
    return out


def subst(expr: Expr, name: str, replacement: Expr) -> Expr:
    """expr with free occurrences of name replaced by copies of replacement.

    Lambdas whose parameter shadows the name block the substitution inside
    their body.  The replacement is copied at each site so no node object
    ends up at two positions of one tree.
    """

    if isinstance(expr, Value):
        return Value(expr.obj, expr.span)
    if isinstance(expr, Var):
        if expr.name == name:
            return copy_expr(replacement)
        return Var(expr.name, expr.span)
    if isinstance(expr, MemberAccess):
        return MemberAccess(subst(expr.instance, name, replacement), expr.member,
                            [subst(a, name, replacement) for a in expr.args],
                            expr.span, expr.member_span)
    if isinstance(expr, Lambda):
        if expr.param == name:
            return copy_expr(expr)
        return Lambda(expr.param, subst(expr.body, name, replacement), expr.span)
    raise TypeError(f"not an expression: {expr!r}")


def _iter_nodes(expr: Expr) -> Iterator[Expr]:
    yield expr
    if isinstance(expr, MemberAccess):
        yield from _iter_nodes(expr.instance)
        for a in expr.args:
            yield from _iter_nodes(a)
    elif isinstance(expr, Lambda):
        yield from _iter_nodes(expr.body)


def iter_exprs(root) -> Iterator[Expr]:
    """All expression nodes under a Program, Command or Expr, parents first."""

    if isinstance(root, Program):
        for cmd in root.commands:
            yield from _iter_nodes(cmd.body)
    elif isinstance(root, Command):
        yield from _iter_nodes(root.body)
    else:
        yield from _iter_nodes(root)


def node_at_cursor(program: Program, offset: int) -> Optional[Expr]:
    """Innermost expression at the cursor.

    Offsets that fall between tokens of a command resolve to the command
    body; offsets in trivia between commands or inside malformed regions
    resolve to nothing.  A cursor sitting immediately after a command's
    last character counts as being on it.
    """

    def locate(at: int) -> Optional[Expr]:
        for cmd in program.commands:
            if not cmd.token_span.contains(at):
                continue
            best: Optional[Expr] = None
            for node in _iter_nodes(cmd.body):
                if node.span is None or not node.span.contains(at):
                    continue
                if best is None or node.span.size() <= best.span.size():
                    best = node
            return best if best is not None else cmd.body
        return None

    found = locate(offset)
    if found is None and offset > 0:
        found = locate(offset - 1)
    return found
