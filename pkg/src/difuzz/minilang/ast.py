"""MiniProc syntax tree.

Positions never take part in equality, so ``==`` on nodes is structural
comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


@dataclass(frozen=True, order=True)
class Pos:
    file: str
    line: int
    column: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


NOPOS = Pos("<generated>", 1, 1)


def _pos():
    return field(default=NOPOS, compare=False, repr=False)


# -- expressions -------------------------------------------------------------

@dataclass
class IntLit:
    value: int
    pos: Pos = _pos()


@dataclass
class Var:
    name: str
    pos: Pos = _pos()


@dataclass
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass
class UnaryOp:
    op: str  # '-' or '!'
    operand: "Expr"
    pos: Pos = _pos()


@dataclass
class Call:
    name: str
    tag: Optional[str]
    args: list
    pos: Pos = _pos()

    @property
    def display(self):
        return display_name(self.name, self.tag)


@dataclass
class InputByte:
    index: "Expr"
    pos: Pos = _pos()


@dataclass
class InputLen:
    pos: Pos = _pos()


Expr = Union[IntLit, Var, BinOp, UnaryOp, Call, InputByte, InputLen]


# -- statements --------------------------------------------------------------

@dataclass
class Block:
    stmts: list
    pos: Pos = _pos()   # opening brace
    end: Pos = _pos()   # closing brace


@dataclass
class Assign:
    name: str
    value: Expr
    pos: Pos = _pos()
    end: Pos = _pos()


@dataclass
class ExprStmt:
    call: Call
    pos: Pos = _pos()
    end: Pos = _pos()


@dataclass
class If:
    cond: Expr
    then: Block
    orelse: Optional[Block] = None
    pos: Pos = _pos()
    end: Pos = _pos()


@dataclass
class While:
    cond: Expr
    body: Block
    pos: Pos = _pos()
    end: Pos = _pos()


@dataclass
class Return:
    value: Optional[Expr] = None
    pos: Pos = _pos()
    end: Pos = _pos()


@dataclass
class Panic:
    message: str
    pos: Pos = _pos()
    end: Pos = _pos()


@dataclass
class Print:
    value: Expr
    pos: Pos = _pos()
    end: Pos = _pos()


@dataclass
class PrintStr:
    text: str
    pos: Pos = _pos()
    end: Pos = _pos()


@dataclass
class Break:
    pos: Pos = _pos()
    end: Pos = _pos()


@dataclass
class Continue:
    pos: Pos = _pos()
    end: Pos = _pos()


GUARD = "SancovGuard"
ETS = "InstrumentETS"


@dataclass
class Probe:
    """An instrumentation call: ``SancovGuard(id)`` or ``InstrumentETS(id)``."""

    kind: str
    ident: int
    pos: Pos = _pos()
    end: Pos = _pos()


Stmt = Union[Assign, ExprStmt, If, While, Return, Panic, Print, PrintStr,
             Break, Continue, Probe]
SIMPLE_STMTS = (Assign, ExprStmt, Return, Panic, Print, PrintStr, Break,
                Continue, Probe)


# -- declarations ------------------------------------------------------------

@dataclass
class FunctionDecl:
    name: str
    params: list
    body: Block
    tag: Optional[str] = None  # instance tag of a generic declaration
    pos: Pos = _pos()
    header_line: int = field(default=1, compare=False, repr=False)

    @property
    def display(self):
        return display_name(self.name, self.tag)

    @property
    def file(self):
        return self.pos.file


@dataclass
class Ast:
    functions: list = field(default_factory=list)

    def function(self, name, occurrence=0):
        """Return the ``occurrence``-th declaration called ``name``."""
        matches = [f for f in self.functions if f.name == name]
        if occurrence >= len(matches):
            raise KeyError(f"{name}#{occurrence}")
        return matches[occurrence]

    def occurrences(self):
        """Yield ``(decl, occurrence)`` in declaration order."""
        seen = {}
        for f in self.functions:
            k = seen.get(f.name, 0)
            seen[f.name] = k + 1
            yield f, k

    def files(self):
        out = []
        for f in self.functions:
            if f.file not in out:
                out.append(f.file)
        return out

    def for_file(self, file):
        return Ast([f for f in self.functions if f.file == file])


def display_name(name, tag):
    return name if tag is None else f"{name}[{tag}]"


# -- traversal helpers -------------------------------------------------------

def iter_stmts(block: Block) -> Iterator:
    """Depth-first pre-order walk over every statement under ``block``."""
    for s in block.stmts:
        yield s
        if isinstance(s, If):
            yield from iter_stmts(s.then)
            if s.orelse is not None:
                yield from iter_stmts(s.orelse)
        elif isinstance(s, While):
            yield from iter_stmts(s.body)


def iter_exprs(expr) -> Iterator:
    yield expr
    if isinstance(expr, BinOp):
        yield from iter_exprs(expr.left)
        yield from iter_exprs(expr.right)
    elif isinstance(expr, UnaryOp):
        yield from iter_exprs(expr.operand)
    elif isinstance(expr, Call):
        for a in expr.args:
            yield from iter_exprs(a)
    elif isinstance(expr, InputByte):
        yield from iter_exprs(expr.index)


def stmt_exprs(stmt):
    """Top-level expressions owned directly by ``stmt`` (not its sub-blocks)."""
    if isinstance(stmt, (Assign, Print)):
        return [stmt.value]
    if isinstance(stmt, ExprStmt):
        return [stmt.call]
    if isinstance(stmt, Return):
        return [] if stmt.value is None else [stmt.value]
    if isinstance(stmt, (If, While)):
        return [stmt.cond]
    return []


def calls_in(stmt):
    """Calls evaluated by ``stmt`` itself, in evaluation order."""
    out = []
    for e in stmt_exprs(stmt):
        for sub in _post_order(e):
            if isinstance(sub, Call):
                out.append(sub)
    return out


def _post_order(expr):
    if isinstance(expr, BinOp):
        yield from _post_order(expr.left)
        yield from _post_order(expr.right)
    elif isinstance(expr, UnaryOp):
        yield from _post_order(expr.operand)
    elif isinstance(expr, Call):
        for a in expr.args:
            yield from _post_order(a)
    elif isinstance(expr, InputByte):
        yield from _post_order(expr.index)
    yield expr


def has_probes(ast: Ast) -> bool:
    return any(isinstance(s, Probe)
               for f in ast.functions for s in iter_stmts(f.body))
