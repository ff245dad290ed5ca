"""Canonical pretty-printer for MiniProc.

``emit(ast)`` is deterministic and idempotent under parse/emit. With
``preserve_lines=True`` the output carries ``/*line N*/`` directives so that
re-parsing reproduces the original statement line numbers; instrumented
sources are written this way so panic positions keep matching target lines.
"""

from __future__ import annotations

from . import ast as A

INDENT = "    "

# binding strength; higher binds tighter
_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
         "+": 4, "-": 4, "*": 5, "/": 5, "%": 5}
_UNARY_PREC = 6


def emit_expr(e) -> str:
    return _expr(e, 0)


def _expr(e, ctx):
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.InputLen):
        return "input_len()"
    if isinstance(e, A.InputByte):
        return f"input({_expr(e.index, 0)})"
    if isinstance(e, A.Call):
        tag = "" if e.tag is None else f"[{e.tag}]"
        return f"{e.name}{tag}({', '.join(_expr(a, 0) for a in e.args)})"
    if isinstance(e, A.UnaryOp):
        inner = _expr(e.operand, _UNARY_PREC)
        text = e.op + inner
        return f"({text})" if ctx > _UNARY_PREC else text
    if isinstance(e, A.BinOp):
        p = _PREC[e.op]
        if p == 3:
            # comparisons do not chain: parenthesise comparison operands
            left = _expr(e.left, p + 1)
            right = _expr(e.right, p + 1)
        else:
            left = _expr(e.left, p)
            right = _expr(e.right, p + 1)
        text = f"{left} {e.op} {right}"
        return f"({text})" if p < ctx else text
    raise TypeError(f"not an expression: {e!r}")


def _quote(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


class _Writer:
    def __init__(self, preserve_lines):
        self.lines = []
        self.preserve = preserve_lines
        self.logical = 1  # logical line the next emitted line will get

    def line(self, depth, text, target=None):
        prefix = ""
        if self.preserve and target is not None and target != self.logical:
            prefix = f"/*line {target}*/ "
            self.logical = target
        self.lines.append(INDENT * depth + prefix + text)
        self.logical += 1

    def blank(self):
        self.lines.append("")
        self.logical += 1


def _simple(s):
    if isinstance(s, A.Assign):
        return f"{s.name} = {emit_expr(s.value)}"
    if isinstance(s, A.ExprStmt):
        return emit_expr(s.call)
    if isinstance(s, A.Return):
        return "return" if s.value is None else f"return {emit_expr(s.value)}"
    if isinstance(s, A.Panic):
        return f"panic({_quote(s.message)})"
    if isinstance(s, A.Print):
        return f"print({emit_expr(s.value)})"
    if isinstance(s, A.PrintStr):
        return f"print({_quote(s.text)})"
    if isinstance(s, A.Break):
        return "break"
    if isinstance(s, A.Continue):
        return "continue"
    if isinstance(s, A.Probe):
        return f"{s.kind}({s.ident})"
    raise TypeError(f"not a simple statement: {s!r}")


def _stmts(w, block, depth):
    for s in block.stmts:
        _stmt(w, s, depth)


def _stmt(w, s, depth):
    target = None if isinstance(s, A.Probe) else s.pos.line
    if isinstance(s, A.If):
        _if(w, s, depth, f"if {emit_expr(s.cond)} {{", target)
    elif isinstance(s, A.While):
        w.line(depth, f"while {emit_expr(s.cond)} {{", target)
        _stmts(w, s.body, depth + 1)
        w.line(depth, "}")
    else:
        w.line(depth, _simple(s), target)


def _if(w, s, depth, head, target):
    w.line(depth, head, target)
    _stmts(w, s.then, depth + 1)
    if s.orelse is None:
        w.line(depth, "}")
    else:
        _else_chain(w, s, depth)


def _else_chain(w, s, depth):
    # s has an else branch; its then-part has already been written
    inner = s.orelse.stmts
    if len(inner) == 1 and isinstance(inner[0], A.If):
        nested = inner[0]
        head = f"if {emit_expr(nested.cond)} {{"
        if w.preserve and nested.pos.line != w.logical:
            # the nested if shares the "} else if" line: directive goes inline
            w.lines.append(INDENT * depth + f"}} else /*line {nested.pos.line}*/ " + head)
            w.logical = nested.pos.line + 1
        else:
            w.line(depth, "} else " + head)
        _stmts(w, nested.then, depth + 1)
        if nested.orelse is None:
            w.line(depth, "}")
        else:
            _else_chain(w, nested, depth)
        return
    w.line(depth, "} else {")
    _stmts(w, s.orelse, depth + 1)
    w.line(depth, "}")


def _groups(functions):
    """Group consecutive instances of one generic declaration that still
    share their span and body, so they print as ``func h[A, B](...)``."""
    groups = []
    for f in functions:
        if groups:
            g = groups[-1]
            head = g[0]
            if (f.tag is not None and head.tag is not None and f.name == head.name
                    and f.pos == head.pos and f.params == head.params
                    and f.body == head.body):
                g.append(f)
                continue
        groups.append([f])
    return groups


def emit(ast: A.Ast, preserve_lines: bool = False) -> str:
    w = _Writer(preserve_lines)
    for k, group in enumerate(_groups(ast.functions)):
        f = group[0]
        if k:
            w.blank()
        tags = [g.tag for g in group]
        tag_text = "" if tags == [None] else "[" + ", ".join(tags) + "]"
        w.line(0, f"func {f.name}{tag_text}({', '.join(f.params)}) {{", f.pos.line)
        _stmts(w, f.body, 1)
        w.line(0, "}")
    return "\n".join(w.lines) + ("\n" if w.lines else "")
