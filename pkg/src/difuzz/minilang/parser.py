"""Lexer, recursive-descent parser and static checks for MiniProc.

Grammar: see docs/minilang.md.
"""

from __future__ import annotations

import copy
import re

from . import ast as A
from .ast import Pos

KEYWORDS = {"func", "if", "else", "while", "return", "break", "continue",
            "panic", "print"}
BUILTINS = {"input", "input_len", A.GUARD, A.ETS}
RESERVED = KEYWORDS | BUILTINS

INT64_MAX = (1 << 63) - 1

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<directive>/\*line[ ](?P<dline>\d+)\*/)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<int>0[xX][0-9a-fA-F]+|[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op>==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){}\[\],;])
""", re.VERBOSE | re.DOTALL)

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"'}


class ParseError(SyntaxError):
    """A lexical, syntactic or static-semantic error with its position."""

    def __init__(self, position: Pos, message: str, expected=()):
        self.position = position
        self.message = message
        self.expected = tuple(sorted(expected))
        text = f"{position}: {message}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(text)
        self.filename = position.file
        self.lineno = position.line
        self.offset = position.column


class Token:
    __slots__ = ("kind", "value", "pos", "end", "phys")

    def __init__(self, kind, value, pos, end, phys=0):
        self.kind = kind      # 'int', 'ident', 'string', 'kw', 'op', 'eof'
        self.value = value
        self.pos = pos
        self.end = end
        self.phys = phys      # physical line, unaffected by line directives

    def __repr__(self):
        return f"Token({self.kind}, {self.value!r}, {self.pos})"

    @property
    def text(self):
        if self.kind in ("op", "kw"):
            return self.value
        return self.kind


def tokenize(text: str, file: str) -> list:
    toks = []
    i = 0
    line = 1          # logical line (line directives rewrite it)
    line_start = 0
    phys = 1
    n = len(text)
    while i < n:
        m = _TOKEN_RE.match(text, i)
        col = i - line_start + 1
        if m is None:
            raise ParseError(Pos(file, line, col), f"unexpected character {text[i]!r}")
        kind = m.lastgroup
        j = m.end()
        if kind == "nl":
            line += 1
            phys += 1
            line_start = j
        elif kind == "directive":
            line = int(m.group("dline"))
        elif kind == "bcomment":
            chunk = m.group(0)
            nls = chunk.count("\n")
            if nls:
                line += nls
                phys += nls
                line_start = i + chunk.rfind("\n") + 1
        elif kind not in ("ws", "lcomment"):
            start = Pos(file, line, col)
            end = Pos(file, line, col + (j - i) - 1)
            value = m.group(0)
            if kind == "int":
                v = int(value, 0) if value[:2] in ("0x", "0X") else int(value)
                if v > INT64_MAX:
                    raise ParseError(start, f"integer literal {value} out of range")
                toks.append(Token("int", v, start, end, phys))
            elif kind == "ident":
                toks.append(Token("kw" if value in KEYWORDS else "ident", value, start, end, phys))
            elif kind == "string":
                toks.append(Token("string", _unescape(value[1:-1], start), start, end, phys))
            else:
                toks.append(Token("op", value, start, end, phys))
        i = j
    eof = Pos(file, line, i - line_start + 1)
    toks.append(Token("eof", None, eof, eof, phys))
    return toks


def _unescape(body, pos):
    out = []
    k = 0
    while k < len(body):
        c = body[k]
        if c == "\\":
            nxt = body[k + 1]
            if nxt not in _ESCAPES:
                raise ParseError(pos, f"unknown escape \\{nxt}")
            out.append(_ESCAPES[nxt])
            k += 2
        else:
            out.append(c)
            k += 1
    return "".join(out)


_EXPR_START = {"int", "ident", "(", "-", "!"}
_CMP = ("==", "!=", "<", "<=", ">", ">=")


class Parser:
    def __init__(self, text: str, file: str):
        self.file = file
        self.toks = tokenize(text, file)
        self.i = 0

    # -- token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value):
        t = self.tok
        return t.kind in ("op", "kw") and t.value == value

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, expected, message=None):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.value if t.kind != "string" else '"..."')
        raise ParseError(t.pos, message or f"unexpected {found}", expected)

    def expect(self, value):
        if not self.at(value):
            self.fail({value})
        return self.advance()

    def expect_ident(self):
        if self.tok.kind != "ident":
            self.fail({"identifier"})
        return self.advance()

    # -- declarations
    def parse_program(self) -> A.Ast:
        funcs = []
        while self.tok.kind != "eof":
            if not self.at("func"):
                self.fail({"func"})
            funcs.extend(self.parse_func())
        return A.Ast(funcs)

    def parse_func(self):
        start = self.expect("func").pos
        name_tok = self.expect_ident()
        tags = [None]
        if self.at("["):
            self.advance()
            tags = [self.expect_ident().value]
            while self.at(","):
                self.advance()
                tags.append(self.expect_ident().value)
            self.expect("]")
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.expect_ident().value)
            while self.at(","):
                self.advance()
                params.append(self.expect_ident().value)
        self.expect(")")
        header_line = self.tok.pos.line
        body = self.parse_block()
        decls = []
        for k, tag in enumerate(tags):
            # every instance of a generic declaration shares the same span
            b = body if k == 0 else copy.deepcopy(body)
            decls.append(A.FunctionDecl(name_tok.value, list(params), b, tag, start, header_line))
        return decls

    def parse_block(self) -> A.Block:
        lb = self.expect("{").pos
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail({"}"})
            stmts.append(self.parse_stmt())
            while self.at(";"):
                self.advance()
        rb = self.advance().pos
        return A.Block(stmts, lb, rb)

    # -- statements
    def parse_stmt(self):
        t = self.tok
        if t.kind == "kw":
            kw = t.value
            if kw == "if":
                return self.parse_if()
            if kw == "while":
                self.advance()
                cond = self.parse_expr()
                body = self.parse_block()
                return A.While(cond, body, t.pos, body.end)
            if kw == "return":
                self.advance()
                value = None
                nxt = self.tok
                if nxt.phys == t.phys and nxt.text in _EXPR_START:
                    value = self.parse_expr()
                return A.Return(value, t.pos, self.prev_end())
            if kw in ("break", "continue"):
                self.advance()
                cls = A.Break if kw == "break" else A.Continue
                return cls(t.pos, t.end)
            if kw == "panic":
                self.advance()
                self.expect("(")
                if self.tok.kind != "string":
                    self.fail({"string"})
                msg = self.advance().value
                end = self.expect(")").end
                return A.Panic(msg, t.pos, end)
            if kw == "print":
                self.advance()
                self.expect("(")
                if self.tok.kind == "string":
                    text = self.advance().value
                    end = self.expect(")").end
                    return A.PrintStr(text, t.pos, end)
                value = self.parse_expr()
                end = self.expect(")").end
                return A.Print(value, t.pos, end)
        if t.kind == "ident":
            if t.value in (A.GUARD, A.ETS):
                self.advance()
                self.expect("(")
                if self.tok.kind != "int":
                    self.fail({"int"})
                ident = self.advance().value
                end = self.expect(")").end
                return A.Probe(t.value, ident, t.pos, end)
            nxt = self.peek()
            if nxt.kind == "op" and nxt.value == "=":
                if t.value in RESERVED:
                    raise ParseError(t.pos, f"cannot assign to builtin {t.value!r}")
                self.advance()
                self.advance()
                value = self.parse_expr()
                return A.Assign(t.value, value, t.pos, self.prev_end())
            if nxt.kind == "op" and nxt.value in ("(", "[") and t.value not in BUILTINS:
                call = self.parse_call()
                return A.ExprStmt(call, t.pos, self.prev_end())
        self.fail({"if", "while", "return", "break", "continue", "panic", "print",
                   "identifier", "}"})

    def prev_end(self):
        return self.toks[self.i - 1].end

    def parse_if(self):
        t = self.advance()
        cond = self.parse_expr()
        then = self.parse_block()
        orelse = None
        end = then.end
        if self.at("else"):
            self.advance()
            if self.at("if"):
                nested = self.parse_if()
                orelse = A.Block([nested], nested.pos, nested.end)
            else:
                orelse = self.parse_block()
            end = orelse.end
        return A.If(cond, then, orelse, t.pos, end)

    # -- expressions
    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        left = self.parse_and()
        while self.at("||"):
            op = self.advance()
            left = A.BinOp("||", left, self.parse_and(), op.pos)
        return left

    def parse_and(self):
        left = self.parse_cmp()
        while self.at("&&"):
            op = self.advance()
            left = A.BinOp("&&", left, self.parse_cmp(), op.pos)
        return left

    def parse_cmp(self):
        left = self.parse_add()
        if self.tok.kind == "op" and self.tok.value in _CMP:
            op = self.advance()
            left = A.BinOp(op.value, left, self.parse_add(), op.pos)
            if self.tok.kind == "op" and self.tok.value in _CMP:
                self.fail(set(), "comparison operators do not chain")
        return left

    def parse_add(self):
        left = self.parse_mul()
        while self.tok.kind == "op" and self.tok.value in ("+", "-"):
            op = self.advance()
            left = A.BinOp(op.value, left, self.parse_mul(), op.pos)
        return left

    def parse_mul(self):
        left = self.parse_unary()
        while self.tok.kind == "op" and self.tok.value in ("*", "/", "%"):
            op = self.advance()
            left = A.BinOp(op.value, left, self.parse_unary(), op.pos)
        return left

    def parse_unary(self):
        if self.tok.kind == "op" and self.tok.value in ("-", "!"):
            op = self.advance()
            return A.UnaryOp(op.value, self.parse_unary(), op.pos)
        return self.parse_primary()

    def parse_primary(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return A.IntLit(t.value, t.pos)
        if t.kind == "ident":
            if t.value == "input":
                self.advance()
                self.expect("(")
                index = self.parse_expr()
                self.expect(")")
                return A.InputByte(index, t.pos)
            if t.value == "input_len":
                self.advance()
                self.expect("(")
                self.expect(")")
                return A.InputLen(t.pos)
            if t.value in BUILTINS:
                raise ParseError(t.pos, f"{t.value} is a statement, not an expression")
            nxt = self.peek()
            if nxt.kind == "op" and nxt.value in ("(", "["):
                return self.parse_call()
            self.advance()
            return A.Var(t.value, t.pos)
        if self.at("("):
            self.advance()
            e = self.parse_expr()
            self.expect(")")
            return e
        self.fail({"int", "identifier", "(", "-", "!"}, "expected expression")

    def parse_call(self):
        name = self.advance()
        tag = None
        if self.at("["):
            self.advance()
            tag = self.expect_ident().value
            self.expect("]")
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.parse_expr())
            while self.at(","):
                self.advance()
                args.append(self.parse_expr())
        self.expect(")")
        return A.Call(name.value, tag, args, name.pos)


# -- static checks -----------------------------------------------------------

def check_file(ast: A.Ast):
    """Checks that need only one file: names, loop nesting, probe ids."""
    seen = {}
    for f in ast.functions:
        if f.name in RESERVED:
            raise ParseError(f.pos, f"{f.name!r} is reserved")
        key = (f.name, f.tag)
        if key in seen:
            raise ParseError(f.pos, f"duplicate function {f.display}")
        seen[key] = f
        if len(set(f.params)) != len(f.params):
            raise ParseError(f.pos, f"duplicate parameter in {f.display}")
        for p in f.params:
            if p in RESERVED:
                raise ParseError(f.pos, f"parameter {p!r} is reserved")
        _check_block(f.body, 0)
    names_tagged = {}
    for f in ast.functions:
        names_tagged.setdefault(f.name, set()).add(f.tag is not None)
    for name, kinds in names_tagged.items():
        if len(kinds) > 1:
            fn = next(f for f in ast.functions if f.name == name)
            raise ParseError(fn.pos, f"{name!r} declared both generic and plain")


def _check_block(block, loop_depth):
    for s in block.stmts:
        if isinstance(s, (A.Break, A.Continue)) and loop_depth == 0:
            raise ParseError(s.pos, f"{type(s).__name__.lower()} outside loop")
        if isinstance(s, A.Probe) and s.ident < 1:
            raise ParseError(s.pos, "probe id must be positive")
        if isinstance(s, A.If):
            _check_block(s.then, loop_depth)
            if s.orelse is not None:
                _check_block(s.orelse, loop_depth)
        elif isinstance(s, A.While):
            _check_block(s.body, loop_depth + 1)


def check_program(ast: A.Ast):
    """Whole-program checks: a single ``main`` and resolvable calls."""
    check_file(ast)
    by_key = {(f.name, f.tag): f for f in ast.functions}
    mains = [f for f in ast.functions if f.name == "main"]
    if len(mains) != 1:
        pos = mains[1].pos if mains else Pos("<program>", 1, 1)
        raise ParseError(pos, f"expected exactly one main, found {len(mains)}")
    main = mains[0]
    if main.params or main.tag is not None:
        raise ParseError(main.pos, "main takes no parameters and is not generic")
    for f in ast.functions:
        for s in A.iter_stmts(f.body):
            for e in A.stmt_exprs(s):
                for sub in A.iter_exprs(e):
                    if isinstance(sub, A.Call):
                        callee = by_key.get((sub.name, sub.tag))
                        if callee is None:
                            raise ParseError(sub.pos, f"call to undefined function {sub.display}")
                        if len(callee.params) != len(sub.args):
                            raise ParseError(sub.pos, f"{sub.display} expects "
                                             f"{len(callee.params)} argument(s), got {len(sub.args)}")


def parse(source_text: str, file: str = "<input>") -> A.Ast:
    """Parse one MiniProc file. Raises :class:`ParseError`."""
    ast = Parser(source_text, file).parse_program()
    check_file(ast)
    return ast


def link(asts) -> A.Ast:
    """Combine per-file ASTs into one program and run whole-program checks."""
    funcs = []
    for a in asts:
        funcs.extend(a.functions)
    program = A.Ast(funcs)
    check_program(program)
    return program


def parse_program(source_text: str, file: str = "<input>") -> A.Ast:
    """Parse a single-file program (must contain ``main``)."""
    ast = parse(source_text, file)
    check_program(ast)
    return ast
