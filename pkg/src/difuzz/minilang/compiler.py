"""Lowers a linked MiniProc AST to the flat bytecode run by the VM kernels.

Each instruction occupies three int64 slots: opcode, argument, position
index (``-1`` when the instruction cannot fail). Probe statements lower to
GUARD/ETS instructions, which the VM does not count as steps; everything
else compiles identically with or without instrumentation, which is what
makes instrumented and plain runs step-for-step equivalent.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field

from . import ast as A
from .parser import check_program

from ..opcodes import (
    ADD, CALL, CONST, DIV, EQ, ETS, GE, GT, GUARD, INPUT, INPUT_LEN, JMP, JNZ,
    JZ, LE, LOAD, LT, MOD, MUL, NE, NEG, NOT, PANIC, POP, PRINTI, PRINTS, RET,
    STORE, SUB,
)

_BINOPS = {"+": ADD, "-": SUB, "*": MUL, "/": DIV, "%": MOD,
           "==": EQ, "!=": NE, "<": LT, "<=": LE, ">": GT, ">=": GE}


@dataclass
class Program:
    code: array                    # int64 triples
    fn_entry: array
    fn_nparams: array
    fn_nlocals: array
    fn_maxstack: array
    fn_names: list
    main: int
    strings: list                  # bytes
    positions: list                # Pos per index
    max_guard: int = 0
    max_ets: int = 0
    guard_ids: frozenset = field(default_factory=frozenset)
    ets_ids: frozenset = field(default_factory=frozenset)


class _FnCompiler:
    def __init__(self, prog_builder, decl):
        self.pb = prog_builder
        self.decl = decl
        self.slots = {p: k for k, p in enumerate(decl.params)}
        self.depth = 0
        self.maxdepth = 0
        self.loops = []  # (continue_target, [break patch sites])

    # -- emission helpers
    def emit(self, op, arg=0, pos=-1):
        code = self.pb.code
        code.extend((op, arg, pos))
        return len(code) // 3 - 1

    def here(self):
        return len(self.pb.code) // 3

    def patch(self, at, target):
        self.pb.code[at * 3 + 1] = target

    def push(self, n=1):
        self.depth += n
        if self.depth > self.maxdepth:
            self.maxdepth = self.depth

    def pop(self, n=1):
        self.depth -= n

    def slot(self, name):
        s = self.slots.get(name)
        if s is None:
            s = self.slots[name] = len(self.slots)
        return s

    # -- statements
    def block(self, block):
        for s in block.stmts:
            self.stmt(s)

    def stmt(self, s):
        pos = self.pb.pos_index(s.pos)
        if isinstance(s, A.Assign):
            self.expr(s.value, pos)
            self.emit(STORE, self.slot(s.name))
            self.pop()
        elif isinstance(s, A.ExprStmt):
            self.expr(s.call, pos)
            self.emit(POP)
            self.pop()
        elif isinstance(s, A.If):
            self.expr(s.cond, pos)
            jz = self.emit(JZ)
            self.pop()
            self.block(s.then)
            if s.orelse is None:
                self.patch(jz, self.here())
            else:
                jmp = self.emit(JMP)
                self.patch(jz, self.here())
                self.block(s.orelse)
                self.patch(jmp, self.here())
        elif isinstance(s, A.While):
            top = self.here()
            self.expr(s.cond, pos)
            jz = self.emit(JZ)
            self.pop()
            self.loops.append((top, [jz]))
            self.block(s.body)
            self.emit(JMP, top)
            _, breaks = self.loops.pop()
            for site in breaks:
                self.patch(site, self.here())
        elif isinstance(s, A.Return):
            if s.value is None:
                self.emit(CONST, 0)
                self.push()
            else:
                self.expr(s.value, pos)
            self.emit(RET)
            self.pop()
        elif isinstance(s, A.Panic):
            self.emit(PANIC, self.pb.string(s.message), pos)
        elif isinstance(s, A.Print):
            self.expr(s.value, pos)
            self.emit(PRINTI)
            self.pop()
        elif isinstance(s, A.PrintStr):
            self.emit(PRINTS, self.pb.string(s.text))
        elif isinstance(s, A.Break):
            self.loops[-1][1].append(self.emit(JMP))
        elif isinstance(s, A.Continue):
            self.emit(JMP, self.loops[-1][0])
        elif isinstance(s, A.Probe):
            if s.kind == A.GUARD:
                self.emit(GUARD, s.ident)
                self.pb.guards.add(s.ident)
            else:
                self.emit(ETS, s.ident)
                self.pb.ets.add(s.ident)
        else:
            raise TypeError(f"unknown statement {s!r}")

    # -- expressions; ``pos`` is the enclosing statement's position index
    def expr(self, e, pos):
        if isinstance(e, A.IntLit):
            self.emit(CONST, e.value)
            self.push()
        elif isinstance(e, A.Var):
            self.emit(LOAD, self.slot(e.name))
            self.push()
        elif isinstance(e, A.InputLen):
            self.emit(INPUT_LEN)
            self.push()
        elif isinstance(e, A.InputByte):
            self.expr(e.index, pos)
            self.emit(INPUT)
        elif isinstance(e, A.UnaryOp):
            self.expr(e.operand, pos)
            self.emit(NEG if e.op == "-" else NOT)
        elif isinstance(e, A.BinOp):
            if e.op in ("&&", "||"):
                self.short_circuit(e, pos)
            else:
                self.expr(e.left, pos)
                self.expr(e.right, pos)
                self.emit(_BINOPS[e.op], 0, pos)
                self.pop()
        elif isinstance(e, A.Call):
            for a in e.args:
                self.expr(a, pos)
            self.emit(CALL, self.pb.fn_index[(e.name, e.tag)], pos)
            self.pop(len(e.args))
            self.push()
        else:
            raise TypeError(f"unknown expression {e!r}")

    def short_circuit(self, e, pos):
        jump = JZ if e.op == "&&" else JNZ
        self.expr(e.left, pos)
        j1 = self.emit(jump)
        self.pop()
        self.expr(e.right, pos)
        j2 = self.emit(jump)
        self.pop()
        self.emit(CONST, 1 if e.op == "&&" else 0)
        done = self.emit(JMP)
        self.patch(j1, self.here())
        self.patch(j2, self.here())
        self.emit(CONST, 0 if e.op == "&&" else 1)
        self.patch(done, self.here())
        self.push()


class _ProgramBuilder:
    def __init__(self, ast):
        self.ast = ast
        self.code = array("q")
        self.strings = []
        self._string_ix = {}
        self.positions = []
        self._pos_ix = {}
        self.fn_index = {(f.name, f.tag): k for k, f in enumerate(ast.functions)}
        self.guards = set()
        self.ets = set()

    def string(self, text):
        k = self._string_ix.get(text)
        if k is None:
            k = self._string_ix[text] = len(self.strings)
            self.strings.append(text.encode("utf-8"))
        return k

    def pos_index(self, pos):
        k = self._pos_ix.get(pos)
        if k is None:
            k = self._pos_ix[pos] = len(self.positions)
            self.positions.append(pos)
        return k

    def build(self):
        n = len(self.ast.functions)
        entry, nparams, nlocals, maxstack = (array("q", [0] * n) for _ in range(4))
        for k, f in enumerate(self.ast.functions):
            fc = _FnCompiler(self, f)
            entry[k] = len(self.code) // 3
            fc.block(f.body)
            fc.emit(CONST, 0)
            fc.push()
            fc.emit(RET)
            nparams[k] = len(f.params)
            nlocals[k] = len(fc.slots)
            maxstack[k] = fc.maxdepth + 1
        main = self.fn_index[("main", None)]
        return Program(
            code=self.code, fn_entry=entry, fn_nparams=nparams, fn_nlocals=nlocals,
            fn_maxstack=maxstack, fn_names=[f.display for f in self.ast.functions],
            main=main, strings=self.strings, positions=self.positions,
            max_guard=max(self.guards, default=0), max_ets=max(self.ets, default=0),
            guard_ids=frozenset(self.guards), ets_ids=frozenset(self.ets),
        )


def compile_program(ast: A.Ast) -> Program:
    """Check and compile a linked program."""
    check_program(ast)
    return _ProgramBuilder(ast).build()
