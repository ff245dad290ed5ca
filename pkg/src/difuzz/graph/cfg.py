"""Basic-block decomposition of MiniProc functions and graph construction.

A block's items are its simple statements plus the conditions of ``if`` and
``while`` statements that end it. Probe statements are transparent: they
never become items and never split a block, so decomposing a program before
and after instrumentation yields the same blocks. Every block remembers an
anchor ``(ast_block, index)``: the statement-list slot where a probe for
that block belongs.

Rules:
  * ``if``: the condition ends the current block; successors are the then
    block and the else block (or the join block when there is no else).
  * ``while``: the condition sits alone in a header block (the current
    block is reused when it is still empty); successors are body and exit;
    the end of the body loops back to the header.
  * ``break``/``continue`` jump to exit/header; ``return`` ends the block.
  * ``panic`` does not end a block (the edge is implicit, as for calls).
Blocks unreachable from entry are dropped and the rest renumbered in
creation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..minilang import ast as A
from .model import CALLGRAPH, CFG, GraphEdge, GraphNode, ProgramGraph, node_id


class UnknownFunction(KeyError):
    pass


@dataclass
class BasicBlock:
    index: int
    anchor: tuple                      # (A.Block, statement index)
    items: list = field(default_factory=list)
    succs: list = field(default_factory=list)
    start_line: int = 0
    end_line: int = 0
    start_column: int = 0

    @property
    def calls(self):
        out = []
        for s in self.items:
            out.extend(A.calls_in(s))
        return out

    @property
    def empty(self):
        return not self.items


def _item_span(s):
    if isinstance(s, A.If):
        return s.pos.line, s.then.pos.line
    if isinstance(s, A.While):
        return s.pos.line, s.body.pos.line
    return s.pos.line, s.end.line


class _Decomposer:
    def __init__(self, decl):
        self.decl = decl
        self.blocks = []

    def new(self, anchor):
        b = BasicBlock(len(self.blocks), anchor)
        self.blocks.append(b)
        return b

    def walk(self, body, cur, loop):
        run_start = None   # first index of the probe run just before i
        for i, s in enumerate(body.stmts):
            if isinstance(s, A.Probe):
                if run_start is None:
                    run_start = i
                continue
            here = i if run_start is None else run_start
            run_start = None
            if isinstance(s, A.While):
                if cur is None:
                    header = self.new((body, here))
                elif cur.empty:
                    header = cur
                else:
                    header = self.new((body, here))
                    cur.succs.append(header.index)
                header.items.append(s)
                body_b = self.new((s.body, 0))
                exit_b = self.new((body, i + 1))
                header.succs += [body_b.index, exit_b.index]
                end = self.walk(s.body, body_b, (header, exit_b))
                if end is not None:
                    end.succs.append(header.index)
                cur = exit_b
                continue
            if cur is None:
                cur = self.new((body, here))
            cur.items.append(s)
            if isinstance(s, A.If):
                then_b = self.new((s.then, 0))
                cur.succs.append(then_b.index)
                then_end = self.walk(s.then, then_b, loop)
                else_end = None
                if s.orelse is not None:
                    else_b = self.new((s.orelse, 0))
                    cur.succs.append(else_b.index)
                    else_end = self.walk(s.orelse, else_b, loop)
                join = self.new((body, i + 1))
                if s.orelse is None:
                    cur.succs.append(join.index)
                for end in (then_end, else_end):
                    if end is not None:
                        end.succs.append(join.index)
                cur = join
            elif isinstance(s, A.Break):
                cur.succs.append(loop[1].index)
                cur = None
            elif isinstance(s, A.Continue):
                cur.succs.append(loop[0].index)
                cur = None
            elif isinstance(s, A.Return):
                cur = None
        return cur

    def run(self):
        entry = self.new((self.decl.body, 0))
        self.walk(self.decl.body, entry, None)
        # prune unreachable blocks, keep creation order
        live = {0}
        todo = [0]
        while todo:
            for j in self.blocks[todo.pop()].succs:
                if j not in live:
                    live.add(j)
                    todo.append(j)
        renum = {}
        kept = []
        for b in self.blocks:
            if b.index in live:
                renum[b.index] = len(kept)
                kept.append(b)
        for b in kept:
            b.index = renum[b.index]
            b.succs = [renum[j] for j in b.succs]
            self._lines(b)
        return kept

    def _lines(self, b):
        if b.items:
            spans = [_item_span(s) for s in b.items]
            b.start_line = min(lo for lo, _ in spans)
            b.end_line = max(hi for _, hi in spans)
            b.start_column = b.items[0].pos.column
        else:
            brace = b.anchor[0].end
            b.start_line = b.end_line = brace.line
            b.start_column = brace.column
        if b.index == 0:
            b.start_line = self.decl.pos.line
            b.start_column = self.decl.pos.column
            b.end_line = max(b.end_line, b.start_line)


def decompose(decl: A.FunctionDecl) -> list:
    """Basic blocks of ``decl``; block 0 is the entry."""
    return _Decomposer(decl).run()


# -- graphs ------------------------------------------------------------------

def cfg_node_id(decl, occurrence, k):
    return node_id(CFG, decl.file, decl.name, occurrence, decl.tag, k)


def cg_node_id(decl, occurrence):
    return node_id(CALLGRAPH, decl.file, decl.name, occurrence, decl.tag)


def cfg_from_blocks(decl, occurrence, blocks) -> ProgramGraph:
    nodes, edges = [], []
    for b in blocks:
        nid = cfg_node_id(decl, occurrence, b.index)
        head = decl.header_line if b.index == 0 else b.start_line
        nodes.append(GraphNode(nid, decl.file, b.start_line, head, b.end_line,
                               b.start_column, f"{decl.display}#bb{b.index}",
                               tuple(c.display for c in b.calls)))
        for j in b.succs:
            edges.append(GraphEdge(nid, cfg_node_id(decl, occurrence, j)))
    return ProgramGraph(CFG, nodes, edges, function=decl.display, entry=nodes[0].node_id)


def build_cfg(ast: A.Ast, function: str, occurrence: int = 0) -> ProgramGraph:
    try:
        decl = ast.function(function, occurrence)
    except KeyError:
        raise UnknownFunction(f"{function}#{occurrence}") from None
    return cfg_from_blocks(decl, occurrence, decompose(decl))


def build_call_graph(ast: A.Ast, blocks_of=None) -> ProgramGraph:
    """Call graph over live call sites (calls in blocks reachable from the
    function entry); one edge per (caller, callee) in first-call order."""
    ids = {(decl.name, decl.tag): cg_node_id(decl, occ)
           for decl, occ in ast.occurrences()}
    nodes, edges = [], []
    for decl, occ in ast.occurrences():
        blocks = blocks_of(decl, occ) if blocks_of else decompose(decl)
        entry = blocks[0]
        nodes.append(GraphNode(ids[(decl.name, decl.tag)], decl.file, decl.pos.line,
                               decl.header_line, entry.end_line, decl.pos.column,
                               decl.display))
        seen = set()
        for b in blocks:
            for c in b.calls:
                key = (c.name, c.tag)
                if key not in seen:
                    seen.add(key)
                    edges.append(GraphEdge(ids[(decl.name, decl.tag)], ids[key]))
    return ProgramGraph(CALLGRAPH, nodes, edges)
