"""A program's call graph plus all its CFGs, stored as a directory of DOT files."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field

from ..minilang import ast as A
from .cfg import build_call_graph, cfg_from_blocks, decompose
from .dot import emit_dot, parse_dot

CALLGRAPH_FILE = "callgraph.dot"
_CFG_FILE_RE = re.compile(r"^cfg\.(.+)\.(\d+)\.dot$")


def cfg_filename(function: str, occurrence: int) -> str:
    return f"cfg.{function}.{occurrence}.dot"


@dataclass
class GraphSet:
    cg: object
    cfgs: dict = field(default_factory=dict)   # (function, occurrence) -> ProgramGraph

    def write(self, directory):
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, CALLGRAPH_FILE), "w", encoding="utf-8") as fh:
            fh.write(emit_dot(self.cg))
        for (name, occ), g in sorted(self.cfgs.items()):
            with open(os.path.join(directory, cfg_filename(name, occ)), "w", encoding="utf-8") as fh:
                fh.write(emit_dot(g))

    @classmethod
    def read(cls, directory):
        with open(os.path.join(directory, CALLGRAPH_FILE), encoding="utf-8") as fh:
            cg = parse_dot(fh.read())
        cfgs = {}
        for fname in sorted(os.listdir(directory)):
            m = _CFG_FILE_RE.match(fname)
            if m:
                with open(os.path.join(directory, fname), encoding="utf-8") as fh:
                    cfgs[(m.group(1), int(m.group(2)))] = parse_dot(fh.read())
        return cls(cg, cfgs)

    def key_of_display(self):
        """Map a function's display name (``h[A]``) to its (name, occurrence)."""
        return {g.function: key for key, g in self.cfgs.items()}


def build_graphs(ast: A.Ast) -> GraphSet:
    """Decompose every function once and derive the CG and all CFGs."""
    blocks = {}
    cfgs = {}
    for decl, occ in ast.occurrences():
        blocks[id(decl)] = decompose(decl)
        cfgs[(decl.name, occ)] = cfg_from_blocks(decl, occ, blocks[id(decl)])
    cg = build_call_graph(ast, blocks_of=lambda d, o: blocks[id(d)])
    return GraphSet(cg, cfgs)
