"""Source-level probe insertion.

Both instrumentors decompose each function into basic blocks and insert a
probe statement at the block's anchor, i.e. just before the block's first
statement (for a loop header: just before the ``while``). Because the
decomposition ignores probes, running the ETS pass and then the coverage
pass sees the same blocks, and the guard lands before the ETS probe.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from ..graph.cfg import decompose
from ..minilang import ast as A


class BlockNotMatched(LookupError):
    def __init__(self, blocks):
        self.blocks = list(blocks)
        ids = ", ".join(str(b.block_id) for b in self.blocks)
        super().__init__(f"ETS block(s) not found in source: {ids}")


@dataclass
class InstrumentationPlan:
    ets_insertions: list = field(default_factory=list)       # (function, occ, cfg_block, block_id)
    coverage_insertions: list = field(default_factory=list)  # (function, occ, cfg_block, guard_id)
    unplaceable: list = field(default_factory=list)          # ETS blocks without statements
    files: dict = field(default_factory=dict)                # (function, occ) -> file

    def merge(self, other):
        return InstrumentationPlan(
            self.ets_insertions + other.ets_insertions,
            self.coverage_insertions + other.coverage_insertions,
            self.unplaceable + other.unplaceable,
            {**self.files, **other.files})

    def to_json(self):
        def rec(rows, idname):
            return [{"file": self.files.get((f, o)), "function": f, "occurrence": o,
                     "cfg_block": k, idname: i} for f, o, k, i in rows]
        return {"ets_insertions": rec(self.ets_insertions, "block_id"),
                "coverage_insertions": rec(self.coverage_insertions, "guard_id"),
                "unplaceable": rec(self.unplaceable, "block_id")}


def _apply(insertions):
    """``insertions``: list of (ast_block, index, order, probe)."""
    by_block = {}
    for blk, idx, order, probe in insertions:
        by_block.setdefault(id(blk), (blk, []))[1].append((idx, order, probe))
    for blk, items in by_block.values():
        # descending index keeps earlier slots valid; same-slot probes end
        # up in ascending ``order``
        items.sort(key=lambda t: (-t[0], -t[1]))
        for idx, _, probe in items:
            blk.stmts.insert(idx, probe)


def _functions_in_order(ast):
    """(decl, occurrence) sorted by file, then declaration order."""
    pairs = list(ast.occurrences())
    order = {f: k for k, f in enumerate(sorted({d.file for d, _ in pairs}))}
    return sorted(pairs, key=lambda p: order[p[0].file])


def instrument_ets(ast: A.Ast, ets):
    """Insert ``InstrumentETS(block_id)`` before the first statement of every
    ETS block belonging to this program's files."""
    out = copy.deepcopy(ast)
    plan = InstrumentationPlan()
    files = {d.file for d in out.functions}
    wanted = {}
    for b in ets.blocks:
        if b.file in files:
            wanted.setdefault((b.function, b.occurrence), []).append(b)
    missing = []
    insertions = []
    for decl, occ in out.occurrences():
        plan.files[(decl.name, occ)] = decl.file
        rows = wanted.pop((decl.name, occ), [])
        if not rows:
            continue
        blocks = decompose(decl)
        for b in sorted(rows, key=lambda r: r.cfg_block):
            bb = blocks[b.cfg_block] if 0 <= b.cfg_block < len(blocks) else None
            if (bb is None or b.file != decl.file or bb.start_line != b.start_line
                    or bb.end_line != b.end_line):
                missing.append(b)
                continue
            if bb.empty:
                plan.unplaceable.append((decl.name, occ, b.cfg_block, b.block_id))
                continue
            blk, idx = bb.anchor
            insertions.append((blk, idx, b.block_id, A.Probe(A.ETS, b.block_id)))
            plan.ets_insertions.append((decl.name, occ, b.cfg_block, b.block_id))
    for rows in wanted.values():
        missing.extend(rows)
    if missing:
        raise BlockNotMatched(sorted(missing, key=lambda b: b.block_id))
    _apply(insertions)
    return out, plan


def instrument_coverage(ast: A.Ast, first_id: int = 1):
    """Give every basic block of every function a ``SancovGuard`` probe;
    ids are consecutive from ``first_id`` in (file, declaration, block)
    order."""
    out = copy.deepcopy(ast)
    plan = InstrumentationPlan()
    insertions = []
    gid = first_id
    for decl, occ in _functions_in_order(out):
        plan.files[(decl.name, occ)] = decl.file
        for bb in decompose(decl):
            blk, idx = bb.anchor
            insertions.append((blk, idx, gid, A.Probe(A.GUARD, gid)))
            plan.coverage_insertions.append((decl.name, occ, bb.index, gid))
            gid += 1
    _apply(insertions)
    return out, plan
