"""Static distance analysis over a call graph and per-function CFGs.

Everything here works from graphs alone (as read back from DOT), so the
analysis can run on graphs produced by any front end that follows the
same schema. Distances are exact rationals.

* Function distance: harmonic mean of call-graph hop counts to the target
  functions reachable from ``f``; 0 when ``f`` hosts a target; infinite
  when none is reachable.
* Block distance: a block containing a target has base 0; a block calling
  functions with finite function distance has base ``C * max(min fd, 1)``;
  a block's distance is the least ``hops + base`` over the blocks reachable
  from it inside its CFG.
"""

from __future__ import annotations

import heapq
import math
import os
from collections import deque
from fractions import Fraction

from ..graph.model import ProgramGraph
from .ets import EnhancedTargetSequence, EtsBlock

INF = math.inf
CALL_COST = 10


class TargetNotFound(LookupError):
    pass


def block_index(label: str) -> int:
    return int(label.rsplit("#bb", 1)[1])


def _same_file(a: str, b: str) -> bool:
    a, b = os.path.normpath(a), os.path.normpath(b)
    if a == b:
        return True
    return a.endswith(os.sep + b) or b.endswith(os.sep + a)


def locate_target_blocks(cg: ProgramGraph, cfgs: dict, target) -> set:
    """Every CFG block whose file and line range contain the target point,
    across all duplicate-position copies of the host function."""
    files = {n.filename for n in cg.nodes}
    for g in cfgs.values():
        files.update(n.filename for n in g.nodes)
    if not any(_same_file(f, target.file) for f in files):
        raise TargetNotFound(f"{target.id}: file {target.file} not in graphs")
    found = set()
    for (name, occ), g in cfgs.items():
        for n in g.nodes:
            if _same_file(n.filename, target.file) and n.startline <= target.line <= n.bbendline:
                found.add((name, occ, block_index(n.label)))
    if not found:
        raise TargetNotFound(f"{target.id}: no basic block spans {target.location}")
    return found


def _cg_hops(cg: ProgramGraph, start: str) -> dict:
    succ = cg.successors()
    dist = {start: 0}
    todo = deque([start])
    while todo:
        v = todo.popleft()
        for m in succ.get(v, ()):
            if m not in dist:
                dist[m] = dist[v] + 1
                todo.append(m)
    return dist


def function_distance(cg: ProgramGraph, f: str, target_functions) -> Fraction:
    """Harmonic-mean hop distance from CG node ``f`` to the target nodes."""
    targets = set(target_functions)
    if f in targets:
        return Fraction(0)
    hops = _cg_hops(cg, f)
    reach = [hops[t] for t in targets if t in hops]
    if not reach:
        return INF
    return Fraction(len(reach)) / sum(Fraction(1, h) for h in reach)


class DistanceAnalysis:
    """Function and block distances for one set of targets."""

    def __init__(self, cg: ProgramGraph, cfgs: dict, targets, call_cost=CALL_COST):
        self.cg = cg
        self.cfgs = cfgs
        self.targets = list(targets)
        self.call_cost = call_cost
        self.target_blocks = set()
        for t in self.targets:
            self.target_blocks |= locate_target_blocks(cg, cfgs, t)
        label_to_cg = {n.label: n.node_id for n in cg.nodes}
        self.display = {key: g.function for key, g in cfgs.items()}
        self.cg_node = {key: label_to_cg[g.function] for key, g in cfgs.items()
                        if g.function in label_to_cg}
        target_fns = {self.cg_node[(name, occ)] for name, occ, _ in self.target_blocks}
        self.fd = {n.node_id: function_distance(cg, n.node_id, target_fns) for n in cg.nodes}
        self._fd_by_label = {n.label: self.fd[n.node_id] for n in cg.nodes}
        self.block_dist = {}
        for key, g in cfgs.items():
            for k, d in self._cfg_distances(key, g).items():
                self.block_dist[key + (k,)] = d

    def base(self, key, node):
        k = block_index(node.label)
        if key + (k,) in self.target_blocks:
            return Fraction(0)
        finite = [self._fd_by_label[c] for c in node.calls
                  if self._fd_by_label.get(c, INF) != INF]
        if not finite:
            return INF
        return self.call_cost * max(min(finite), Fraction(1))

    def _cfg_distances(self, key, g):
        preds = {n.node_id: [] for n in g.nodes}
        for e in g.edges:
            if e.dst in preds and e.src in preds:
                preds[e.dst].append(e.src)
        dist = {}
        heap = []
        for n in g.nodes:
            b = self.base(key, n)
            dist[n.node_id] = b
            if b != INF:
                heapq.heappush(heap, (b, n.node_id))
        while heap:
            d, v = heapq.heappop(heap)
            if d > dist[v]:
                continue
            for p in preds[v]:
                if d + 1 < dist[p]:
                    dist[p] = d + 1
                    heapq.heappush(heap, (d + 1, p))
        return {block_index(n.label): dist[n.node_id] for n in g.nodes}


def block_distance(cfgs: dict, cg: ProgramGraph, block, targets) -> Fraction:
    """Distance of ``block`` = (function, occurrence, cfg_block)."""
    return DistanceAnalysis(cg, cfgs, targets).block_dist[tuple(block)]


def compute_ets(cg: ProgramGraph, cfgs: dict, targets, call_cost=CALL_COST) -> EnhancedTargetSequence:
    analysis = DistanceAnalysis(cg, cfgs, targets, call_cost)
    rows = []
    for (name, occ), g in cfgs.items():
        for n in g.nodes:
            k = block_index(n.label)
            d = analysis.block_dist[(name, occ, k)]
            if d != INF:
                rows.append((n.filename, name, occ, k, n, d))
    rows.sort(key=lambda r: r[:4])
    blocks = []
    for i, (file, name, occ, k, n, d) in enumerate(rows, 1):
        blocks.append(EtsBlock(i, file, name, occ, k, n.startline, n.bbendline,
                               float(1 / (1 + d))))
    max_d = max((r[5] for r in rows), default=0)
    return EnhancedTargetSequence(list(targets), blocks, math.ceil(max_d))
