"""Graph values shared by the call-graph and CFG builders and the DOT codec."""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

CALLGRAPH = "callgraph"
CFG = "cfg"


@dataclass(frozen=True)
class GraphNode:
    node_id: str
    filename: str
    startline: int
    headline: int
    bbendline: int
    startcolumn: int
    label: str
    # callees referenced from a CFG block, carried as extra record fields
    calls: tuple = ()

    def check(self):
        """Return a list of invariant violations (empty when valid)."""
        problems = []
        if self.startline > self.headline:
            problems.append(f"startline {self.startline} > headline {self.headline}")
        if self.startline > self.bbendline:
            problems.append(f"startline {self.startline} > bbendline {self.bbendline}")
        return problems


@dataclass(frozen=True)
class GraphEdge:
    src: str
    dst: str
    indirect: bool = False


@dataclass
class ProgramGraph:
    """A call graph (``kind == CALLGRAPH``), a CFG (``kind == CFG``) or an
    untitled fragment (``kind is None``) as found in bare DOT snippets."""

    kind: Optional[str]
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    function: Optional[str] = None   # display name, CFGs only
    entry: Optional[str] = None      # CFGs only

    def __eq__(self, other):
        if not isinstance(other, ProgramGraph):
            return NotImplemented
        return (self.kind == other.kind and self.function == other.function
                and self.entry == other.entry
                and sorted(self.nodes, key=_node_key) == sorted(other.nodes, key=_node_key)
                and Counter(self.edges) == Counter(other.edges))

    def node(self, node_id) -> GraphNode:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)

    def node_map(self):
        return {n.node_id: n for n in self.nodes}

    def successors(self):
        succ = {n.node_id: [] for n in self.nodes}
        for e in self.edges:
            succ.setdefault(e.src, []).append(e.dst)
        return succ

    def reachable(self, start=None):
        start = self.entry if start is None else start
        succ = self.successors()
        seen = {start}
        todo = [start]
        while todo:
            for m in succ.get(todo.pop(), ()):
                if m not in seen:
                    seen.add(m)
                    todo.append(m)
        return seen

    def dfs_order(self):
        """Node ids in depth-first pre-order from entry; nodes not reached
        from entry follow in storage order."""
        if self.entry is None:
            return [n.node_id for n in self.nodes]
        succ = self.successors()
        order, seen = [], set()
        stack = [self.entry]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            order.append(v)
            stack.extend(reversed(succ.get(v, ())))
        known = {n.node_id for n in self.nodes}
        order = [v for v in order if v in known]
        order += [n.node_id for n in self.nodes if n.node_id not in seen]
        return order


def _node_key(n):
    return (n.node_id, n.filename, n.startline, n.headline, n.bbendline,
            n.startcolumn, n.label, n.calls)


def node_id(*parts) -> str:
    """Stable opaque identifier in the ``Node0x…`` style."""
    digest = hashlib.sha1("\x1f".join(map(str, parts)).encode("utf-8")).hexdigest()
    return "Node0x" + digest[:12]
