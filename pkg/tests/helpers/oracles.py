"""Independent reference computations used as test oracles.

None of these import the code under test beyond plain data types.
"""

import math
from collections import deque
from fractions import Fraction
from itertools import product

INF = math.inf


# -- coverage -----------------------------------------------------------------

def bucket_oracle(count: int) -> int:
    """Hit-count class as a one-hot byte, written out range by range."""
    if count == 0:
        return 0
    ranges = [(1, 1), (2, 2), (3, 3), (4, 7), (8, 15), (16, 31), (32, 127), (128, 255)]
    for k, (lo, hi) in enumerate(ranges):
        if lo <= count <= hi:
            return 1 << k
    raise ValueError(count)


def edge_cells_oracle(guard_sequence, map_size=1 << 16):
    """Raw per-cell counts for one execution's guard sequence."""
    cells = {}
    prev = 0
    for g in guard_sequence:
        idx = ((prev >> 1) ^ g) % map_size
        cells[idx] = cells.get(idx, 0) + 1
        prev = g
    return cells


# -- distances ----------------------------------------------------------------

def _label_index(label):
    return int(label.rsplit("#bb", 1)[1])


def cg_hops_floyd(cg):
    """All-pairs hop counts on the call graph (Floyd-Warshall)."""
    ids = [n.node_id for n in cg.nodes]
    d = {(a, b): (0 if a == b else INF) for a, b in product(ids, ids)}
    for e in cg.edges:
        if e.src != e.dst and (e.src, e.dst) in d:
            d[(e.src, e.dst)] = 1
    for k in ids:
        for i in ids:
            dik = d[(i, k)]
            if dik == INF:
                continue
            for j in ids:
                if dik + d[(k, j)] < d[(i, j)]:
                    d[(i, j)] = dik + d[(k, j)]
    return d


def function_distance_oracle(cg, target_fn_ids):
    hops = cg_hops_floyd(cg)
    out = {}
    for n in cg.nodes:
        if n.node_id in target_fn_ids:
            out[n.node_id] = Fraction(0)
            continue
        reach = [hops[(n.node_id, t)] for t in target_fn_ids if hops[(n.node_id, t)] != INF]
        out[n.node_id] = INF if not reach else Fraction(len(reach), 1) / sum(Fraction(1, h) for h in reach)
    return out


def target_blocks_oracle(cfgs, targets):
    """Brute-force scan of every block's file and line range."""
    found = set()
    for (name, occ), g in cfgs.items():
        for n in g.nodes:
            for t in targets:
                if n.filename == t.file and n.startline <= t.line <= n.bbendline:
                    found.add((name, occ, _label_index(n.label)))
    return found


def block_distance_oracle(cg, cfgs, targets, call_cost=10):
    """Block distances by breadth-first search over an exploded supergraph.

    Every block of every function is a node. A block's "exit cost" (0 for
    a target block, ``C * max(min fd, 1)`` for a block calling functions
    with finite function distance) becomes a chain of unit edges into a
    common sink, after scaling all costs by the lcm of their denominators
    so they are integers. One backward BFS from the sink then yields every
    block distance, divided back by the scale.
    """
    tblocks = target_blocks_oracle(cfgs, targets)
    label_to_id = {n.label: n.node_id for n in cg.nodes}
    target_fns = {label_to_id[cfgs[(name, occ)].function] for name, occ, _ in tblocks}
    fd = function_distance_oracle(cg, target_fns)
    fd_by_label = {n.label: fd[n.node_id] for n in cg.nodes}

    costs = {}
    for (name, occ), g in cfgs.items():
        for n in g.nodes:
            key = (name, occ, _label_index(n.label))
            if key in tblocks:
                costs[key] = Fraction(0)
                continue
            finite = [fd_by_label[c] for c in n.calls if fd_by_label.get(c, INF) != INF]
            if finite:
                costs[key] = call_cost * max(min(finite), Fraction(1))
    scale = 1
    for c in costs.values():
        scale = scale * c.denominator // math.gcd(scale, c.denominator)

    # reversed adjacency of the exploded graph
    radj = {}

    def add(u, v):
        radj.setdefault(v, []).append(u)

    sink = ("sink",)
    for (name, occ), g in cfgs.items():
        idx = {n.node_id: _label_index(n.label) for n in g.nodes}
        for e in g.edges:
            if e.src in idx and e.dst in idx:
                add((name, occ, idx[e.src]), (name, occ, idx[e.dst]))
    for key, c in costs.items():
        steps = int(c * scale)
        prev = key
        for s in range(steps - 1):
            mid = ("chain", key, s)
            add(prev, mid)
            prev = mid
        if steps == 0:
            add(key, sink)       # zero-cost exit: same BFS layer as the sink
        else:
            add(prev, sink)
    dist = {sink: 0}
    zero = [k for k, c in costs.items() if c == 0]
    for k in zero:
        dist[k] = 0
    todo = deque([sink] + zero)
    while todo:
        v = todo.popleft()
        for u in radj.get(v, ()):
            if u not in dist:
                # zero-cost exits were seeded up front
                dist[u] = dist[v] + 1
                todo.append(u)
    out = {}
    for (name, occ), g in cfgs.items():
        for n in g.nodes:
            key = (name, occ, _label_index(n.label))
            out[key] = Fraction(dist[key], scale) if key in dist else INF
    return out


# -- scheduling ---------------------------------------------------------------

def energy_oracle(d, min_d, max_d, temp):
    """The annealing formula evaluated independently in exact arithmetic."""
    t = Fraction(temp)
    if d == INF or min_d == INF:
        dn = Fraction(1)
    elif max_d == min_d:
        dn = Fraction(0)
    else:
        dn = (Fraction(d) - Fraction(min_d)) / (Fraction(max_d) - Fraction(min_d))
    return (1 - dn) * (1 - t) + Fraction(1, 2) * t


def budget_oracle(energy, base=64):
    x = base * 2 ** (10 * (float(energy) - 0.5))
    return int(min(16 * base, max(1, math.floor(x + 0.5))))
