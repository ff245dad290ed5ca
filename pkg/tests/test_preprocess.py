import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import fixture_path
from helpers.oracles import block_distance_oracle, function_distance_oracle, target_blocks_oracle
from helpers.progen import gen_program

from difuzz.graph import CALLGRAPH, GraphEdge, GraphNode, ProgramGraph, build_graphs
from difuzz.instrument import load_program
from difuzz.minilang import parse_program
from difuzz.preprocess import (DistanceAnalysis, EnhancedTargetSequence, EtsBlock, SchemaError,
                               TargetFormatError, TargetNotFound, TargetPoint, compute_ets,
                               dumps_ets, format_targets, function_distance, loads_ets,
                               locate_target_blocks, parse_targets, read_ets_toml,
                               read_targets, write_ets_toml)


def _cg(names, edges):
    nodes = [GraphNode(f"Node0x{i:04x}", "/x.mp", 1, 1, 1, 0, n) for i, n in enumerate(names)]
    ids = {n.label: n.node_id for n in nodes}
    return ProgramGraph(CALLGRAPH, nodes, [GraphEdge(ids[a], ids[b]) for a, b in edges]), ids


def _chain():
    ast = load_program(fixture_path("chain"))
    return build_graphs(ast), read_targets(fixture_path("chain", "targets.tsv"))


# -- function distance ------------------------------------------------------------

def test_target_function_is_zero():
    cg, ids = _cg(["f"], [])
    assert function_distance(cg, ids["f"], {ids["f"]}) == 0


def test_chain_function_distances():
    gs, targets = _chain()
    an = DistanceAnalysis(gs.cg, gs.cfgs, targets)
    by_label = {n.label: an.fd[n.node_id] for n in gs.cg.nodes}
    assert by_label == {"main": 2, "a": 1, "b": 0}
    want = function_distance_oracle(gs.cg, {n.node_id for n in gs.cg.nodes if n.label == "b"})
    assert {n.label: want[n.node_id] for n in gs.cg.nodes} == by_label


def test_harmonic_mean_of_hops():
    cg, ids = _cg(["f", "t1", "a", "b", "t2"], [("f", "t1"), ("f", "a"), ("a", "b"), ("b", "t2")])
    d = function_distance(cg, ids["f"], {ids["t1"], ids["t2"]})
    assert d == Fraction(3, 2)
    assert d == function_distance_oracle(cg, {ids["t1"], ids["t2"]})[ids["f"]]


def test_unreachable_function_is_infinite():
    cg, ids = _cg(["f", "t"], [("t", "f")])
    assert function_distance(cg, ids["f"], {ids["t"]}) == math.inf


def _random_cg(rng):
    n = rng.randint(2, 9)
    names = [f"f{i}" for i in range(n)]
    edges = [(rng.choice(names), rng.choice(names)) for _ in range(rng.randint(0, 2 * n))]
    return names, edges


def _reachable_targets(cg, f, tset):
    return {t for t in tset if function_distance(cg, f, {t}) != math.inf}


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_adding_a_call_edge_never_increases_distance(seed):
    rng = random.Random(seed)
    names, edges = _random_cg(rng)
    targets = rng.sample(names, rng.randint(1, 2))
    cg, ids = _cg(names, edges)
    extra = (rng.choice(names), rng.choice(names))
    cg2, _ = _cg(names, edges + [extra])
    tset = {ids[t] for t in targets}
    for n in names:
        # the mean runs over reachable targets only, so the property holds
        # while the edge does not bring a further target into reach
        if len(tset) > 1 and _reachable_targets(cg, ids[n], tset) != _reachable_targets(cg2, ids[n], tset):
            continue
        assert function_distance(cg2, ids[n], tset) <= function_distance(cg, ids[n], tset)


def test_new_reachable_target_can_raise_the_mean():
    names = ["f", "t1", "x", "t2"]
    cg, ids = _cg(names, [("f", "x"), ("x", "t1")])
    cg2, _ = _cg(names, [("f", "x"), ("x", "t1"), ("t1", "t2")])
    tset = {ids["t1"], ids["t2"]}
    assert function_distance(cg, ids["f"], tset) == 2
    assert function_distance(cg2, ids["f"], tset) == Fraction(12, 5)


# -- target location and block distance ---------------------------------------------

def test_locate_finds_then_block():
    gs, targets = _chain()
    got = locate_target_blocks(gs.cg, gs.cfgs, targets[0])
    assert got == target_blocks_oracle(gs.cfgs, targets) == {("b", 0, 1)}


def test_locate_counts_every_duplicate():
    ast = load_program(fixture_path("dup3"))
    gs = build_graphs(ast)
    t = read_targets(fixture_path("dup3", "targets.tsv"))[0]
    got = locate_target_blocks(gs.cg, gs.cfgs, t)
    assert {(f, o) for f, o, _ in got} == {("host", 0), ("host", 1), ("host", 2)}


@pytest.mark.parametrize("t", [TargetPoint("t", "main.mp", 999, 1.0),
                               TargetPoint("t", "other.mp", 2, 1.0)])
def test_target_not_found(t):
    gs, _ = _chain()
    with pytest.raises(TargetNotFound):
        locate_target_blocks(gs.cg, gs.cfgs, t)
    with pytest.raises(TargetNotFound):
        compute_ets(gs.cg, gs.cfgs, [t])


def test_chain_block_distances():
    gs, targets = _chain()
    d = DistanceAnalysis(gs.cg, gs.cfgs, targets).block_dist
    assert d[("b", 0, 1)] == 0          # the target block itself
    assert d[("b", 0, 0)] == 1          # its straight-line predecessor
    assert d[("a", 0, 0)] == 10         # calls b, which is at function distance 0 -> C * 1
    assert d[("main", 0, 1)] == 10      # calls a at function distance 1
    assert d[("main", 0, 0)] == 11
    assert d == block_distance_oracle(gs.cg, gs.cfgs, targets)


def test_unreachable_target_function_keeps_only_local_blocks():
    src = ("func main() {\n    print(1)\n}\n"
           "func lonely() {\n    if input(0) == 3 {\n        panic(\"x\")\n    }\n}\n")
    ast = parse_program(src, "m.mp")
    gs = build_graphs(ast)
    ets = compute_ets(gs.cg, gs.cfgs, [TargetPoint("t", "m.mp", 6, 1.0)])
    assert {b.function for b in ets.blocks} == {"lonely"}
    assert all(b.function != "main" for b in ets.blocks)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_distances_match_supergraph_oracle(seed):
    rng = random.Random(seed)
    ast = parse_program(gen_program(rng), "p.mp")
    gs = build_graphs(ast)
    key = rng.choice(sorted(gs.cfgs))
    node = rng.choice(gs.cfgs[key].nodes)
    tps = [TargetPoint("t", "p.mp", rng.randint(node.startline, node.bbendline), 1.0)]
    got = DistanceAnalysis(gs.cg, gs.cfgs, tps).block_dist
    assert got == block_distance_oracle(gs.cg, gs.cfgs, tps)


# -- ETS ---------------------------------------------------------------------------------

def test_single_block_target():
    ast = parse_program('func main() {\n    panic("x")\n}\n', "m.mp")
    gs = build_graphs(ast)
    ets = compute_ets(gs.cg, gs.cfgs, [TargetPoint("t", "m.mp", 2, 5.0)])
    assert len(ets.blocks) == 1
    b = ets.blocks[0]
    assert (b.block_id, b.weight, ets.max_block_distance) == (1, 1.0, 0)


def test_chain_ets_weights():
    gs, targets = _chain()
    ets = compute_ets(gs.cg, gs.cfgs, targets)
    oracle = block_distance_oracle(gs.cg, gs.cfgs, targets)
    finite = {k: v for k, v in oracle.items() if v != math.inf}
    assert {(b.function, b.occurrence, b.cfg_block) for b in ets.blocks} == set(finite)
    for b in ets.blocks:
        assert b.weight == pytest.approx(1 / (1 + float(finite[b.key])), rel=1e-12)
    assert [b.block_id for b in ets.blocks] == list(range(1, len(ets.blocks) + 1))
    assert ets.max_block_distance == 11


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_target_blocks_have_maximal_weight(seed):
    rng = random.Random(seed)
    ast = parse_program(gen_program(rng), "p.mp")
    gs = build_graphs(ast)
    key = rng.choice(sorted(gs.cfgs))
    node = rng.choice(gs.cfgs[key].nodes)
    tps = [TargetPoint("t", "p.mp", node.startline, 1.0)]
    ets = compute_ets(gs.cg, gs.cfgs, tps)
    top = max(b.weight for b in ets.blocks)
    assert top == 1.0
    tblocks = target_blocks_oracle(gs.cfgs, tps)
    assert {b.key for b in ets.blocks if b.weight == top} >= tblocks
    assert dumps_ets(ets) == dumps_ets(compute_ets(gs.cg, gs.cfgs, tps))


def test_duplicate_host_gives_one_target_block_each():
    ast = load_program(fixture_path("dup3"))
    gs = build_graphs(ast)
    ets = compute_ets(gs.cg, gs.cfgs, read_targets(fixture_path("dup3", "targets.tsv")))
    assert sorted(b.occurrence for b in ets.blocks if b.weight == 1.0) == [0, 1, 2]


def test_multiple_targets_take_the_nearest():
    gs, _ = _chain()
    t_b = TargetPoint("t1", "main.mp", 13, 1.0)
    t_a = TargetPoint("t2", "main.mp", 8, 1.0)
    both = DistanceAnalysis(gs.cg, gs.cfgs, [t_b, t_a]).block_dist
    one = [DistanceAnalysis(gs.cg, gs.cfgs, [t]).block_dist for t in (t_b, t_a)]
    for k, v in both.items():
        assert v <= min(one[0][k], one[1][k])
    assert both == block_distance_oracle(gs.cg, gs.cfgs, [t_b, t_a])


# -- ets.toml ------------------------------------------------------------------------------

def _ten_block_ets():
    blocks = [EtsBlock(i + 1, "m.mp", f"f{i % 3}", i % 2, i, i + 1, i + 2, 1 / (1 + i))
              for i in range(10)]
    return EnhancedTargetSequence([TargetPoint("t", "m.mp", 3, 60.0)], blocks, 9)


def test_toml_round_trip(tmp_path):
    ets = _ten_block_ets()
    path = tmp_path / "ets.toml"
    write_ets_toml(ets, path)
    back = read_ets_toml(path)
    assert back.targets == ets.targets and back.max_block_distance == 9
    assert [b.key for b in back.blocks] == [b.key for b in ets.blocks]
    for a, b in zip(back.blocks, ets.blocks):
        assert a.weight == pytest.approx(b.weight, rel=1e-6)
    assert dumps_ets(back) == dumps_ets(ets)


def test_hand_written_minimal_file():
    text = ('max_block_distance = 0\n\n[[target]]\nid = "t"\nfile = "m.mp"\nline = 2\n'
            'timeout_s = 60\n\n[[block]]\nblock_id = 1\nfile = "m.mp"\nfunction = "main"\n'
            'occurrence = 0\ncfg_block = 0\nstart_line = 1\nend_line = 3\nweight = 1.0\n')
    ets = loads_ets(text)
    assert ets == EnhancedTargetSequence([TargetPoint("t", "m.mp", 2, 60.0)],
                                         [EtsBlock(1, "m.mp", "main", 0, 0, 1, 3, 1.0)], 0)


def test_check_label_fixture_parses():
    ets = read_ets_toml(fixture_path("check_label", "ets.toml"))
    assert [b.block_id for b in ets.blocks] == [2497, 7023, 1110]


def test_duplicate_block_id_rejected():
    text = dumps_ets(_ten_block_ets()).replace("block_id = 2\n", "block_id = 1\n")
    with pytest.raises(SchemaError):
        loads_ets(text)


@pytest.mark.parametrize("mutation", [
    lambda s: s.replace("max_block_distance = 9", "max_block_distance = 9\ncolour = 1"),
    lambda s: s.replace("weight = 1.00000", 'weight = "high"', 1),
    lambda s: s.replace("[[block]]", "[[blocks]]", 1),
    lambda s: s.replace('function = "f0"\n', "", 1),
    lambda s: s + "\n[[block\n",
])
def test_schema_violations(mutation):
    with pytest.raises(SchemaError):
        loads_ets(mutation(dumps_ets(_ten_block_ets())))


def test_weights_keep_six_significant_digits():
    text = dumps_ets(_ten_block_ets())
    assert "weight = 0.333333" in text


# -- target lists ---------------------------------------------------------------------------

def test_targets_parse_and_format():
    text = "# comment\nlib_1\tsrc/a.mp:12\t60\n\nlib_2\tb.mp:3\t2.5\n"
    ts = parse_targets(text)
    assert ts == [TargetPoint("lib_1", "src/a.mp", 12, 60.0), TargetPoint("lib_2", "b.mp", 3, 2.5)]
    assert parse_targets(format_targets(ts)) == ts


@pytest.mark.parametrize("text", ["x\ta.mp\t60", "x\ta.mp:0\t60", "x\ta.mp:3", "x\ta.mp:3\t-1",
                                  "x\ta.mp:z\t60"])
def test_bad_target_lines(text):
    with pytest.raises(TargetFormatError):
        parse_targets(text)
