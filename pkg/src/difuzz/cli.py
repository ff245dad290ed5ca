"""Command-line entry point: ``difuzz <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__


def _cmd_graph(args):
    from .graph.store import build_graphs
    from .instrument.program import load_program
    gs = build_graphs(load_program(args.src))
    gs.write(args.out)
    print(f"wrote callgraph.dot and {len(gs.cfgs)} CFG(s) to {args.out}")


def _cmd_preprocess(args):
    from .graph.store import GraphSet
    from .preprocess import compute_ets, read_targets, write_ets_toml
    gs = GraphSet.read(args.graphs)
    ets = compute_ets(gs.cg, gs.cfgs, read_targets(args.targets))
    write_ets_toml(ets, args.out)
    print(f"{len(ets.blocks)} ETS block(s), max block distance "
          f"{ets.max_block_distance} -> {args.out}")


def _cmd_instrument(args):
    from .instrument import instrument_program
    info = instrument_program(args.src, args.ets, args.out)
    print(f"instrumented {len(info['files'])} file(s): {info['ets_insertions']} ETS probe(s), "
          f"{info['coverage_insertions']} coverage guard(s), "
          f"{info['unplaceable']} unplaceable -> {args.out}")


def _read_seeds(directory):
    if not directory:
        return ()
    seeds = []
    for f in sorted(os.listdir(directory)):
        path = os.path.join(directory, f)
        if os.path.isfile(path):
            with open(path, "rb") as fh:
                seeds.append(fh.read())
    return tuple(seeds)


def _cmd_fuzz(args):
    from .engine.campaign import FuzzConfig, fuzz_loop, write_campaign
    from .engine.executor import load_program_dir
    from .preprocess import read_ets_toml
    program = load_program_dir(args.program)
    ets = read_ets_toml(args.ets)
    cfg = FuzzConfig(mode=args.mode, timeout_s=args.timeout, rng_seed=args.rng_seed,
                     t_exploit=args.t_exploit, clock=args.clock, exec_tick_s=args.exec_tick,
                     step_limit=args.step_limit, seeds=_read_seeds(args.seeds))
    result = fuzz_loop(program, ets, cfg)
    write_campaign(result, args.out)
    if result.timed_out:
        print(f"Timeout after {result.executions} executions "
              f"(corpus {result.corpus_size})")
        return 1
    print(f"TTE {result.tte_s:.3f} s: {result.target_id} at {result.crash_position} "
          f"after {result.executions} executions")
    return 0


def _cmd_bench(args):
    from .bench.harness import load_bench_config, render_report, run_bench, write_report
    cfg = load_bench_config(args.config, trials=args.trials, jobs=args.jobs,
                            timeout_s=args.timeout, clock=args.clock)
    matrix = run_bench(cfg, out_dir=args.out)
    write_report(matrix, args.out)
    sys.stdout.write(render_report(matrix, "text"))


def _cmd_gen_suite(args):
    from .bench.suite import gen_benchmark_suite, write_suite
    progs = gen_benchmark_suite(seed=args.seed, timeout=args.timeout)
    dirs = write_suite(args.out, progs)
    lines = ["trials = 10", 'modes = ["directed", "coverage"]', ""]
    for name in dirs:
        lines += ["[[program]]", f'name = "{name}"', f'source = "{name}"',
                  f'targets = "{name}/targets.tsv"', ""]
    with open(os.path.join(args.out, "bench.toml"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
    for name, d in dirs.items():
        print(f"{name}\t{d}")


def _cmd_run(args):
    from .engine.executor import load_program_dir
    from .minilang import interpret
    data = b""
    if args.input:
        with open(args.input, "rb") as fh:
            data = fh.read()
    out = interpret(load_program_dir(args.program), data, step_limit=args.step_limit)
    sys.stdout.write(out.stdout.decode("utf-8", "replace"))
    print(json.dumps({"status": out.status.value, "message": out.message,
                      "position": None if out.position is None else str(out.position),
                      "steps": out.steps}), file=sys.stderr)
    return 0 if out.status.value == "Normal" else 1


def build_parser():
    p = argparse.ArgumentParser(prog="difuzz", description="Directed fuzzing for MiniProc programs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("graph", help="emit the call graph and CFGs as DOT")
    g.add_argument("--src", required=True)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=_cmd_graph)

    pp = sub.add_parser("preprocess", help="compute the ETS from graphs and targets")
    pp.add_argument("--graphs", required=True)
    pp.add_argument("--targets", required=True)
    pp.add_argument("-o", "--out", required=True)
    pp.set_defaults(func=_cmd_preprocess)

    i = sub.add_parser("instrument", help="insert ETS probes and coverage guards")
    i.add_argument("--src", required=True)
    i.add_argument("--ets", required=True)
    i.add_argument("-o", "--out", required=True)
    i.set_defaults(func=_cmd_instrument)

    f = sub.add_parser("fuzz", help="run one campaign")
    f.add_argument("--program", required=True, help="instrumented source directory")
    f.add_argument("--ets", required=True)
    f.add_argument("--mode", choices=("directed", "coverage"), default="directed")
    f.add_argument("--timeout", type=float, default=60.0)
    f.add_argument("--rng-seed", type=int, default=0)
    f.add_argument("--t-exploit", type=float, default=5.0)
    f.add_argument("--clock", choices=("wall", "exec"), default="wall")
    f.add_argument("--exec-tick", type=float, default=1e-4,
                   help="campaign seconds per execution with --clock exec")
    f.add_argument("--step-limit", type=int, default=1_000_000)
    f.add_argument("--seeds", help="directory of seed inputs")
    f.add_argument("-o", "--out", required=True)
    f.set_defaults(func=_cmd_fuzz)

    b = sub.add_parser("bench", help="repeated-trial TTE experiment")
    b.add_argument("--config", required=True)
    b.add_argument("--trials", type=int)
    b.add_argument("--jobs", type=int)
    b.add_argument("--timeout", type=float, help="override per-target timeouts")
    b.add_argument("--clock", choices=("wall", "exec"))
    b.add_argument("-o", "--out", required=True)
    b.set_defaults(func=_cmd_bench)

    s = sub.add_parser("gen-suite", help="write the synthetic benchmark suite")
    s.add_argument("-o", "--out", required=True)
    s.add_argument("--seed", type=int, default=2024)
    s.add_argument("--timeout", type=float, default=300.0)
    s.set_defaults(func=_cmd_gen_suite)

    r = sub.add_parser("run", help="execute a program on one input")
    r.add_argument("--program", required=True)
    r.add_argument("--input")
    r.add_argument("--step-limit", type=int, default=1_000_000)
    r.set_defaults(func=_cmd_run)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rc = args.func(args)
    except Exception as exc:  # surfaced as a one-line error, not a traceback
        if os.environ.get("DIFUZZ_DEBUG"):
            raise
        print(f"difuzz {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
