"""Compare the compiled and pure-Python VM kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Two workloads: a tight arithmetic loop (raw interpreter speed) and short
fuzzing-style executions of an instrumented program (per-run overhead,
coverage and ETS recording).
"""

import argparse
import statistics
import sys
import time

from difuzz import kernels
from difuzz.engine.executor import Executor
from difuzz.instrument import instrument_ast
from difuzz.minilang import parse_program
from difuzz.minilang.compiler import compile_program
from difuzz.preprocess import TargetPoint, compute_ets
from difuzz.graph import build_graphs

LOOP = """
func main() {
    i = 0
    acc = 0
    while i < 200000 {
        acc = (acc * 31 + i) % 1000003
        i = i + 1
    }
    print(acc)
}
"""

BRANCHY = """
func main() {
    i = 0
    n = 0
    while i < input_len() {
        if input(i) > 128 {
            n = n + 2
        } else if input(i) % 3 == 0 {
            n = n - 1
        }
        i = i + 1
    }
    if n == 9 {
        panic("target")
    }
}
"""


def _time(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def bench_loop(run, repeat):
    prog = compile_program(parse_program(LOOP, "loop.mp"))
    out = []
    secs = _time(lambda: out.append(run(prog, b"", 10_000_000, 0.0, None)), repeat)
    steps = out[-1][1]
    return secs, steps / secs


def bench_fuzz_execs(run, repeat, n=5000):
    ast = parse_program(BRANCHY, "branchy.mp")
    gs = build_graphs(ast)
    ets = compute_ets(gs.cg, gs.cfgs, [TargetPoint("t", "branchy.mp", 14, 1.0)])
    prog = compile_program(instrument_ast(ast, ets)[0])
    ex = Executor(prog, backend=run)
    inputs = [bytes((i * 37 + j) & 0xFF for j in range(16)) for i in range(64)]

    def go():
        for k in range(n):
            ex.execute(inputs[k & 63])
    secs = _time(go, repeat)
    return secs, n / secs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    compiled = kernels.compiled_run()
    backends = [("python", kernels.run_python)]
    if compiled is None:
        print("compiled kernel not built; reporting the fallback only", file=sys.stderr)
    else:
        backends.insert(0, ("cython", compiled))
    rows = []
    for name, run in backends:
        loop_s, steps_per_s = bench_loop(run, args.repeat)
        fuzz_s, execs_per_s = bench_fuzz_execs(run, args.repeat)
        rows.append((name, loop_s, steps_per_s, fuzz_s, execs_per_s))
    print(f"{'backend':8} {'loop s':>9} {'steps/s':>12} {'5k execs s':>11} {'execs/s':>10}")
    for name, a, b, c, d in rows:
        print(f"{name:8} {a:9.4f} {b:12.3e} {c:11.4f} {d:10.0f}")
    if len(rows) == 2:
        print(f"speedup: loop x{rows[1][1] / rows[0][1]:.1f}, "
              f"executions x{rows[1][3] / rows[0][3]:.1f}")


if __name__ == "__main__":
    main()
