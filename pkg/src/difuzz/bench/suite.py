"""The synthetic benchmark suite: small programs with one planted panic each.

Every program lives in its own directory with a ``targets.tsv`` naming the
panic line. Magic constants come from a seeded RNG so the suite is stable
across runs but not trivially guessable by byte-value priors.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

from ..preprocess.targets import TargetPoint, write_targets

TARGETS_FILE = "targets.tsv"
SOURCE_FILE = "main.mp"
DEFAULT_TIMEOUT = 300.0
DEFAULT_K = (2, 4, 8)


@dataclass
class SuiteProgram:
    name: str
    kind: str                 # a, b, c, d or e
    files: dict               # relative path -> source text
    targets: list
    magic: tuple = ()         # bytes a crash input must carry, by offset
    reachable: bool = True

    def write(self, directory):
        root = os.path.join(directory, self.name)
        for rel, text in self.files.items():
            path = os.path.join(root, rel)
            os.makedirs(os.path.dirname(path), exist_ok=True)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        write_targets(self.targets, os.path.join(root, TARGETS_FILE))
        return root


def _line_of(text, needle):
    for n, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return n
    raise ValueError(f"{needle!r} not in source")


def _program(name, kind, src, marker, timeout, magic=(), reachable=True):
    tp = TargetPoint(f"{name}_1", SOURCE_FILE, _line_of(src, marker), timeout)
    return SuiteProgram(name, kind, {SOURCE_FILE: src}, [tp], tuple(magic), reachable)


def _magic(rng, n):
    # avoid 0 so the empty input never satisfies a check by accident
    return [rng.randrange(1, 256) for _ in range(n)]


def shallow(rng, timeout):
    (m,) = _magic(rng, 1)
    src = (
        "func main() {\n"
        f"    if input(0) == {m} {{\n"
        '        panic("shallow")\n'
        "    }\n"
        "}\n")
    return _program("a_shallow", "a", src, "panic(", timeout, [m])


def nested(rng, k, timeout):
    magic = _magic(rng, k)
    lines = ["func main() {"]
    for i, m in enumerate(magic):
        lines.append("    " * (i + 1) + f"if input({i}) == {m} {{")
    lines.append("    " * (k + 1) + f'panic("nested {k}")')
    for i in reversed(range(k)):
        lines.append("    " * (i + 1) + "}")
    lines.append("}")
    src = "\n".join(lines) + "\n"
    return _program(f"b_nested_k{k}", "b", src, "panic(", timeout, magic)


def counter(rng, timeout, hits=6):
    """Panic once a marker byte shows up ``hits`` times: a branch that
    every run reaches but almost none take."""
    (m,) = _magic(rng, 1)
    src = (
        "func main() {\n"
        "    i = 0\n"
        "    n = 0\n"
        "    while i < input_len() {\n"
        f"        if input(i) == {m} {{\n"
        "            n = n + 1\n"
        "        }\n"
        "        i = i + 1\n"
        "    }\n"
        f"    if n == {hits} {{\n"
        '        panic("counter")\n'
        "    }\n"
        "}\n")
    return _program("c_counter", "c", src, "panic(", timeout, [m])


def _distractor(idx, rng):
    """A sibling function that soaks up coverage-guided effort: several
    independent byte tests inside a loop, so many inputs look new."""
    a, b, c = (rng.randrange(1, 256) for _ in range(3))
    return (
        f"func noise{idx}() {{\n"
        "    i = 1\n"
        "    acc = 0\n"
        "    while i < input_len() && i < 10 {\n"
        "        v = input(i)\n"
        f"        if v < {a} {{\n"
        "            acc = acc + v\n"
        f"        }} else if v % 7 == {b % 7} {{\n"
        "            acc = acc - 1\n"
        "        } else {\n"
        "            acc = acc * 3 % 1000\n"
        "        }\n"
        f"        if acc > {c * 4} {{\n"
        "            acc = 0\n"
        "        }\n"
        "        i = i + 1\n"
        "    }\n"
        f"    if acc == {c} {{\n"
        "        print(acc)\n"
        "    }\n"
        "}\n")


def deep_call(rng, timeout, width=12):
    """Panic three calls below ``main``; ``main`` also dispatches to
    ``width`` distractor siblings."""
    sel, m1, m2, m3, m4 = _magic(rng, 5)
    parts = []
    body = ["func main() {", "    s = input(0)"]
    others = [v for v in range(256) if v != sel]
    rng.shuffle(others)
    for i in range(width):
        vals = sorted(others[i::width])[:6]
        cond = " || ".join(f"s == {v}" for v in vals)
        body.append(f"    if {cond} {{")
        body.append(f"        noise{i}()")
        body.append("    }")
    body += [f"    if s == {sel} {{", "        stage1()", "    }", "}"]
    parts.append("\n".join(body) + "\n")
    parts.append(
        "func stage1() {\n"
        f"    if input(1) == {m1} {{\n"
        "        stage2()\n"
        "    }\n"
        "}\n")
    parts.append(
        "func stage2() {\n"
        f"    if input(2) == {m2} {{\n"
        "        stage3()\n"
        "    }\n"
        "}\n")
    parts.append(
        "func stage3() {\n"
        f"    if input(3) == {m3} {{\n"
        f"        if input(4) == {m4} {{\n"
        '            panic("deep")\n'
        "        }\n"
        "    }\n"
        "}\n")
    for i in range(width):
        parts.append(_distractor(i, rng))
    src = "\n".join(parts)
    return _program("d_deep_call", "d", src, "panic(", timeout, [sel, m1, m2, m3, m4])


def dead_code(rng, timeout):
    (m,) = _magic(rng, 1)
    src = (
        "func main() {\n"
        f"    if input(0) == {m} {{\n"
        '        print("reached")\n'
        "    }\n"
        "}\n"
        "\n"
        "func never() {\n"
        '    panic("dead")\n'
        "}\n")
    # ``never`` is declared but not called from anywhere
    return _program("e_dead_code", "e", src, "panic(", timeout, [], reachable=False)


def gen_benchmark_suite(seed: int = 2024, ks=DEFAULT_K, timeout: float = DEFAULT_TIMEOUT) -> list:
    """All suite programs, in report order."""
    rng = random.Random(seed)
    progs = [shallow(rng, timeout)]
    progs += [nested(rng, k, timeout) for k in ks]
    progs += [counter(rng, timeout), deep_call(rng, timeout), dead_code(rng, timeout)]
    return progs


def write_suite(directory, programs=None) -> dict:
    """Write every program; returns name -> program directory."""
    programs = gen_benchmark_suite() if programs is None else programs
    return {p.name: p.write(directory) for p in programs}
