"""Repeated-trial TTE experiments and their tabular reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
from dataclasses import dataclass, field
from functools import lru_cache
from multiprocessing import get_context
from typing import Optional

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from ..engine.campaign import COVERAGE, DIRECTED, FuzzConfig, fuzz_loop, validate_crash, write_campaign
from ..preprocess.targets import read_targets
from .pipeline import PipelineError, prepare

MODES = (DIRECTED, COVERAGE)


class BenchConfigError(ValueError):
    pass


@dataclass
class BenchProgram:
    name: str
    source: str
    targets: str


@dataclass
class BenchConfig:
    programs: list
    modes: tuple = MODES
    trials: int = 10
    rng_seed_base: int = 0
    jobs: int = 1
    clock: str = "wall"
    exec_tick_s: float = 1e-4
    t_exploit: float = 5.0
    timeout_s: Optional[float] = None     # overrides the per-target timeouts

    def __post_init__(self):
        if self.trials < 1:
            raise BenchConfigError("trials must be >= 1")
        if self.jobs < 1:
            raise BenchConfigError("jobs must be >= 1")
        if self.timeout_s is not None and not self.timeout_s > 0:
            raise BenchConfigError("timeout must be positive")
        bad = [m for m in self.modes if m not in MODES]
        if bad or not self.modes:
            raise BenchConfigError(f"modes must be a non-empty subset of {MODES}")


def load_bench_config(path, **overrides) -> BenchConfig:
    """Read ``bench.toml``; relative program paths resolve against the file."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    base = os.path.dirname(os.path.abspath(path))
    progs = []
    for p in doc.pop("program", []):
        try:
            src = os.path.join(base, p["source"])
            tgt = os.path.join(base, p.get("targets", os.path.join(p["source"], "targets.tsv")))
            progs.append(BenchProgram(p["name"], src, tgt))
        except KeyError as exc:
            raise BenchConfigError(f"program entry missing {exc}") from None
    known = {"modes", "trials", "rng_seed_base", "jobs", "clock", "exec_tick_s",
             "t_exploit", "timeout_s"}
    unknown = set(doc) - known
    if unknown:
        raise BenchConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    if "modes" in doc:
        doc["modes"] = tuple(doc["modes"])
    doc.update({k: v for k, v in overrides.items() if v is not None})
    return BenchConfig(progs, **doc)


# -- statistics ----------------------------------------------------------------

@dataclass(frozen=True)
class TteCell:
    best_s: Optional[float]
    avg_s: Optional[float]
    timeout_pct: float
    median_s: Optional[float] = None    # timeouts rank above every finite TTE
    trials: int = 0

    @classmethod
    def from_trials(cls, ttes):
        """``ttes``: one float per trial, ``None`` for a timeout."""
        ttes = list(ttes)
        if not ttes:
            raise ValueError("a cell needs at least one trial")
        hits = [t for t in ttes if t is not None]
        pct = 100 * (len(ttes) - len(hits)) / len(ttes)
        med = statistics.median(math.inf if t is None else t for t in ttes)
        return cls(min(hits) if hits else None,
                   statistics.fmean(hits) if hits else None,
                   pct, None if med == math.inf else med, len(ttes))


def _fmt_s(x):
    return f"{x:.1f}" if x >= 0.05 else f"{x:.2g}"


def _fmt_pct(p):
    return f"{p:g}" if float(p).is_integer() else f"{p:.1f}"


def format_cell(cell: TteCell) -> str:
    if cell.avg_s is None:
        return f"TO ({_fmt_pct(cell.timeout_pct)}% TO)"
    avg = _fmt_s(cell.avg_s)
    if cell.timeout_pct > 0:
        avg += f" ({_fmt_pct(cell.timeout_pct)}% TO)"
    return f"{_fmt_s(cell.best_s)} | {avg}"


@dataclass
class BenchMatrix:
    modes: tuple
    rows: list = field(default_factory=list)        # target ids in order
    cells: dict = field(default_factory=dict)       # (target_id, mode) -> TteCell
    trials: dict = field(default_factory=dict)      # (target_id, mode) -> [tte or None]

    def cell(self, target_id, mode):
        return self.cells[(target_id, mode)]


def render_report(matrix: BenchMatrix, fmt: str = "text") -> str:
    if fmt == "text":
        return _render_text(matrix)
    if fmt == "csv":
        return _render_csv(matrix)
    if fmt == "json":
        return _render_json(matrix)
    raise ValueError(f"unknown report format {fmt!r}")


def _render_text(m):
    head = ["Target"] + [f"{mode}: best, s | avg, s" for mode in m.modes]
    rows = [[tid] + [format_cell(m.cells[(tid, mode)]) if (tid, mode) in m.cells else "-"
                     for mode in m.modes] for tid in m.rows]
    widths = [max(len(r[i]) for r in [head] + rows) for i in range(len(head))]
    out = []
    for r in [head] + rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if r is head:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


_CSV_FIELDS = ("target", "mode", "trials", "best_s", "avg_s", "median_s", "timeout_pct")


def _rows(m):
    for tid in m.rows:
        for mode in m.modes:
            c = m.cells.get((tid, mode))
            if c is not None:
                yield {"target": tid, "mode": mode, "trials": c.trials, "best_s": c.best_s,
                       "avg_s": c.avg_s, "median_s": c.median_s, "timeout_pct": c.timeout_pct}


def _render_csv(m):
    buf = io.StringIO()
    w = csv.DictWriter(buf, _CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in _rows(m):
        w.writerow({k: "" if v is None else v for k, v in row.items()})
    return buf.getvalue()


def _render_json(m):
    doc = {"modes": list(m.modes), "cells": list(_rows(m)),
           "trials": [{"target": t, "mode": mode, "tte_s": v}
                      for (t, mode), v in m.trials.items()]}
    return json.dumps(doc, indent=2) + "\n"


# -- running -----------------------------------------------------------------

@dataclass(frozen=True)
class Trial:
    program: str
    source: str
    target_id: str
    targets_path: str
    mode: str
    index: int
    rng_seed: int
    timeout_s: float
    clock: str
    exec_tick_s: float
    t_exploit: float
    out_dir: Optional[str]


@lru_cache(maxsize=32)
def _prepared(name, source, targets_path, target_id):
    tps = [t for t in read_targets(targets_path) if t.id == target_id]
    return prepare(name, source, targets=tps)


def run_trial(trial: Trial):
    """Returns ``(target_id, mode, index, tte_s or None)``. A crash that
    fails re-validation counts as a timeout."""
    prep = _prepared(trial.program, trial.source, trial.targets_path, trial.target_id)
    cfg = FuzzConfig(mode=trial.mode, timeout_s=trial.timeout_s, rng_seed=trial.rng_seed,
                     t_exploit=trial.t_exploit, clock=trial.clock,
                     exec_tick_s=trial.exec_tick_s)
    result = fuzz_loop(prep.program, prep.ets, cfg, prep.targets)
    tte = result.tte_s
    if tte is not None and not validate_crash(result, prep.targets, prep.ets, prep.program):
        tte = None
    if trial.out_dir:
        write_campaign(result, trial.out_dir)
    return trial.target_id, trial.mode, trial.index, tte


def plan_trials(config: BenchConfig, out_dir=None) -> list:
    trials = []
    for prog in config.programs:
        try:
            targets = read_targets(prog.targets)
        except (OSError, ValueError) as exc:
            raise PipelineError(prog.name, "targets", exc) from exc
        for tp in targets:
            # fail fast on programs that do not make it through the pipeline
            _prepared(prog.name, prog.source, prog.targets, tp.id)
            timeout = config.timeout_s or tp.timeout_s
            for mode in config.modes:
                for i in range(config.trials):
                    d = None if out_dir is None else os.path.join(
                        out_dir, "trials", tp.id, mode, f"{i:03d}")
                    trials.append(Trial(prog.name, prog.source, tp.id, prog.targets, mode, i,
                                        config.rng_seed_base + i, timeout, config.clock,
                                        config.exec_tick_s, config.t_exploit, d))
    return trials


def run_bench(config: BenchConfig, out_dir=None) -> BenchMatrix:
    trials = plan_trials(config, out_dir)
    if config.jobs == 1:
        results = [run_trial(t) for t in trials]
    else:
        with get_context("spawn").Pool(config.jobs) as pool:
            results = pool.map(run_trial, trials, chunksize=1)
    matrix = BenchMatrix(tuple(config.modes))
    for t in trials:
        if t.target_id not in matrix.rows:
            matrix.rows.append(t.target_id)
    outcome = {(tid, mode, i): tte for tid, mode, i, tte in results}
    for tid in matrix.rows:
        for mode in matrix.modes:
            ttes = [outcome[(tid, mode, i)] for i in range(config.trials)]
            matrix.trials[(tid, mode)] = ttes
            matrix.cells[(tid, mode)] = TteCell.from_trials(ttes)
    return matrix


def write_report(matrix: BenchMatrix, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for fmt, ext in (("text", "txt"), ("csv", "csv"), ("json", "json")):
        path = os.path.join(out_dir, f"report.{ext}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(render_report(matrix, fmt))
        paths[fmt] = path
    return paths


def suite_bench_config(suite_dir, programs, **kw) -> BenchConfig:
    """A config covering suite programs already written under ``suite_dir``."""
    progs = [BenchProgram(p.name, os.path.join(suite_dir, p.name),
                          os.path.join(suite_dir, p.name, "targets.tsv")) for p in programs]
    return BenchConfig(progs, **kw)
