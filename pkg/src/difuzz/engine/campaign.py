"""The fuzzing campaign: corpus, scheduling, admission and the crash objective."""

from __future__ import annotations

import hashlib
import json
import math
import os
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from ..minilang.compiler import Program
from ..minilang.interp import DEFAULT_STEP_LIMIT, Status
from .coverage import CoverageHistory, coverage_is_novel
from .executor import Executor, Limits
from .feedback import EtsHistory, EtsIndex, best_weight, ets_is_novel, seed_distance
from .mutate import mutate
from .schedule import (BUDGET_BASE, SchedulerState, annealing_energy, mutation_budget,
                       normalized_distance)

DIRECTED = "directed"
COVERAGE = "coverage"
MODES = (DIRECTED, COVERAGE)
WALL, EXECS = "wall", "exec"


class ConfigError(ValueError):
    pass


@dataclass
class FuzzConfig:
    mode: str = DIRECTED
    timeout_s: float = 60.0
    rng_seed: int = 0
    t_exploit: float = 5.0
    clock: str = WALL               # "wall" or "exec"
    exec_tick_s: float = 1e-4       # virtual seconds per execution (exec clock)
    step_limit: int = DEFAULT_STEP_LIMIT
    exec_timeout_s: Optional[float] = 1.0   # wall clock only
    budget_base: int = BUDGET_BASE
    seeds: tuple = ()

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.clock not in (WALL, EXECS):
            raise ConfigError("clock must be 'wall' or 'exec'")
        if not self.timeout_s > 0 or not self.t_exploit > 0:
            raise ConfigError("timeout and t_exploit must be positive")
        if self.exec_tick_s <= 0 or self.step_limit <= 0 or self.budget_base < 1:
            raise ConfigError("exec tick, step limit and budget base must be positive")


@dataclass
class CorpusEntry:
    input: bytes
    exec_ms: float
    seed_distance: object
    best_weight: float
    found_at: float
    novelty: str            # "seed", "coverage", "ets" or "coverage+ets"
    index: int = 0

    def summary(self, with_time=True):
        return {
            "index": self.index,
            "sha1": hashlib.sha1(self.input).hexdigest(),
            "len": len(self.input),
            "found_at": round(self.found_at, 6),
            "novelty": self.novelty,
            "seed_distance": _num(self.seed_distance),
            "best_weight": self.best_weight,
            "exec_ms": round(self.exec_ms, 3) if with_time else None,
        }


@dataclass
class CampaignResult:
    mode: str
    rng_seed: int
    clock: str
    tte_s: Optional[float]          # None means timeout
    executions: int
    corpus: list = field(default_factory=list)
    crash_input: Optional[bytes] = None
    crash_position: object = None
    crash_message: Optional[str] = None
    target_id: Optional[str] = None
    other_panics: int = 0
    timeouts: int = 0
    elapsed_s: float = 0.0

    @property
    def timed_out(self):
        return self.tte_s is None

    @property
    def corpus_size(self):
        return len(self.corpus)

    def to_json(self):
        wall = self.clock == WALL
        return {
            "mode": self.mode,
            "rng_seed": self.rng_seed,
            "clock": self.clock,
            "result": "Timeout" if self.timed_out else "Crash",
            "tte_s": None if self.tte_s is None else round(self.tte_s, 6),
            "executions": self.executions,
            "corpus_size": self.corpus_size,
            "target_id": self.target_id,
            "crash_position": None if self.crash_position is None else {
                "file": self.crash_position.file, "line": self.crash_position.line,
                "column": self.crash_position.column},
            "crash_message": self.crash_message,
            "crash_input_hex": None if self.crash_input is None else self.crash_input.hex(),
            "other_panics": self.other_panics,
            "exec_timeouts": self.timeouts,
            "elapsed_s": round(self.elapsed_s, 3) if wall else None,
            "corpus": [e.summary(with_time=wall) for e in self.corpus],
        }


def _num(x):
    if x is None or x == math.inf:
        return None
    return float(x)


# -- crash objective ----------------------------------------------------------

def target_ranges(ets, targets=None):
    """(target_id, file, start, end) for every weight-1 ETS block holding a
    target point."""
    out = []
    for t in (ets.targets if targets is None else targets):
        for b in ets.blocks:
            if (b.weight == 1.0 and b.file == t.file
                    and b.start_line <= t.line <= b.end_line):
                out.append((t.id, b.file, b.start_line, b.end_line))
    return out


def matching_target(position, ranges):
    if position is None:
        return None
    for tid, file, lo, hi in ranges:
        if position.file == file and lo <= position.line <= hi:
            return tid
    return None


def validate_crash(result, targets, ets, program, step_limit=DEFAULT_STEP_LIMIT) -> bool:
    """Re-execute the stored crash input: true iff it panics inside the
    line range of a block holding one of ``targets``."""
    data = result.crash_input if isinstance(result, CampaignResult) else result
    if data is None:
        return False
    outcome, _, _ = Executor(program, Limits(step_limit)).execute(data)
    if outcome.status is not Status.PANIC:
        return False
    return matching_target(outcome.position, target_ranges(ets, targets)) is not None


# -- the loop ----------------------------------------------------------------

class Campaign:
    def __init__(self, program: Program, ets, config: FuzzConfig, targets=None):
        config.validate()
        self.program = program
        self.ets = ets
        self.targets = list(ets.targets if targets is None else targets)
        self.cfg = config
        self.index = EtsIndex(ets)
        self.ranges = target_ranges(ets, self.targets)
        self.rng = random.Random(config.rng_seed)
        limits = Limits(config.step_limit,
                        config.exec_timeout_s if config.clock == WALL else None)
        self.executor = Executor(program, limits)
        self.cov_hist = CoverageHistory()
        self.ets_hist = EtsHistory()
        self.corpus = []
        self.inputs = []
        self.state = SchedulerState(0.0, config.t_exploit)
        self.result = CampaignResult(config.mode, config.rng_seed, config.clock, None, 0)
        self._start = None
        self._rr = 0
        self._bounds = None
        self._dn = []

    @property
    def directed(self):
        return self.cfg.mode == DIRECTED

    def elapsed(self):
        if self.cfg.clock == EXECS:
            return self.executor.executions * self.cfg.exec_tick_s
        return time.monotonic() - self._start

    def _deadline(self):
        return self._start + self.cfg.timeout_s if self.cfg.clock == WALL else None

    def run_one(self, data: bytes, seed=False):
        """Execute, then admit or record a crash. Returns True when the
        campaign objective has been reached."""
        t0 = time.perf_counter()
        outcome, cmap, trace = self.executor.execute(data, self._deadline())
        exec_ms = (time.perf_counter() - t0) * 1000
        if outcome.status is Status.PANIC:
            tid = matching_target(outcome.position, self.ranges)
            if tid is not None and validate_crash(data, self.targets, self.ets,
                                                  self.program, self.cfg.step_limit):
                r = self.result
                r.tte_s = self.elapsed()
                r.crash_input = data
                r.crash_position = outcome.position
                r.crash_message = outcome.message
                r.target_id = tid
                return True
            self.result.other_panics += 1
            return False
        if outcome.status is Status.TIMEOUT:
            self.result.timeouts += 1
            return False
        cov_new = coverage_is_novel(cmap, self.cov_hist)
        ets_new = ets_is_novel(trace, self.index, self.ets_hist) if self.directed else False
        if seed or cov_new or ets_new:
            kinds = [k for k, v in (("coverage", cov_new), ("ets", ets_new)) if v]
            d = seed_distance(trace, self.index)
            entry = CorpusEntry(data, exec_ms, d, best_weight(trace, self.index),
                                self.elapsed(), "+".join(kinds) or "seed", len(self.corpus))
            self.corpus.append(entry)
            self.inputs.append(data)
            self.state.observe(d)
        return False

    def pick(self):
        """Returns (entry, budget)."""
        if not self.directed:
            entry = self.corpus[self._rr % len(self.corpus)]
            self._rr += 1
            return entry, self.cfg.budget_base
        st = self.state
        st.campaign_elapsed = self.elapsed()
        bounds = (st.min_d, st.max_d)
        if bounds != self._bounds or len(self._dn) != len(self.corpus):
            self._bounds = bounds
            self._dn = [float(normalized_distance(e.seed_distance, *bounds))
                        for e in self.corpus]
        # selection weights in floating point; the budget of the chosen
        # entry uses the exact energy
        t = st.temperature
        weights = [(1 - dn) * (1 - t) + t / 2 for dn in self._dn]
        if sum(weights) > 0:
            k = self.rng.choices(range(len(self.corpus)), weights=weights)[0]
        else:
            k = self.rng.randrange(len(self.corpus))
        entry = self.corpus[k]
        return entry, mutation_budget(annealing_energy(entry, st), self.cfg.budget_base)

    def run(self) -> CampaignResult:
        self._start = time.monotonic()
        r = self.result
        done = False
        for s in (b"",) + tuple(self.cfg.seeds):
            if self.run_one(bytes(s), seed=True):
                done = True
                break
        while not done and self.elapsed() < self.cfg.timeout_s:
            if not self.corpus:
                break
            entry, budget = self.pick()
            for _ in range(budget):
                child = mutate(entry.input, self.rng, self.inputs)
                if self.run_one(child):
                    done = True
                    break
                if self.elapsed() >= self.cfg.timeout_s:
                    break
        r.executions = self.executor.executions
        r.corpus = list(self.corpus)
        r.elapsed_s = time.monotonic() - self._start
        if r.tte_s is not None and r.tte_s > self.cfg.timeout_s:
            # crash landed after the deadline (possible only on the wall clock)
            r.tte_s = None
        return r


def fuzz_loop(program: Program, ets, config: FuzzConfig, targets=None) -> CampaignResult:
    return Campaign(program, ets, config, targets).run()


def write_campaign(result: CampaignResult, out_dir):
    """``campaign.json`` plus ``corpus/`` and ``crash/`` input files."""
    os.makedirs(os.path.join(out_dir, "corpus"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "crash"), exist_ok=True)
    for e in result.corpus:
        with open(os.path.join(out_dir, "corpus", f"id_{e.index:06d}"), "wb") as fh:
            fh.write(e.input)
    if result.crash_input is not None:
        with open(os.path.join(out_dir, "crash", f"{result.target_id}.bin"), "wb") as fh:
            fh.write(result.crash_input)
    with open(os.path.join(out_dir, "campaign.json"), "w", encoding="utf-8") as fh:
        json.dump(result.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
