"""In-process executor: runs an instrumented program and harvests its maps.

The VM writes coverage and ETS hits straight into the recorder's buffers
(the shared-memory role). Only the cells touched by a run are cleared
before the next one, so each execution observes fresh maps.
"""

from __future__ import annotations

import os
import time
from array import array
from dataclasses import dataclass
from typing import Optional

from .. import kernels
from ..minilang.compiler import Program, compile_program
from ..minilang.interp import DEFAULT_STEP_LIMIT, ExecOutcome, outcome_from_raw
from ..opcodes import MAP_SIZE, TRACE_CAP
from .coverage import CoverageMap
from .feedback import EtsTrace


class Recorder:
    """Buffers the VM records into directly; see ``native_buffers``."""

    def __init__(self, max_ets_id: int = 0):
        self.cov = bytearray(MAP_SIZE)
        self.touched = []
        self.trace = array("i", bytes(4 * TRACE_CAP))
        self.seen = bytearray(max_ets_id + 1)
        self.distinct = []
        self.starts = 0

    def start(self):
        self.starts += 1

    def native_buffers(self):
        return self.cov, self.touched, self.trace, self.seen, self.distinct

    def reset(self):
        cov = self.cov
        for i in self.touched:
            cov[i] = 0
        self.touched.clear()
        seen = self.seen
        for b in self.distinct:
            seen[b] = 0
        self.distinct.clear()


@dataclass
class Limits:
    step_limit: int = DEFAULT_STEP_LIMIT
    exec_timeout_s: Optional[float] = None   # wall budget per execution


@dataclass
class Observation:
    coverage: CoverageMap
    trace: EtsTrace


class Executor:
    def __init__(self, program: Program, limits: Limits = None, backend=None):
        self.program = program
        self.limits = limits or Limits()
        self.run = backend or kernels.run
        self.recorder = Recorder(program.max_ets)
        self.executions = 0

    def execute(self, data: bytes, deadline: Optional[float] = None):
        """Returns ``(ExecOutcome, CoverageMap, EtsTrace)``. A run that hits
        the wall deadline comes back with status ``Timeout``."""
        rec = self.recorder
        rec.reset()
        lim = self.limits
        if lim.exec_timeout_s is not None:
            own = time.monotonic() + lim.exec_timeout_s
            deadline = own if deadline is None else min(deadline, own)
        raw = self.run(self.program, data, lim.step_limit, deadline or 0.0, rec)
        self.executions += 1
        cov = rec.cov
        cmap = CoverageMap({i: cov[i] for i in rec.touched})
        n = raw[5]
        trace = EtsTrace(rec.trace[:n].tolist(), rec.distinct, raw[6])
        outcome = outcome_from_raw(self.program, raw, Observation(cmap, trace))
        return outcome, cmap, trace


def load_program_dir(directory) -> Program:
    from ..instrument.program import load_program
    return compile_program(load_program(directory))


def execute(target, data: bytes, limits: Limits = None):
    """One-shot execution of ``target`` (a Program, Ast or source directory)."""
    if isinstance(target, (str, os.PathLike)):
        target = load_program_dir(target)
    elif not isinstance(target, Program):
        target = compile_program(target)
    ex = Executor(target, limits)
    return ex.execute(data)
