"""Deterministic MiniProc interpreter.

Execution runs on the bytecode VM selected in :mod:`difuzz.kernels`. The
probe builtins ``SancovGuard(id)`` and ``InstrumentETS(id)`` only notify the
hooks object; they consume no steps and have no other effect.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

from .. import kernels
from .. import opcodes as vm
from .ast import Ast, Pos
from .compiler import Program, compile_program

DEFAULT_STEP_LIMIT = 1_000_000


class Status(enum.Enum):
    NORMAL = "Normal"
    PANIC = "Panic"
    STEP_LIMIT = "StepLimitExceeded"
    TIMEOUT = "Timeout"   # wall deadline hit; only the engine sets one


_STATUS = {vm.NORMAL: Status.NORMAL, vm.PANICKED: Status.PANIC,
           vm.STEP_LIMIT: Status.STEP_LIMIT, vm.TIMEOUT: Status.TIMEOUT}

_BUILTIN_PANICS = {vm.DIV_ZERO: "integer divide by zero",
                   vm.STACK_OVERFLOW: "stack overflow"}


@dataclass(frozen=True)
class ExecOutcome:
    status: Status
    stdout: bytes
    steps: int
    message: Optional[str] = None
    position: Optional[Pos] = None
    observation: object = None

    @property
    def panicked(self):
        return self.status is Status.PANIC

    def key(self):
        """Everything observable about the run except the observation."""
        return (self.status, self.message, self.position, self.stdout)


class InstrumentationHooks:
    """Receiver for probe calls. ``start`` runs before ``main`` is entered."""

    def start(self):
        pass

    def guard(self, guard_id: int):
        pass

    def ets(self, block_id: int):
        pass


class RecordingHooks(InstrumentationHooks):
    """Keeps every probe call in order; handy for tests and debugging."""

    def __init__(self):
        self.guards = []
        self.ets_hits = []
        self.started = 0

    def start(self):
        self.started += 1
        self.guards = []
        self.ets_hits = []

    def guard(self, guard_id):
        self.guards.append(guard_id)

    def ets(self, block_id):
        self.ets_hits.append(block_id)


def outcome_from_raw(prog: Program, raw, observation=None) -> ExecOutcome:
    status, steps, aux, pos_idx, stdout = raw[:5]
    st = _STATUS[status]
    if st is Status.PANIC:
        msg = _BUILTIN_PANICS.get(aux)
        if msg is None:
            msg = prog.strings[aux].decode("utf-8")
        return ExecOutcome(st, stdout, steps, msg, prog.positions[pos_idx], observation)
    return ExecOutcome(st, stdout, steps, observation=observation)


def interpret(program: Union[Ast, Program], input: bytes = b"",
              step_limit: int = DEFAULT_STEP_LIMIT,
              hooks: Optional[InstrumentationHooks] = None,
              deadline: Optional[float] = None, backend=None) -> ExecOutcome:
    """Run ``main`` on ``input``.

    ``program`` may be a linked :class:`Ast` or an already compiled
    :class:`Program` (compile once when running many inputs). ``deadline``
    is an absolute ``time.monotonic()`` value. ``backend`` overrides the
    kernel, e.g. ``kernels.run_python``.
    """
    if step_limit <= 0:
        raise ValueError("step_limit must be positive")
    prog = program if isinstance(program, Program) else compile_program(program)
    run = backend or kernels.run
    raw = run(prog, bytes(input), step_limit, deadline or 0.0, hooks)
    return outcome_from_raw(prog, raw)
