"""Pure-Python bytecode VM. Behaviour must match ``_vm.pyx`` exactly."""

import time

from .opcodes import (
    ADD, CALL, CONST, DEADLINE_EVERY, DIV, DIV_ZERO, EQ, ETS, GE, GT, GUARD,
    INPUT, INPUT_LEN, JMP, JNZ, JZ, LE, LOAD, LT, MAP_MASK, MAX_DEPTH, MOD,
    MUL, NE, NEG, NORMAL, NOT, PANIC, PANICKED, POP, PRINTI, PRINTS, RET,
    STACK_OVERFLOW, STDOUT_CAP, STEP_LIMIT, STORE, SUB, TIMEOUT, TRACE_CAP,
)

_M64 = (1 << 64) - 1
_SIGN = 1 << 63


def _wrap(v):
    v &= _M64
    return v - (1 << 64) if v & _SIGN else v


def _div(a, b):
    q = abs(a) // abs(b)
    return _wrap(q if (a < 0) == (b < 0) else -q)


def _mod(a, b):
    r = abs(a) % abs(b)
    return -r if a < 0 else r


def run(prog, data, step_limit, deadline, hooks):
    """Execute ``prog`` on ``data``.

    Returns ``(status, steps, aux, pos_idx, stdout, trace_len, overflow)``.
    For a panic, ``aux`` is the message's string index (or DIV_ZERO /
    STACK_OVERFLOW) and ``pos_idx`` indexes ``prog.positions``.
    """
    code = prog.code
    entry = prog.fn_entry
    nparams = prog.fn_nparams
    nlocals = prog.fn_nlocals
    strings = prog.strings
    n = len(data)

    native = hooks is not None and hasattr(hooks, "native_buffers")
    cov = touched = trace = seen = distinct = None
    guard_cb = ets_cb = None
    if native:
        cov, touched, trace, seen, distinct = hooks.native_buffers()
        nseen = len(seen)
    elif hooks is not None:
        guard_cb = hooks.guard
        ets_cb = hooks.ets
    if hooks is not None and hasattr(hooks, "start"):
        hooks.start()
    prev = 0
    trace_len = 0
    overflow = 0

    out = bytearray()
    stack = [0] * nlocals[prog.main]
    frames = []           # (return pc, base)
    base = 0
    fn = prog.main
    pc = entry[fn]
    steps = 0
    check_at = DEADLINE_EVERY if deadline else -1

    while True:
        k = pc * 3
        op = code[k]
        if op == GUARD:
            gid = code[k + 1]
            if native:
                idx = ((prev >> 1) ^ gid) & MAP_MASK
                c = cov[idx]
                if c == 0:
                    touched.append(idx)
                if c < 255:
                    cov[idx] = c + 1
                prev = gid
            elif guard_cb is not None:
                guard_cb(gid)
            pc += 1
            continue
        if op == ETS:
            eid = code[k + 1]
            if native:
                if trace_len < TRACE_CAP:
                    trace[trace_len] = eid
                    trace_len += 1
                else:
                    overflow = 1
                if eid < nseen and not seen[eid]:
                    seen[eid] = 1
                    distinct.append(eid)
            elif ets_cb is not None:
                ets_cb(eid)
            pc += 1
            continue

        if steps >= step_limit:
            return STEP_LIMIT, steps, 0, -1, bytes(out), trace_len, overflow
        steps += 1
        if steps == check_at:
            check_at += DEADLINE_EVERY
            if time.monotonic() > deadline:
                return TIMEOUT, steps, 0, -1, bytes(out), trace_len, overflow
        arg = code[k + 1]
        pc += 1

        if op == CONST:
            stack.append(arg)
        elif op == LOAD:
            stack.append(stack[base + arg])
        elif op == STORE:
            stack[base + arg] = stack.pop()
        elif op == JZ:
            if stack.pop() == 0:
                pc = arg
        elif op == JNZ:
            if stack.pop() != 0:
                pc = arg
        elif op == JMP:
            pc = arg
        elif op == INPUT:
            i = stack[-1]
            stack[-1] = data[i] if 0 <= i < n else 0
        elif op == INPUT_LEN:
            stack.append(n)
        elif op <= GE:
            b = stack.pop()
            a = stack[-1]
            if op == ADD:
                r = _wrap(a + b)
            elif op == SUB:
                r = _wrap(a - b)
            elif op == MUL:
                r = _wrap(a * b)
            elif op == DIV or op == MOD:
                if b == 0:
                    return PANICKED, steps, DIV_ZERO, code[k + 2], bytes(out), trace_len, overflow
                r = _div(a, b) if op == DIV else _mod(a, b)
            elif op == EQ:
                r = int(a == b)
            elif op == NE:
                r = int(a != b)
            elif op == LT:
                r = int(a < b)
            elif op == LE:
                r = int(a <= b)
            elif op == GT:
                r = int(a > b)
            else:
                r = int(a >= b)
            stack[-1] = r
        elif op == NOT:
            stack[-1] = int(stack[-1] == 0)
        elif op == NEG:
            stack[-1] = _wrap(-stack[-1])
        elif op == CALL:
            if len(frames) >= MAX_DEPTH:
                return PANICKED, steps, STACK_OVERFLOW, code[k + 2], bytes(out), trace_len, overflow
            frames.append((pc, base, fn))
            fn = arg
            base = len(stack) - nparams[fn]
            extra = nlocals[fn] - nparams[fn]
            if extra:
                stack.extend([0] * extra)
            pc = entry[fn]
        elif op == RET:
            value = stack[-1]
            if not frames:
                return NORMAL, steps, 0, -1, bytes(out), trace_len, overflow
            del stack[base:]
            stack.append(value)
            pc, base, fn = frames.pop()
        elif op == POP:
            stack.pop()
        elif op == PRINTI:
            if len(out) < STDOUT_CAP:
                out += b"%d\n" % stack.pop()
                del out[STDOUT_CAP:]
            else:
                stack.pop()
        elif op == PRINTS:
            if len(out) < STDOUT_CAP:
                out += strings[arg] + b"\n"
                del out[STDOUT_CAP:]
        elif op == PANIC:
            return PANICKED, steps, arg, code[k + 2], bytes(out), trace_len, overflow
        else:
            raise ValueError(f"bad opcode {op} at {pc - 1}")
