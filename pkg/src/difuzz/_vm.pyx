# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled bytecode VM. Behaviour must match ``_vm_py.py`` exactly."""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset

import time

# opcode numbers; a test checks these against difuzz.opcodes
cdef enum:
    CONST = 0
    LOAD = 1
    STORE = 2
    ADD = 3
    SUB = 4
    MUL = 5
    DIV = 6
    MOD = 7
    EQ = 8
    NE = 9
    LT = 10
    LE = 11
    GT = 12
    GE = 13
    NOT = 14
    NEG = 15
    JMP = 16
    JZ = 17
    JNZ = 18
    CALL = 19
    RET = 20
    POP = 21
    INPUT = 22
    INPUT_LEN = 23
    PRINTI = 24
    PRINTS = 25
    PANIC = 26
    GUARD = 27
    ETS = 28

OPCODES = dict(CONST=CONST, LOAD=LOAD, STORE=STORE, ADD=ADD, SUB=SUB, MUL=MUL,
               DIV=DIV, MOD=MOD, EQ=EQ, NE=NE, LT=LT, LE=LE, GT=GT, GE=GE,
               NOT=NOT, NEG=NEG, JMP=JMP, JZ=JZ, JNZ=JNZ, CALL=CALL, RET=RET,
               POP=POP, INPUT=INPUT, INPUT_LEN=INPUT_LEN, PRINTI=PRINTI,
               PRINTS=PRINTS, PANIC=PANIC, GUARD=GUARD, ETS=ETS)

cdef enum:
    NORMAL = 0
    PANICKED = 1
    STEP_LIMIT = 2
    TIMEOUT = 3
    DIV_ZERO = -1
    STACK_OVERFLOW = -2
    MAX_DEPTH = 10000
    STDOUT_CAP = 1048576
    TRACE_CAP = 65536
    MAP_MASK = 0xFFFF
    DEADLINE_EVERY = 4096

ctypedef long long i64
ctypedef unsigned long long u64


cdef inline i64 _wrap_add(i64 a, i64 b):
    return <i64>(<u64>a + <u64>b)


cdef inline i64 _wrap_sub(i64 a, i64 b):
    return <i64>(<u64>a - <u64>b)


cdef inline i64 _wrap_mul(i64 a, i64 b):
    return <i64>(<u64>a * <u64>b)


cdef class _Stack:
    cdef i64 *data
    cdef Py_ssize_t cap

    def __cinit__(self, Py_ssize_t cap):
        self.cap = cap
        self.data = <i64 *>malloc(cap * sizeof(i64))
        if self.data == NULL:
            raise MemoryError()

    cdef int reserve(self, Py_ssize_t need) except -1:
        cdef Py_ssize_t cap = self.cap
        cdef i64 *p
        if need <= cap:
            return 0
        while cap < need:
            cap *= 2
        p = <i64 *>realloc(self.data, cap * sizeof(i64))
        if p == NULL:
            raise MemoryError()
        self.data = p
        self.cap = cap
        return 0

    def __dealloc__(self):
        free(self.data)


def run(prog, data, i64 step_limit, deadline, hooks):
    """Execute ``prog`` on ``data``; see ``_vm_py.run`` for the contract."""
    cdef const i64[::1] code = prog.code
    cdef const i64[::1] entry = prog.fn_entry
    cdef const i64[::1] nparams = prog.fn_nparams
    cdef const i64[::1] nlocals = prog.fn_nlocals
    cdef const i64[::1] maxstack = prog.fn_maxstack
    cdef const unsigned char[::1] inp = data if len(data) else b"\x00"
    cdef i64 n = len(data)
    strings = prog.strings

    cdef bint native = hooks is not None and hasattr(hooks, "native_buffers")
    cdef unsigned char[::1] cov
    cdef int[::1] trace
    cdef unsigned char[::1] seen
    cdef Py_ssize_t nseen = 0
    touched = distinct = None
    guard_cb = ets_cb = None
    if native:
        cov_obj, touched, trace_obj, seen_obj, distinct = hooks.native_buffers()
        cov = cov_obj
        trace = trace_obj
        seen = seen_obj
        nseen = len(seen_obj)
    elif hooks is not None:
        guard_cb = hooks.guard
        ets_cb = hooks.ets
    if hooks is not None and hasattr(hooks, "start"):
        hooks.start()

    cdef i64 prev = 0
    cdef i64 trace_len = 0
    cdef int overflow = 0
    cdef bint use_deadline = bool(deadline)
    cdef double dl = deadline if use_deadline else 0.0
    cdef i64 check_at = DEADLINE_EVERY if use_deadline else -1

    out = bytearray()
    cdef Py_ssize_t outlen = 0

    cdef _Stack st = _Stack(256)
    cdef i64 *frame_pc = <i64 *>malloc((MAX_DEPTH + 1) * sizeof(i64))
    cdef i64 *frame_base = <i64 *>malloc((MAX_DEPTH + 1) * sizeof(i64))
    if frame_pc == NULL or frame_base == NULL:
        free(frame_pc)
        free(frame_base)
        raise MemoryError()

    cdef i64 *s
    cdef Py_ssize_t sp, base, depth = 0
    cdef i64 fn = prog.main
    cdef i64 pc = entry[fn]
    cdef i64 steps = 0
    cdef i64 op, arg, k, a, b, r, gid, idx, c, i, extra
    cdef int status = NORMAL
    cdef i64 aux = 0
    cdef i64 posi = -1

    try:
        st.reserve(nlocals[fn] + maxstack[fn])
        s = st.data
        memset(s, 0, nlocals[fn] * sizeof(i64))
        base = 0
        sp = nlocals[fn]
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
                        cov[idx] = <unsigned char>(c + 1)
                    prev = gid
                elif guard_cb is not None:
                    guard_cb(gid)
                pc += 1
                continue
            if op == ETS:
                gid = code[k + 1]
                if native:
                    if trace_len < TRACE_CAP:
                        trace[trace_len] = <int>gid
                        trace_len += 1
                    else:
                        overflow = 1
                    if 0 <= gid < nseen and seen[gid] == 0:
                        seen[gid] = 1
                        distinct.append(gid)
                elif ets_cb is not None:
                    ets_cb(gid)
                pc += 1
                continue

            if steps >= step_limit:
                status = STEP_LIMIT
                break
            steps += 1
            if steps == check_at:
                check_at += DEADLINE_EVERY
                if time.monotonic() > dl:
                    status = TIMEOUT
                    break
            arg = code[k + 1]
            pc += 1

            if op == CONST:
                s[sp] = arg
                sp += 1
            elif op == LOAD:
                s[sp] = s[base + arg]
                sp += 1
            elif op == STORE:
                sp -= 1
                s[base + arg] = s[sp]
            elif op == JZ:
                sp -= 1
                if s[sp] == 0:
                    pc = arg
            elif op == JNZ:
                sp -= 1
                if s[sp] != 0:
                    pc = arg
            elif op == JMP:
                pc = arg
            elif op == INPUT:
                i = s[sp - 1]
                s[sp - 1] = inp[i] if 0 <= i < n else 0
            elif op == INPUT_LEN:
                s[sp] = n
                sp += 1
            elif op <= GE:
                sp -= 1
                b = s[sp]
                a = s[sp - 1]
                if op == ADD:
                    r = _wrap_add(a, b)
                elif op == SUB:
                    r = _wrap_sub(a, b)
                elif op == MUL:
                    r = _wrap_mul(a, b)
                elif op == DIV or op == MOD:
                    if b == 0:
                        status = PANICKED
                        aux = DIV_ZERO
                        posi = code[k + 2]
                        break
                    if b == -1:
                        r = _wrap_sub(0, a) if op == DIV else 0
                    elif op == DIV:
                        r = a / b
                    else:
                        r = a % b
                elif op == EQ:
                    r = a == b
                elif op == NE:
                    r = a != b
                elif op == LT:
                    r = a < b
                elif op == LE:
                    r = a <= b
                elif op == GT:
                    r = a > b
                else:
                    r = a >= b
                s[sp - 1] = r
            elif op == NOT:
                s[sp - 1] = s[sp - 1] == 0
            elif op == NEG:
                s[sp - 1] = _wrap_sub(0, s[sp - 1])
            elif op == CALL:
                if depth >= MAX_DEPTH:
                    status = PANICKED
                    aux = STACK_OVERFLOW
                    posi = code[k + 2]
                    break
                frame_pc[depth] = pc
                frame_base[depth] = base
                depth += 1
                fn = arg
                base = sp - nparams[fn]
                st.reserve(base + nlocals[fn] + maxstack[fn])
                s = st.data
                extra = nlocals[fn] - nparams[fn]
                if extra > 0:
                    memset(s + sp, 0, extra * sizeof(i64))
                sp = base + nlocals[fn]
                pc = entry[fn]
            elif op == RET:
                if depth == 0:
                    status = NORMAL
                    break
                r = s[sp - 1]
                sp = base
                s[sp] = r
                sp += 1
                depth -= 1
                pc = frame_pc[depth]
                base = frame_base[depth]
            elif op == POP:
                sp -= 1
            elif op == PRINTI:
                sp -= 1
                if outlen < STDOUT_CAP:
                    out += b"%d\n" % s[sp]
                    del out[STDOUT_CAP:]
                    outlen = len(out)
            elif op == PRINTS:
                if outlen < STDOUT_CAP:
                    out += strings[arg] + b"\n"
                    del out[STDOUT_CAP:]
                    outlen = len(out)
            elif op == PANIC:
                status = PANICKED
                aux = arg
                posi = code[k + 2]
                break
            else:
                raise ValueError(f"bad opcode {op} at {pc - 1}")
    finally:
        free(frame_pc)
        free(frame_base)
    return status, steps, aux, posi, bytes(out), trace_len, overflow
