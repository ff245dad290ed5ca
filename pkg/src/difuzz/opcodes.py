"""Bytecode opcode numbers and VM result codes shared by both kernels."""

CONST, LOAD, STORE = 0, 1, 2
ADD, SUB, MUL, DIV, MOD = 3, 4, 5, 6, 7
EQ, NE, LT, LE, GT, GE = 8, 9, 10, 11, 12, 13
NOT, NEG = 14, 15
JMP, JZ, JNZ = 16, 17, 18
CALL, RET, POP = 19, 20, 21
INPUT, INPUT_LEN = 22, 23
PRINTI, PRINTS, PANIC = 24, 25, 26
GUARD, ETS = 27, 28

OPCODES = {name: value for name, value in globals().items()
           if name.isupper() and isinstance(value, int)}

# run() status codes
NORMAL, PANICKED, STEP_LIMIT, TIMEOUT = 0, 1, 2, 3
# run() aux codes for panics raised by the VM itself
DIV_ZERO, STACK_OVERFLOW = -1, -2

MAX_DEPTH = 10000
STDOUT_CAP = 1 << 20
TRACE_CAP = 1 << 16
MAP_SIZE = 1 << 16
MAP_MASK = MAP_SIZE - 1
DEADLINE_EVERY = 4096
