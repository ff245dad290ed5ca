"""Havoc-style stacked mutations."""

from __future__ import annotations

import random

MAX_LEN = 4096
ARITH_MAX = 35
INTERESTING_8 = (0, 1, 16, 32, 64, 100, 127, 128, 255)
INTERESTING_16 = (0, 1, 128, 255, 256, 512, 1000, 1024, 4096, 0x7FFF, 0x8000, 0xFFFF)
INTERESTING_32 = (0, 1, 0x7FFF, 0x8000, 0xFFFF, 0x10000, 0x7FFFFFFF, 0x80000000, 0xFFFFFFFF)


def bit_flip(buf, rng, _partner):
    i = rng.randrange(len(buf) * 8)
    buf[i >> 3] ^= 1 << (i & 7)


def byte_set(buf, rng, _partner):
    buf[rng.randrange(len(buf))] = rng.randrange(256)


def byte_arith(buf, rng, _partner):
    i = rng.randrange(len(buf))
    delta = rng.randint(1, ARITH_MAX)
    buf[i] = (buf[i] + (delta if rng.random() < 0.5 else -delta)) & 0xFF


def _put(buf, rng, width, values):
    if len(buf) < width:
        return byte_set(buf, rng, None)
    i = rng.randrange(len(buf) - width + 1)
    order = "little" if rng.random() < 0.5 else "big"
    buf[i:i + width] = rng.choice(values).to_bytes(width, order)


def interesting_8(buf, rng, _partner):
    buf[rng.randrange(len(buf))] = rng.choice(INTERESTING_8)


def interesting_16(buf, rng, _partner):
    _put(buf, rng, 2, INTERESTING_16)


def interesting_32(buf, rng, _partner):
    _put(buf, rng, 4, INTERESTING_32)


def block_delete(buf, rng, _partner):
    if len(buf) < 2:
        return byte_set(buf, rng, None)
    n = rng.randint(1, min(len(buf) - 1, 16))
    i = rng.randrange(len(buf) - n + 1)
    del buf[i:i + n]


def block_duplicate(buf, rng, _partner):
    """Clone a chunk (3 times in 4) or insert a run of one random byte."""
    if len(buf) >= MAX_LEN:
        return byte_set(buf, rng, None)
    dst = rng.randrange(len(buf) + 1)
    if rng.random() < 0.75:
        n = rng.randint(1, min(len(buf), 16))
        src = rng.randrange(len(buf) - n + 1)
        buf[dst:dst] = buf[src:src + n]
    else:
        buf[dst:dst] = bytes([rng.randrange(256)]) * rng.randint(1, 16)


def splice(buf, rng, partner):
    """Keep a prefix of ``buf`` and append a suffix of ``partner``."""
    cut_a = rng.randint(1, len(buf))
    cut_b = rng.randrange(len(partner))
    buf[cut_a:] = partner[cut_b:]


OPERATORS = (bit_flip, byte_set, byte_arith, interesting_8, interesting_16,
             interesting_32, block_delete, block_duplicate, splice)
NON_SPLICE = OPERATORS[:-1]


def _partner(corpus, data, rng, tries=4):
    if not corpus:
        return None
    for _ in range(tries):
        c = corpus[rng.randrange(len(corpus))]
        if c and c != data:
            return c
    return None


def mutate(data: bytes, rng: random.Random, corpus=()) -> bytes:
    """Apply 1, 2, 4 or 8 stacked operators. ``corpus`` is a sequence of
    byte strings used as splice partners; when it offers no partner other
    than ``data`` itself, splice is replaced by another operator."""
    buf = bytearray(data or b"\x00")
    for _ in range(1 << rng.randrange(4)):
        op = rng.choice(OPERATORS)
        partner = None
        if op is splice:
            partner = _partner(corpus, data, rng)
            if partner is None:
                op = rng.choice(NON_SPLICE)
        op(buf, rng, partner)
        if not buf:
            buf.append(0)
    del buf[MAX_LEN:]
    return bytes(buf)
