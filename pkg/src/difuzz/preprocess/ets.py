"""ETS values and their ``ets.toml`` form."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .targets import TargetPoint


@dataclass(frozen=True)
class EtsBlock:
    block_id: int
    file: str
    function: str
    occurrence: int
    cfg_block: int
    start_line: int
    end_line: int
    weight: float

    @property
    def key(self):
        return (self.function, self.occurrence, self.cfg_block)

    @property
    def distance(self):
        return 1.0 / self.weight - 1.0


@dataclass
class EnhancedTargetSequence:
    targets: list = field(default_factory=list)
    blocks: list = field(default_factory=list)
    max_block_distance: int = 0

    def by_id(self):
        return {b.block_id: b for b in self.blocks}

    def for_file(self, file):
        return [b for b in self.blocks if b.file == file]


class SchemaError(ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line
        self.message = message


_TARGET_KEYS = ("id", "file", "line", "timeout_s")
_BLOCK_KEYS = ("block_id", "file", "function", "occurrence", "cfg_block",
               "start_line", "end_line", "weight")


def format_weight(w: float) -> str:
    """Shortest exact decimal, padded to at least 6 significant digits."""
    text = repr(float(w))
    digits = re.sub(r"[^0-9]", "", text.split("e")[0]).lstrip("0")
    if len(digits) < 6:
        text = f"{w:#.6g}"
    return text


def _num(x):
    x = float(x)
    return repr(int(x)) + ".0" if x.is_integer() else repr(x)


def dumps_ets(ets: EnhancedTargetSequence) -> str:
    out = [f"max_block_distance = {int(ets.max_block_distance)}", ""]
    for t in ets.targets:
        out += ["[[target]]", f"id = {json.dumps(t.id)}", f"file = {json.dumps(t.file)}",
                f"line = {t.line}", f"timeout_s = {_num(t.timeout_s)}", ""]
    for b in ets.blocks:
        out += ["[[block]]", f"block_id = {b.block_id}", f"file = {json.dumps(b.file)}",
                f"function = {json.dumps(b.function)}", f"occurrence = {b.occurrence}",
                f"cfg_block = {b.cfg_block}", f"start_line = {b.start_line}",
                f"end_line = {b.end_line}", f"weight = {format_weight(b.weight)}", ""]
    return "\n".join(out)


def write_ets_toml(ets: EnhancedTargetSequence, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_ets(ets))


def _table_lines(text, name):
    pat = re.compile(rf"^\s*\[\[\s*{name}\s*\]\]")
    return [n for n, line in enumerate(text.splitlines(), 1) if pat.match(line)]


def _key_line(text, start, key):
    lines = text.splitlines()
    pat = re.compile(rf"^\s*{re.escape(key)}\s*=")
    for n in range(start, len(lines) + 1):
        if pat.match(lines[n - 1]):
            return n
    return start


def _typed(value, kind, line, what):
    if kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    else:
        ok = isinstance(value, str)
    if not ok:
        raise SchemaError(line, f"{what} has the wrong type")
    return kind(value)


def loads_ets(text: str) -> EnhancedTargetSequence:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise SchemaError(int(m.group(1)) if m else None, str(exc)) from None
    for key in doc:
        if key not in ("max_block_distance", "target", "block"):
            raise SchemaError(_key_line(text, 1, key), f"unknown key {key!r}")
    if "max_block_distance" not in doc:
        raise SchemaError(None, "missing max_block_distance")
    mbd = _typed(doc["max_block_distance"], int, _key_line(text, 1, "max_block_distance"),
                 "max_block_distance")
    targets, blocks = [], []
    for kind, keys, sink in (("target", _TARGET_KEYS, targets), ("block", _BLOCK_KEYS, blocks)):
        tables = doc.get(kind, [])
        if not isinstance(tables, list):
            raise SchemaError(_key_line(text, 1, kind), f"{kind} must be an array of tables")
        starts = _table_lines(text, kind)
        for k, table in enumerate(tables):
            line = starts[k] if k < len(starts) else None
            for key in table:
                if key not in keys:
                    raise SchemaError(_key_line(text, line or 1, key), f"unknown key {key!r} in [[{kind}]]")
            for key in keys:
                if key not in table:
                    raise SchemaError(line, f"[[{kind}]] is missing {key!r}")
            sink.append((line, table))
    out_targets = []
    for line, t in targets:
        try:
            out_targets.append(TargetPoint(_typed(t["id"], str, line, "id"),
                                           _typed(t["file"], str, line, "file"),
                                           _typed(t["line"], int, line, "line"),
                                           _typed(t["timeout_s"], float, line, "timeout_s")))
        except ValueError as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(line, str(exc)) from None
    out_blocks, seen = [], set()
    for line, b in blocks:
        bid = _typed(b["block_id"], int, line, "block_id")
        if bid < 1:
            raise SchemaError(line, "block_id must be positive")
        if bid in seen:
            raise SchemaError(line, f"duplicate block_id {bid}")
        seen.add(bid)
        w = _typed(b["weight"], float, line, "weight")
        if not 0 < w <= 1:
            raise SchemaError(line, f"weight {w} outside (0, 1]")
        out_blocks.append(EtsBlock(bid, _typed(b["file"], str, line, "file"),
                                   _typed(b["function"], str, line, "function"),
                                   _typed(b["occurrence"], int, line, "occurrence"),
                                   _typed(b["cfg_block"], int, line, "cfg_block"),
                                   _typed(b["start_line"], int, line, "start_line"),
                                   _typed(b["end_line"], int, line, "end_line"), w))
    return EnhancedTargetSequence(out_targets, out_blocks, mbd)


def read_ets_toml(path) -> EnhancedTargetSequence:
    with open(path, encoding="utf-8") as fh:
        return loads_ets(fh.read())
