"""Target point lists: one ``id<TAB>path:line<TAB>timeout_s`` per line."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TargetPoint:
    id: str
    file: str
    line: int
    timeout_s: float

    def __post_init__(self):
        if self.line < 1:
            raise ValueError(f"target {self.id}: line must be >= 1")
        if not self.timeout_s > 0:
            raise ValueError(f"target {self.id}: timeout must be positive")

    @property
    def location(self):
        return f"{self.file}:{self.line}"


class TargetFormatError(ValueError):
    pass


def parse_targets(text: str) -> list:
    out = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise TargetFormatError(f"line {n}: expected 3 tab-separated fields")
        ident, loc, timeout = (p.strip() for p in parts)
        path, sep, lineno = loc.rpartition(":")
        if not sep or not path:
            raise TargetFormatError(f"line {n}: location must be path:line")
        try:
            out.append(TargetPoint(ident, path, int(lineno), float(timeout)))
        except ValueError as exc:
            raise TargetFormatError(f"line {n}: {exc}") from None
    return out


def format_targets(targets) -> str:
    return "".join(f"{t.id}\t{t.file}:{t.line}\t{_num(t.timeout_s)}\n" for t in targets)


def read_targets(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return parse_targets(fh.read())


def write_targets(targets, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_targets(targets))


def _num(x):
    return str(int(x)) if float(x).is_integer() else repr(float(x))
