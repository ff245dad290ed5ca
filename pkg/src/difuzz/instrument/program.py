"""Instrument a whole source directory: ETS probes, then coverage guards."""

from __future__ import annotations

import json
import os

from ..minilang import ast as A
from ..minilang.emit import emit
from ..minilang.parser import link, parse
from ..preprocess.ets import read_ets_toml
from .rewrite import instrument_coverage, instrument_ets

PLAN_FILE = "plan.json"


class AlreadyInstrumented(RuntimeError):
    pass


def source_files(directory) -> list:
    """Relative paths of all ``.mp`` files under ``directory``, sorted."""
    out = []
    for root, _, files in os.walk(directory):
        for f in files:
            if f.endswith(".mp"):
                out.append(os.path.relpath(os.path.join(root, f), directory))
    return sorted(out)


def load_program(directory) -> A.Ast:
    """Parse and link every ``.mp`` file; file names are directory-relative."""
    asts = []
    for rel in source_files(directory):
        with open(os.path.join(directory, rel), encoding="utf-8") as fh:
            asts.append(parse(fh.read(), rel))
    if not asts:
        raise FileNotFoundError(f"no .mp files under {directory}")
    return link(asts)


def instrument_ast(ast: A.Ast, ets):
    if A.has_probes(ast):
        raise AlreadyInstrumented("sources already contain probe calls")
    with_ets, ets_plan = instrument_ets(ast, ets)
    full, cov_plan = instrument_coverage(with_ets)
    return full, ets_plan.merge(cov_plan)


def instrument_program(source_dir, ets_path, out_dir) -> dict:
    ast = load_program(source_dir)
    ets = read_ets_toml(ets_path)
    full, plan = instrument_ast(ast, ets)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for file in sorted(full.files()):
        path = os.path.join(out_dir, file)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(emit(full.for_file(file), preserve_lines=True))
        written.append(file)
    doc = plan.to_json()
    with open(os.path.join(out_dir, PLAN_FILE), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return {"files": written, "ets_insertions": len(plan.ets_insertions),
            "coverage_insertions": len(plan.coverage_insertions),
            "unplaceable": len(plan.unplaceable), "plan": plan}
