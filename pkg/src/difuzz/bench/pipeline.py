"""Source directory + targets -> compiled instrumented program and ETS."""

from __future__ import annotations

import os
from dataclasses import dataclass

from ..graph.store import build_graphs
from ..instrument.program import instrument_ast, load_program
from ..minilang.compiler import Program, compile_program
from ..preprocess.distance import compute_ets
from ..preprocess.ets import write_ets_toml
from ..preprocess.targets import read_targets


class PipelineError(RuntimeError):
    def __init__(self, target, stage, cause):
        super().__init__(f"{target}: {stage} failed: {cause}")
        self.target = target
        self.stage = stage
        self.cause = cause


@dataclass
class PreparedTarget:
    name: str
    program: Program
    ets: object
    targets: list


def prepare(name, source_dir, targets_path=None, targets=None, out_dir=None) -> PreparedTarget:
    """Preprocess, instrument and compile one program. Stages that fail are
    reported as ``PipelineError(name, stage)``."""
    stage = "load"
    try:
        ast = load_program(source_dir)
        if targets is None:
            targets = read_targets(targets_path)
        stage = "preprocess"
        graphs = build_graphs(ast)
        ets = compute_ets(graphs.cg, graphs.cfgs, targets)
        stage = "instrument"
        full, _ = instrument_ast(ast, ets)
        program = compile_program(full)
    except Exception as exc:
        raise PipelineError(name, stage, exc) from exc
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        graphs.write(os.path.join(out_dir, "graphs"))
        write_ets_toml(ets, os.path.join(out_dir, "ets.toml"))
    return PreparedTarget(name, program, ets, list(targets))
