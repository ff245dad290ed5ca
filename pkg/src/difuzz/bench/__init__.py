"""Synthetic benchmark suite and the repeated-trial TTE harness."""

from .harness import (BenchConfig, BenchConfigError, BenchMatrix, BenchProgram, TteCell,
                      format_cell, load_bench_config, render_report, run_bench, run_trial,
                      suite_bench_config, write_report)
from .pipeline import PipelineError, PreparedTarget, prepare
from .suite import SuiteProgram, gen_benchmark_suite, write_suite

__all__ = ["BenchConfig", "BenchConfigError", "BenchMatrix", "BenchProgram", "TteCell",
           "format_cell", "load_bench_config", "render_report", "run_bench", "run_trial",
           "suite_bench_config", "write_report", "PipelineError", "PreparedTarget",
           "prepare", "SuiteProgram", "gen_benchmark_suite", "write_suite"]
