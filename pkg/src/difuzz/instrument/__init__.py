"""ETS and coverage instrumentation of MiniProc sources."""

from .program import (PLAN_FILE, AlreadyInstrumented, instrument_ast,
                      instrument_program, load_program, source_files)
from .rewrite import (BlockNotMatched, InstrumentationPlan, instrument_coverage,
                      instrument_ets)

__all__ = ["PLAN_FILE", "AlreadyInstrumented", "instrument_ast",
           "instrument_program", "load_program", "source_files",
           "BlockNotMatched", "InstrumentationPlan", "instrument_coverage",
           "instrument_ets"]
