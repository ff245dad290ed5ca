"""Static analysis producing the enhanced target sequence (ETS)."""

from .distance import (CALL_COST, DistanceAnalysis, TargetNotFound, block_distance,
                       compute_ets, function_distance, locate_target_blocks)
from .ets import (EnhancedTargetSequence, EtsBlock, SchemaError, dumps_ets,
                  loads_ets, read_ets_toml, write_ets_toml)
from .targets import (TargetFormatError, TargetPoint, format_targets,
                      parse_targets, read_targets, write_targets)

__all__ = ["CALL_COST", "DistanceAnalysis", "TargetNotFound", "block_distance",
           "compute_ets", "function_distance", "locate_target_blocks",
           "EnhancedTargetSequence", "EtsBlock", "SchemaError", "dumps_ets",
           "loads_ets", "read_ets_toml", "write_ets_toml", "TargetFormatError",
           "TargetPoint", "format_targets", "parse_targets", "read_targets",
           "write_targets"]
