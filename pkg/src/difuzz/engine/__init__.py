"""The fuzzer: execution, feedback, scheduling, mutation and the campaign loop."""

from .campaign import (COVERAGE, DIRECTED, CampaignResult, ConfigError, CorpusEntry,
                       FuzzConfig, fuzz_loop, validate_crash, write_campaign)
from .coverage import BUCKET, CoverageHistory, CoverageMap, coverage_is_novel, edge_index
from .executor import Executor, Limits, execute
from .feedback import EtsHistory, EtsIndex, EtsTrace, ets_is_novel, seed_distance
from .mutate import mutate
from .schedule import (SchedulerState, annealing_energy, mutation_budget,
                       normalized_distance, temperature)

__all__ = ["COVERAGE", "DIRECTED", "CampaignResult", "ConfigError", "CorpusEntry",
           "FuzzConfig", "fuzz_loop", "validate_crash", "write_campaign", "BUCKET",
           "CoverageHistory", "CoverageMap", "coverage_is_novel", "edge_index", "Executor",
           "Limits", "execute", "EtsHistory", "EtsIndex", "EtsTrace", "ets_is_novel",
           "seed_distance", "mutate", "SchedulerState", "annealing_energy",
           "mutation_budget", "normalized_distance", "temperature"]
