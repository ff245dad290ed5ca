"""Call graphs and control-flow graphs with debug info, and their DOT form."""

from .cfg import (BasicBlock, UnknownFunction, build_call_graph, build_cfg,
                  decompose)
from .dot import DotSyntaxError, emit_dot, parse_dot
from .model import CALLGRAPH, CFG, GraphEdge, GraphNode, ProgramGraph
from .store import GraphSet, build_graphs, cfg_filename

__all__ = ["BasicBlock", "UnknownFunction", "build_call_graph", "build_cfg",
           "decompose", "DotSyntaxError", "emit_dot", "parse_dot", "CALLGRAPH",
           "CFG", "GraphEdge", "GraphNode", "ProgramGraph", "GraphSet",
           "build_graphs", "cfg_filename"]
