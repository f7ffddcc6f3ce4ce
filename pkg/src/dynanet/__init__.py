"""Round-synchronous dynamic-network simulator with coloring and MIS algorithms."""

from dynanet.graph_core import GraphHistory, GraphSnapshot, WindowState, ball, canon
from dynanet.engine import EngineConfig, RoundTrace, run

__all__ = [
    "EngineConfig",
    "GraphHistory",
    "GraphSnapshot",
    "RoundTrace",
    "WindowState",
    "ball",
    "canon",
    "run",
]

__version__ = "0.1.0"
