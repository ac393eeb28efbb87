"""Color-aware robustness certification and resilient consensus (RCP-C)."""
from ._accel import USE_NUMBA, backend_name
from .graph import ColoredGraph, build_graph, load_graph, save_graph

__version__ = "0.1.0"
__all__ = ["ColoredGraph", "USE_NUMBA", "backend_name", "build_graph", "load_graph", "save_graph"]
