"""Commuting X-string ansatze for MaxCut: objectives, landscapes and experiments."""
from .ansatz import Ansatz, Generator, from_spec
from .graph import GraphGenerator, ResourceCapError, WeightedGraph, cut_value, generate, max_cut_bruteforce
from .statevec import Simulator

__all__ = [
    "Ansatz",
    "Generator",
    "GraphGenerator",
    "ResourceCapError",
    "Simulator",
    "WeightedGraph",
    "cut_value",
    "from_spec",
    "generate",
    "max_cut_bruteforce",
]
