"""Cost-generic resynthesis of XOR-AND-Inverter graphs."""

from .cost import BUILTINS, CostFunction, evaluate, get_cost, register
from .opt import PassConfig, PassReport, optimize, optimize_pass
from .tt import TruthTable, simulate
from .xag import AND, XOR, Network, Signal

__version__ = "0.1.0"

__all__ = [
    "AND", "XOR", "BUILTINS", "CostFunction", "Network", "PassConfig", "PassReport", "Signal",
    "TruthTable", "evaluate", "get_cost", "optimize", "optimize_pass", "register", "simulate",
]
