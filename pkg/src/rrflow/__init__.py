"""Exact algorithms and reference oracles for flows that survive single arc
failures by rerouting."""

from .flows import PathFlow, verify_k_reroutable, verify_reroutable
from .graph import Network, parse_network, write_network
from .rcut import RCut, approx_min_rcut, rcut_capacity
from .srf import approx_max_rf, solve_max_srf

__all__ = [
    "Network",
    "PathFlow",
    "RCut",
    "approx_max_rf",
    "approx_min_rcut",
    "parse_network",
    "rcut_capacity",
    "solve_max_srf",
    "verify_k_reroutable",
    "verify_reroutable",
    "write_network",
]
