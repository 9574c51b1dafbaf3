"""Exact small-scale optimization kernels: simplex LP, transport, max-flow."""

from .lp import Constraint, LinearProgram, LPResult, format_tableau, solve_lp
from .maxflow import FlowResult, max_coupling, max_coupling_mass
from .transport import TransportProblem, TransportResult, certify, solve_transport

__all__ = [
    "Constraint",
    "FlowResult",
    "LPResult",
    "LinearProgram",
    "TransportProblem",
    "TransportResult",
    "certify",
    "format_tableau",
    "max_coupling",
    "max_coupling_mass",
    "solve_lp",
    "solve_transport",
]
