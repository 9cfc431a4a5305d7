"""Tube series coefficients, tube shape flows and identity checks for submanifolds."""
from .combinatorics import (
    closed_form_phi_psi,
    phi,
    phi_psi_block,
    psi,
    theta,
    theta_bar,
    upsilon,
    upsilon_refined,
)
from .trace_algebra import (
    BlockTracePolynomial,
    TraceMonomial,
    TracePolynomial,
    block_expand,
    evaluate,
    newton_convert,
    reduce_word,
    series_trace_power,
)

__version__ = "0.1.0"

__all__ = [
    "BlockTracePolynomial",
    "TraceMonomial",
    "TracePolynomial",
    "block_expand",
    "closed_form_phi_psi",
    "evaluate",
    "newton_convert",
    "phi",
    "phi_psi_block",
    "psi",
    "reduce_word",
    "series_trace_power",
    "theta",
    "theta_bar",
    "upsilon",
    "upsilon_refined",
]
