"""Pfaffian complexity tools for networks with Riccati activations."""

from ._core import (
    Activation,
    BudgetError,
    DomainError,
    Network,
    SchemaError,
    ShapeError,
    activation,
    activation_from_json,
    betti,
    betti_bound,
    betti_network,
    bracket_count,
    brackets,
    builtins,
    certificates_json,
    compute_format,
    count_zeros,
    gv_bound,
    locus,
    network_from_json,
    rankdrop_bound,
    sample_network,
    verify_chain,
    zero_bound,
)

__version__ = "0.1.0"
__all__ = [name for name in dir() if not name.startswith("_")]
