"""Conic graph homomorphisms and generalised theta functions over the CP,
DNN and PSD cones."""

from .errors import (CapabilityError, ConicHomError, InconclusiveError, NumericalError,
                     ParameterError, PreconditionError)
from .graph import Graph, VertexPairIndex
from .linalg import SymMatrix
from .theta import ConeTag, ThetaResult, big_theta, theta
from .homomorphisms import HomDecision, HomWitness, conic_alpha, decide_hom

__version__ = "0.1.0"

__all__ = [
    "CapabilityError", "ConicHomError", "InconclusiveError", "NumericalError",
    "ParameterError", "PreconditionError", "Graph", "VertexPairIndex", "SymMatrix",
    "ConeTag", "ThetaResult", "big_theta", "theta", "HomDecision", "HomWitness",
    "conic_alpha", "decide_hom",
]
