"""Exact computation of prolongations of linear Lie algebras and of the
automorphism algebras of cones over projective varieties cut out by quadrics."""
from prolab._backend import BACKEND
from prolab.linalg import ExactMatrix, Subspace, kernel, rank, rank_mod_p, rref, span
from prolab.prolong import AtLeast, ProlongationResult, prolong, vanishing_order
from prolab.symtensor import QuadraticForm, SymMultiMap, sym_dim
from prolab.zoo import VarietyPresentation, build

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ExactMatrix", "Subspace", "kernel", "rank", "rank_mod_p", "rref", "span",
    "AtLeast", "ProlongationResult", "prolong", "vanishing_order",
    "QuadraticForm", "SymMultiMap", "sym_dim", "VarietyPresentation", "build",
]
