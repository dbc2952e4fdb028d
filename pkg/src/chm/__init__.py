"""Complex Hadamard matrices: a parametrized catalogue with tools to analyse and build them."""

from .analysis import (
    DefectReport, HadamardReport, InvariantSet, NotHadamardError, Outcome, SearchResult, Verdict,
    circulant_decompose, defect, dephase, equivalence_search, haagerup_invariants,
    inequivalent_by_invariants, is_hadamard, is_unbiased_pair, log_phases,
)
from .catalogue import CatalogueError, UnknownEntryError, entry, fourier, get, get_family, list_entries
from .construct import (
    ArityError, affine_eval, chains, dita_compose, double, enumerate_patterns, quadruple,
    solve_pattern, tensor,
)
from .core import (
    AffineFamily, DiagonalPhase, EquivalenceWitness, HadamardMatrix, PermutationVector, PhaseValue,
    apply_equivalence,
)

__all__ = [
    "AffineFamily", "ArityError", "CatalogueError", "DefectReport", "DiagonalPhase",
    "EquivalenceWitness", "HadamardMatrix", "HadamardReport", "InvariantSet", "NotHadamardError",
    "Outcome", "PermutationVector", "PhaseValue", "SearchResult", "UnknownEntryError", "Verdict",
    "affine_eval", "apply_equivalence", "chains", "circulant_decompose", "defect", "dephase",
    "dita_compose", "double", "entry", "enumerate_patterns", "equivalence_search", "fourier", "get",
    "get_family", "haagerup_invariants", "inequivalent_by_invariants", "is_hadamard",
    "is_unbiased_pair", "list_entries", "log_phases", "quadruple", "solve_pattern", "tensor",
]
