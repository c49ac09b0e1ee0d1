"""Sublinear-cost CUR low-rank approximation.

Volume-maximizing CUR for symmetric positive semidefinite matrices,
cross-approximation iterations, HSS compression, and brute-force
verifiers, all reading their input through an access-counting
:class:`EntryOracle`.
"""

__version__ = "0.1.0"

from .access import EntryOracle, IndexSet, index_set
from .cross import (
    CaConfig,
    CaOutcome,
    DegenerateStripError,
    ca_iterations,
    maxvol_submatrix,
    projective_to_volume,
    select_in_strip,
    verify_error,
)
from .cur import CurFactors, build_cur, canonical_nucleus, cheb_error
from .hss import HssTree, build_hss, cauchy_oracle, hss_benchmark, hss_matvec
from .linalg import (
    LogVolume,
    Svd,
    norms,
    numerical_rank,
    projective_volume,
    pseudo_inverse,
    rank_truncation,
    svd,
    volume,
)
from .oracle import (
    AdversarialFamily,
    adversary_demo,
    brute_force_max_volume,
    optimal_error,
    theorem_suite,
)
from .spsd import (
    SpsdConfig,
    build_cur_spsd,
    gecp_spsd,
    greedy_column_subset,
    index_update,
    spsd_cur,
    spsd_main,
)

__all__ = [
    "AdversarialFamily", "CaConfig", "CaOutcome", "CurFactors", "DegenerateStripError",
    "EntryOracle", "HssTree", "IndexSet", "LogVolume", "SpsdConfig", "Svd",
    "adversary_demo", "brute_force_max_volume", "build_cur", "build_cur_spsd", "build_hss",
    "ca_iterations", "canonical_nucleus", "cauchy_oracle", "cheb_error", "gecp_spsd",
    "greedy_column_subset", "hss_benchmark", "hss_matvec", "index_set", "index_update",
    "maxvol_submatrix", "norms", "numerical_rank", "optimal_error", "projective_to_volume",
    "projective_volume", "pseudo_inverse", "rank_truncation", "select_in_strip", "spsd_cur",
    "spsd_main", "svd", "theorem_suite", "verify_error", "volume",
]
