"""Randomized sparse linear algebra: entrywise spectral-norm sparsification,
approximate matrix multiplication and sparsifier-preconditioned ridge
regression, with a hard-instance generator and a seeded validation harness.
"""

from .amm import (
    AmmReport,
    amm_frobenius,
    amm_spectral,
    outer_product_estimate,
    sample_outer_products,
)
from .core import (
    MatrixProfile,
    SampleConfig,
    SparseMatrix,
    ZeroMatrixWarning,
    matrix_ns,
    numerical_sparsity,
    profile,
    spectral_norm_estimate,
)
from .hardinstance import (
    HardInstance,
    build_circulant,
    build_hard_matrix,
    build_tail_vector,
    hadamard,
    sparsity_necessity_probe,
    tail_norm,
    tail_vector_l1,
)
from .mmio import (
    MatrixMarketError,
    load_matrix_market,
    load_vector,
    save_matrix_market,
    save_vector,
)
from .ridge import (
    CgResult,
    Preconditioner,
    RidgeProblem,
    build_preconditioner,
    cg_solve,
    energy_gap_identity_check,
    energy_norm,
    expected_row_sparsity,
    precond_quality,
    precond_ridge_solve,
    ridge_exact,
    row_norm_inflation_check,
)
from .sparsify import (
    HybridDistribution,
    HybridSampler,
    SampleBudget,
    budget,
    budget_terms,
    l1_row_budget,
    sparsify_hybrid,
    sparsify_l1_rows,
    sparsify_vector_l1,
)

__version__ = "0.1.0"

__all__ = [
    "AmmReport",
    "CgResult",
    "HardInstance",
    "HybridDistribution",
    "HybridSampler",
    "MatrixMarketError",
    "MatrixProfile",
    "Preconditioner",
    "RidgeProblem",
    "SampleBudget",
    "SampleConfig",
    "SparseMatrix",
    "ZeroMatrixWarning",
    "amm_frobenius",
    "amm_spectral",
    "budget",
    "budget_terms",
    "build_circulant",
    "build_hard_matrix",
    "build_preconditioner",
    "build_tail_vector",
    "cg_solve",
    "energy_gap_identity_check",
    "energy_norm",
    "expected_row_sparsity",
    "hadamard",
    "l1_row_budget",
    "load_matrix_market",
    "load_vector",
    "matrix_ns",
    "numerical_sparsity",
    "outer_product_estimate",
    "precond_quality",
    "precond_ridge_solve",
    "profile",
    "ridge_exact",
    "row_norm_inflation_check",
    "sample_outer_products",
    "save_matrix_market",
    "save_vector",
    "sparsify_hybrid",
    "sparsify_l1_rows",
    "sparsify_vector_l1",
    "sparsity_necessity_probe",
    "spectral_norm_estimate",
    "tail_norm",
    "tail_vector_l1",
]
