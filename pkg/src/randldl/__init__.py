"""randldl: dense symmetric-indefinite block LDL^T with randomized pivoting.

The package factors a dense symmetric matrix as ``Pi A Pi^T = L D L^T``
(unit lower triangular ``L``, block diagonal ``D`` with 1x1 and 2x2 blocks)
under one of three pivoting strategies:

- ``rcp``  -- randomized complete pivoting: pivot columns are chosen by
  scanning a small Gaussian sketch ``B = Omega A`` that is downdated
  alongside the factorization, giving complete-pivoting-like growth control
  at partial-pivoting cost;
- ``bkpp`` -- classic partial-pivoting block strategy;
- ``bbk``  -- bounded (rook) block strategy.

Entry points: :func:`factor`, :func:`factor_robust`, :func:`solve`,
:func:`solve_many`, the :mod:`randldl.gallery` matrix families, and the
``bench`` command line (``randldl.bench:main``).
"""

from .core import (
    apply_symmetric_permutation,
    column_norms,
    compose_permutations,
    identity_permutation,
    invert_permutation,
    is_exactly_symmetric,
    mirror_lower,
    schur_update,
    sym_swap,
)
from .factor import (
    PAT_DEFICIENT,
    PAT_PAIR_END,
    PAT_PAIR_START,
    PAT_SINGLE,
    BlockDiag,
    FactorConfig,
    Factorization,
    GrowthTracking,
    NumericalError,
    Strategy,
    compute_panel_columns,
    factor,
    factor_robust,
    reconstruct,
)
from .gallery import (
    FAMILIES,
    MatrixSpec,
    generate,
    load_matrix_market,
    save_matrix_market,
)
from .metrics import (
    GrowthStats,
    JlBudget,
    OpCounters,
    backward_error,
    growth_from_snapshots,
    jl_budget,
    jl_required_p,
    linv_norm1,
    norm_1,
    norm_1_2,
    norm_1_inf,
)
from .pivot import (
    BK_ALPHA,
    SBKP_ALPHA,
    PivotDecision,
    PivotKind,
    PivotParams,
    bbk_decide,
    bkpp_decide,
    sbkp_decide,
)
from .sketch import (
    RNG_STREAM,
    RngSpec,
    SketchState,
    draw_gaussian,
    partial_qrcp,
    project,
    recompute_sketch,
    update_sketch,
)
from .solve import SolveReport, block_diag_solve, solve, solve_many

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # factor
    "factor",
    "factor_robust",
    "reconstruct",
    "compute_panel_columns",
    "FactorConfig",
    "Factorization",
    "BlockDiag",
    "Strategy",
    "GrowthTracking",
    "NumericalError",
    "PAT_SINGLE",
    "PAT_PAIR_START",
    "PAT_PAIR_END",
    "PAT_DEFICIENT",
    # solve
    "solve",
    "solve_many",
    "block_diag_solve",
    "SolveReport",
    # pivoting
    "sbkp_decide",
    "bkpp_decide",
    "bbk_decide",
    "BK_ALPHA",
    "SBKP_ALPHA",
    "PivotDecision",
    "PivotKind",
    "PivotParams",
    # sketching
    "RngSpec",
    "RNG_STREAM",
    "SketchState",
    "draw_gaussian",
    "project",
    "update_sketch",
    "recompute_sketch",
    "partial_qrcp",
    # metrics
    "OpCounters",
    "GrowthStats",
    "JlBudget",
    "jl_required_p",
    "jl_budget",
    "backward_error",
    "growth_from_snapshots",
    "norm_1",
    "norm_1_2",
    "norm_1_inf",
    "linv_norm1",
    # gallery
    "generate",
    "MatrixSpec",
    "FAMILIES",
    "load_matrix_market",
    "save_matrix_market",
    # permutation/matrix helpers
    "identity_permutation",
    "invert_permutation",
    "compose_permutations",
    "apply_symmetric_permutation",
    "is_exactly_symmetric",
    "sym_swap",
    "mirror_lower",
    "column_norms",
    "schur_update",
]
