"""Numerical toolkit for concave trace functionals and their verification."""

from .errors import ConvergenceError, DomainError, NumericalConsistencyError, QuadratureError
from .functionals import (
    block_embed,
    bures_distance,
    cond_entropy_blockdiag,
    delta_quadratic,
    fidelity_root,
    lieb_f1,
    lieb_f2,
    lieb_f2_quad,
    lieb_f3,
    limit_identity,
    rel_entropy,
    ssa_deficit,
    StripInstance,
    strip_f,
    strip_mixture,
    sym_rel_entropy,
    vn_entropy,
)
from .linalg import (
    DensityMatrix,
    PsdMatrix,
    RandomEnsembleConfig,
    SpectralDecomposition,
    TripartiteState,
    as_density,
    as_psd,
    hermitian_eig,
    matrix_exp,
    matrix_log,
    matrix_power,
    matrix_sqrt,
    partial_trace,
    random_sample,
)
from .superops import (
    KernelOperator,
    QuadratureConfig,
    apply_kernel,
    exp_frechet,
    kernel_operator,
    omega,
    omega_inv,
    resolvent_pair,
    upsilon,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "NumericalConsistencyError",
    "QuadratureError",
    "DensityMatrix",
    "KernelOperator",
    "PsdMatrix",
    "QuadratureConfig",
    "RandomEnsembleConfig",
    "SpectralDecomposition",
    "StripInstance",
    "TripartiteState",
    "apply_kernel",
    "as_density",
    "as_psd",
    "block_embed",
    "bures_distance",
    "cond_entropy_blockdiag",
    "delta_quadratic",
    "exp_frechet",
    "fidelity_root",
    "hermitian_eig",
    "kernel_operator",
    "lieb_f1",
    "lieb_f2",
    "lieb_f2_quad",
    "lieb_f3",
    "limit_identity",
    "matrix_exp",
    "matrix_log",
    "matrix_power",
    "matrix_sqrt",
    "omega",
    "omega_inv",
    "partial_trace",
    "random_sample",
    "rel_entropy",
    "resolvent_pair",
    "ssa_deficit",
    "strip_f",
    "strip_mixture",
    "sym_rel_entropy",
    "upsilon",
    "vn_entropy",
]
