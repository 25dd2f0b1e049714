"""Numerics for the rank-one (Z omega, chi)-theta Fock-Bargmann space on C^g."""
from .basis import (
    BasisFunction,
    basis_eval,
    basis_eval_log,
    index_window,
    log_norm_squared,
    multi_indices,
    norm_squared,
    norm_squared_printed,
)
from .character import Character, check_rdq, chi_of
from .errors import (
    BasisOverflowError,
    CalibrationError,
    ConfigError,
    DegenerateInputError,
    DimensionError,
    DomainError,
    QuadratureError,
    ThetaFockError,
    TruncationError,
    UnreachableToleranceError,
)
from .expansion import (
    Expansion,
    automorphy_residual,
    expand,
    fourier_slice,
    norm_growth,
    pointwise_bound,
    reconstruct,
)
from .geometry import (
    BasisIndex,
    MultiIndex,
    Point,
    QuadratureSpec,
    SpaceConfig,
    gaussian_weight,
    hermitian_form,
    wrap_to_fundamental,
)
from .kernel import KernelSpec, calibrate_kernel, kernel_closed, kernel_series
from .quadrature import Grid, build_grid, gaussian_integral, gram_matrix, inner_product
from .theta import ThetaArgs, theta_eval, theta_tail_bound

__version__ = "0.1.0"
