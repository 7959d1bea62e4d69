from .ball import (
    ComplexBall,
    as_ball,
    pi_ball,
    two_pi_i_ball,
    unique_integer_in,
    unique_integer_vector,
    DEFAULT_PREC,
)
from .roots import (
    isolate_roots,
    krawczyk_test,
    refine_root,
    eval_ball_poly,
    diff_ball_poly,
    cauchy_root_bound,
    min_root_bound,
)
from .lll import (
    lll_reduce,
    integer_kernel,
    rational_row_basis,
    saturate,
    hnf_basis,
    lattice_contains,
    lattice_equal,
    smith_diagonal,
    smith_transforms,
    solve_integer,
    extend_to_basis,
    unimodular_inverse,
)
from .ballmatrix import BallMatrix, solve_enclosure, certify_invertible, det_excludes_zero

__all__ = [
    "ComplexBall",
    "as_ball",
    "pi_ball",
    "two_pi_i_ball",
    "unique_integer_in",
    "unique_integer_vector",
    "DEFAULT_PREC",
    "isolate_roots",
    "krawczyk_test",
    "refine_root",
    "eval_ball_poly",
    "diff_ball_poly",
    "cauchy_root_bound",
    "min_root_bound",
    "lll_reduce",
    "integer_kernel",
    "rational_row_basis",
    "saturate",
    "hnf_basis",
    "lattice_contains",
    "lattice_equal",
    "smith_diagonal",
    "smith_transforms",
    "solve_integer",
    "extend_to_basis",
    "unimodular_inverse",
    "BallMatrix",
    "solve_enclosure",
    "certify_invertible",
    "det_excludes_zero",
]
