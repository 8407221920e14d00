"""Exact computations with the lowering operator ``Lambda = sum a_i (Dx)^i D``."""

from .errors import (
    BoundsError,
    LambdaAppellError,
    NotFactorableError,
    NotLoweringError,
    PreconditionError,
    TruncationError,
    ZeroOperatorError,
)
from .exactmath import Polynomial, Rational, as_rational, stirling1, stirling2
from .functionals import MomentFunctional, FunctionalEquation, dual_sequence, pair
from .weyl import (
    DiffOperator,
    FactoredForm,
    LambdaCoeffs,
    coeffs_from_xd_powers,
    factor_lambda,
    is_lowering_operator,
    lambda_from_factored,
    lambda_operator,
    xd_from_dx,
)
from .sequences import (
    MonicPolySequence,
    RecurrencePair,
    build_lambda_appell,
    hermite,
    is_lambda_appell,
    is_orthogonal,
    laguerre,
    structure_coefficients,
)
from .cubic import decompose, recompose, secondary_profile, verify_nine_relations, verify_principal_appell
from .analysis import (
    build_elimination_state,
    laguerre_characterization,
    nonexistence_certificate,
    polynomial_identities,
)

__version__ = "0.1.0"
