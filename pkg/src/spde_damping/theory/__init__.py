from .bessel import bessel_combination, bessel_j0, bessel_j0_series_decimal
from .oracle import (
    expected_alpha_hat,
    expected_quadratic_variation,
    expected_sum_sq,
    expected_triple_increment_sq,
    ou_increment_variance,
    summed_increment_variance,
)
from .psi import (
    PsiQuery,
    PsiValue,
    ThetaVector,
    bessel_combination_identity_check,
    bessel_combination_integral,
    g_limit,
    mellin_constant,
    psi,
    psi_reference,
    psi_with_error,
    weight_integral,
)
