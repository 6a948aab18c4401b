"""Estimation of the noise damping exponent of a 2D parabolic SPDE.

Simulate the truncated spectral solution, thin the observations onto two
nested grids, and estimate alpha from the ratio of triple-increment
quadratic variations.
"""

from .errors import DegenerateVariation, InvalidDesign, InvalidParameters, ShapeMismatch, SpdeError
from .estimator import AlphaEstimate, QuadraticVariationPair, StreamingEstimator, alpha_hat, estimate_from_field, quadratic_variations
from .model import NoiseSpec, SpdeCoefficients, eigenfunction_eval, eigenvalue, mode_weight, weighted_inner_product
from .sampling import IncrementCube, ThinnedDesign, build_design, coarsen, triple_increments
from .simulate import FieldSample, ModeState, evaluate_field, evolve, ou_step, simulate_dataset

__version__ = "0.1.0"

# Simulation setting of the reference study.
REFERENCE_COEFFS = SpdeCoefficients(theta0=0.0, theta1=0.2, eta1=0.2, theta2=0.2, sigma=1.0)
REFERENCE_ALPHA = 0.5
REFERENCE_MU0 = -19.5
