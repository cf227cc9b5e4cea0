"""Integrable 1-forms, Bessel-type first integrals and Floquet analysis
for complex Hill equations u'' + p(z) u = 0."""

from .algebra import (
    GaussRat,
    Poly,
    PolyMap,
    PolyOneForm,
    PolyThreeForm,
    PolyTwoForm,
    contract,
    differential,
    divide_out,
    exterior_derivative,
    integrability_defect,
    pullback,
    wedge,
)
from .errors import (
    BranchCutWarning,
    ConvergenceError,
    DegenerateFloquetError,
    DependentPairError,
    DomainError,
    HillfolError,
    NonDivisibleError,
    PoleError,
    SingularLocusError,
)
from .models import (
    FirstIntegral,
    HillModel,
    PeriodicCoeff,
    PlaneModel,
    bessel_first_integral_2d,
    bessel_first_integral_3d,
    bessel_hill_first_integral,
    bessel_hill_model,
    build_hill,
    fundamental_form,
    hill_form,
    hill_vector_field,
    liouvillian_case_p1,
    rational_first_integral_p0,
    solution_pair_first_integral,
)
from .special import SeriesControl, bessel_deriv, bessel_j, bessel_y, gamma

__version__ = "0.1.0"
