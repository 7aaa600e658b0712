"""subrig: exact decision toolkit for projective/affine equivalence and
rigidity of sub-Riemannian metric pairs.

Given a frame adapted to an ordered pair of metrics (structure coefficients,
weights, transition eigenvalues), the package decides whether an orbital
diffeomorphism between the normal-extremal flows can exist: it either
produces the explicit fiberwise map, the quadratic first integral and a
product/Levi-Civita decomposition, or a finite algebraic certificate of
rigidity.  Companion toolkits cover nilpotent approximations of frames and
decomposability of skew-symmetric pencils (step-2 symbol spaces).

Everything is exact: arbitrary-precision rationals, rational functions in
the base variables, and quadratic radical extensions closed under
differentiation.
"""

from .errors import SubrigError
from .scalars import Scalar, ScalarField
from .sparsepoly import SPoly
from .fiber import FRat, divide_by_P, highest_weight_part, weighted_degree
from .frames import (
    FrameData,
    TransitionDiagonalization,
    complete_adapted_frame,
    diagonalize_transition,
    frame_from_fields,
    growth_vector,
    lie_bracket,
    rescale_frame,
    structure_coefficients,
    swap_pair,
    validate_frame_data,
)
from .fundamental import (
    DivisibilityData,
    EquivalenceReport,
    FundamentalSystem,
    HamiltonianLift,
    ampleness,
    analyze_pair,
    build_P_and_Q,
    build_layers,
    divisibility_consequence_checks,
    first_integral,
    jacobi_dimension,
    lift_apply,
    solve_system,
    verify_orbital_map,
)
from .nilpotent import (
    CarnotAlgebra,
    Obstruction,
    ProductDecomposition,
    carnot_product_structure,
    carnot_to_frame,
    hat_layer_check,
    nilpotent_approximation,
    validate_carnot,
)
from .levicivita import LCFactor, LCPair, LeviCivitaSpec, lc_build, lc_verify
from .pencils import (
    PencilInvariants,
    SkewPencil,
    common_kernel,
    decomposability,
    elementary_divisors,
    first_minimal_index,
    pencil_det,
    pfaffian,
)

__version__ = "0.1.0"
