"""Agler decompositions, unitary transfer-function realizations and size bounds
for rational inner functions on the polydisk."""

from .exceptions import (
    AglerError,
    DegenerateInputError,
    DimensionError,
    FaceNotFactorableError,
    NotIsometricError,
    NotPSDError,
    SingularityError,
    UnsupportedDegreeError,
)
from .facebound import FaceData, min_squares, single_square_feasible, size_lower_bound, square_search
from .hermform import HermitianForm, face_extract, gram_form, mod2diff, subtract_sos, torus_restrict
from .polycore import LaurentPoly, Poly, VecPoly, amplify, multidegree
from .realize import (
    Realization,
    decomposition_from_realization,
    lurking_isometry,
    to_rational,
    transfer_eval,
)
from .soscert import SosCertificate, check_degree_bounds, gram_factor, radial_check, verify_decomposition
from .surd import Surd
from .vntest import random_tuple, vn_norm, vn_probe

__version__ = "0.1.0"
