"""Binary codes with two distances d and d+2, 2-packings, and exact small-case search."""
from .core import (
    Classification,
    Code,
    CodeError,
    Codeword,
    LengthMismatch,
    NotConstantWeight,
    Packing,
    PairCoveredTwice,
    TwoDistanceParams,
    classify_two_distance,
    code_from_packing,
    constant_weight_translator,
    distance,
    distance_set,
    intersection_weight,
    packing_from_code,
    translate,
    weight_distribution,
)

__version__ = "0.1.0"
