"""Desk-scale toolkit for isotone convex maps: capacities and Choquet
integrals, Bernstein-Kantorovich-Choquet approximation, Loewner-order
checks on symmetric matrices, and LP certification of isotonicity for
max-affine maps."""

from .capacity import Capacity, DistortionFn, distort, is_submodular, uniform, validate_capacity
from .choquet import (
    are_comonotonic,
    check_integral_axioms,
    check_subadditivity,
    choquet_discrete,
    choquet_interval,
)
from .bkc import BkcConfig, bkc_apply, bkc_error_table
from .certify import MaxAffineMap, certify_isotone, pointwise_positive_subgradient
from .errors import (
    CapabilityError,
    DegenerateCapacityError,
    DomainError,
    IsotoneKitError,
    NumericalError,
    PreconditionError,
    StructuralError,
)

__version__ = "0.1.0"
