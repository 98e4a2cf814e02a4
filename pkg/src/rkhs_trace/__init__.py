"""Shift commutator traces, reproducing kernels and disk quadrature for
rotation-invariant Hilbert spaces H_alpha on the unit disk."""

from ._errors import (
    DomainError,
    MembershipError,
    ParameterError,
    UnknownFamilyError,
    WindowError,
)
from .operators import ShiftOperator, unilateral, weighted
from .series import PowerSeries
from .weights import WeightSequence, builtin_family, classify

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "MembershipError",
    "ParameterError",
    "UnknownFamilyError",
    "WindowError",
    "PowerSeries",
    "ShiftOperator",
    "WeightSequence",
    "builtin_family",
    "classify",
    "unilateral",
    "weighted",
]
