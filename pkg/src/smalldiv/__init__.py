"""Numerical experiments on small divisors.

High-precision formal linearization of germs and vector fields, Diophantine
arithmetic of rotation numbers, parameter sweeps with growth diagnostics,
centralizer candidates and transfinite-diameter estimates.
"""

__version__ = "0.1.0"

from .arithmetic import (
    ContinuedFraction,
    MoserQuery,
    RotationNumber,
    bruno_sum,
    cf_expand,
    convergents,
    make_liouville,
    moser_pair_check,
    parse_rotation_number,
)
from .capacity import Disk, Segment, bernstein_factor, capacity_sample, fekete_diameter, polar_probe
from .centralizer import centralizer_candidate, commutator_residual
from .families import GermFamily, WindowPolicy, family_linearize, parameter_sweep, radius_estimate
from .linearization import (
    EigenData,
    classify_domain,
    conjugacy_residual,
    detect_resonances,
    linearize_germ_1d,
    linearize_germ_nd,
)
from .series import MultiSeries, TruncSeries, compose, revert
from .vector_fields import ResonanceLattice, VectorFieldGerm, vf_linearize, vf_normal_form

__all__ = [
    "ContinuedFraction",
    "Disk",
    "EigenData",
    "GermFamily",
    "MoserQuery",
    "MultiSeries",
    "ResonanceLattice",
    "RotationNumber",
    "Segment",
    "TruncSeries",
    "VectorFieldGerm",
    "WindowPolicy",
    "__version__",
    "bernstein_factor",
    "bruno_sum",
    "capacity_sample",
    "centralizer_candidate",
    "cf_expand",
    "classify_domain",
    "commutator_residual",
    "compose",
    "conjugacy_residual",
    "convergents",
    "detect_resonances",
    "family_linearize",
    "fekete_diameter",
    "linearize_germ_1d",
    "linearize_germ_nd",
    "make_liouville",
    "moser_pair_check",
    "parameter_sweep",
    "parse_rotation_number",
    "polar_probe",
    "radius_estimate",
    "revert",
    "vf_linearize",
    "vf_normal_form",
]
