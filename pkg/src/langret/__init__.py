"""Exact nearest-point retraction onto the dominant cone of a root system."""

from .coweights import RootDatum, leq_G, make_gl, retract_G
from .envelope import StepFunction, concave_envelope_hull, concave_envelope_pav
from .exact_linalg import Q, format_rational, parse_rational, parse_vector
from .retraction import RetractionResult, certificate_ok, proj_J, retract, retract_oracle
from .root_data import ObtuseBasis, SystemSpec, dual_basis, in_dominant, in_pos_cone, infimum, leq, make_system, pairing

__all__ = [
    "ObtuseBasis", "Q", "RetractionResult", "RootDatum", "StepFunction", "SystemSpec",
    "certificate_ok", "concave_envelope_hull", "concave_envelope_pav", "dual_basis",
    "format_rational", "in_dominant", "in_pos_cone", "infimum", "leq", "leq_G", "make_gl",
    "make_system", "pairing", "parse_rational", "parse_vector", "proj_J", "retract",
    "retract_G", "retract_oracle",
]
