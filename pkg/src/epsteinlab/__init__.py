"""Numerical laboratory for Epstein surfaces, projective metrics and W-volume bounds."""
from .hyperbolic import INF, H3Point, Horosphere, MoebiusMap, hyp_distance, poincare_extend, visual_density
from .schwarzian import Koebe, holo_jet, nehari_scan, parse_expr, schwarzian, schwarzian_norm
from .metrics import DensityJet, ImageDomainField, metric_compare, parse_scene, projective_density
from .epstein import dome_check, epstein_point, fundamental_forms, identity_suite, schwarzian_shape_check
from .wvol import ProjectiveDescriptor, WValue, chain_verify, main_bound, w_scale

__version__ = "0.1.0"

__all__ = [
    "INF", "H3Point", "Horosphere", "MoebiusMap", "hyp_distance", "poincare_extend", "visual_density",
    "Koebe", "holo_jet", "nehari_scan", "parse_expr", "schwarzian", "schwarzian_norm",
    "DensityJet", "ImageDomainField", "metric_compare", "parse_scene", "projective_density",
    "dome_check", "epstein_point", "fundamental_forms", "identity_suite", "schwarzian_shape_check",
    "ProjectiveDescriptor", "WValue", "chain_verify", "main_bound", "w_scale",
]
