"""Flat translation surfaces: strata, counting, surgery, and samplers."""

from .errors import FlatstrataError
from .stratum import StratumSignature, crad_lower_bound, stratum_from_orders
from .surface import (
    TranslationSurface,
    ValidationReport,
    Vertex,
    build_from_polygon,
    build_square_tiled,
)

__version__ = "0.1.0"

__all__ = [
    "FlatstrataError",
    "StratumSignature",
    "stratum_from_orders",
    "crad_lower_bound",
    "TranslationSurface",
    "ValidationReport",
    "Vertex",
    "build_from_polygon",
    "build_square_tiled",
    "__version__",
]
