"""SAT-based solver toolkit for thermodynamic binding networks."""
from ._jit import backend_name
from .model import (
    Configuration,
    Monomer,
    PolymerPartition,
    SiteType,
    Tbn,
    TbnError,
    compatible_sites,
    complement,
    is_free,
    is_maximal_matching,
    is_saturated,
    is_valid_configuration,
    limiting_site_types,
    polymers,
    remove_monomer,
)
from .parser import parse_tbn, read_tbn, serialize_tbn

__version__ = "0.1.0"
