"""Walker constellation coverage, revisit-time and link-budget toolkit."""

__version__ = "0.1.0"

from .constellation import (  # noqa: E402
    PhasingConvention,
    SatelliteElement,
    WalkerPattern,
    WalkerShell,
    expand_shell,
    tle_export,
)
from .errors import ConfigurationError, DomainError, ExportError, OutOfTableError  # noqa: E402
from .geo_core import (  # noqa: E402
    CONSTANTS,
    EcefVector,
    GeoPoint,
    footprint_radius,
    geodetic_to_ecef,
    min_satellites_lower_bound,
    slant_range,
)
from .metrics import (  # noqa: E402
    CoverageStats,
    coverage_map,
    coverage_probability,
    coverage_stats,
    latitude_sweep,
    mean_visible,
    revisit_times,
)
from .propagation import Ephemeris, TimeGrid, propagate  # noqa: E402
from .visibility import ElevationMask, elevation_of, visibility_timeline  # noqa: E402
