"""Bloch theory and two-band tight binding for single-walled carbon nanotubes.

Submodules, bottom up: ``geometry`` (tube scalars), ``transforms``
(rotation-translations, cells, atoms), ``reciprocal`` (reciprocal tube and
Brillouin zone), ``bloch`` (grid-based Bloch functions), ``tightbinding``
(2x2 bands) and ``cli``.
"""

from .geometry import ChiralSpec, SymmetryClass, TubeGeometry, compute_geometry
from .reciprocal import KPoint, sample_kappa
from .tightbinding import TBParams, band_structure

__all__ = [
    "ChiralSpec", "SymmetryClass", "TubeGeometry", "compute_geometry",
    "KPoint", "sample_kappa", "TBParams", "band_structure",
]
__version__ = "0.1.0"
