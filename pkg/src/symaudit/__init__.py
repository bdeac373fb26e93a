"""symaudit: a desk-scale laboratory for Fourier multiplier symbols on
groups, fusion rings and convex bodies, with exact combinatorics where
possible and audited constants everywhere else."""

from .reports import SCHEMA_VERSION, TOOL_VERSION

__version__ = TOOL_VERSION

__all__ = ["SCHEMA_VERSION", "TOOL_VERSION", "__version__"]
