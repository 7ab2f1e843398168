"""gaugeflow: spin-field / gauge-pair dictionary for integrable PDEs.

Generates exact solutions (Liouville, NLS families, hyperbolic Liouville),
converts between unit-spin-field and abelian gauge descriptions, builds
Lax / zero-curvature representations with a spectral parameter, applies
Galileo boosts and Backlund transformations, and verifies every
correspondence by residual and round-trip tests on 2D grids.
"""

__version__ = "0.1.0"
