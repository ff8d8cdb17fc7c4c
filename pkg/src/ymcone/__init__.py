"""Numerical toolkit for Yang-Mills fields on curved spacetimes.

Modules:
    geometry   -- chart catalog, curvature, frames, companion Riemannian metric
    liegauge   -- compact Lie algebras, gauge potentials/curvatures, residuals
    sphere     -- direction-sphere quadrature and spectral differentiation
    nullcone   -- past null cone bundles: rays, frames, optical scalars
    parametrix -- cone transport field and the representation formula
    energy     -- stress tensor, energies, fluxes, divergence identity
    evolution  -- temporal-gauge Cauchy evolution on periodic grids
    bounds     -- comparison envelopes (linear and quadratic integral bounds)
    runner     -- scenario configs, experiments, reports, CLI
"""

__version__ = "0.1.0"
