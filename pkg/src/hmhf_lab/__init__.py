"""Numerical laboratory for reduced geometry and equivariant harmonic map
heat flow on model backward conformal flows.

Modules
-------
flows      model flow family, pointwise quantities, hypothesis gate
reduced    reduced length/distance (two backends) and reduced-geometry bounds
maps       equivariant maps, heat flow solver, Bochner-identity audit
radial     radial harmonic-map ODE phase plane and asymptotic exponents
kato       refined Kato inequality and pointwise subharmonicity checks
estimates  cutoff constants, gradient-estimate verdicts, growth scans
cli        config-driven experiment runner and plot emission
"""

__version__ = "0.1.0"
