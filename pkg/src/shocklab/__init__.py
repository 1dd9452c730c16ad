"""shocklab: a numerical laboratory for viscous shock waves near an
impermeable wall, with space-periodic far-field perturbations.

Subpackage layout
-----------------
gas          constitutive relations (pressure, viscosity, antiderivatives)
hugoniot     jump conditions and end-state solver for compressive 2-shocks
profile      traveling-wave profile ODE, mirror images, ramps, composites
periodic     periodic background evolution and decay-rate fits
ansatz       time-dependent ansatz, source terms, shift ODEs, zero-mass shifts
evolve       half-line / mirrored whole-line initial value problem solver
diagnostics  anti-derivative perturbations, norms, error terms, metrics
config       experiment configuration loading and validation
cli          command-line entry points
"""

__version__ = "0.1.0"
