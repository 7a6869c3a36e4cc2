"""Thermal light as a mixture of coherent pulses: numerics and experiments.

Subpackages:
    units      physical context and dimensionless conversions
    specfun    occupation-weighted moment integrals
    thermal    blackbody first- and second-order coherence
    pulsekit   coherent pulse families and field envelopes
    mixturekit mixture coherence, weight solvers, scaling experiments
    mcfield    Monte Carlo correlation estimators
    fockdis    discrete-mode density matrices and selection rules
    cli        command-line experiments
"""

__version__ = "0.1.0"

from .units import PhysicalContext, make_context

__all__ = ["PhysicalContext", "make_context", "__version__"]
