"""Forward and inverse spectral maps for Laplacians on tori of revolution.

Modules:

- ``core``: periodic functions on a uniform grid, Sobolev norms
- ``riccati``: the perturbed Riccati map ``q -> P(q)``, curvature maps, estimate suite
- ``hill``: Hill/Sturm-Liouville spectra by shooting
- ``galerkin``: Fourier-Galerkin eigenvalues (independent oracle)
- ``gapmap``: gap-length coordinates and mapping estimates
- ``inverse``: constructive inversion of ``P`` and Newton inversion of the gap map
- ``geometry``: embedded tori, arc length, profiles
- ``records``: the structured-text I/O format
"""
from .core import PeriodicFn, analyze, norm, random_profile, trig, zero
from .gapmap import GapVector, psi_cap_of_p, psi_of_q
from .hill import SpectralData, discriminant, monodromy, spectral_data
from .riccati import OperatorSpec, RiccatiParams, estimate_report, forward_map

__all__ = [
    "PeriodicFn", "analyze", "norm", "random_profile", "trig", "zero",
    "GapVector", "psi_cap_of_p", "psi_of_q",
    "SpectralData", "discriminant", "monodromy", "spectral_data",
    "OperatorSpec", "RiccatiParams", "estimate_report", "forward_map",
]

__version__ = "0.1.0"
