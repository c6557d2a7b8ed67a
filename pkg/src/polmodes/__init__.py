"""polmodes: quantized polariton modes of layered polar dielectrics.

Subpackages cover material response (media), interface dispersions
(dispersion), analytic quantized mode profiles (modes), the discretized
real-space eigenproblem (realspace), anharmonic scattering coefficients
(nonlinear), bath-dressed lossy response (dissipative), and a CLI (cli).
"""

from .media import (
    EPS0,
    HBAR,
    MU0,
    C,
    Layer,
    LayeredGeometry,
    MediumParams,
    default_medium,
    epsilon,
    from_phonon_frequencies,
    homogeneous_box,
    longitudinal_frequency,
    nu,
    vacuum_interface,
)
from .dispersion import (
    ModeClass,
    ModeIndex,
    bulk_branches,
    surface_dispersion_kpar,
    surface_dispersion_omega,
    surface_window_top,
)
from .modes import (
    HopfieldProfile,
    PolaritonMode,
    ThetaProfile,
    build_theta,
    conjugate_mode,
    field_expansion_coefficients,
    fresnel_te,
    fresnel_tm,
    hopfield_from_theta,
    make_mode,
    normalization_integral,
    normalize,
)

__version__ = "0.1.0"

__all__ = [
    "C",
    "EPS0",
    "HBAR",
    "MU0",
    "Layer",
    "LayeredGeometry",
    "MediumParams",
    "ModeClass",
    "ModeIndex",
    "PolaritonMode",
    "ThetaProfile",
    "HopfieldProfile",
    "build_theta",
    "bulk_branches",
    "conjugate_mode",
    "default_medium",
    "epsilon",
    "field_expansion_coefficients",
    "fresnel_te",
    "fresnel_tm",
    "from_phonon_frequencies",
    "homogeneous_box",
    "hopfield_from_theta",
    "longitudinal_frequency",
    "make_mode",
    "normalization_integral",
    "normalize",
    "nu",
    "surface_dispersion_kpar",
    "surface_dispersion_omega",
    "surface_window_top",
    "vacuum_interface",
]
