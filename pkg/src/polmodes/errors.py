"""Exception hierarchy shared by all polmodes modules."""


class PolmodesError(Exception):
    """Base class for all library errors."""


class PoleAtResonance(PolmodesError):
    """Evaluation requested too close to the transverse resonance pole."""


class ZeroEpsilon(PolmodesError):
    """Dielectric function vanishes (longitudinal frequency) where a division needs it."""


class OutsideSurfaceWindow(PolmodesError):
    """Frequency outside the band where epsilon < -1, so no surface solution exists."""


class BelowLightLineEdge(PolmodesError):
    """In-plane wavevector below the existence edge c*k_par >= omega_TO."""


class EvanescentBranchAmbiguity(PolmodesError):
    """Vertical-wavenumber radicand within tolerance of zero (grazing propagation)."""


class QuadratureDisagreement(PolmodesError):
    """Closed-form normalization and quadrature disagree beyond tolerance.

    Signals a convention bug, not a recoverable state.
    """


class ResolutionTooCoarse(PolmodesError):
    """Grid spacing violates the shortest-wavelength resolution advisory."""


class DegenerateKreinNorm(PolmodesError):
    """An eigenvector has (near-)zero indefinite norm: spurious or null mode."""


class IncompleteSpectrum(PolmodesError):
    """Completeness check requested on a partially solved spectrum."""


class SolverContractViolation(PolmodesError):
    """An internal solver invariant failed (e.g. positivity of the energy form)."""


class DivergentBathIntegral(PolmodesError):
    """Bath renormalization integral does not converge."""


class SingularEndpoint(PolmodesError):
    """Principal-value frequency coincides with a support endpoint of the bath."""


class NonConvergentTransfer(PolmodesError):
    """Driven-field layer solve failed (singular or ill-conditioned system)."""


class ConfigError(PolmodesError):
    """Invalid run configuration. Carries a JSON-pointer path to the offending entry."""

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{message} (at {pointer or '/'})")
