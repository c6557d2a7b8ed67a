"""Analytic polariton mode profiles for the planar interface and homogeneous boxes.

Every profile is a piecewise sum of vector plane waves

    theta(r_par, z) = sum_t  a_t * exp(i * (-k_par . r_par + w_t * z)),

one term list per layer, so curls, divergences and overlap integrals are exact
algebra on the (a_t, w_t) pairs. The in-plane phase convention is
exp(-i k_par . r_par) throughout; conjugating a profile therefore flips the
in-plane wavevector, which is how negative-energy partners acquire opposite
momentum.

Vertical wavenumber branches: a wave written exp(+i w z) that must decay into
z < 0 needs Im w <= 0, one that must decay or radiate into z > 0 needs
Im w >= 0 (Re w >= 0 when real in both cases). The medium side of the
interface is z < 0, so transmitted roots of eps*omega^2/c^2 - k_par^2 take the
Im <= 0 branch.

Hopfield coefficient map (matter regions only for gamma, eta):

    alpha = theta           (transverse within each homogeneous region)
    beta  = (i/omega) curl theta
    gamma = i kappa omega / (rho (omega_T^2 - omega^2)) theta
    eta   = kappa omega^2 / (omega_T^2 - omega^2) theta

Normalization fixes N so that

    hbar*omega*eps0 * Int eps(omega) nu(omega) theta . conj(theta) dr = sgn(omega).

For the surface class the z-integral converges and the closed form

    N_S = sqrt(k_par / (eps0 hbar omega A)) * [1 + nu_L/(2 eps_L)]^(-1/2)
          * [s + 1/s]^(-1/2),          s = sqrt(-eps_L),

is cross-checked against adaptive quadrature (the two routes stay independent;
disagreement raises). For propagating classes the integral is a box-regularized
continuum bookkeeping and the closed form is N = sqrt(1/(eps0 hbar omega V
eps_i nu_i)) with (eps_i, nu_i) of the incidence side; it is exact for
homogeneous boxes (checked by quadrature) and its interface consistency is the
flux unitarity of the Fresnel coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.integrate import quad

from .dispersion import ModeClass, ModeIndex, bulk_branches, surface_dispersion_omega
from .errors import (
    EvanescentBranchAmbiguity,
    PoleAtResonance,
    QuadratureDisagreement,
)
from .media import (
    C,
    EPS0,
    HBAR,
    MU0,
    POLE_GUARD_REL,
    LayeredGeometry,
    MediumParams,
    epsilon,
    nu,
    nu_vacuum,
)

E_Z = np.array([0.0, 0.0, 1.0])


# ---------------------------------------------------------------------------
# piecewise plane-wave machinery


@dataclass(frozen=True)
class PlaneTerm:
    """One vector plane-wave term a * exp(i w z) within a layer."""

    amplitude: np.ndarray  # complex, shape (3,)
    w: complex

    def k3(self, k_inplane: np.ndarray) -> np.ndarray:
        """Full 3D wavevector of the phase exp(i(-k.r_par + w z))."""
        return np.array([-k_inplane[0], -k_inplane[1], self.w], dtype=complex)


@dataclass(frozen=True)
class ProfileRegion:
    z_min: float
    z_max: float
    medium: Optional[MediumParams]
    terms: Tuple[PlaneTerm, ...]


@dataclass(frozen=True)
class VectorProfile:
    """Piecewise-exponential complex vector field of (r_par, z)."""

    k_inplane: np.ndarray  # shape (2,)
    regions: Tuple[ProfileRegion, ...]

    def region_index(self, z: float) -> int:
        for i, reg in enumerate(self.regions):
            if reg.z_min <= z <= reg.z_max:
                if z == reg.z_max and i + 1 < len(self.regions):
                    continue
                return i
        raise ValueError(f"z={z} outside profile support")

    def evaluate_region(self, i: int, z, r_par=(0.0, 0.0)) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.zeros((z.size, 3), dtype=complex)
        phase_par = np.exp(-1j * (self.k_inplane[0] * r_par[0] + self.k_inplane[1] * r_par[1]))
        for t in self.regions[i].terms:
            out += t.amplitude[None, :] * np.exp(1j * t.w * z)[:, None]
        return out * phase_par

    def evaluate(self, z, r_par=(0.0, 0.0)) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.zeros((z.size, 3), dtype=complex)
        for i in range(len(self.regions)):
            mask = np.array([self.region_index(zz) == i for zz in z])
            if mask.any():
                out[mask] = self.evaluate_region(i, z[mask], r_par)
        return out

    def curl(self) -> "VectorProfile":
        regions = []
        for reg in self.regions:
            terms = tuple(
                PlaneTerm(1j * np.cross(t.k3(self.k_inplane), t.amplitude), t.w)
                for t in reg.terms
            )
            regions.append(replace(reg, terms=terms))
        return VectorProfile(self.k_inplane, tuple(regions))

    def divergence(self, z, r_par=(0.0, 0.0)) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.zeros(z.size, dtype=complex)
        phase_par = np.exp(-1j * (self.k_inplane[0] * r_par[0] + self.k_inplane[1] * r_par[1]))
        for idx, zz in enumerate(z):
            reg = self.regions[self.region_index(zz)]
            for t in reg.terms:
                out[idx] += 1j * np.dot(t.k3(self.k_inplane), t.amplitude) * np.exp(1j * t.w * zz)
        return out * phase_par

    def conj(self) -> "VectorProfile":
        regions = tuple(
            replace(
                reg,
                terms=tuple(
                    PlaneTerm(np.conj(t.amplitude), -np.conj(t.w)) for t in reg.terms
                ),
            )
            for reg in self.regions
        )
        return VectorProfile(-self.k_inplane, regions)

    def scaled(self, factor: complex) -> "VectorProfile":
        regions = tuple(
            replace(reg, terms=tuple(PlaneTerm(factor * t.amplitude, t.w) for t in reg.terms))
            for reg in self.regions
        )
        return VectorProfile(self.k_inplane, regions)

    def mapped(self, func: Callable[[ProfileRegion], complex]) -> "VectorProfile":
        """Scale each region by a region-dependent factor (zero drops its terms)."""
        regions = []
        for reg in self.regions:
            f = func(reg)
            terms = () if f == 0 else tuple(PlaneTerm(f * t.amplitude, t.w) for t in reg.terms)
            regions.append(replace(reg, terms=terms))
        return VectorProfile(self.k_inplane, tuple(regions))


@dataclass(frozen=True)
class ThetaProfile:
    """Auxiliary field theta of one mode, with its class and eigenfrequency."""

    profile: VectorProfile
    mode_class: ModeClass
    omega: float
    index: ModeIndex

    def evaluate(self, z, r_par=(0.0, 0.0)) -> np.ndarray:
        return self.profile.evaluate(z, r_par)


@dataclass(frozen=True)
class HopfieldProfile:
    """Real-space Hopfield coefficients (alpha, beta, gamma, eta) of one mode."""

    alpha: VectorProfile
    beta: VectorProfile
    gamma: VectorProfile
    eta: VectorProfile
    omega: float
    index: ModeIndex


@dataclass(frozen=True)
class PolaritonMode:
    index: ModeIndex
    omega: float
    norm: float  # normalization constant N already folded into the profiles
    theta: ThetaProfile
    hopfield: HopfieldProfile

    @property
    def energy_sign(self) -> int:
        return 1 if self.omega > 0 else -1


# ---------------------------------------------------------------------------
# vertical wavenumbers and Fresnel coefficients


def _branch_down(radicand: float, scale: float, tol: float = 1e-12) -> complex:
    """Vertical wavenumber for exp(+i w z) decaying/outgoing into z < 0 (Im <= 0)."""
    if abs(radicand) < tol * scale:
        raise EvanescentBranchAmbiguity(
            f"vertical wavenumber radicand {radicand} within tolerance of zero"
        )
    if radicand > 0:
        return complex(math.sqrt(radicand))
    return -1j * math.sqrt(-radicand)


def _branch_mirror_up(radicand: float, scale: float, tol: float = 1e-12) -> complex:
    """Mirror image of _branch_down: exp(+i w z) decaying into z > 0 (Im >= 0),
    with Re <= 0 when real so the outgoing-labelled basis matches the z -> -z
    mirror of the vacuum-incidence construction."""
    return -_branch_down(radicand, scale, tol)


def fresnel_te(m: MediumParams, k) -> Tuple[complex, complex]:
    """TE Fresnel coefficients for vacuum-side incidence with wavevector k.

    k is the 3-vector (or (kx, ky, kz)) of the incident vacuum wave, k_z > 0.
    Returns (r, t) with r = (k_z - q)/(k_z + q), t = 2 k_z/(k_z + q),
    q = sqrt(eps_L k^2 - k_par^2) on the decaying branch. r + 1 = t exactly.
    """
    kv = np.asarray(k, dtype=float)
    k_par2 = kv[0] ** 2 + kv[1] ** 2
    k_z = kv[2]
    if not k_z > 0:
        raise ValueError("vacuum incidence requires k_z > 0")
    k2 = k_par2 + k_z**2
    omega = C * math.sqrt(k2)
    eL = epsilon(m, omega)
    q = _branch_down(eL * k2 - k_par2, k2)
    r = (k_z - q) / (k_z + q)
    t = 2 * k_z / (k_z + q)
    return r, t


def fresnel_tm(m: MediumParams, k) -> Tuple[complex, complex]:
    """TM (magnetic-field convention) Fresnel coefficients for vacuum-side incidence.

    r = (eps_L k_z - q)/(eps_L k_z + q), t = 2 eps_L k_z/(eps_L k_z + q);
    r + 1 = t exactly, and the surface-mode pole sits at eps_L k_z + q = 0.
    """
    kv = np.asarray(k, dtype=float)
    k_par2 = kv[0] ** 2 + kv[1] ** 2
    k_z = kv[2]
    if not k_z > 0:
        raise ValueError("vacuum incidence requires k_z > 0")
    k2 = k_par2 + k_z**2
    omega = C * math.sqrt(k2)
    eL = epsilon(m, omega)
    q = _branch_down(eL * k2 - k_par2, k2)
    r = (eL * k_z - q) / (eL * k_z + q)
    t = 2 * eL * k_z / (eL * k_z + q)
    return r, t


# ---------------------------------------------------------------------------
# geometry classification and frequency lookup


def _classify(geom: LayeredGeometry):
    """Return ('vacuum'|'matter'|'interface', medium) for supported geometries."""
    mats = [l.medium for l in geom.layers]
    if all(m is None for m in mats):
        return "vacuum", None
    params = {(m.omega_T, m.rho, m.kappa) for m in mats if m is not None}
    if len(params) > 1:
        raise ValueError("analytic modes support a single medium species")
    medium = next(m for m in mats if m is not None)
    if all(m is not None for m in mats):
        return "matter", medium
    if (
        len(geom.layers) == 2
        and geom.layers[0].medium is not None
        and geom.layers[1].medium is None
        and abs(geom.layers[0].z_max) < 1e-12 * geom.lz
    ):
        return "interface", medium
    raise ValueError("unsupported geometry for analytic modes (need medium below z=0, vacuum above)")


def mode_frequency(geom: LayeredGeometry, idx: ModeIndex) -> float:
    """Positive eigenfrequency of the labelled mode."""
    kind, medium = _classify(geom)
    cls = idx.mode_class
    if cls is ModeClass.S:
        if kind != "interface":
            raise ValueError("surface modes require the vacuum/medium interface")
        return surface_dispersion_omega(medium, idx.k_par_mag)
    if cls.vacuum_incident:
        if kind == "matter":
            raise ValueError("vacuum-incident classes need a vacuum region")
        return C * idx.k_mag
    # medium-incident bulk branches
    if medium is None:
        raise ValueError("bulk polariton classes need a matter region")
    ol, ou = bulk_branches(medium, idx.k_mag)
    return ol if cls in (ModeClass.TEl, ModeClass.TMl) else ou


# ---------------------------------------------------------------------------
# theta construction


def _region_split(geom: LayeredGeometry, medium, vac_terms, med_terms) -> Tuple[ProfileRegion, ...]:
    lz = geom.lz
    return (
        ProfileRegion(-lz / 2, 0.0, medium, tuple(med_terms)),
        ProfileRegion(0.0, lz / 2, None, tuple(vac_terms)),
    )


def build_theta(geom: LayeredGeometry, idx: ModeIndex) -> ThetaProfile:
    """Unnormalized (N=1) theta profile of the labelled mode.

    Homogeneous geometries yield single plane waves (the no-interface limit,
    r=0, t=1). The interface geometry yields the scattering or surface
    profiles; transmitted vertical wavenumbers follow the decay branch rule.
    """
    kind, medium = _classify(geom)
    omega = mode_frequency(geom, idx)
    cls = idx.mode_class
    k_inplane = idx.k_par_vec
    e_par, e_perp = idx.e_par, idx.e_perp
    k_par = idx.k_par_mag
    u = (omega / C) ** 2

    if cls is ModeClass.S:
        eL = epsilon(medium, omega)
        s = math.sqrt(-eL)
        kv = k_par / s
        km = k_par * s
        vac = [PlaneTerm((1j / s) * e_par + E_Z, 1j * kv)]
        med = [PlaneTerm((1.0 / eL) * (-1j * s * e_par + E_Z), -1j * km)]
        profile = VectorProfile(k_inplane, _region_split(geom, medium, vac, med))
        return ThetaProfile(profile, cls, omega, idx)

    k_z = idx.k_z
    kmag = idx.k_mag

    if kind != "interface":
        # single homogeneous plane wave
        if cls.is_te:
            amp = e_perp.astype(complex)
        else:
            amp = (k_z * e_par + k_par * E_Z) / kmag
        region = ProfileRegion(-geom.lz / 2, geom.lz / 2, medium, (PlaneTerm(amp, k_z),))
        return ThetaProfile(VectorProfile(k_inplane, (region,)), cls, omega, idx)

    eL = epsilon(medium, omega)
    if cls.vacuum_incident:
        q = _branch_down(eL * u - k_par**2, max(u, k_par**2))
        if cls is ModeClass.TEv:
            r = (k_z - q) / (k_z + q)
            t = 2 * k_z / (k_z + q)
            vac = [PlaneTerm(e_perp.astype(complex), k_z), PlaneTerm(r * e_perp, -k_z)]
            med = [PlaneTerm(t * e_perp.astype(complex), q)]
        else:  # TMv
            rh = (eL * k_z - q) / (eL * k_z + q)
            th = 2 * eL * k_z / (eL * k_z + q)
            vac = [
                PlaneTerm((k_z * e_par + k_par * E_Z) / kmag, k_z),
                PlaneTerm(rh * (-k_z * e_par + k_par * E_Z) / kmag, -k_z),
            ]
            med = [PlaneTerm((th / eL) * (q * e_par + k_par * E_Z) / kmag, q)]
    else:
        # medium-incident, transmitted upward into vacuum
        wt = _branch_mirror_up(u - k_par**2, max(u, k_par**2))
        if cls.is_te:
            r = (k_z - wt) / (k_z + wt)
            t = 2 * k_z / (k_z + wt)
            med = [PlaneTerm(e_perp.astype(complex), k_z), PlaneTerm(r * e_perp, -k_z)]
            vac = [PlaneTerm(t * e_perp.astype(complex), wt)]
        else:
            rt = (k_z - eL * wt) / (k_z + eL * wt)
            tt = eL * (1 + rt)
            med = [
                PlaneTerm((k_z * e_par + k_par * E_Z) / kmag, k_z),
                PlaneTerm(rt * (-k_z * e_par + k_par * E_Z) / kmag, -k_z),
            ]
            vac = [PlaneTerm(tt * (wt * e_par + k_par * E_Z) / kmag, wt)]
    profile = VectorProfile(k_inplane, _region_split(geom, medium, vac, med))
    return ThetaProfile(profile, cls, omega, idx)


# ---------------------------------------------------------------------------
# Hopfield coefficients, modes, normalization


def hopfield_from_theta(theta: ThetaProfile, guard: Optional[float] = None) -> HopfieldProfile:
    """Map theta to the coefficient profiles (alpha, beta, gamma, eta)."""
    omega = theta.omega
    for reg in theta.profile.regions:
        if reg.medium is not None:
            g = POLE_GUARD_REL * reg.medium.omega_T if guard is None else guard
            if abs(abs(omega) - reg.medium.omega_T) < g:
                raise PoleAtResonance(
                    f"|omega|={abs(omega)} within guard of omega_T={reg.medium.omega_T}"
                )
    alpha = theta.profile
    beta = theta.profile.curl().scaled(1j / omega)

    def gamma_factor(reg: ProfileRegion) -> complex:
        if reg.medium is None:
            return 0.0
        m = reg.medium
        return 1j * m.kappa * omega / (m.rho * (m.omega_T**2 - omega**2))

    def eta_factor(reg: ProfileRegion) -> complex:
        if reg.medium is None:
            return 0.0
        m = reg.medium
        return m.kappa * omega**2 / (m.omega_T**2 - omega**2)

    gamma = theta.profile.mapped(gamma_factor)
    eta = theta.profile.mapped(eta_factor)
    return HopfieldProfile(alpha, beta, gamma, eta, omega, theta.index)


def make_mode(geom: LayeredGeometry, idx: ModeIndex) -> PolaritonMode:
    """Build the unnormalized (N=1) positive-energy mode."""
    theta = build_theta(geom, idx)
    hop = hopfield_from_theta(theta)
    return PolaritonMode(idx, theta.omega, 1.0, theta, hop)


def _eps_nu(medium: Optional[MediumParams], omega: float) -> float:
    if medium is None:
        return 1.0 * nu_vacuum()
    return epsilon(medium, omega) * nu(medium, omega)


def _exact_region_integral(reg: ProfileRegion, k_unused=None) -> complex:
    """Integral of |theta|^2 over the region from the exponential primitives."""
    total = 0.0 + 0.0j
    for ti in reg.terms:
        for tj in reg.terms:
            coef = np.dot(ti.amplitude, np.conj(tj.amplitude))
            d = 1j * (ti.w - np.conj(tj.w))
            if abs(d) * (reg.z_max - reg.z_min) < 1e-12:
                total += coef * (reg.z_max - reg.z_min)
            else:
                total += coef * (np.exp(d * reg.z_max) - np.exp(d * reg.z_min)) / d
    return total


def normalization_integral(mode: PolaritonMode, geom: LayeredGeometry, method: str = "exact") -> float:
    """eps0 * Int_box eps(omega) nu(omega) theta . conj(theta) dr for the given mode.

    method='exact' uses the closed exponential primitives; method='quad' uses
    adaptive quadrature of the pointwise integrand. The two are independent
    evaluation routes over the same box.
    """
    omega = abs(mode.omega)
    total = 0.0
    for i, reg in enumerate(mode.theta.profile.regions):
        weight = _eps_nu(reg.medium, omega)
        if method == "exact":
            val = _exact_region_integral(reg)
            total += weight * val.real
        elif method == "quad":
            def dens(z, i=i):
                th = mode.theta.profile.evaluate_region(i, z)[0]
                return float(np.real(np.vdot(th, th)))

            val, _ = quad(dens, reg.z_min, reg.z_max, limit=400)
            total += weight * val
        else:
            raise ValueError("method must be 'exact' or 'quad'")
    return EPS0 * geom.area * total


def _scaled_mode(mode: PolaritonMode, n: float) -> PolaritonMode:
    theta = ThetaProfile(mode.theta.profile.scaled(n), mode.theta.mode_class, mode.omega, mode.index)
    hop = HopfieldProfile(
        mode.hopfield.alpha.scaled(n),
        mode.hopfield.beta.scaled(n),
        mode.hopfield.gamma.scaled(n),
        mode.hopfield.eta.scaled(n),
        mode.omega,
        mode.index,
    )
    return PolaritonMode(mode.index, mode.omega, mode.norm * n, theta, hop)


def surface_norm_constant(m: MediumParams, omega: float, k_par: float, area: float) -> float:
    """Closed-form surface-mode normalization constant N_S.

    Derived by exact integration of the normalization density over z:

        N_S^2 = k_par / (eps0 hbar omega A) * [1 + nu_L/(2 eps_L)]^(-1)
                * [s + 1/s]^(-1),     s = sqrt(-eps_L).
    """
    eL = epsilon(m, omega)
    s = math.sqrt(-eL)
    bracket = 1.0 + nu(m, omega) / (2.0 * eL)
    if bracket <= 0:
        raise QuadratureDisagreement("surface normalization bracket not positive")
    n2 = k_par / (EPS0 * HBAR * omega * area) / bracket / (s + 1.0 / s)
    return math.sqrt(n2)


def normalize(mode: PolaritonMode, geom: LayeredGeometry, rtol: float = 1e-8) -> PolaritonMode:
    """Fix N so the bosonic normalization integral equals sgn(omega).

    Surface modes: closed form cross-checked against adaptive quadrature of
    the z-integral (QuadratureDisagreement beyond rtol signals a convention
    bug). Homogeneous boxes: closed form N = sqrt(1/(eps0 hbar omega V
    eps_i nu_i)) cross-checked the same way. Interface propagating classes:
    the box integral is continuum bookkeeping, so the closed form is used and
    the Fresnel identity r + 1 = t plus flux unitarity stand in for the
    quadrature route (see module docstring).
    """
    if mode.norm != 1.0:
        raise ValueError("normalize expects an N=1 mode")
    kind, medium = _classify(geom)
    omega = abs(mode.omega)
    cls = mode.index.mode_class

    if cls is ModeClass.S:
        n_closed = surface_norm_constant(medium, omega, mode.index.k_par_mag, geom.area)
        i_quad = normalization_integral(mode, geom, method="quad")
        n_quad = 1.0 / math.sqrt(HBAR * omega * i_quad)
        if abs(n_closed - n_quad) > rtol * n_closed:
            raise QuadratureDisagreement(
                f"surface N closed={n_closed!r} vs quadrature={n_quad!r}"
            )
        return _scaled_mode(mode, n_closed)

    # propagating classes: incidence-side epsilon*nu weight
    inc_medium = None if cls.vacuum_incident else medium
    weight = _eps_nu(inc_medium, omega)
    n_closed = math.sqrt(1.0 / (EPS0 * HBAR * omega * geom.volume * weight))
    if kind != "interface":
        i_quad = normalization_integral(mode, geom, method="quad")
        n_quad = 1.0 / math.sqrt(HBAR * omega * i_quad)
        if abs(n_closed - n_quad) > rtol * n_closed:
            raise QuadratureDisagreement(
                f"homogeneous N closed={n_closed!r} vs quadrature={n_quad!r}"
            )
    return _scaled_mode(mode, n_closed)


def conjugate_mode(mode: PolaritonMode) -> PolaritonMode:
    """Negative-energy partner: conjugated profiles, eigenfrequency -omega."""
    th = ThetaProfile(mode.theta.profile.conj(), mode.theta.mode_class, -mode.omega, mode.index)
    hop = HopfieldProfile(
        mode.hopfield.alpha.conj(),
        mode.hopfield.beta.conj(),
        mode.hopfield.gamma.conj(),
        mode.hopfield.eta.conj(),
        -mode.omega,
        mode.index,
    )
    return PolaritonMode(mode.index, -mode.omega, mode.norm, th, hop)


def field_expansion_coefficients(mode: PolaritonMode) -> Dict[str, VectorProfile]:
    """Coefficients with which this mode's operator enters D, H, P, X.

    f_D = -i (hbar/mu0) curl conj(beta),  f_H = i (hbar/mu0) curl conj(alpha),
    f_P = -i hbar conj(eta),              f_X = i hbar conj(gamma).
    """
    hop = mode.hopfield
    return {
        "D": hop.beta.conj().curl().scaled(-1j * HBAR / MU0),
        "H": hop.alpha.conj().curl().scaled(1j * HBAR / MU0),
        "P": hop.eta.conj().scaled(-1j * HBAR),
        "X": hop.gamma.conj().scaled(1j * HBAR),
    }


# ---------------------------------------------------------------------------
# verification helpers


def wave_equation_residual(theta: ThetaProfile, geom: LayeredGeometry, z_points) -> float:
    """Max pointwise |curl curl theta - (omega^2 eps / c^2) theta| / scale.

    Curls are evaluated by exact term algebra; the scale is
    (omega/c)^2 * max|theta| over the sample points.
    """
    u = (theta.omega / C) ** 2
    cc = theta.profile.curl().curl()
    z = np.atleast_1d(np.asarray(z_points, dtype=float))
    res_max = 0.0
    th_max = 0.0
    for zz in z:
        i = theta.profile.region_index(zz)
        med = theta.profile.regions[i].medium
        eps_here = 1.0 if med is None else epsilon(med, theta.omega)
        lhs = cc.evaluate_region(i, zz)[0]
        th = theta.profile.evaluate_region(i, zz)[0]
        res_max = max(res_max, float(np.max(np.abs(lhs - u * eps_here * th))))
        th_max = max(th_max, float(np.max(np.abs(th))))
    return res_max / (abs(u) * th_max) if th_max > 0 else res_max


def interface_continuity(mode: PolaritonMode, geom: LayeredGeometry) -> Dict[str, float]:
    """Jump magnitudes of the matching fields at z = 0 (normalized to field scale).

    TE: tangential theta and tangential curl theta. TM/S: tangential theta
    (E-like), normal eps*theta (D-like), and tangential curl theta (H-like).
    """
    kind, medium = _classify(geom)
    if kind != "interface":
        raise ValueError("continuity check requires the interface geometry")
    prof = mode.theta.profile
    curl = prof.curl()
    below = prof.evaluate_region(0, 0.0)[0]
    above = prof.evaluate_region(1, 0.0)[0]
    cbelow = curl.evaluate_region(0, 0.0)[0]
    cabove = curl.evaluate_region(1, 0.0)[0]
    scale = max(np.max(np.abs(below)), np.max(np.abs(above)), 1e-300)
    cscale = max(np.max(np.abs(cbelow)), np.max(np.abs(cabove)), 1e-300)
    e_par = mode.index.e_par
    e_perp = mode.index.e_perp
    eL = epsilon(medium, abs(mode.omega))
    jumps = {
        "theta_par": abs(np.dot(e_par, above - below)) / scale,
        "theta_perp": abs(np.dot(e_perp, above - below)) / scale,
        "eps_theta_z": abs(above[2] - eL * below[2]) / scale,
        "curl_par": abs(np.dot(e_par, cabove - cbelow)) / cscale,
        "curl_perp": abs(np.dot(e_perp, cabove - cbelow)) / cscale,
    }
    return jumps
