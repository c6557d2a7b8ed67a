"""Polaritonic scattering coefficients from anharmonic matter interactions.

An order-N anharmonicity couples N factors of the matter displacement field.
Expanding the displacement over polariton operators turns it into scattering
terms between N modes with coefficients

    Xi = Int dr  sum_{j1..jN} Phi^{j1..jN}  prod_l  [w_l(r)]_{j_l},

where w_l is the weight with which mode l's operator enters the matter field,

    w_l = sgn(omega_l) * kappa hbar omega_l / (rho (omega_T^2 - omega_l^2)) * conj(theta_l),

supported on matter regions only. The sgn factor makes the weight of a
negative-energy partner the complex conjugate of its positive partner's, so
replacing every mode by its partner conjugates Xi (Hermiticity of the matter
field expansion).

The in-plane integral of the product of plane-wave factors is exact momentum
selection: Xi vanishes unless the mode momenta sum to zero, in which case it
contributes the quantization area. The z-integral is a finite sum of
exponentials (every implemented mode profile is), evaluated by closed
primitives; an adaptive-quadrature route is kept for cross-checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .errors import PoleAtResonance
from .media import HBAR, LayeredGeometry, POLE_GUARD_REL
from .modes import PolaritonMode, ProfileRegion, VectorProfile

MOMENTUM_TOL = 1e-9


@dataclass(frozen=True)
class NonlinearTensor:
    """Dense rank-N coupling tensor over 3 spatial indices, symmetrized."""

    order: int
    components: np.ndarray
    symmetrization_defect: float = 0.0

    @staticmethod
    def from_array(arr, symmetrize: bool = True) -> "NonlinearTensor":
        a = np.asarray(arr, dtype=float)
        order = a.ndim
        if order < 3:
            raise ValueError("nonlinear tensor order must be >= 3")
        if a.shape != (3,) * order:
            raise ValueError(f"expected shape {(3,) * order}, got {a.shape}")
        if not symmetrize:
            return NonlinearTensor(order, a)
        sym = np.zeros_like(a)
        perms = list(itertools.permutations(range(order)))
        for p in perms:
            sym += np.transpose(a, p)
        sym /= len(perms)
        defect = float(np.max(np.abs(sym - a)))
        return NonlinearTensor(order, sym, defect)


@dataclass(frozen=True)
class ScatteringAmplitude:
    """Value of one scattering coefficient with its momentum-selection flag."""

    value: complex
    momentum_ok: bool
    total_k_par: Tuple[float, float]


def matter_weight(mode: PolaritonMode, guard: float | None = None) -> VectorProfile:
    """Weight profile of this mode's operator in the matter displacement field.

    sgn(omega) * kappa hbar omega / (rho (omega_T^2 - omega^2)) * conj(theta),
    zero outside matter regions. Raises PoleAtResonance within the guard of
    the transverse resonance.
    """
    omega = mode.omega
    theta_bar = mode.theta.profile.conj()

    def factor(reg: ProfileRegion) -> complex:
        if reg.medium is None:
            return 0.0
        m = reg.medium
        g = POLE_GUARD_REL * m.omega_T if guard is None else guard
        if abs(abs(omega) - m.omega_T) < g:
            raise PoleAtResonance(f"|omega|={abs(omega)} at the resonance of omega_T={m.omega_T}")
        return np.sign(omega) * m.kappa * HBAR * omega / (m.rho * (m.omega_T**2 - omega**2))

    return theta_bar.mapped(factor)


def _mode_momentum(weight: VectorProfile) -> np.ndarray:
    """In-plane wavevector carried by exp(+i k . r_par) of the weight profile."""
    return -weight.k_inplane


def scattering_coefficient(
    modes: Sequence[PolaritonMode],
    phi: NonlinearTensor,
    geom: LayeredGeometry,
    method: str = "exact",
    momentum_tol: float = MOMENTUM_TOL,
) -> ScatteringAmplitude:
    """Scattering coefficient Xi for an N-tuple of normalized modes.

    In-plane momentum selection is exact: a nonzero total in-plane wavevector
    (beyond momentum_tol relative to the largest mode momentum) returns a
    flagged exact zero. Otherwise Xi = A * sum_j Phi contraction of the
    z-integrated weight products; method='exact' uses exponential primitives,
    method='quad' adaptive quadrature.
    """
    if len(modes) != phi.order:
        raise ValueError(f"need {phi.order} modes for an order-{phi.order} tensor")
    weights = [matter_weight(md) for md in modes]
    k_total = np.sum([_mode_momentum(w) for w in weights], axis=0)
    k_scale = max(1.0, max(float(np.hypot(*_mode_momentum(w))) for w in weights))
    if float(np.hypot(*k_total)) > momentum_tol * k_scale:
        return ScatteringAmplitude(0.0 + 0.0j, False, (float(k_total[0]), float(k_total[1])))

    n_regions = {len(w.regions) for w in weights}
    if len(n_regions) != 1:
        raise ValueError("modes must share the same layer structure")
    total = 0.0 + 0.0j
    for ireg in range(n_regions.pop()):
        regs = [w.regions[ireg] for w in weights]
        if regs[0].medium is None or any(not r.terms for r in regs):
            continue
        z_min, z_max = regs[0].z_min, regs[0].z_max
        if method == "exact":
            for combo in itertools.product(*(r.terms for r in regs)):
                contraction = phi.components
                for t in combo:
                    contraction = np.tensordot(contraction, t.amplitude, axes=([0], [0]))
                w_sum = sum(t.w for t in combo)
                d = 1j * w_sum
                if abs(d) * (z_max - z_min) < 1e-12:
                    zint = z_max - z_min
                else:
                    zint = (np.exp(d * z_max) - np.exp(d * z_min)) / d
                total += complex(contraction) * zint
        elif method == "quad":
            def dens(z, regs=regs, ireg=ireg):
                vecs = [w.evaluate_region(ireg, z)[0] for w in weights]
                contraction = phi.components
                for v in vecs:
                    contraction = np.tensordot(contraction, v, axes=([0], [0]))
                return complex(contraction)

            re, _ = quad(lambda z: dens(z).real, z_min, z_max, limit=400)
            im, _ = quad(lambda z: dens(z).imag, z_min, z_max, limit=400)
            total += re + 1j * im
        else:
            raise ValueError("method must be 'exact' or 'quad'")
    value = geom.area * total
    return ScatteringAmplitude(complex(value), True, (float(k_total[0]), float(k_total[1])))
