"""Direct discretization of the first-order light-matter eigensystem on a 1D grid.

At fixed in-plane wavevector k_par (folded in analytically, d/dx -> -i k_par)
and fixed polarization, the coupled equations

    omega alpha = -i c^2 curl beta + i [kappa gamma]^T / eps0
    omega beta  =  i curl alpha
    omega gamma =  i eta / rho
    omega eta   =  i kappa c^2 curl beta - i rho omega_L^2 gamma

become a matrix eigenproblem B0 Psi = omega Psi for the stacked coefficients
Psi = (alpha, beta, gamma, eta). Fields live on a two-point staggered grid so
that discrete curls are exact mutual adjoints:

    TE sector:  alpha_perp at interior nodes, beta_par at half points,
                beta_z at interior nodes, matter fields at matter nodes.
    TM sector:  alpha_par at interior nodes, alpha_z at half points,
                beta_perp at half points, matter par fields at matter nodes,
                matter z fields at matter half points.

Boundary conditions are PEC-type: tangential alpha vanishes at the box walls
(those degrees of freedom are eliminated), which satisfies the self-adjointness
surface condition identically. Material coefficients are cellwise constant;
integer-node values are arithmetic means of the two adjacent cells, so a
vacuum/matter boundary node carries half the coupling response, matching a
lumped first-order-element treatment and preserving O(h^2) eigenvalue
convergence.

The transverse projection [.]^T in the alpha equation is a discrete Helmholtz
decomposition: P = I - GRAD LAP^{-1} DIV with a Dirichlet Poisson problem,
where GRAD = -DIV^H so P is an orthogonal projector and div curl = 0 holds
exactly (entrywise float cancellation). The assembled pair (B0, K), with K the
indefinite inner-product matrix, then satisfies K B0 = B0^H K to machine zeros.

Physical subspace: alpha is restricted to ker(DIV) minus ker(curl) (the
latter removes the non-dynamical k_par = 0 capacitor direction), beta to
range(curl). On that subspace the energy form A = K B0 is positive definite
(this is the omega_T > 0 stability condition), so the spectrum is obtained
from an equivalent Hermitian problem via a Cholesky factor: eigenvalues come
out real, Krein orthonormality and the signed completeness relation hold to
roundoff, and the spectrum splits into exact +/- pairs.

Large production solves (surface-mode sweeps) use an unprojected sparse
variant with shift-invert: away from omega = 0 its eigenvalues coincide with
the projected operator's (the longitudinal alpha component is slaved and can
be removed afterwards by one tridiagonal solve).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    DegenerateKreinNorm,
    IncompleteSpectrum,
    ResolutionTooCoarse,
    SolverContractViolation,
)
from .media import C, EPS0, HBAR, LayeredGeometry, MediumParams, epsilon

_NULL_TOL = 1e-9


@dataclass(frozen=True)
class Grid1D:
    """Uniform staggered grid with n cells over [-lz/2, lz/2]."""

    n: int
    lz: float
    bc: str = "pec"

    def __post_init__(self):
        if self.n < 16:
            raise ValueError("grid needs at least 16 cells")
        if self.bc != "pec":
            raise ValueError("only PEC boundaries are implemented")

    @property
    def h(self) -> float:
        return self.lz / self.n

    @property
    def nodes(self) -> np.ndarray:
        return -self.lz / 2 + self.h * np.arange(self.n + 1)

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[1:-1]

    @property
    def halves(self) -> np.ndarray:
        return -self.lz / 2 + self.h * (np.arange(self.n) + 0.5)


@dataclass
class _Materials:
    """Cellwise media sampled onto staggered locations."""

    kappa_node: np.ndarray  # interior nodes
    rho_node: np.ndarray
    omega_T_node: np.ndarray
    kappa_half: np.ndarray  # half points
    rho_half: np.ndarray
    omega_T_half: np.ndarray

    @staticmethod
    def omega_L2(kappa, rho, omega_T):
        out = omega_T**2
        mask = rho > 0
        out = np.where(mask, out + np.divide(kappa**2, EPS0 * rho, where=mask, out=np.zeros_like(rho)), out)
        return out


def _sample_materials(geom: LayeredGeometry, grid: Grid1D) -> _Materials:
    if abs(geom.lz - grid.lz) > 1e-9 * geom.lz:
        raise ValueError("grid length must match the geometry box")
    for lay in geom.layers:
        for zb in (lay.z_min, lay.z_max):
            j = (zb + grid.lz / 2) / grid.h
            if abs(j - round(j)) > 1e-9:
                raise ValueError("material discontinuities must be grid-aligned")
    centers = grid.halves
    kap = np.zeros(grid.n)
    rho = np.zeros(grid.n)
    w_t = np.zeros(grid.n)
    for j, zc in enumerate(centers):
        med = geom.medium_at(zc)
        if med is not None:
            kap[j], rho[j], w_t[j] = med.kappa, med.rho, med.omega_T
    kap_n = 0.5 * (kap[:-1] + kap[1:])
    rho_n = 0.5 * (rho[:-1] + rho[1:])
    w_t_n = np.zeros(grid.n - 1)
    both = (rho[:-1] > 0) & (rho[1:] > 0)
    w_t_n[both] = 0.5 * (w_t[:-1] + w_t[1:])[both]
    left_only = (rho[:-1] > 0) & ~(rho[1:] > 0)
    right_only = ~(rho[:-1] > 0) & (rho[1:] > 0)
    w_t_n[left_only] = w_t[:-1][left_only]
    w_t_n[right_only] = w_t[1:][right_only]
    return _Materials(kap_n, rho_n, w_t_n, kap, rho, w_t)


@dataclass
class FieldLayout:
    """Block names, slices and staggered positions of the stacked state vector."""

    polarization: str
    blocks: List[str]
    slices: Dict[str, slice]
    positions: Dict[str, np.ndarray]
    matter_index: Dict[str, np.ndarray]
    dim: int

    def block(self, name: str, vec: np.ndarray) -> np.ndarray:
        return vec[..., self.slices[name]]


def _build_layout(grid: Grid1D, mats: _Materials, polarization: str) -> FieldLayout:
    n = grid.n
    m_nodes = np.nonzero(mats.rho_node > 0)[0]
    m_half = np.nonzero(mats.rho_half > 0)[0]
    if polarization == "TE":
        sizes = [("alpha", n - 1), ("beta_par", n), ("beta_z", n - 1),
                 ("gamma", m_nodes.size), ("eta", m_nodes.size)]
        positions = {
            "alpha": grid.interior_nodes, "beta_par": grid.halves,
            "beta_z": grid.interior_nodes,
            "gamma": grid.interior_nodes[m_nodes], "eta": grid.interior_nodes[m_nodes],
        }
        matter = {"gamma": m_nodes, "eta": m_nodes}
    elif polarization == "TM":
        sizes = [("alpha_par", n - 1), ("alpha_z", n), ("beta", n),
                 ("gamma_par", m_nodes.size), ("gamma_z", m_half.size),
                 ("eta_par", m_nodes.size), ("eta_z", m_half.size)]
        positions = {
            "alpha_par": grid.interior_nodes, "alpha_z": grid.halves, "beta": grid.halves,
            "gamma_par": grid.interior_nodes[m_nodes], "gamma_z": grid.halves[m_half],
            "eta_par": grid.interior_nodes[m_nodes], "eta_z": grid.halves[m_half],
        }
        matter = {"gamma_par": m_nodes, "gamma_z": m_half,
                  "eta_par": m_nodes, "eta_z": m_half}
    else:
        raise ValueError("polarization must be 'TE' or 'TM'")
    slices = {}
    off = 0
    names = []
    for name, size in sizes:
        slices[name] = slice(off, off + size)
        names.append(name)
        off += size
    return FieldLayout(polarization, names, slices, positions, matter, off)


def _diff_half_to_int(n: int, h: float) -> np.ndarray:
    """(n-1) x n forward difference taking half-point values to interior nodes."""
    d = np.zeros((n - 1, n))
    for j in range(n - 1):
        d[j, j] = -1.0 / h
        d[j, j + 1] = 1.0 / h
    return d


@dataclass
class _Operators:
    """Polarization-specific building blocks (dense)."""

    curl_ba: np.ndarray  # beta-space -> alpha-space  (C)
    curl_ab: np.ndarray  # alpha-space -> beta-space  (G = C^H)
    div: Optional[np.ndarray]  # alpha-space -> potential space, or None (TE)
    grad: Optional[np.ndarray]
    lap: Optional[np.ndarray]
    alpha_names: List[str]
    beta_names: List[str]


def _build_operators(grid: Grid1D, k_par: float, polarization: str) -> _Operators:
    n, h = grid.n, grid.h
    d_hi = _diff_half_to_int(n, h)
    if polarization == "TE":
        c = np.hstack([d_hi, 1j * k_par * np.eye(n - 1)])
        g = c.conj().T
        return _Operators(c, g, None, None, None, ["alpha"], ["beta_par", "beta_z"])
    c = np.vstack([-d_hi, -1j * k_par * np.eye(n)])
    g = c.conj().T
    div = np.hstack([-1j * k_par * np.eye(n - 1), d_hi])
    grad = -div.conj().T
    lap = div @ grad
    return _Operators(c, g, div, grad, lap, ["alpha_par", "alpha_z"], ["beta"])


def _matter_embedding(layout: FieldLayout, ops: _Operators, mats: _Materials, grid: Grid1D) -> np.ndarray:
    """alpha-space x matter-space matrix with kappa at matching positions."""
    a_dim = sum(layout.slices[nm].stop - layout.slices[nm].start for nm in ops.alpha_names)
    if layout.polarization == "TE":
        idx = layout.matter_index["gamma"]
        e = np.zeros((a_dim, idx.size))
        for col, j in enumerate(idx):
            e[j, col] = mats.kappa_node[j]
        return e
    idx_p = layout.matter_index["gamma_par"]
    idx_z = layout.matter_index["gamma_z"]
    n = grid.n
    e = np.zeros((2 * n - 1, idx_p.size + idx_z.size))
    for col, j in enumerate(idx_p):
        e[j, col] = mats.kappa_node[j]
    for col, j in enumerate(idx_z):
        e[n - 1 + j, idx_p.size + col] = mats.kappa_half[j]
    return e


def _matter_diagonals(layout: FieldLayout, mats: _Materials):
    """(1/rho, rho*omega_L^2) at every matter degree of freedom, stacked."""
    if layout.polarization == "TE":
        idx = layout.matter_index["gamma"]
        rho = mats.rho_node[idx]
        wl2 = _Materials.omega_L2(mats.kappa_node[idx], rho, mats.omega_T_node[idx])
        return 1.0 / rho, rho * wl2
    idx_p = layout.matter_index["gamma_par"]
    idx_z = layout.matter_index["gamma_z"]
    rho = np.concatenate([mats.rho_node[idx_p], mats.rho_half[idx_z]])
    kap = np.concatenate([mats.kappa_node[idx_p], mats.kappa_half[idx_z]])
    w_t = np.concatenate([mats.omega_T_node[idx_p], mats.omega_T_half[idx_z]])
    wl2 = _Materials.omega_L2(kap, rho, w_t)
    return 1.0 / rho, rho * wl2


def _resolution_check(geom: LayeredGeometry, grid: Grid1D, k_par: float, strict: bool):
    k_scale = abs(k_par)
    for lay in geom.layers:
        if lay.medium is not None:
            m = lay.medium
            k_scale = max(k_scale, m.omega_L * math.sqrt(epsilon(m, 0.0)) / C)
    if k_scale == 0:
        return
    lam_min = 2 * math.pi / k_scale
    if grid.h > lam_min / 20:
        msg = (f"h = {grid.h:.4g} exceeds lambda_min/20 = {lam_min / 20:.4g}; "
               "eigenvalues may be under-resolved")
        if strict:
            raise ResolutionTooCoarse(msg)
        warnings.warn(msg)


@dataclass
class DiscreteOperator:
    """Assembled eigensystem: B0 (projected), Krein matrix K, and metadata."""

    geom: LayeredGeometry
    grid: Grid1D
    k_par: float
    polarization: str
    layout: FieldLayout
    b0: np.ndarray
    krein: np.ndarray
    ops: _Operators = field(repr=False)
    mats: _Materials = field(repr=False)
    kappa_embed: np.ndarray = field(repr=False)


def assemble_operator(
    geom: LayeredGeometry,
    grid: Grid1D,
    k_par: float,
    polarization: str,
    strict_resolution: bool = True,
) -> DiscreteOperator:
    """Dense reference assembly of B0 and the Krein inner-product matrix."""
    _resolution_check(geom, grid, k_par, strict_resolution)
    mats = _sample_materials(geom, grid)
    layout = _build_layout(grid, mats, polarization)
    ops = _build_operators(grid, k_par, polarization)
    inv_rho, rho_wl2 = _matter_diagonals(layout, mats)
    e_kappa = _matter_embedding(layout, ops, mats, grid)

    dim = layout.dim
    b0 = np.zeros((dim, dim), dtype=complex)
    a_sl = slice(layout.slices[ops.alpha_names[0]].start, layout.slices[ops.alpha_names[-1]].stop)
    b_sl = slice(layout.slices[ops.beta_names[0]].start, layout.slices[ops.beta_names[-1]].stop)
    g_names = [nm for nm in layout.blocks if nm.startswith("gamma")]
    e_names = [nm for nm in layout.blocks if nm.startswith("eta")]
    g_sl = slice(layout.slices[g_names[0]].start, layout.slices[g_names[-1]].stop)
    e_sl = slice(layout.slices[e_names[0]].start, layout.slices[e_names[-1]].stop)

    c_mat, g_mat = ops.curl_ba, ops.curl_ab
    # transverse projection of the matter coupling (TE coupling is already transverse)
    if ops.div is not None and e_kappa.shape[1] > 0:
        x = sla.solve(ops.lap, ops.div @ e_kappa, assume_a="her")
        e_kappa_t = e_kappa - ops.grad @ x
    else:
        e_kappa_t = e_kappa

    b0[a_sl, b_sl] = -1j * C**2 * c_mat
    b0[a_sl, g_sl] = (1j / EPS0) * e_kappa_t
    b0[b_sl, a_sl] = 1j * g_mat
    if inv_rho.size:
        b0[g_sl, e_sl] = 1j * np.diag(inv_rho)
        b0[e_sl, b_sl] = 1j * C**2 * (e_kappa.conj().T @ c_mat)
        b0[e_sl, g_sl] = -1j * np.diag(rho_wl2)

    w = HBAR * grid.h * geom.area
    krein = np.zeros((dim, dim), dtype=complex)
    krein[a_sl, b_sl] = -1j * w / 1.0 * c_mat  # 1/mu0 = 1
    krein[b_sl, a_sl] = 1j * w * g_mat
    if inv_rho.size:
        nm = inv_rho.size
        krein[g_sl, e_sl] = 1j * w * np.eye(nm)
        krein[e_sl, g_sl] = -1j * w * np.eye(nm)

    return DiscreteOperator(geom, grid, k_par, polarization, layout, b0, krein, ops, mats, e_kappa)


def self_adjointness_defect(op: DiscreteOperator) -> float:
    """max |K B0 - B0^H K| entry: zero for an exactly Krein-self-adjoint pair."""
    m = op.krein @ op.b0 - op.b0.conj().T @ op.krein
    return float(np.max(np.abs(m)))


def _physical_basis(op: DiscreteOperator) -> np.ndarray:
    """Orthonormal basis (columns) of the dynamical subspace of the full state space."""
    layout, ops = op.layout, op.ops
    a_sl = slice(layout.slices[ops.alpha_names[0]].start, layout.slices[ops.alpha_names[-1]].stop)
    b_sl = slice(layout.slices[ops.beta_names[0]].start, layout.slices[ops.beta_names[-1]].stop)
    a_dim = a_sl.stop - a_sl.start
    if ops.div is None:
        z = np.eye(a_dim)
    else:
        z = sla.null_space(ops.div)
    u = ops.curl_ab @ z
    if u.shape[1]:
        _, s, vh = sla.svd(u, full_matrices=False)
        keep = s > _NULL_TOL * (s[0] if s.size else 1.0)
        q_alpha = z @ vh.conj().T[:, keep]
    else:
        q_alpha = z[:, :0]
    q_beta = sla.orth(ops.curl_ab, rcond=_NULL_TOL)
    if q_alpha.shape[1] != q_beta.shape[1]:
        raise SolverContractViolation(
            f"alpha/beta physical dimensions differ: {q_alpha.shape[1]} vs {q_beta.shape[1]}"
        )
    dim = layout.dim
    n_phys = q_alpha.shape[1] + q_beta.shape[1] + (dim - (a_sl.stop - a_sl.start) - (b_sl.stop - b_sl.start))
    q = np.zeros((dim, n_phys), dtype=complex)
    col = 0
    q[a_sl, col:col + q_alpha.shape[1]] = q_alpha
    col += q_alpha.shape[1]
    q[b_sl, col:col + q_beta.shape[1]] = q_beta
    col += q_beta.shape[1]
    rest = dim - b_sl.stop
    if rest:
        q[b_sl.stop:, col:col + rest] = np.eye(rest)
    return q


@dataclass
class DiscreteEigenSolution:
    """Full or windowed spectrum with Krein-normalized eigenvectors (full-space)."""

    operator: DiscreteOperator
    omegas: np.ndarray
    vectors: np.ndarray  # columns, Krein-normalized: <<v|v>> = sgn(omega)
    basis: np.ndarray = field(repr=False)
    complete: bool = True

    @property
    def krein(self) -> np.ndarray:
        return self.operator.krein


def solve_spectrum(
    op: DiscreteOperator,
    window: Optional[Tuple[float, float]] = None,
    norm_tol: float = 1e-10,
) -> DiscreteEigenSolution:
    """All eigenpairs of the restricted operator (optionally filtered to a window).

    Solved via the equivalent Hermitian pencil: A = K B0 restricted to the
    physical subspace is positive definite, so with the Cholesky factor
    A = L L^H the Hermitian matrix L^{-1} K L^{-H} has eigenvalues 1/omega.
    Eigenvectors are returned Krein-normalized, <<v|v>> = sgn(omega); a
    degenerate indefinite norm raises DegenerateKreinNorm.
    """
    q = _physical_basis(op)
    b_red = q.conj().T @ (op.b0 @ q)
    k_red = q.conj().T @ (op.krein @ q)
    a = k_red @ b_red
    asym = np.max(np.abs(a - a.conj().T))
    scale = max(np.max(np.abs(a)), 1e-300)
    if asym > 1e-10 * scale:
        raise SolverContractViolation(f"energy form not Hermitian: defect {asym}")
    a = 0.5 * (a + a.conj().T)
    try:
        l_fac = sla.cholesky(a, lower=True)
    except sla.LinAlgError as exc:
        raise SolverContractViolation(
            "energy form not positive definite (omega_T > 0 violated or null mode present)"
        ) from exc
    m_half = sla.solve_triangular(l_fac, k_red, lower=True)
    m = sla.solve_triangular(l_fac, m_half.conj().T, lower=True).conj().T
    m = 0.5 * (m + m.conj().T)
    mu, phi = sla.eigh(m)
    if np.any(np.abs(mu) < norm_tol):
        bad = int(np.argmin(np.abs(mu)))
        raise DegenerateKreinNorm(f"eigenvector {bad} has vanishing indefinite norm")
    omegas = 1.0 / mu
    psi = sla.solve_triangular(l_fac.conj().T, phi, lower=False)
    psi = psi * np.sqrt(np.abs(omegas))[None, :]
    vectors = q @ psi
    # reattach slaved components invisible to both K and the reduced basis
    resid = op.b0 @ vectors - vectors * omegas[None, :]
    resid -= q @ (q.conj().T @ resid)
    vectors = vectors + resid / omegas[None, :]
    order = np.argsort(omegas)
    omegas, vectors = omegas[order], vectors[:, order]
    complete = True
    if window is not None:
        lo, hi = window
        sel = (omegas >= lo) & (omegas <= hi)
        omegas, vectors = omegas[sel], vectors[:, sel]
        complete = bool(sel.all())
    return DiscreteEigenSolution(op, omegas, vectors, q, complete)


def krein_inner(sol: DiscreteEigenSolution, m: int, n: int) -> complex:
    """Discrete indefinite inner product <<Psi_m | Psi_n>> of two eigenvectors."""
    return complex(sol.vectors[:, m].conj() @ (sol.krein @ sol.vectors[:, n]))


@dataclass
class CompletenessReport:
    max_deviation: float
    deviations: np.ndarray


def completeness_check(sol: DiscreteEigenSolution, test_vectors: np.ndarray) -> CompletenessReport:
    """Signed resolution of identity applied to test vectors.

    Verifies sum_n sgn(omega_n) |Psi_n>> <<Psi_n| = identity on the physical
    subspace. Test vectors and the reconstruction are both compared there:
    Krein-null directions (present only as slaved components of k_par = 0
    eigenvectors) carry no spectral weight and are excluded by construction.
    Requires the complete spectrum.
    """
    if not sol.complete or sol.omegas.size != sol.basis.shape[1]:
        raise IncompleteSpectrum(
            f"need all {sol.basis.shape[1]} eigenpairs, have {sol.omegas.size}"
        )
    tv = np.atleast_2d(np.asarray(test_vectors, dtype=complex))
    if tv.shape[0] != sol.vectors.shape[0]:
        tv = tv.T
    q = sol.basis
    proj = q @ (q.conj().T @ tv)
    signs = np.sign(sol.omegas)
    coeff = sol.vectors.conj().T @ (sol.krein @ proj)
    recon = sol.vectors @ (signs[:, None] * coeff)
    recon = q @ (q.conj().T @ recon)
    devs = np.linalg.norm(recon - proj, axis=0) / np.maximum(np.linalg.norm(proj, axis=0), 1e-300)
    return CompletenessReport(float(devs.max()), devs)


# ---------------------------------------------------------------------------
# sparse windowed path for production sweeps


def _sparse_diff_half_to_int(n: int, h: float) -> sp.csr_matrix:
    return sp.diags([-1.0 / h, 1.0 / h], [0, 1], shape=(n - 1, n), format="csr")


def _sparse_operators(grid: Grid1D, k_par: float, polarization: str):
    """Sparse (C, G) curls matching _build_operators."""
    n, h = grid.n, grid.h
    d_hi = _sparse_diff_half_to_int(n, h)
    if polarization == "TE":
        c = sp.hstack([d_hi, 1j * k_par * sp.eye(n - 1)], format="csr")
    else:
        c = sp.vstack([-d_hi, -1j * k_par * sp.eye(n)], format="csr")
    return c, c.conj().T.tocsr()


def _sparse_matter_embedding(layout: FieldLayout, mats: _Materials, grid: Grid1D) -> sp.csr_matrix:
    n = grid.n
    if layout.polarization == "TE":
        idx = layout.matter_index["gamma"]
        rows, cols, vals = idx, np.arange(idx.size), mats.kappa_node[idx]
        return sp.csr_matrix((vals, (rows, cols)), shape=(n - 1, idx.size))
    idx_p = layout.matter_index["gamma_par"]
    idx_z = layout.matter_index["gamma_z"]
    rows = np.concatenate([idx_p, n - 1 + idx_z])
    cols = np.arange(idx_p.size + idx_z.size)
    vals = np.concatenate([mats.kappa_node[idx_p], mats.kappa_half[idx_z]])
    return sp.csr_matrix((vals, (rows, cols)), shape=(2 * n - 1, idx_p.size + idx_z.size))


def assemble_sparse(
    geom: LayeredGeometry,
    grid: Grid1D,
    k_par: float,
    polarization: str,
    strict_resolution: bool = True,
):
    """Unprojected sparse B0 (CSC) plus layout, for shift-invert windowed solves.

    Away from omega = 0 the spectrum coincides with the projected dense
    operator; eigenvectors differ only by a slaved longitudinal alpha
    component.
    """
    _resolution_check(geom, grid, k_par, strict_resolution)
    mats = _sample_materials(geom, grid)
    layout = _build_layout(grid, mats, polarization)
    c_mat, g_mat = _sparse_operators(grid, k_par, polarization)
    inv_rho, rho_wl2 = _matter_diagonals(layout, mats)
    e_kappa = _sparse_matter_embedding(layout, mats, grid)

    a_dim = c_mat.shape[0]
    b_dim = c_mat.shape[1]
    m_dim = inv_rho.size
    zero_aa = sp.csr_matrix((a_dim, a_dim))
    blocks = [
        [zero_aa, -1j * C**2 * c_mat, (1j / EPS0) * e_kappa, None],
        [1j * g_mat, None, None, None],
        [None, None, None, 1j * sp.diags(inv_rho)] if m_dim else None,
        [None, 1j * C**2 * (e_kappa.conj().T @ c_mat), -1j * sp.diags(rho_wl2), None] if m_dim else None,
    ]
    blocks = [row for row in blocks if row is not None]
    if not m_dim:
        blocks = [row[:2] for row in blocks]
    b0 = sp.bmat(blocks, format="csc", dtype=complex)
    if b0.shape != (layout.dim, layout.dim):
        raise SolverContractViolation("sparse assembly dimension mismatch")
    return b0, layout


def solve_windowed(
    geom: LayeredGeometry,
    grid: Grid1D,
    k_par: float,
    polarization: str,
    sigma: float,
    count: int = 1,
    strict_resolution: bool = True,
    tol: float = 1e-10,
    maxiter: int = 200,
):
    """Eigenvalues nearest sigma via sparse shift-invert on the unprojected system.

    Block inverse subspace iteration with Rayleigh-Ritz extraction on one LU
    factorization of (B0 - sigma). Robust against the large near-degenerate
    matter clusters that stall Krylov solvers here; intended for isolated
    eigenvalues (count small), e.g. surface-mode sweeps. Returns (omegas,
    vectors, layout) sorted by |omega - sigma|; every returned pair satisfies
    ||B0 v - omega v|| <= tol * max(|sigma|, 1) * ||v||.
    """
    b0, layout = assemble_sparse(geom, grid, k_par, polarization, strict_resolution)
    n = layout.dim
    block = min(n, count + 4)
    lu = spla.splu((b0 - sigma * sp.eye(n, format="csc")).tocsc())
    rng = np.random.default_rng(7)
    x = rng.standard_normal((n, block)) + 1j * rng.standard_normal((n, block))
    scale = max(abs(sigma), 1.0)
    for _ in range(maxiter):
        x = lu.solve(x)
        x, _ = np.linalg.qr(x)
        bx = b0 @ x
        h = x.conj().T @ bx
        vals, y = np.linalg.eig(h)
        order = np.argsort(np.abs(vals - sigma))
        vals, y = vals[order], y[:, order]
        vecs = x @ y[:, :count]
        vecs /= np.linalg.norm(vecs, axis=0)[None, :]
        resid = np.linalg.norm(b0 @ vecs - vecs * vals[None, :count], axis=0)
        if np.all(resid[:count] <= tol * scale):
            break
    else:
        raise SolverContractViolation(
            f"windowed solve did not converge: residuals {resid[:count]}"
        )
    vals = vals[:count]
    if np.max(np.abs(vals.imag)) > 1e-8 * scale:
        raise SolverContractViolation(f"complex eigenvalue from shift-invert: {vals}")
    return vals.real, vecs, layout


def surface_mode_frequency(
    geom: LayeredGeometry,
    grid: Grid1D,
    k_par: float,
    sigma: float,
    strict_resolution: bool = True,
) -> float:
    """Discrete surface-mode eigenfrequency: nearest TM eigenvalue to sigma."""
    omegas, _, _ = solve_windowed(geom, grid, k_par, "TM", sigma, 1, strict_resolution)
    return float(omegas[0])


def _half_to_node(vals: np.ndarray) -> np.ndarray:
    """Average half-point samples onto the n+1 nodes (copy ends outward)."""
    out = np.zeros(vals.size + 1, dtype=vals.dtype)
    out[1:-1] = 0.5 * (vals[:-1] + vals[1:])
    out[0], out[-1] = vals[0], vals[-1]
    return out


def reconstruct_node_fields(op: DiscreteOperator, vec: np.ndarray, omega: float) -> Dict[str, np.ndarray]:
    """Interpolate one eigenvector onto grid nodes as 3-vector component arrays.

    Returns arrays of shape (n+1, 3) keyed 'theta', 'alpha', 'beta', 'gamma',
    'eta', with in-plane components resolved along (e_par, e_perp, e_z) for
    k_par along x. theta is reconstructed as alpha plus the longitudinal part
    of the matter coupling, i/(omega eps0) [kappa gamma]^L.
    """
    lay, grid = op.layout, op.grid
    n = grid.n
    out = {name: np.zeros((n + 1, 3), dtype=complex) for name in
           ("theta", "alpha", "beta", "gamma", "eta")}

    def pad_interior(v):
        full = np.zeros(n + 1, dtype=complex)
        full[1:-1] = v
        return full

    if op.polarization == "TE":
        a = lay.block("alpha", vec)
        out["alpha"][:, 1] = pad_interior(a)
        out["beta"][:, 0] = _half_to_node(lay.block("beta_par", vec))
        out["beta"][:, 2] = pad_interior(lay.block("beta_z", vec))
        for name, col in (("gamma", 1), ("eta", 1)):
            full = np.zeros(n - 1, dtype=complex)
            full[lay.matter_index[name]] = lay.block(name, vec)
            out[name][:, col] = pad_interior(full)
        out["theta"] = out["alpha"].copy()  # the TE matter coupling is transverse
        return out

    a_par = lay.block("alpha_par", vec)
    a_z = lay.block("alpha_z", vec)
    out["alpha"][:, 0] = pad_interior(a_par)
    out["alpha"][:, 2] = _half_to_node(a_z)
    out["beta"][:, 1] = _half_to_node(lay.block("beta", vec))
    for base in ("gamma", "eta"):
        full_p = np.zeros(n - 1, dtype=complex)
        full_p[lay.matter_index[f"{base}_par"]] = lay.block(f"{base}_par", vec)
        out[base][:, 0] = pad_interior(full_p)
        full_z = np.zeros(n, dtype=complex)
        full_z[lay.matter_index[f"{base}_z"]] = lay.block(f"{base}_z", vec)
        out[base][:, 2] = _half_to_node(full_z)
    # theta = alpha + i/(omega eps0) * longitudinal part of kappa*gamma
    g_names = [nm for nm in lay.blocks if nm.startswith("gamma")]
    g_sl = slice(lay.slices[g_names[0]].start, lay.slices[g_names[-1]].stop)
    kg = op.kappa_embed @ vec[g_sl]
    x = sla.solve(op.ops.lap, op.ops.div @ kg, assume_a="her")
    kg_long = op.ops.grad @ x
    corr = (1j / (omega * EPS0)) * kg_long
    out["theta"][:, 0] = out["alpha"][:, 0] + pad_interior(corr[: n - 1])
    out["theta"][:, 2] = out["alpha"][:, 2] + _half_to_node(corr[n - 1:])
    out["theta"][:, 1] = out["alpha"][:, 1]
    return out
