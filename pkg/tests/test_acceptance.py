"""Acceptance suite: one test per release criterion, at pinned tolerances.

Each test prints a single PASS line with its measured figure; run with
`pytest -v tests/test_acceptance.py` (or `-s` to see the lines inline).
"""

import itertools
import math
import time

import numpy as np
import pytest
from scipy.integrate import simpson

from polmodes import (
    EPS0,
    HBAR,
    ModeClass,
    ModeIndex,
    bulk_branches,
    conjugate_mode,
    default_medium,
    epsilon,
    from_phonon_frequencies,
    homogeneous_box,
    make_mode,
    normalization_integral,
    normalize,
    surface_dispersion_kpar,
    surface_dispersion_omega,
    surface_window_top,
    vacuum_interface,
)
from polmodes.dissipative import (
    bath_kernel_F,
    driven_field,
    flat_bath,
    kramers_kronig_real,
    lossy_epsilon,
    null_bath,
)
from polmodes.modes import interface_continuity, wave_equation_residual
from polmodes.nonlinear import NonlinearTensor, matter_weight, scattering_coefficient
from polmodes.realspace import (
    Grid1D,
    assemble_operator,
    completeness_check,
    self_adjointness_defect,
    solve_spectrum,
    surface_mode_frequency,
)
from polmodes.verify import surface_norm_quadrature_error


def report(name, measured, tolerance, elapsed, budget):
    print(f"PASS  {name}: measured {measured:.3e} (tol {tolerance:.1e}), "
          f"{elapsed:.2f}s (budget {budget:.0f}s)")


def test_criterion_1_bulk_vieta_identities():
    t0 = time.monotonic()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        m = from_phonon_frequencies(rng.uniform(0.3, 3.0), rng.uniform(3.1, 8.0),
                                    rng.uniform(0.1, 10.0))
        k = rng.uniform(0.0, 10.0 * m.omega_L)
        ol, ou = bulk_branches(m, k)
        s = m.omega_L**2 + k**2
        p = (k * m.omega_T) ** 2
        worst = max(worst, abs(ol**2 + ou**2 - s) / s)
        if p > 0:
            worst = max(worst, abs(ol**2 * ou**2 - p) / p)
    elapsed = time.monotonic() - t0
    assert worst < 1e-12
    assert elapsed < 1.0
    report("criterion 1 (bulk Vieta identities)", worst, 1e-12, elapsed, 1)


def test_criterion_2_dispersion_topology(tmp_path):
    t0 = time.monotonic()
    m = default_medium()
    top = surface_window_top(m)

    ks = np.linspace(1e-3, 100.0 * m.omega_T, 2000)
    ol, ou = bulk_branches(m, ks)
    # lower branch: starts at 0, increases monotonically, stays below and
    # approaches the omega_TO asymptote
    assert ol[0] < 1e-3
    assert np.all(np.diff(ol) > 0) and np.all(ol < m.omega_T)
    assert m.omega_T - ol[-1] < 1e-3 * m.omega_T
    # upper branch: from omega_LO upward
    assert ou[0] == pytest.approx(m.omega_L, abs=1e-5)
    assert np.all(ou >= m.omega_L) and np.all(np.diff(ou) > 0)
    # surface branch exists exactly for c k_par >= omega_TO
    from polmodes.errors import BelowLightLineEdge

    with pytest.raises(BelowLightLineEdge):
        surface_dispersion_omega(m, 0.999 * m.omega_T)
    assert surface_dispersion_omega(m, m.omega_T) == m.omega_T
    asym_err = abs(surface_dispersion_omega(m, 100.0 * m.omega_T) - top)
    assert asym_err < 1e-4 * m.omega_T

    # emitted as CSV through the CLI
    import json

    from click.testing import CliRunner

    from polmodes.cli import main

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "material": {
            "layers": [
                {"z_min": -20.0, "z_max": 0.0,
                 "medium": {"omega_TO": 1.0, "omega_LO": 1.2, "rho": 1.0}},
                {"z_min": 0.0, "z_max": 20.0, "medium": None},
            ],
            "box": {"Lz": 40.0, "A": 1.0},
        },
        "sweep": {"k_min": 0.001, "k_max": 100.0, "num": 400},
    }))
    res = CliRunner().invoke(main, ["dispersion", "--config", str(cfg), "--out", str(tmp_path)])
    assert res.exit_code == 0
    lines = (tmp_path / "dispersion.csv").read_text().splitlines()
    assert lines[0] == "class,k_par,k_z,omega"
    surf = [line.split(",") for line in lines[1:] if line.startswith("S,")]
    assert all(float(r[1]) >= m.omega_T for r in surf)
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    report("criterion 2 (dispersion topology + CSV)", asym_err, 1e-4, elapsed, 5)


def test_criterion_3_normalization_consistency():
    t0 = time.monotonic()
    m = default_medium()
    top = surface_window_top(m)
    worst = 0.0
    for w in np.linspace(m.omega_T * 1.003, top * 0.997, 50):
        worst = max(worst, surface_norm_quadrature_error(m, float(w)))
    assert worst < 1e-8
    # TEv closed form exact in the homogeneous limit
    geom = homogeneous_box(None, 12.0)
    mode = normalize(make_mode(geom, ModeIndex(ModeClass.TEv, (0.3, 0.0), 0.7)), geom)
    expected = math.sqrt(1.0 / (2 * EPS0 * HBAR * mode.omega * geom.volume))
    tev_err = abs(mode.norm - expected) / expected
    assert tev_err < 1e-14
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0
    report("criterion 3 (normalization: 50-point surface band + TEv)", worst, 1e-8, elapsed, 10)


def test_criterion_4_wave_equation_and_continuity():
    t0 = time.monotonic()
    m = default_medium()
    geom = vacuum_interface(m, 40.0)
    indices = [
        ModeIndex(ModeClass.TEv, (0.4, 0.1), 0.5),
        ModeIndex(ModeClass.TMv, (0.3, 0.0), 1.0),
        ModeIndex(ModeClass.TEl, (0.5, 0.0), -0.8),
        ModeIndex(ModeClass.TEu, (0.5, 0.0), -0.8),
        ModeIndex(ModeClass.TMl, (0.2, 0.4), -0.7),
        ModeIndex(ModeClass.TMu, (0.2, 0.4), -0.7),
        ModeIndex(ModeClass.S, (surface_dispersion_kpar(m, 1.1), 0.0)),
    ]
    zs = np.linspace(-19.9, 19.9, 1000)
    worst_res, worst_jump = 0.0, 0.0
    for idx in indices:
        mode = make_mode(geom, idx)
        worst_res = max(worst_res, wave_equation_residual(mode.theta, geom, zs))
        worst_res = max(worst_res, wave_equation_residual(conjugate_mode(mode).theta, geom, zs))
        worst_jump = max(worst_jump, max(interface_continuity(mode, geom).values()))
    assert worst_res < 1e-8
    assert worst_jump < 1e-10
    elapsed = time.monotonic() - t0
    report("criterion 4 (wave-equation residuals + continuity)", max(worst_res, worst_jump),
           1e-8, elapsed, 60)


def test_criterion_5_realspace_solver():
    t0 = time.monotonic()
    m = default_medium()
    geom = vacuum_interface(m, 40.0)
    ws = surface_dispersion_omega(m, 2.0)

    # surface eigenvalue at N = 4000, Lz = 40, c k_par = 2 omega_TO
    w4000 = surface_mode_frequency(geom, Grid1D(4000, 40.0), 2.0, sigma=ws * 1.001,
                                   strict_resolution=False)
    surf_err = abs(w4000 - ws) / ws
    assert surf_err < 5e-3

    # O(h^2) convergence: halving h cuts the error by 3.6 to 4.4
    errs = []
    for n in (500, 1000, 2000):
        w = surface_mode_frequency(geom, Grid1D(n, 40.0), 2.0, sigma=ws * 1.001,
                                   strict_resolution=False)
        errs.append(abs(w - ws))
    r1, r2 = errs[0] / errs[1], errs[1] / errs[2]
    assert 3.6 < r1 < 4.4 and 3.6 < r2 < 4.4

    # dense N = 512 reference: pairing, orthonormality, completeness
    op = assemble_operator(geom, Grid1D(512, 40.0), 2.0, "TM", strict_resolution=False)
    sol = solve_spectrum(op)
    pairing = float(np.max(np.abs(np.sort(-sol.omegas) - np.sort(sol.omegas))))
    assert pairing < 1e-10
    gram = sol.vectors.conj().T @ (op.krein @ sol.vectors)
    offdiag = float(np.max(np.abs(gram - np.diag(np.diag(gram)))))
    assert offdiag < 1e-8
    rng = np.random.default_rng(55)
    tv = rng.standard_normal((op.layout.dim, 8)) + 1j * rng.standard_normal((op.layout.dim, 8))
    comp = completeness_check(sol, tv).max_deviation
    assert comp < 1e-6
    elapsed = time.monotonic() - t0
    assert elapsed < 180.0
    report("criterion 5 (real-space solver)",
           max(surf_err, pairing, offdiag, comp), 5e-3, elapsed, 180)
    print(f"      surface err {surf_err:.2e}, ratios ({r1:.2f}, {r2:.2f}), "
          f"pairing {pairing:.1e}, offdiag {offdiag:.1e}, completeness {comp:.1e}")


def test_criterion_6_discrete_self_adjointness():
    t0 = time.monotonic()
    m = default_medium()
    geom = vacuum_interface(m, 40.0)
    worst = 0.0
    for pol in ("TE", "TM"):
        op = assemble_operator(geom, Grid1D(512, 40.0), 2.0, pol, strict_resolution=False)
        scale = np.max(np.abs(op.krein @ op.b0))
        worst = max(worst, self_adjointness_defect(op) / scale)
    assert worst < 1e-12
    elapsed = time.monotonic() - t0
    report("criterion 6 (Krein self-adjointness, PEC boundaries)", worst, 1e-12, elapsed, 60)


def test_criterion_7_nonlinear_scattering():
    t0 = time.monotonic()
    m = default_medium()
    geom = vacuum_interface(m, 40.0)
    arr = np.zeros((3, 3, 3))
    for j in range(3):
        arr[j, j, j] = 1.0
    phi = NonlinearTensor.from_array(arr)
    k = surface_dispersion_kpar(m, 1.05)
    s_plus = normalize(make_mode(geom, ModeIndex(ModeClass.S, (k, 0.0))), geom)
    s_minus = normalize(make_mode(geom, ModeIndex(ModeClass.S, (-k, 0.0))), geom)
    bulk = normalize(make_mode(geom, ModeIndex(ModeClass.TMv, (0.0, 0.0), 0.7)), geom)

    # momentum selection: exact flagged zero
    violating = scattering_coefficient([s_plus, s_plus, bulk], phi, geom)
    assert violating.value == 0 and not violating.momentum_ok

    # permutation symmetry to 1e-12
    base = scattering_coefficient([s_plus, s_minus, bulk], phi, geom).value
    perm_worst = max(
        abs(scattering_coefficient(list(p), phi, geom).value - base)
        for p in itertools.permutations([s_plus, s_minus, bulk])
    ) / abs(base)
    assert perm_worst < 1e-12

    # brute-force 3D quadrature oracle on a coarse grid, 1e-4 relative
    weights = [matter_weight(md) for md in (s_plus, s_minus, bulk)]
    nx, nz = 21, 3201
    xs = np.linspace(0.0, 1.0, nx)      # unit in-plane box, area A = 1
    zs = np.linspace(-20.0, 0.0, nz)
    vecs = [w.evaluate_region(0, zs) for w in weights]  # matter region closure
    dens = np.einsum("jkl,zj,zk,zl->z", phi.components, *vecs)
    # momentum-conserving tuple: the in-plane phase product is exactly 1
    plane = np.ones((nx, nx))
    area = simpson(simpson(plane, x=xs, axis=0), x=xs)
    brute = area * simpson(dens, x=zs)
    brute_err = abs(brute - base) / abs(base)
    assert brute_err < 1e-4
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    report("criterion 7 (scattering coefficients)", max(perm_worst, brute_err), 1e-4, elapsed, 60)


def test_criterion_8_dissipative():
    t0 = time.monotonic()
    m = default_medium()

    # eps_tilde -> eps to 1e-12 as upsilon -> 0
    limit_worst = 0.0
    for w in (0.6, 1.1, 1.9):
        e0 = epsilon(m, w)
        limit_worst = max(limit_worst, abs(lossy_epsilon(m, null_bath(m), w) - e0))
        limit_worst = max(limit_worst, abs(lossy_epsilon(m, flat_bath(m, 5e-8, 0.5, 3.0), w) - e0))
    assert limit_worst < 1e-12

    # Kramers-Kronig within 1% over [0.2, 3] omega_T
    from scipy.optimize import brentq

    bath = flat_bath(m, 0.05, 0.5, 3.0)
    w_res = brentq(lambda w: m.omega_T**2 - w**2 - bath_kernel_F(bath, w), 0.6, 1.4)
    kk_worst = 0.0
    for w in np.linspace(0.2, 3.0, 20):
        if abs(w - w_res) < 0.03 or min(abs(w - 0.5), abs(w - 3.0)) < 1e-9:
            continue
        target = lossy_epsilon(m, bath, float(w)).real - 1.0
        rec = kramers_kronig_real(lambda z: lossy_epsilon(m, bath, z).imag, (0.5, 3.0),
                                  float(w), breakpoints=[w_res - 0.02, w_res + 0.02])
        kk_worst = max(kk_worst, abs(rec - target) / (1.0 + abs(target)))
    assert kk_worst < 1e-2

    # driven-field decay constant matches (omega/c) Im sqrt(eps_tilde) to 1e-8
    geom = homogeneous_box(m, 100.0)
    omega = 1.1
    sol = driven_field(geom, bath, omega, [(0.0, 1.0)])
    k = np.sqrt(complex(omega**2 * lossy_epsilon(m, bath, omega)))
    zs = np.linspace(2.0, 18.0, 33)
    slope = np.polyfit(zs, np.log(np.abs(sol.evaluate(zs))), 1)[0]
    decay_err = abs(-slope - abs(k.imag)) / abs(k.imag)
    assert decay_err < 1e-8
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    report("criterion 8 (dissipative response)", max(limit_worst, kk_worst, decay_err),
           1e-2, elapsed, 60)
