"""Acceptance battery: one test per shipped guarantee, with a printed
PASS/FAIL line each (run with -s to see the lines for passing tests too).

Grid solutions are cached at module level so the waveform criteria share
the integration work.
"""
import math
import time

import numpy as np

from drivenatom import Params, epsilon_zero
from drivenatom.cli import main as cli_main
from drivenatom.floquet import floquet_data, nu_from_monodromy, solve_recurrence
from drivenatom.ode import bloch_residuals, dipole_inversion, integrate_uv, solve_window
from drivenatom.spectrum import (
    D_DOWN,
    D_ODD,
    DIPOLE_FAMILIES,
    INVERSION_FAMILIES,
    amps_by_projection,
    dipole_amps_cf,
    inversion_amps,
    reconstruct,
    sum_rule_residual,
)
from drivenatom.wkb import fit_sawtooth, wkb_dipole_amps, wkb_dipole_inversion, wkb_fundamental_dipole_amp, wkb_nu, wkb_omega

GRID_VALUES = (0.5, 1.0, 2.0, 5.0)

_solutions: dict = {}
_grid_elapsed: list = []


def _report(n: int, ok: bool, detail: str) -> None:
    print(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {n}: {detail}"


def _grid_solution(gamma: float, eps: float):
    key = (gamma, eps)
    if key not in _solutions:
        t0 = time.perf_counter()
        _solutions[key] = solve_window(Params(gamma=gamma, epsilon=eps), 2.0 * math.pi)
        _grid_elapsed.append(time.perf_counter() - t0)
    return _solutions[key]


def test_criterion_01_sawtooth_half_period_value() -> None:
    epsilon_zero(1.0)  # warm up
    t0 = time.perf_counter()
    n = 200
    for _ in range(n):
        value = epsilon_zero(1.0)
    per_call = (time.perf_counter() - t0) / n
    dev = abs(value - 0.596086)
    ok = dev <= 1e-5 and per_call < 1e-3
    _report(1, ok, f"epsilon_zero(1)={value!r} dev={dev:.2e} (tol 1e-5), {per_call * 1e6:.1f} us/call (< 1 ms)")


def test_criterion_02_first_integral_grid() -> None:
    worst_fi = worst_dr = 0.0
    for g in GRID_VALUES:
        for e in GRID_VALUES:
            sol = _grid_solution(g, e)
            worst_fi = max(worst_fi, sol.first_integral_dev)
            worst_dr = max(worst_dr, sol.derivative_relation_dev)
    elapsed = sum(_grid_elapsed)
    ok = worst_fi <= 1e-9 and worst_dr <= 1e-8 and elapsed < 10.0
    _report(2, ok, f"first integral {worst_fi:.2e} (tol 1e-9), derivative relations {worst_dr:.2e} (tol 1e-8), {elapsed:.1f} s (< 10 s)")


def test_criterion_03_monodromy_identity() -> None:
    worst = 0.0
    for g in GRID_VALUES:
        for e in GRID_VALUES:
            sol = _grid_solution(g, e)
            s = e * float(np.real(sol.u_quarter * np.conj(sol.v_quarter)))
            worst = max(worst, abs(float(np.real(sol.u[-1])) - (1.0 - 2.0 * s * s)))
    ok = worst <= 1e-9
    _report(3, ok, f"max |Re u(2pi) - (1 - 2 s^2)| = {worst:.2e} (tol 1e-9)")


def test_criterion_04_exponent_route_agreement() -> None:
    worst = 0.0
    for g in GRID_VALUES:
        for e in GRID_VALUES:
            sol = _grid_solution(g, e)
            nu_mono = nu_from_monodromy(sol)
            nu_cf = solve_recurrence(sol.params, nu_mono)[0]
            worst = max(worst, abs(nu_mono - nu_cf))
    exact = []
    mono = []
    for e, expect in ((1.0, 0.5), (0.5, 0.25), (2.0, 0.0)):
        sol = integrate_uv(Params(gamma=0.0, epsilon=e))
        exact.append(floquet_data(sol).nu == expect)
        # the arcsin reading loses half the digits at a band edge, so the
        # trivial values are held to the criterion tolerance, not to zero
        mono.append(abs(nu_from_monodromy(sol) - expect))
    worst_mono = max(mono)
    ok = worst <= 1e-6 and all(exact) and worst_mono <= 1e-6
    _report(4, ok, f"route gap {worst:.2e} (tol 1e-6), zero-coupling branch exact={all(exact)}, monodromy reading off by {worst_mono:.2e} (tol 1e-6)")


def test_criterion_05_spectrum_cross_route() -> None:
    t0 = time.perf_counter()
    worst_rel = worst_rec = worst_sum = 0.0
    for g, e in ((1.0, 1.0), (2.0, 1.3)):
        p = Params(gamma=g, epsilon=e)
        sol = solve_window(p, 2.0 * math.pi)
        fd = floquet_data(sol)
        dip_cf = dipole_amps_cf(fd, j_max=17)
        inv_cf = inversion_amps(dip_cf, p, fd.nu, j_max=16)
        dip_cf = [l for l in dip_cf if l.j <= 16]

        sol_long = solve_window(p, 2.0 * math.pi * 64)
        x = sol_long.x[::4]
        d_long, w_long = dipole_inversion(sol_long)
        dip_proj, _ = amps_by_projection(x, d_long[::4], fd.nu, DIPOLE_FAMILIES, j_max=16)
        inv_proj, _ = amps_by_projection(x, w_long[::4], fd.nu, INVERSION_FAMILIES, j_max=16)

        ref = {(l.family, l.j): l.amplitude for l in dip_proj}
        for line in dip_cf:
            other = ref.get((line.family, line.j))
            if other is None or abs(other) <= 1e-8:
                continue  # below the projection noise floor; relative error meaningless
            worst_rel = max(worst_rel, abs(line.amplitude - other) / abs(other))

        d, w = dipole_inversion(sol)
        worst_rec = max(worst_rec, float(np.max(np.abs(reconstruct(dip_cf, sol.x) - d))))
        worst_rec = max(worst_rec, float(np.max(np.abs(reconstruct(inv_cf, sol.x) - w))))
        worst_sum = max(worst_sum, sum_rule_residual(inv_proj))
    elapsed = time.perf_counter() - t0
    ok = worst_rel <= 1e-4 and worst_rec <= 1e-3 and worst_sum <= 1e-6 and elapsed < 30.0
    _report(5, ok, f"route rel gap {worst_rel:.2e} (tol 1e-4), reconstruction {worst_rec:.2e} (tol 1e-3), sum rule {worst_sum:.2e} (tol 1e-6), {elapsed:.1f} s (< 30 s)")


def test_criterion_06_bloch_residuals() -> None:
    worst = 0.0
    for g in GRID_VALUES:
        for e in GRID_VALUES:
            res = bloch_residuals(_grid_solution(g, e))
            worst = max(worst, res["oscillator"], res["inversion_rate"], res["invariant"])
    ok = worst <= 1e-6
    _report(6, ok, f"max residual {worst:.2e} (tol 1e-6)")


def test_criterion_07_wkb_accuracy_ladder() -> None:
    t0 = time.perf_counter()
    errs = []
    nu_gaps = []
    for eps in (10.0, 20.0, 40.0):
        p = Params(gamma=eps, epsilon=eps)
        sol = solve_window(p, 2.0 * math.pi)
        d, _ = dipole_inversion(sol)
        d_wkb, _ = wkb_dipole_inversion(p, sol.x)
        errs.append(float(np.max(np.abs(d_wkb - d))))
        nu_gaps.append(abs(wkb_nu(p) - nu_from_monodromy(sol)))
    elapsed = time.perf_counter() - t0
    finite = all(math.isfinite(v) for v in errs)
    shrinking = errs[1] < 0.7 * errs[0] and errs[2] < 0.7 * errs[1]
    ok = finite and errs[0] < 0.1 and shrinking and max(nu_gaps) <= 0.01 and elapsed < 60.0
    _report(7, ok, f"D errors {errs[0]:.4f}/{errs[1]:.4f}/{errs[2]:.4f} at eps 10/20/40 (first < 0.1, ratios < 0.7), exponent gaps <= {max(nu_gaps):.1e} (tol 0.01), {elapsed:.1f} s (< 60 s)")


def test_criterion_08_sawtooth_law() -> None:
    eps_values = np.arange(10.0, 12.5 + 1e-9, 0.05)
    nu_values = [nu_from_monodromy(integrate_uv(Params(gamma=e, epsilon=e))) for e in eps_values]
    fit = fit_sawtooth(eps_values, nu_values)
    expected = 2.0 * epsilon_zero(1.0)
    gap = abs(fit["period"] - expected)
    ok = gap <= 1e-2 and fit["max_residual"] <= 0.02
    _report(8, ok, f"period {fit['period']:.6f} vs 2*eps0 {expected:.6f} (gap {gap:.2e}, tol 1e-2), fit residual {fit['max_residual']:.2e} (tol 0.02)")


def test_criterion_09_first_harmonic_closed_form() -> None:
    p = Params(gamma=20.0, epsilon=20.0)
    quad = [l for l in wkb_dipole_amps(p, j_max=0) if l.family == D_ODD][0].amplitude
    closed = wkb_fundamental_dipole_amp(p)
    gap = abs(quad - closed)
    ok = gap <= 1e-6
    _report(9, ok, f"quadrature {quad:.9f} vs closed form {closed:.9f} (gap {gap:.1e}, tol 1e-6)")


def test_criterion_10_plateau_shape() -> None:
    # Expected to fail: the computed significant-branch band has a one-index
    # gap and its upper edge sits at the generalized cutoff, well above the
    # onset scale the bound is written against.  Kept at face value.
    p = Params(gamma=20.0, epsilon=20.0)
    omega = wkb_omega(p)
    nu = wkb_nu(p)
    lines = wkb_dipole_amps(p, j_max=30)
    d0 = abs(next(l.amplitude for l in lines if l.family == D_ODD and l.j == 0))
    band = sorted(l.j for l in lines if l.family == D_DOWN and abs(l.amplitude) >= 0.1 * d0)
    contiguous = bool(band) and band == list(range(band[0], band[-1] + 1))
    edge_gap = abs(band[-1] - (omega + nu)) if band else math.inf
    odd = [abs(next(l.amplitude for l in lines if l.family == D_ODD and l.j == jj)) for jj in range(6)]
    monotone = all(odd[i + 1] <= 1.1 * odd[i] for i in range(5))
    ok = contiguous and edge_gap <= 2.0 and monotone
    _report(10, ok, f"band {band} contiguous={contiguous}, upper edge {band[-1] if band else None} vs Omega+nu={omega + nu:.3f} (gap {edge_gap:.1f}, tol 2), odd monotone={monotone}")


def test_criterion_11_byte_determinism(tmp_path) -> None:
    args = ["run", "--gamma", "1", "--epsilon", "1", "--nodes", "512", "--periods", "16"]
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert cli_main(args + ["--out", str(out_a)]) == 0
    assert cli_main(args + ["--out", str(out_b)]) == 0
    names_a = sorted(f.name for f in out_a.iterdir())
    names_b = sorted(f.name for f in out_b.iterdir())
    identical = names_a == names_b and all(
        (out_a / name).read_bytes() == (out_b / name).read_bytes() for name in names_a
    )
    _report(11, identical, f"{len(names_a)} files compared byte for byte: {names_a}")
