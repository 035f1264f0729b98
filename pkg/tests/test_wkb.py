"""Semiclassical branch: phase integrals, splits, line strengths, sawtooth."""
import math
import warnings

import numpy as np
import pytest

from drivenatom.errors import DegenerateFloquetError, DomainError, IntegralityError, ValidityWarning
from drivenatom.floquet import nu_from_monodromy
from drivenatom.ode import dipole_inversion, solve_window
from drivenatom.params import Params, epsilon_zero
from drivenatom.spectrum import D_DOWN, D_ODD, D_UP, W_DOWN, W_EVEN, W_UP, amps_by_quadrature
from drivenatom.wkb import (
    fit_sawtooth,
    gap_profile,
    integrality_sign,
    wkb_dc_inversion_amp,
    wkb_delta1,
    wkb_delta2,
    wkb_dipole_amps,
    wkb_dipole_inversion,
    wkb_fundamental_dipole_amp,
    wkb_hierarchy_check,
    wkb_inversion_amps,
    wkb_nu,
    wkb_omega,
    wkb_pi1,
    wkb_pi2,
    wkb_sawtooth,
    wkb_uv,
)


def test_winding_anchor() -> None:
    p = Params(gamma=20.0, epsilon=20.0)
    assert wkb_omega(p) == pytest.approx(16.78600413640356, abs=1e-12)
    assert wkb_nu(p) == pytest.approx(0.21399586359644285, abs=1e-12)


def test_exponent_ladder_against_exact() -> None:
    # error should fall roughly like one power of the drive per doubling
    bounds = {5.0: 2e-3, 10.0: 1e-3, 20.0: 2e-4, 40.0: 2e-5}
    gaps = []
    for eps, bound in bounds.items():
        p = Params(gamma=eps, epsilon=eps)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            gap = abs(wkb_nu(p) - nu_from_monodromy(solve_window(p, 2.0 * math.pi)))
        assert gap <= bound
        gaps.append(gap)
    assert gaps == sorted(gaps, reverse=True)


def test_gap_profile_and_splits_at_origin() -> None:
    p = Params(gamma=10.0, epsilon=10.0)
    a = p.alpha
    assert gap_profile(p, 0.0) == pytest.approx(1.0 + 4.0 * a * a, abs=1e-14)
    assert gap_profile(p, 0.5 * math.pi) == pytest.approx(1.0, abs=1e-14)
    # the two splits share the waveform: dipole parts cancel at x = 0,
    # inversion parts add up to the ground-state value -1
    assert wkb_delta1(p, 0.0) + wkb_delta2(p, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert wkb_pi1(p, 0.0) + wkb_pi2(p, 0.0) == pytest.approx(-1.0, abs=1e-12)


def test_waveforms_approach_exact_solution() -> None:
    p = Params(gamma=40.0, epsilon=40.0)
    sol = solve_window(p, 2.0 * math.pi)
    u, v = wkb_uv(p, sol.x)
    assert np.max(np.abs(u - sol.u)) <= 0.03
    assert np.max(np.abs(v - sol.v)) <= 0.002
    d, w = dipole_inversion(sol)
    dw, ww = wkb_dipole_inversion(p, sol.x)
    assert np.max(np.abs(dw - d)) <= 0.01
    assert np.max(np.abs(ww - w)) <= 0.06


def test_closed_form_line_strengths() -> None:
    p = Params(gamma=20.0, epsilon=20.0)
    fundamental = wkb_fundamental_dipole_amp(p)
    assert fundamental == pytest.approx(-0.46285367909356, abs=1e-10)
    dc = wkb_dc_inversion_amp(p)
    # both closed forms must agree with the generic integrals
    dip = {l.j: l.amplitude for l in wkb_dipole_amps(p, j_max=0) if l.family == D_ODD}
    inv = {l.j: l.amplitude for l in wkb_inversion_amps(p, j_max=0) if l.family == W_EVEN}
    assert dip[0] == pytest.approx(fundamental, abs=1e-10)
    assert inv[0] == pytest.approx(dc, abs=1e-10)
    with pytest.raises(DomainError):
        wkb_fundamental_dipole_amp(Params(gamma=0.0, epsilon=20.0))


def test_line_integrals_match_generic_extraction() -> None:
    # the specialized single integrals are exact consequences of the
    # shifted-difference extraction applied to the semiclassical splits
    p = Params(gamma=8.4, epsilon=12.0)
    nu = wkb_nu(p)
    lines = {(l.family, l.j): l.amplitude for l in wkb_dipole_amps(p, j_max=5) + wkb_inversion_amps(p, j_max=5)}
    for fam, split in (
        (D_ODD, wkb_delta1),
        (D_UP, wkb_delta2),
        (D_DOWN, wkb_delta2),
        (W_EVEN, wkb_pi1),
        (W_UP, wkb_pi2),
        (W_DOWN, wkb_pi2),
    ):
        for ref in amps_by_quadrature(lambda s: split(p, s), nu, fam, j_max=5):
            assert lines[(ref.family, ref.j)] == pytest.approx(ref.amplitude, abs=1e-7)


def test_integrality_gate() -> None:
    assert integrality_sign(16.786, 0.214) == 1
    assert integrality_sign(16.3, 0.3) == -1
    with pytest.raises(IntegralityError):
        integrality_sign(16.786, 0.2)
    with pytest.raises(IntegralityError):
        integrality_sign(17.0, 0.0)  # both readings integral: degenerate


def test_degenerate_exponent_blocks_doublets() -> None:
    p = Params(gamma=20.0, epsilon=20.0)
    with pytest.raises(DegenerateFloquetError):
        wkb_dipole_amps(p, j_max=2, nu=1e-12)
    # odd harmonics alone never need the exponent
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        lines = wkb_dipole_amps(Params(gamma=0.0, epsilon=1.0), j_max=1)
    assert all(l.family == D_ODD and l.amplitude == 0.0 for l in lines)


def test_validity_warning_below_threshold() -> None:
    with pytest.warns(ValidityWarning):
        wkb_uv(Params(gamma=3.0, epsilon=3.0), np.array([0.0, 0.5]))


def test_hierarchy_check_residuals() -> None:
    for p in (Params(gamma=10.0, epsilon=10.0), Params(gamma=2.1, epsilon=7.0)):
        res = wkb_hierarchy_check(p)
        for key in ("defining_quadratic", "leading_phase", "amplitude_log", "phase_correction"):
            assert res[key] <= 1e-10, (key, res[key])
    with pytest.raises(DomainError):
        wkb_hierarchy_check(Params(gamma=10.0, epsilon=10.0), k_order=2)


def test_sawtooth_periodicity_and_fit() -> None:
    alpha = 1.0
    period = 2.0 * epsilon_zero(alpha)
    eps = np.linspace(10.0, 12.5, 120)
    nu = wkb_sawtooth(eps, alpha)
    nu_shift = wkb_sawtooth(eps + period, alpha)
    assert np.max(np.abs(nu - nu_shift)) <= 1e-9
    fit = fit_sawtooth(eps, nu)
    assert fit["period"] == pytest.approx(period, abs=1e-6)
    assert fit["max_residual"] <= 1e-8
    assert fit["n_crossings"] >= 3


def test_sawtooth_fit_input_guards() -> None:
    with pytest.raises(DomainError):
        fit_sawtooth([1.0, 2.0], [0.1, 0.2])  # too few samples
    eps = np.linspace(10.0, 10.2, 30)  # window too narrow to see crossings
    nu = wkb_sawtooth(eps, 1.0)
    from drivenatom.errors import ConvergenceError

    with pytest.raises(ConvergenceError):
        fit_sawtooth(eps, nu)
