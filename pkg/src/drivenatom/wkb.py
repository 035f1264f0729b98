"""Semiclassical (phase-integral) approximation for strong transitions.

For epsilon well above 1 the amplitude locks onto the adiabatic energy
branches.  With the gap profile

    Qg(x) = 1 + 4*alpha**2*cos(x)**2 = lam**2 * (1 - k2*sin(x)**2)

the accumulated beat phase between the two branches is, through first
corrective order,

    psi(x) = epsilon*lam*E(x, k2) + ((1+8*alpha**2)*E(x, k2) - F(x, k2))
             / (6*epsilon*lam),

an incomplete-elliptic pair.  All closed forms below (waveforms, the
periodic/quasi-periodic splits of dipole and inversion, winding number,
line strengths) are built from psi and the quarter-wave amplitude
factor Qg**(-1/4).

The split functions feed the same quadrature extraction as the exact
route, but for the quasi-periodic classes the shifted-difference
machinery collapses analytically to a single quarter-period integral
once one of omega +/- nu is an integer; which one it is decides the
sign of the fast phase, hence the integrality gate below.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

from .elliptic import ellip_E, ellip_Ecomp, ellip_F, ellip_K
from .errors import (
    ConvergenceError,
    DegenerateFloquetError,
    DomainError,
    IntegralityError,
    ValidityWarning,
)
from .params import Params, epsilon_zero
from .spectrum import (
    D_DOWN,
    D_ODD,
    D_UP,
    W_DOWN,
    W_EVEN,
    W_UP,
    SpectralLine,
    line_frequency,
)

EPS_VALID_MIN = 5.0
INTEGRALITY_TOL = 1e-6


def _warn_validity(params: Params, who: str) -> None:
    if params.epsilon < EPS_VALID_MIN:
        warnings.warn(
            f"{who} used at epsilon={params.epsilon!r} < {EPS_VALID_MIN}; "
            "the expansion parameter is not small there",
            ValidityWarning,
            stacklevel=3,
        )


def gap_profile(params: Params, x):
    """Squared adiabatic gap Qg(x) = 1 + 4*alpha**2*cos(x)**2, in units of epsilon**2."""
    a = params.alpha
    return 1.0 + 4.0 * a * a * np.cos(x) ** 2


def wkb_phase(params: Params, x):
    """Beat phase psi(x) accumulated between the adiabatic branches.

    The slow carriers of the two branches are exp(+/- i psi/2).  Grows
    by 2*pi*omega per drive period, with omega = wkb_omega(params).
    """
    eps, lam, k2 = params.epsilon, params.lam, params.k2
    a2 = params.alpha**2
    e = ellip_E(x, k2)
    f = ellip_F(x, k2)
    return eps * lam * e + ((1.0 + 8.0 * a2) * e - f) / (6.0 * eps * lam)


def _phase_rate_max(params: Params) -> float:
    eps, lam, a2 = params.epsilon, params.lam, params.alpha**2
    return eps * lam + 4.0 * a2 / (3.0 * eps * lam)


def wkb_omega(params: Params) -> float:
    """Winding number: beat phase per period over 2*pi."""
    eps, lam, k2 = params.epsilon, params.lam, params.k2
    a2 = params.alpha**2
    ec, kc = ellip_Ecomp(k2), ellip_K(k2)
    return (eps * lam * ec + ((1.0 + 8.0 * a2) * ec - kc) / (6.0 * eps * lam)) / math.pi


def wkb_nu(params: Params) -> float:
    """Winding number folded into the exponent band [0, 1/2]."""
    return math.asin(abs(math.sin(math.pi * wkb_omega(params)))) / math.pi


def wkb_sawtooth(eps, alpha: float):
    """Closed sawtooth law nu(eps) at fixed alpha, leading order.

    A triangle wave of period 2*epsilon_zero(alpha) through the origin;
    vectorized over eps.
    """
    scalar = np.isscalar(eps)
    e0 = epsilon_zero(alpha)
    out = np.arcsin(np.abs(np.sin(np.asarray(eps, dtype=float) * math.pi / (2.0 * e0)))) / math.pi
    return float(out) if scalar else out


def wkb_uv(params: Params, x):
    """Semiclassical fundamental pair (u, v) on arbitrary nodes.

    Error is O(1/epsilon) pointwise; a ValidityWarning fires below
    epsilon = 5.  Initial conditions hold only to the same order.
    """
    _warn_validity(params, "wkb_uv")
    eps, lam, a = params.epsilon, params.lam, params.alpha
    x = np.asarray(x, dtype=float)
    qg = gap_profile(params, x)
    rq = np.sqrt(qg)
    carrier = np.exp(1j * params.gamma * np.sin(x))
    phase = np.exp(0.5j * wkb_phase(params, x))
    f1 = np.sqrt((lam + 2.0 * a) * (rq - 2.0 * a * np.cos(x))) * phase
    f2 = np.sqrt((lam - 2.0 * a) * (rq + 2.0 * a * np.cos(x))) * np.conj(phase)
    q4 = qg**0.25
    u = math.sqrt(lam) * carrier / (2.0 * q4) * (
        (1.0 - 2.0 * a / lam) * f1 + (1.0 + 2.0 * a / lam) * f2
    )
    v = 1j * carrier / (eps * math.sqrt(lam) * q4) * (f2 - f1)
    return u, v


# ------------------------------------------------------- waveform splits


def wkb_delta1(params: Params, x):
    """pi-periodic part of the dipole: carries the odd harmonics."""
    a, lam = params.alpha, params.lam
    x = np.asarray(x, dtype=float)
    return -(2.0 * a / lam) * np.cos(x) / np.sqrt(gap_profile(params, x))


def wkb_delta2(params: Params, x):
    """Quasi-periodic part of the dipole: carries both doublet families."""
    a, lam = params.alpha, params.lam
    x = np.asarray(x, dtype=float)
    return (2.0 * a / lam) * np.cos(wkb_phase(params, x)) / np.sqrt(gap_profile(params, x))


def wkb_pi1(params: Params, x):
    """pi-periodic part of the inversion: carries the even harmonics."""
    lam = params.lam
    x = np.asarray(x, dtype=float)
    return -1.0 / (lam * np.sqrt(gap_profile(params, x)))


def wkb_pi2(params: Params, x):
    """Quasi-periodic part of the inversion: carries both doublet families."""
    a, lam = params.alpha, params.lam
    x = np.asarray(x, dtype=float)
    return (
        -(4.0 * a * a / lam)
        * np.cos(x)
        * np.cos(wkb_phase(params, x))
        / np.sqrt(gap_profile(params, x))
    )


def wkb_dipole_inversion(params: Params, x):
    """Semiclassical dipole and inversion waveforms (sum of the splits)."""
    d = wkb_delta1(params, x) + wkb_delta2(params, x)
    w = wkb_pi1(params, x) + wkb_pi2(params, x)
    return d, w


def wkb_fundamental_dipole_amp(params: Params) -> float:
    """Closed form for the dipole line at the drive frequency.

    Equals -(2/(pi*alpha)) * (Ec(k2) - Kc(k2)/(1+4*alpha**2)); needs
    alpha > 0.
    """
    a = params.alpha
    if a == 0.0:
        raise DomainError("fundamental dipole amplitude degenerate at alpha = 0")
    k2 = params.k2
    return -(2.0 / (math.pi * a)) * (
        ellip_Ecomp(k2) - ellip_K(k2) / (1.0 + 4.0 * a * a)
    )


def wkb_dc_inversion_amp(params: Params) -> float:
    """Closed form for the DC inversion line: -(2/(pi*lam**2)) * Kc(k2)."""
    lam = params.lam
    return -(2.0 / (math.pi * lam * lam)) * ellip_K(params.k2)


# ------------------------------------------------------------ line strengths

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _osc_quad(fun, rate: float, tol: float) -> float:
    """Integrate fun over [0, pi/2] with panels tied to the worst phase rate."""
    a, b = 0.0, 0.5 * math.pi
    n = max(2, int(math.ceil((b - a) * (1.0 + abs(rate)) / (0.5 * math.pi))))
    prev = None
    for _ in range(14):
        edges = np.linspace(a, b, n + 1)
        half = 0.5 * (edges[1] - edges[0])
        mids = 0.5 * (edges[:-1] + edges[1:])
        pts = (mids[:, None] + half * _GL_NODES[None, :]).ravel()
        val = half * float(np.sum(fun(pts).reshape(n, _GL_NODES.size) * _GL_WEIGHTS))
        if prev is not None and abs(val - prev) <= tol:
            return val
        prev = val
        n *= 2
    raise ConvergenceError("oscillatory quadrature failed to settle")


def integrality_sign(omega: float, nu: float, tol: float = INTEGRALITY_TOL) -> int:
    """+1 if omega+nu is an integer, -1 if omega-nu is, within tol.

    Exactly one must hold (the fold guarantees it when nu comes from
    omega itself); anything else leaves the fast-phase sign undecided.
    """
    dp = abs(omega + nu - round(omega + nu))
    dm = abs(omega - nu - round(omega - nu))
    up, dn = dp <= tol, dm <= tol
    if up and dn:
        raise IntegralityError(
            f"both omega+nu and omega-nu integral (omega={omega!r}, nu={nu!r}); "
            "exponent is degenerate"
        )
    if up:
        return 1
    if dn:
        return -1
    raise IntegralityError(
        f"neither omega+nu nor omega-nu within {tol} of an integer "
        f"(omega={omega!r}, nu={nu!r})"
    )


def wkb_dipole_amps(
    params: Params,
    j_max: int = 24,
    tol: float = 1e-8,
    nu: float | None = None,
) -> list[SpectralLine]:
    """Dipole line strengths from single quarter-period integrals.

    Odd harmonics come from the periodic split directly.  For the
    doublets the shifted-difference extraction collapses, given the
    integrality of omega +/- nu, to

        (4*alpha/(pi*lam)) * Integral cos(psi(x) +/- b*x) / sqrt(Qg) dx

    with the sign fixed by ``integrality_sign``.  Pass ``nu`` only to
    override the folded winding number (it must stay consistent with it,
    otherwise the integrality gate fires).
    """
    _warn_validity(params, "wkb_dipole_amps")
    a, lam = params.alpha, params.lam
    rate0 = _phase_rate_max(params)

    def weight(x):
        return 1.0 / np.sqrt(gap_profile(params, x))

    lines = []
    for jj in range(0, j_max + 1):
        b = 2.0 * jj + 1.0
        amp = -(8.0 * a / (math.pi * lam)) * _osc_quad(
            lambda s: np.cos(s) * np.cos(b * s) * weight(s), b + 1.0, tol
        )
        lines.append(SpectralLine(b, amp, D_ODD, jj, "wkb"))
    if a > 0.0:
        # the doublets alone need the exponent; odd lines never do
        omega = wkb_omega(params)
        if nu is None:
            nu = wkb_nu(params)
        if min(nu, 0.5 - nu) < 1e-9:
            raise DegenerateFloquetError(f"exponent {nu!r} degenerate for doublet lines")
        sgn = integrality_sign(omega, nu)
        for fam in (D_UP, D_DOWN):
            fam_sign = sgn if fam == D_UP else -sgn
            for jj in range(0 if fam == D_UP else 1, j_max + 1):
                b = line_frequency(fam, jj, nu)
                amp = (4.0 * a / (math.pi * lam)) * _osc_quad(
                    lambda s: np.cos(wkb_phase(params, s) + fam_sign * b * s)
                    * weight(s),
                    rate0 + b,
                    tol,
                )
                lines.append(SpectralLine(b, amp, fam, jj, "wkb"))
    return lines


def wkb_inversion_amps(
    params: Params,
    j_max: int = 24,
    tol: float = 1e-8,
    nu: float | None = None,
) -> list[SpectralLine]:
    """Inversion line strengths, same construction as the dipole ones.

    Even harmonics (DC included) integrate the periodic split; the
    doublets use cos(psi -/+ b*x) weighted by cos(x)/sqrt(Qg) with the
    sign from the integrality gate.
    """
    _warn_validity(params, "wkb_inversion_amps")
    a, lam = params.alpha, params.lam
    rate0 = _phase_rate_max(params)

    def weight(x):
        return 1.0 / np.sqrt(gap_profile(params, x))

    lines = []
    for jj in range(0, j_max + 1):
        b = 2.0 * jj
        w = 2.0 if jj else 1.0
        amp = -(2.0 * w / (math.pi * lam)) * _osc_quad(
            lambda s: np.cos(b * s) * weight(s), b + 1.0, tol
        )
        lines.append(SpectralLine(b, amp, W_EVEN, jj, "wkb"))
    if a > 0.0:
        omega = wkb_omega(params)
        if nu is None:
            nu = wkb_nu(params)
        if min(nu, 0.5 - nu) < 1e-9:
            raise DegenerateFloquetError(f"exponent {nu!r} degenerate for doublet lines")
        sgn = integrality_sign(omega, nu)
        for fam in (W_UP, W_DOWN):
            fam_sign = sgn if fam == W_UP else -sgn
            for jj in range(0, j_max + 1):
                b = line_frequency(fam, jj, nu)
                amp = -(8.0 * a * a / (math.pi * lam)) * _osc_quad(
                    lambda s: np.cos(s)
                    * np.cos(wkb_phase(params, s) + fam_sign * b * s)
                    * weight(s),
                    rate0 + b + 1.0,
                    tol,
                )
                lines.append(SpectralLine(b, amp, fam, jj, "wkb"))
    return lines


# ------------------------------------------------------------ diagnostics


def wkb_hierarchy_check(params: Params, k_order: int = 1, n_probe: int = 5) -> dict:
    """Verify the implemented phase-integral orders against raw quadrature.

    For a handful of probe amplitudes this integrates the defining rates
    numerically and compares with the closed elliptic forms actually
    used by the module:

    * defining_quadratic: the leading exponent rate z0' = (i/2)sqrt(Qg)
      against (z0')**2 + Qg/4 = 0 (algebraic identity);
    * leading_phase: Integral Im z0' versus (lam/2)*E(x, k2), scaled by
      epsilon in psi;
    * amplitude_log: the next-order rate -z0''/(2 z0'), whose integral
      must equal the log of the Qg**(-1/4) amplitude factor;
    * phase_correction (k_order >= 1): the first corrective phase rate
      against ((1+8*alpha**2)*E - F)/(12*lam), the term carried inside
      psi with weight 1/epsilon.

    Returns the max-abs residual per check; all should sit at the
    quadrature tolerance (~1e-10), independent of epsilon.
    """
    if k_order not in (0, 1):
        raise DomainError("only the leading and first corrective orders exist")
    lam, k2 = params.lam, params.k2
    a2 = params.alpha**2
    probes = np.linspace(0.3, 0.5 * math.pi, n_probe)

    def gap(x):
        return 1.0 + 4.0 * a2 * math.cos(x) ** 2

    # z0' = (i/2) sqrt(Qg): check the defining quadratic pointwise
    quad_res = max(
        abs((0.5j * math.sqrt(gap(x))) ** 2 + 0.25 * gap(x)) for x in probes
    )

    lead = 0.0
    amp = 0.0
    corr = 0.0
    for xp in probes:
        got, _ = quad(lambda s: 0.5 * math.sqrt(gap(s)), 0.0, xp, epsabs=1e-13)
        lead = max(lead, abs(got - 0.5 * lam * ellip_E(xp, k2)))

        got, _ = quad(
            lambda s: 2.0 * a2 * math.sin(s) * math.cos(s) / gap(s), 0.0, xp,
            epsabs=1e-13,
        )
        want = -0.25 * math.log(gap(xp) / gap(0.0))
        amp = max(amp, abs(got - want))

        if k_order >= 1:
            got, _ = quad(
                lambda s: (
                    (1.0 + 8.0 * a2) * math.sqrt(1.0 - k2 * math.sin(s) ** 2)
                    - 1.0 / math.sqrt(1.0 - k2 * math.sin(s) ** 2)
                )
                / (12.0 * lam),
                0.0,
                xp,
                epsabs=1e-13,
            )
            want = ((1.0 + 8.0 * a2) * ellip_E(xp, k2) - ellip_F(xp, k2)) / (12.0 * lam)
            corr = max(corr, abs(got - want))

    out = {
        "defining_quadratic": float(quad_res),
        "leading_phase": float(lead),
        "amplitude_log": float(amp),
    }
    if k_order >= 1:
        out["phase_correction"] = float(corr)
    return out


def fit_sawtooth(eps_values, nu_values) -> dict:
    """Fit a triangle wave nu(eps) = arcsin|sin(pi (eps-phase)/P)| / pi.

    Seeds the period from the spacing of mid-level (nu = 1/4) crossings,
    then polishes (P, phase) with a simplex search on the mean squared
    deviation.  Needs a window wide enough for at least three crossings.

    Returns
    -------
    dict with keys "period", "phase", "max_residual", "rms_residual",
    "n_crossings".
    """
    eps = np.asarray(eps_values, dtype=float)
    nus = np.asarray(nu_values, dtype=float)
    if eps.size != nus.size or eps.size < 8:
        raise DomainError("need matching arrays with at least 8 samples")

    level = nus - 0.25
    idx = np.nonzero(level[:-1] * level[1:] < 0.0)[0]
    crossings = [
        eps[i] + (eps[i + 1] - eps[i]) * level[i] / (level[i] - level[i + 1])
        for i in idx
    ]
    if len(crossings) < 3:
        raise ConvergenceError("scan window too narrow to see the sawtooth")
    spacing = np.diff(crossings)
    period0 = 2.0 * float(np.mean(spacing))
    # a rising mid-level crossing sits a quarter period past the zero
    rising = level[idx[0]] < 0.0
    phase0 = crossings[0] - (0.25 if rising else 0.75) * period0

    def model(p, phi):
        return np.arcsin(np.abs(np.sin(math.pi * (eps - phi) / p))) / math.pi

    def cost(t):
        return float(np.mean((model(t[0], t[1]) - nus) ** 2))

    res = minimize(
        cost,
        [period0, phase0],
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-18, "maxiter": 4000},
    )
    period, phase = float(res.x[0]), float(res.x[1])
    dev = model(period, phase) - nus
    return {
        "period": period,
        "phase": phase,
        "max_residual": float(np.max(np.abs(dev))),
        "rms_residual": float(np.sqrt(np.mean(dev**2))),
        "n_crossings": len(crossings),
    }
