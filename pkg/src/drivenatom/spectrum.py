"""Emission line amplitudes of the dipole and inversion waveforms.

Both waveforms are almost-periodic with a rigid frequency lattice fixed
by the exponent nu: the dipole D carries odd harmonics 2j+1 plus the
hyper-Raman doublets 2(j+nu) and 2(j-nu), the inversion W carries even
harmonics 2j plus doublets 2j+1+2nu and 2j+1-2nu (all in units of the
drive frequency).  Three independent extraction routes are provided.

* Mode-sum route ("cf"): closed bilinear sums over the Floquet
  coefficients for the dipole, then a three-point ladder mapping dipole
  lines to inversion lines through the rate equation
  W' = -(2*gamma/epsilon) cos(x) D'.  The DC inversion line is fixed by
  closure against W(0) = -1, which the ladder cannot see.
* Projection route ("projection"): least squares of sampled waveforms
  onto cosines at the known lattice frequencies.  Slow but assumption-
  free; serves as the reference the cheap routes are checked against.
* Quadrature route ("quadrature"): weighted integrals over a single
  quarter period applied to the periodic/quasi-periodic split of a
  waveform.  The quasi-periodic classes use a shifted-difference
  correction term that exactly cancels the twin class sharing the same
  frequency window.

Amplitude convention: the waveform equals sum(amplitude * cos(freq*x))
over its lines, so amplitudes are real and may be negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DegenerateFloquetError, DomainError, ProjectionConditioningError
from .floquet import FloquetData
from .params import Params

D_ODD = "D"
D_UP = "D+"
D_DOWN = "D-"
W_EVEN = "W"
W_UP = "W+"
W_DOWN = "W-"
DIPOLE_FAMILIES = (D_ODD, D_UP, D_DOWN)
INVERSION_FAMILIES = (W_EVEN, W_UP, W_DOWN)
FAMILIES = DIPOLE_FAMILIES + INVERSION_FAMILIES

# lowest mode index carried by each family
_FAMILY_J0 = {D_ODD: 0, D_UP: 0, D_DOWN: 1, W_EVEN: 0, W_UP: 0, W_DOWN: 0}

NU_QUAD_BAND = 1e-3  # quadrature route keeps away from degenerate exponents


@dataclass(frozen=True)
class SpectralLine:
    """One cosine line: amplitude * cos(freq * x).

    ``family`` is one of "D", "D+", "D-", "W", "W+", "W-"; ``j`` is the
    index within the family; ``route`` records which extraction produced
    the value.
    """

    freq: float
    amplitude: float
    family: str
    j: int
    route: str

    def as_record(self) -> dict:
        return {
            "freq": self.freq,
            "amplitude": self.amplitude,
            "class": self.family,
            "j": self.j,
            "route": self.route,
        }


def line_frequency(family: str, j: int, nu: float) -> float:
    """Lattice frequency of line (family, j) for exponent nu."""
    if family == D_ODD:
        return 2.0 * j + 1.0
    if family == D_UP:
        return 2.0 * (j + nu)
    if family == D_DOWN:
        return 2.0 * (j - nu)
    if family == W_EVEN:
        return 2.0 * j
    if family == W_UP:
        return 2.0 * j + 1.0 + 2.0 * nu
    if family == W_DOWN:
        return 2.0 * j + 1.0 - 2.0 * nu
    raise DomainError(f"unknown line family {family!r}")


def sort_lines(lines: list[SpectralLine]) -> list[SpectralLine]:
    return sorted(lines, key=lambda l: (l.route, FAMILIES.index(l.family), l.j))


# ---------------------------------------------------------------- mode sums


def _corr(coeff: np.ndarray, n: int) -> float:
    """sum_r F_r F_{r+n} for n >= 0."""
    if n >= coeff.size:
        return 0.0
    return float(np.dot(coeff[: coeff.size - n], coeff[n:]))


def _alt_corr(coeff: np.ndarray, j: np.ndarray, m: int) -> float:
    """sum_r (-1)^r F_{-r} F_{r+m} for any integer m."""
    t = ((-1.0) ** j) * coeff[::-1]
    if m >= 0:
        if m >= coeff.size:
            return 0.0
        return float(np.dot(t[: t.size - m], coeff[m:]))
    m = -m
    if m >= coeff.size:
        return 0.0
    return float(np.dot(t[m:], coeff[: coeff.size - m]))


def dipole_amps_cf(fd: FloquetData, j_max: int = 24) -> list[SpectralLine]:
    """Dipole line amplitudes as bilinear sums over the mode coefficients.

    The three families come out of products of the two branches: odd
    harmonics from each branch against itself, the doublets from the
    cross terms.  Prefactors carry the squared branch weights; under the
    unit coefficient normalization the weights satisfy wp^2 + wm^2 = 1,
    and the explicit denominator keeps the result invariant under
    rescaling of the coefficient vector.
    """
    wp, wm = fd.weight_plus.real, fd.weight_minus.real
    norm = (wp * wp + wm * wm) ** 2
    if norm == 0.0:
        raise DomainError("branch weights vanish; amplitude prefactors undefined")
    c_odd = 2.0 * (wp * wp - wm * wm) / norm
    c_cross = 2.0 * wp * wm / norm

    lines = []
    for jj in range(0, j_max + 1):
        amp = c_odd * _corr(fd.coeff, 2 * jj + 1)
        lines.append(SpectralLine(2.0 * jj + 1.0, amp, D_ODD, jj, "cf"))
    for jj in range(0, j_max + 1):
        amp = c_cross * _alt_corr(fd.coeff, fd.j, 2 * jj)
        lines.append(SpectralLine(2.0 * (jj + fd.nu), amp, D_UP, jj, "cf"))
    for jj in range(1, j_max + 1):
        amp = c_cross * _alt_corr(fd.coeff, fd.j, -2 * jj)
        lines.append(SpectralLine(2.0 * (jj - fd.nu), amp, D_DOWN, jj, "cf"))
    return lines


def _safe_ratio(diff: float, den: float) -> float:
    if diff == 0.0:
        return 0.0
    if abs(den) < 1e-12:
        raise DegenerateFloquetError(
            "inversion ladder denominator vanishes; exponent sits on a lattice collision"
        )
    return diff / den


def inversion_amps(
    dipole_lines: list[SpectralLine],
    params: Params,
    nu: float,
    j_max: int = 24,
) -> list[SpectralLine]:
    """Inversion lines from dipole lines through the rate equation.

    Each inversion line at frequency b collects the two dipole lines at
    b -/+ 1 of the matching family:

        W(b) = -(gamma/epsilon) * [Dlo + Dhi + (Dhi - Dlo)/b]

    The doublet ladder starts at j = 0; its lowest rung (frequency
    1 - 2*nu) draws on the dipole doublet at 2*nu, which by cosine
    parity is the j = 0 member of the up family.  The DC amplitude is
    fixed last, by requiring the full line set to reproduce W(0) = -1.

    The dipole input must extend at least one index past ``j_max``.
    """
    if params.epsilon == 0.0:
        raise DomainError("inversion ladder needs epsilon > 0")
    g = params.gamma / params.epsilon
    route = dipole_lines[0].route if dipole_lines else "cf"
    amap = {(l.family, l.j): l.amplitude for l in dipole_lines}
    top = max((l.j for l in dipole_lines if l.family == D_ODD), default=-1)
    if top < j_max + 1:
        raise DomainError("dipole ladder too short: need odd lines up to j_max + 1")

    lines = []
    for jj in range(1, j_max + 1):
        dlo, dhi = amap[(D_ODD, jj - 1)], amap[(D_ODD, jj)]
        amp = -g * (dhi + dlo + _safe_ratio(dhi - dlo, 2.0 * jj))
        lines.append(SpectralLine(2.0 * jj, amp, W_EVEN, jj, route))
    for jj in range(0, j_max + 1):
        dlo, dhi = amap[(D_UP, jj)], amap[(D_UP, jj + 1)]
        b = 2.0 * jj + 1.0 + 2.0 * nu
        amp = -g * (dhi + dlo + _safe_ratio(dhi - dlo, b))
        lines.append(SpectralLine(b, amp, W_UP, jj, route))
    for jj in range(0, j_max + 1):
        # the j = 0 rung reaches the aliased doublet at frequency 2*nu
        dlo = amap[(D_UP, 0)] if jj == 0 else amap[(D_DOWN, jj)]
        dhi = amap[(D_DOWN, jj + 1)]
        b = 2.0 * jj + 1.0 - 2.0 * nu
        amp = -g * (dhi + dlo + _safe_ratio(dhi - dlo, b))
        lines.append(SpectralLine(b, amp, W_DOWN, jj, route))

    dc = -1.0 - sum(l.amplitude for l in lines)
    lines.insert(0, SpectralLine(0.0, dc, W_EVEN, 0, route))
    return lines


# ---------------------------------------------------------------- projection


def amps_by_projection(
    x: np.ndarray,
    samples: np.ndarray,
    nu: float,
    families: tuple[str, ...],
    j_max: int = 24,
    cond_limit: float = 1e8,
    merge_tol: float = 1e-9,
):
    """Least-squares fit of sampled data onto the line lattice.

    Lattice frequencies closer than ``merge_tol`` (which happens at
    rational exponents) are merged into a single unknown; the merge map
    is reported so the caller knows which labels share an amplitude.

    Parameters
    ----------
    x, samples : ndarray
        Sampling grid (ideally many periods) and real waveform values.
    nu : float
        Exponent fixing the doublet frequencies.
    families : tuple of str
        Which families to include, e.g. ("D", "D+", "D-").
    j_max : int
        Highest index per family.
    cond_limit : float
        Condition-number ceiling of the design matrix.

    Returns
    -------
    (lines, info)
        ``lines`` carry route "projection".  ``info`` holds the fit
        residual (max-abs), the condition number, and the merge map.

    Raises
    ------
    ProjectionConditioningError
        If the design matrix condition number exceeds ``cond_limit``.
    """
    entries = []
    for fam in families:
        if fam not in FAMILIES:
            raise DomainError(f"unknown line family {fam!r}")
        for jj in range(_FAMILY_J0[fam], j_max + 1):
            entries.append((line_frequency(fam, jj, nu), fam, jj))
    entries.sort(key=lambda t: (t[0], FAMILIES.index(t[1]), t[2]))

    groups: list[list[tuple[float, str, int]]] = []
    for e in entries:
        if groups and e[0] - groups[-1][-1][0] <= merge_tol:
            groups[-1].append(e)
        else:
            groups.append([e])

    freqs = np.array([g[0][0] for g in groups])
    design = np.cos(np.outer(x, freqs))
    cond = float(np.linalg.cond(design))
    if cond > cond_limit:
        raise ProjectionConditioningError(
            f"projection design condition number {cond:.3e} exceeds {cond_limit:.1e}"
        )
    amps, *_ = np.linalg.lstsq(design, samples, rcond=None)
    residual = float(np.max(np.abs(design @ amps - samples)))

    lines = []
    merged = []
    for g, a in zip(groups, amps):
        f0, fam, jj = g[0]
        lines.append(SpectralLine(f0, float(a), fam, jj, "projection"))
        if len(g) > 1:
            merged.append(
                {"kept": [fam, jj], "dropped": [[f, k] for _, f, k in g[1:]]}
            )
    return lines, {"residual": residual, "cond": cond, "merged": merged}


# ---------------------------------------------------------------- quadrature

_SHIFT_SIGN = {D_UP: 1.0, D_DOWN: -1.0, W_UP: -1.0, W_DOWN: 1.0}


def _quad(f, tol: float) -> float:
    val, _ = quad(f, 0.0, 0.5 * math.pi, epsabs=0.1 * tol, epsrel=1e-11, limit=400)
    return val


def amps_by_quadrature(
    split,
    nu: float,
    family: str,
    j_max: int = 24,
    tol: float = 1e-8,
) -> list[SpectralLine]:
    """Line amplitudes of one family from quarter-period integrals.

    ``split`` must be the callable part of the waveform carrying only
    this family's frequency content: the pi-periodic even part for "D"
    or "W", the quasi-periodic part for the doublet families (both
    doublet families share one split, and the shifted-difference term

        (1/(pi sin 2*pi*nu)) * Integral [split(x-pi) - split(x+pi)] sin(b x) dx

    added with a family-dependent sign cancels the twin family exactly).

    Raises
    ------
    DegenerateFloquetError
        For doublet families when nu is within 1e-3 of 0 or 1/2, where
        the twin cancellation loses all precision.
    """
    lines = []
    if family == D_ODD:
        for jj in range(0, j_max + 1):
            b = 2.0 * jj + 1.0
            amp = (4.0 / math.pi) * _quad(lambda s: split(s) * math.cos(b * s), tol)
            lines.append(SpectralLine(b, amp, family, jj, "quadrature"))
        return lines
    if family == W_EVEN:
        for jj in range(0, j_max + 1):
            b = 2.0 * jj
            w = 2.0 if jj else 1.0
            amp = (2.0 * w / math.pi) * _quad(lambda s: split(s) * math.cos(b * s), tol)
            lines.append(SpectralLine(b, amp, family, jj, "quadrature"))
        return lines
    if family not in _SHIFT_SIGN:
        raise DomainError(f"unknown line family {family!r}")

    if not NU_QUAD_BAND <= nu <= 0.5 - NU_QUAD_BAND:
        raise DegenerateFloquetError(
            f"exponent {nu!r} too close to degeneracy for the quadrature route"
        )
    sgn = _SHIFT_SIGN[family]
    s2pn = math.sin(2.0 * math.pi * nu)
    for jj in range(_FAMILY_J0[family], j_max + 1):
        b = line_frequency(family, jj, nu)
        base = (2.0 / math.pi) * _quad(lambda s: split(s) * math.cos(b * s), tol)
        shift = (sgn / (math.pi * s2pn)) * _quad(
            lambda s: (split(s - math.pi) - split(s + math.pi)) * math.sin(b * s), tol
        )
        lines.append(SpectralLine(b, base + shift, family, jj, "quadrature"))
    return lines


# ---------------------------------------------------------------- assembly


def reconstruct(lines: list[SpectralLine], x: np.ndarray) -> np.ndarray:
    """Evaluate sum(amplitude * cos(freq*x)) over the given lines."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for l in lines:
        out += l.amplitude * np.cos(l.freq * x)
    return out


def sum_rule_residual(lines: list[SpectralLine]) -> float:
    """Deviation of the inversion line set from the pinned value W(0) = -1."""
    total = sum(l.amplitude for l in lines if l.family in INVERSION_FAMILIES)
    return abs(total + 1.0)


def triplet_report(lines: list[SpectralLine], nu: float) -> dict:
    """Group dipole lines into harmonic triplets and locate the doublet band.

    Each odd harmonic 2s+1 is flanked by doublet lines at distance
    delta = 1 - 2*nu: the up family's member s below, the down family's
    member s+1 above.  The report also flags, per doublet family, which
    members exceed 10 percent of the strongest odd harmonic, whether
    that set is contiguous, and where its edges sit.
    """
    amap = {(l.family, l.j): l for l in lines}
    odd_peak = max(
        (abs(l.amplitude) for l in lines if l.family == D_ODD), default=0.0
    )
    s_top = max((l.j for l in lines if l.family == D_ODD), default=-1)
    triplets = []
    for s in range(0, s_top + 1):
        center = amap.get((D_ODD, s))
        lower = amap.get((D_UP, s))
        upper = amap.get((D_DOWN, s + 1))
        if center is None:
            continue
        triplets.append(
            {
                "s": s,
                "center_freq": center.freq,
                "center_amp": center.amplitude,
                "lower_freq": lower.freq if lower else None,
                "lower_amp": lower.amplitude if lower else None,
                "upper_freq": upper.freq if upper else None,
                "upper_amp": upper.amplitude if upper else None,
            }
        )

    bands = {}
    threshold = 0.1 * odd_peak
    for fam in (D_UP, D_DOWN):
        sig = sorted(
            l.j for l in lines if l.family == fam and abs(l.amplitude) > threshold
        )
        bands[fam] = {
            "indices": sig,
            "contiguous": bool(sig) and sig == list(range(sig[0], sig[-1] + 1)),
            "lower_edge": sig[0] if sig else None,
            "upper_edge": sig[-1] if sig else None,
        }
    return {
        "delta": 1.0 - 2.0 * nu,
        "threshold": threshold,
        "triplets": triplets,
        "bands": bands,
    }
