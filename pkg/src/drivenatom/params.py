"""Dimensionless drive parameters and scaling relations.

A two-level transition of frequency ``omega0`` driven at carrier
frequency ``omega`` with peak coupling ``rabi`` depends on the drive
only through two ratios:

    gamma   = rabi / omega     (coupling per drive photon)
    epsilon = omega0 / omega   (transition detuning scale)

Everything downstream (waveforms, characteristic exponent, spectra) is a
function of ``(gamma, epsilon)`` alone.  The derived quantities
``alpha = gamma / epsilon``, ``lam = sqrt(1 + 4*alpha**2)`` and the
squared modulus ``k2 = 4*alpha**2 / lam**2`` parameterize the adiabatic
energy gap ``epsilon*lam*sqrt(1 - k2*sin(x)**2)`` and recur throughout
the semiclassical formulas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .elliptic import ellip_Ecomp, ellip_K
from .errors import DomainError


def _check_nonneg(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class Params:
    """Reduced drive parameters.

    Attributes
    ----------
    gamma : float
        Peak coupling in units of the drive frequency.
    epsilon : float
        Transition frequency in units of the drive frequency.
    """

    gamma: float
    epsilon: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", _check_nonneg("gamma", self.gamma))
        object.__setattr__(self, "epsilon", _check_nonneg("epsilon", self.epsilon))

    @property
    def alpha(self) -> float:
        """Coupling measured against the transition frequency, gamma/epsilon."""
        if self.epsilon == 0.0:
            raise DomainError("alpha undefined at epsilon = 0")
        return self.gamma / self.epsilon

    @property
    def lam(self) -> float:
        """Gap scale sqrt(1 + 4*alpha**2)."""
        a = self.alpha
        return math.sqrt(1.0 + 4.0 * a * a)

    @property
    def k2(self) -> float:
        """Squared modulus 4*alpha**2 / (1 + 4*alpha**2) of the gap modulation."""
        a = self.alpha
        return 4.0 * a * a / (1.0 + 4.0 * a * a)


def reduce(omega0: float, omega: float, rabi: float) -> Params:
    """Collapse physical frequencies to the two reduced ratios.

    Parameters
    ----------
    omega0, omega, rabi : float
        Transition frequency, drive frequency and peak coupling, in any
        one common unit.  ``omega`` must be positive.

    Returns
    -------
    Params
        Scale-invariant: multiplying all three inputs by a common factor
        leaves the result unchanged.
    """
    omega = float(omega)
    if not math.isfinite(omega) or omega <= 0.0:
        raise DomainError(f"omega must be finite and > 0, got {omega!r}")
    return Params(gamma=float(rabi) / omega, epsilon=float(omega0) / omega)


def _lam_k2(alpha: float) -> tuple[float, float]:
    alpha = _check_nonneg("alpha", alpha)
    lam2 = 1.0 + 4.0 * alpha * alpha
    return math.sqrt(lam2), 4.0 * alpha * alpha / lam2


def epsilon_zero(alpha: float) -> float:
    """Period scale of the exponent's sawtooth dependence on epsilon.

    At fixed ``alpha`` the characteristic exponent, to leading
    semiclassical order, repeats with period ``2 * epsilon_zero(alpha)``
    in epsilon.  Equal to ``pi / (2 * lam * Ec(k2))``; at ``alpha = 0``
    this is 1.
    """
    lam, k2 = _lam_k2(alpha)
    return math.pi / (2.0 * lam * ellip_Ecomp(k2))


def select_epsilon(r: float, alpha: float) -> float:
    """Epsilon at which the semiclassical winding number equals ``r`` exactly.

    Solves ``omega_wkb(epsilon, alpha) = r`` in closed form, where
    omega_wkb is the phase accumulated per drive period divided by pi
    (second-order semiclassical value).  Useful for pinning the exponent
    to an exact integer-plus-fold configuration when comparing line
    spectra route against route.

    Parameters
    ----------
    r : float
        Target winding number, must be large enough that the phase
        quadratic has a real root.
    alpha : float
        Coupling ratio gamma/epsilon.

    Returns
    -------
    float
        At ``alpha = 0`` reduces to ``2 * r``.
    """
    r = float(r)
    if not math.isfinite(r) or r <= 0.0:
        raise DomainError(f"target winding r must be > 0, got {r!r}")
    lam, k2 = _lam_k2(alpha)
    ec = ellip_Ecomp(k2)
    kc = ellip_K(k2)
    corr = (1.0 + 8.0 * alpha * alpha) * ec - kc
    disc = 1.0 - 2.0 * ec * corr / (3.0 * r * r * math.pi * math.pi)
    if disc < 0.0:
        raise DomainError(f"no real epsilon reaches winding r={r} at alpha={alpha}")
    return r * math.pi / (2.0 * lam * ec) * (1.0 + math.sqrt(disc))
