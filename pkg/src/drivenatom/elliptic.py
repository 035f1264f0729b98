"""Legendre elliptic integrals in the squared-modulus convention.

The incomplete integrals of the first and second kind turn up here as
accumulated phases of a slowly modulated oscillation, so they must be
evaluated for arbitrarily large amplitude ``x`` while preserving the
quasi-periodicity laws

    F(x + n*pi, k2) = F(x, k2) + 2*n*K(k2)
    E(x + n*pi, k2) = E(x, k2) + 2*n*Ec(k2)

to round-off.  The core evaluations on the reduced interval
``|x| <= pi/2`` are delegated to scipy.special (Cephes); the half-period
reduction is done explicitly so the laws above hold exactly by
construction rather than by accident of the backend.

All functions take the squared modulus ``k2 = k**2`` directly.
"""
from __future__ import annotations

import numpy as np
import scipy.special as _sp

from .errors import DomainError

# K(k2) diverges logarithmically at k2 -> 1; refuse the last sliver where
# double precision can no longer represent the complementary modulus.
K2_COMPLETE_MAX = 1.0 - 1e-12


def _check_k2(k2: float, need_complete: bool) -> float:
    k2 = float(k2)
    if not np.isfinite(k2) or k2 < 0.0 or k2 >= 1.0:
        raise DomainError(f"squared modulus k2={k2!r} outside [0, 1)")
    if need_complete and k2 > K2_COMPLETE_MAX:
        raise DomainError(
            f"squared modulus k2={k2!r} too close to 1 for the complete integral"
        )
    return k2


def ellip_K(k2: float) -> float:
    """Complete integral of the first kind, K(k2)."""
    return float(_sp.ellipk(_check_k2(k2, need_complete=True)))


def ellip_Ecomp(k2: float) -> float:
    """Complete integral of the second kind, Ec(k2)."""
    return float(_sp.ellipe(_check_k2(k2, need_complete=False)))


def _reduce(x):
    """Split x = n*pi + r with r in [-pi/2, pi/2]."""
    x = np.asarray(x, dtype=float)
    n = np.round(x / np.pi)
    r = x - n * np.pi
    return n, r


def ellip_F(x, k2: float):
    """Incomplete integral of the first kind F(x, k2), any real amplitude.

    Parameters
    ----------
    x : array_like
        Amplitude in radians.  Values beyond ``|x| = pi/2`` are handled by
        exact half-period reduction, which requires ``k2`` to be in the
        domain of the complete integral.
    k2 : float
        Squared modulus, ``0 <= k2 < 1``.

    Returns
    -------
    float or ndarray
    """
    scalar = np.isscalar(x)
    n, r = _reduce(x)
    if np.any(n != 0.0):
        k2 = _check_k2(k2, need_complete=True)
        out = _sp.ellipkinc(r, k2) + 2.0 * n * float(_sp.ellipk(k2))
    else:
        k2 = _check_k2(k2, need_complete=False)
        out = _sp.ellipkinc(r, k2)
    return float(out) if scalar else out


def ellip_E(x, k2: float):
    """Incomplete integral of the second kind E(x, k2), any real amplitude."""
    scalar = np.isscalar(x)
    k2 = _check_k2(k2, need_complete=False)
    n, r = _reduce(x)
    out = _sp.ellipeinc(r, k2)
    if np.any(n != 0.0):
        out = out + 2.0 * n * float(_sp.ellipe(k2))
    return float(out) if scalar else out
