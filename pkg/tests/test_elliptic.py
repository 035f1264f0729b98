"""Elliptic integral wrappers: frozen anchors, exact reduction, domain guards."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from drivenatom.elliptic import ellip_E, ellip_Ecomp, ellip_F, ellip_K
from drivenatom.errors import DomainError


def test_complete_anchors() -> None:
    # reference values computed once from the defining integrals
    assert abs(ellip_K(0.8) - 2.257205326820854) <= 1e-13
    assert abs(ellip_Ecomp(0.8) - 1.1784899243278386) <= 1e-13


def test_incomplete_against_direct_quadrature() -> None:
    for x, k2 in ((0.7, 0.35), (1.2, 0.9), (-0.4, 0.55)):
        f_ref, _ = quad(lambda t: 1.0 / math.sqrt(1.0 - k2 * math.sin(t) ** 2), 0.0, x, epsabs=1e-13)
        e_ref, _ = quad(lambda t: math.sqrt(1.0 - k2 * math.sin(t) ** 2), 0.0, x, epsabs=1e-13)
        assert abs(ellip_F(x, k2) - f_ref) <= 1e-11
        assert abs(ellip_E(x, k2) - e_ref) <= 1e-11


def test_complete_matches_incomplete_at_quarter() -> None:
    for k2 in (0.0, 0.3, 0.9, 0.999):
        assert ellip_F(0.5 * math.pi, k2) == pytest.approx(ellip_K(k2), abs=1e-14)
        assert ellip_E(0.5 * math.pi, k2) == pytest.approx(ellip_Ecomp(k2), abs=1e-14)


def test_quasi_periodic_extension() -> None:
    k2 = 0.65
    K = ellip_K(k2)
    E = ellip_Ecomp(k2)
    for n in (1, 2, 7, -3):
        for x in (0.0, 0.3, -1.1):
            assert abs(ellip_F(x + n * math.pi, k2) - (ellip_F(x, k2) + 2 * n * K)) <= 1e-12 * max(1, abs(n))
            assert abs(ellip_E(x + n * math.pi, k2) - (ellip_E(x, k2) + 2 * n * E)) <= 1e-12 * max(1, abs(n))


def test_oddness() -> None:
    for x in (0.2, 1.4, 5.0):
        assert ellip_F(-x, 0.4) == -ellip_F(x, 0.4)
        assert ellip_E(-x, 0.4) == -ellip_E(x, 0.4)


def test_zero_modulus_is_identity() -> None:
    for x in (-2.0, 0.0, 0.9, 4.7):
        assert ellip_F(x, 0.0) == pytest.approx(x, abs=1e-14)
        assert ellip_E(x, 0.0) == pytest.approx(x, abs=1e-14)


def test_legendre_relation() -> None:
    # K(m) E(1-m) + E(m) K(1-m) - K(m) K(1-m) = pi/2
    for m in (0.1, 0.5, 0.77):
        lhs = ellip_K(m) * ellip_Ecomp(1 - m) + ellip_Ecomp(m) * ellip_K(1 - m) - ellip_K(m) * ellip_K(1 - m)
        assert lhs == pytest.approx(0.5 * math.pi, abs=1e-12)


def test_vectorized_matches_scalar() -> None:
    x = np.array([0.1, 0.9, 2.5, -0.7])
    out = ellip_F(x, 0.6)
    assert out.shape == x.shape
    for xi, oi in zip(x, out):
        assert oi == ellip_F(float(xi), 0.6)


def test_domain_guards() -> None:
    with pytest.raises(DomainError):
        ellip_K(-0.1)
    with pytest.raises(DomainError):
        ellip_K(1.0)
    with pytest.raises(DomainError):
        ellip_K(1.0 - 1e-13)  # complete integral diverges at the upper edge
    with pytest.raises(DomainError):
        ellip_F(0.3, 1.2)
    with pytest.raises(DomainError):
        ellip_F(2.0, 1.0 - 1e-13)  # reduction beyond a quarter period needs K
    # inside a quarter period the near-unit modulus is still fine
    assert math.isfinite(ellip_F(0.3, 1.0 - 1e-13))
