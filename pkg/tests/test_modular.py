"""Theta/Eisenstein numerics against independent oracles."""

import cmath
import math

import numpy as np
import pytest

from ellassoc.modular import (A_bar, A_s_gamma_closed, A_s_gamma_taylor,
                              G_s_gamma, PoleError, TorsionPoint, bernoulli,
                              check_modularity, dlog_eta, eisenstein_E,
                              eisenstein_E_qseries, eisenstein_G, eta,
                              g_s_gamma_qseries, hurwitz_zeta, riemann_zeta,
                              theta, theta_log_deriv, weierstrass_laurent,
                              weierstrass_p)
from ellassoc.presentations import GammaSpec
from ellassoc.series import ContractViolation, DomainError


def theta_product_oracle(z, tau, terms=60):
    """Independent product-formula route for the normalized odd theta."""
    q = cmath.exp(2j * math.pi * tau)
    acc = cmath.sin(math.pi * z) / math.pi
    for n in range(1, terms + 1):
        acc *= (1 - 2 * q ** n * cmath.cos(2 * math.pi * z) + q ** (2 * n)) \
            / (1 - q ** n) ** 2
    return acc


GRID = [0.13 + 0.21j, 0.45 - 0.08j, -0.31 + 0.17j, 0.5 + 0.33j, 0.02 + 0.4j,
        0.7 + 0.05j, -0.22 - 0.29j, 0.61 + 0.44j, 0.35, 0.27j + 0.9,
        0.81 - 0.13j, -0.55 + 0.21j, 0.18 + 0.07j, 0.92 + 0.3j, -0.4 + 0.36j,
        0.06 - 0.33j, 0.58 + 0.12j, 0.33 + 0.28j, -0.11 + 0.09j, 0.44 + 0.5j]


@pytest.mark.parametrize("tau", [1j, 0.5 + 1j, 2j])
def test_theta_identities_on_grid(tau):
    assert theta(0, tau) == 0
    assert abs(theta(0, tau, deriv=1) - 1) < 1e-15
    for z in GRID:
        th = theta(z, tau)
        assert abs(theta(-z, tau) + th) < 1e-12 * max(1, abs(th))
        assert abs(theta(z + 1, tau) + th) < 1e-10 * max(1, abs(th))
        quasi = -cmath.exp(-1j * math.pi * tau - 2j * math.pi * z) * th
        assert abs(theta(z + tau, tau) - quasi) < 1e-10 * max(1, abs(quasi))
        assert abs(th - theta_product_oracle(z, tau)) < 1e-10 * max(1, abs(th))


def test_theta_log_deriv_pole():
    with pytest.raises(PoleError):
        theta_log_deriv(0.0, 1j)
    with pytest.raises(PoleError):
        theta_log_deriv(1 + 1j, 1j)


def brute_zeta(s, K=200000):
    acc = sum(1.0 / n ** s for n in range(1, K))
    # Richardson tail: integral + midpoint correction
    acc += K ** (1 - s) / (s - 1) + 0.5 * K ** (-s)
    return acc


def test_hurwitz_zeta_examples():
    assert abs(riemann_zeta(4) - math.pi ** 4 / 90) < 1e-12
    assert abs(hurwitz_zeta(3, 2) - (riemann_zeta(3) - 1)) < 1e-12
    for s in (2, 3, 5):
        assert abs(riemann_zeta(s) - brute_zeta(s)) < 1e-11
    # brute-force oracle at a shifted argument
    a = 0.31
    brute = sum((m + a) ** -3.0 for m in range(400000))
    brute += (400000 + a) ** -2.0 / 2 + 0.5 * (400000 + a) ** -3.0
    assert abs(hurwitz_zeta(3, a) - brute) < 1e-10
    with pytest.raises(DomainError):
        hurwitz_zeta(0.5, 1.0)
    with pytest.raises(DomainError):
        hurwitz_zeta(3, -2.0)


def test_eisenstein_basics():
    for k in (3, 5, 7):
        assert eisenstein_G(k, 1j) == 0
    for k in (2, 4, 6, 8):
        assert eisenstein_E_qseries(k, 6).constant_term() == 1
    tau = 0.3 + 1.1j
    q_route = 1 - 24 * sum(sum(d for d in range(1, m + 1) if m % d == 0)
                           * cmath.exp(2j * math.pi * tau * m)
                           for m in range(1, 80))
    assert abs(eisenstein_E(2, tau) - q_route) < 1e-12
    assert abs(dlog_eta(tau) - 2j * math.pi / 24 * eisenstein_E(2, tau)) < 1e-12


def row_sum_oracle(s, c, mmax=60000):
    ms = np.arange(-mmax, mmax + 1)
    row = np.sum(1.0 / ((ms + complex(c)).astype(complex)) ** s)
    hi = mmax + 1 + c
    lo = mmax + 1 - c
    row += hi ** (1 - s) / (s - 1) + 0.5 * hi ** (-s)
    row += (-1) ** s * (lo ** (1 - s) / (s - 1) + 0.5 * lo ** (-s))
    return row


def lattice_oracle(s, gt, tau, nmax=40):
    """Direct Eisenstein-ordered lattice sum (inner m, outer n)."""
    total = 0j
    for n in range(-nmax, nmax + 1):
        c = n * tau + gt
        if abs(c - round(c.real)) < 1e-12 and abs(c.imag) < 1e-12:
            ms = np.arange(-60000, 60001)
            ms = ms[np.abs(ms + round(c.real)) > 0]
            total += np.sum(1.0 / ((ms + c).astype(complex)) ** s)
        else:
            total += row_sum_oracle(s, c)
    return total


def test_G4_against_lattice_sum():
    assert abs(eisenstein_G(4, 1j) - lattice_oracle(4, 0.0, 1j)) < 1e-8


def test_weierstrass_properties():
    tau = 1j
    z = 0.21 + 0.13j
    assert abs(weierstrass_p(-z, tau) - weierstrass_p(z, tau)) < 1e-10
    assert abs(weierstrass_p(z + 1, tau) - weierstrass_p(z, tau)) < 1e-10
    lau = weierstrass_laurent(tau, 8)
    for k in (1, 2, 3):
        target = (2 * k + 1) * eisenstein_G(2 * k + 2, tau)
        assert abs(lau[2 * k] - target) < 1e-8 * max(1, abs(target))
    assert abs(lau[1]) < 1e-12 and abs(lau[3]) < 1e-12
    # direct z-evaluation matches the Laurent data (order 16 for the tail)
    lau16 = weierstrass_laurent(tau, 16)
    approx = 1 / z ** 2 + sum(lau16[k] * z ** k for k in range(17))
    assert abs(weierstrass_p(z, tau) - approx) < 1e-9


def test_G_s_gamma_routes_and_parity():
    spec = GammaSpec(4, 3)
    tau = 1j
    tp = TorsionPoint((1, 2), spec)
    tpm = TorsionPoint((3, 1), spec)   # -gamma
    for s in (2, 3, 4):
        mine = G_s_gamma(s, tp, tau)
        if s >= 3:
            assert abs(mine - lattice_oracle(s, tp.tilde(tau), tau)) < 1e-8
        assert abs(mine - (-1) ** s * G_s_gamma(s, tpm, tau)) < 1e-10
    with pytest.raises(ContractViolation):
        G_s_gamma(4, TorsionPoint((0, 0), spec), tau)


def test_G_s_gamma_cusp_limit():
    spec = GammaSpec(2, 2)
    # c != 0: constant term 0, value -> 0 as Im tau grows
    tp = TorsionPoint((1, 1), spec)
    assert abs(G_s_gamma(4, tp, 40j)) < 1e-12
    # c = 0: q_N-constant term equals the Hurwitz pair
    tp0 = TorsionPoint((1, 0), spec)
    qs = g_s_gamma_qseries(4, tp0, 40j)
    target = hurwitz_zeta(4, 0.5) + hurwitz_zeta(4, 0.5)
    assert abs(qs.constant_term() - target) < 1e-12


def test_dual_route_agreement_grid():
    spec = GammaSpec(2, 2)
    for tau in (1j, 2j, 0.5 + 1j):
        for gamma in [(0, 1), (1, 0), (1, 1)]:
            tp = TorsionPoint(gamma, spec)
            t = A_s_gamma_taylor(tp, tau, 6)
            c = A_s_gamma_closed(tp, tau, 6)
            for s in range(7):
                assert abs(t[s] - c[s]) / (1 + abs(c[s])) < 1e-9


def test_gamma_zero_routes():
    spec = GammaSpec(2, 1)
    tp0 = TorsionPoint((0, 0), spec)
    for tau in (1j, 0.5 + 1j):
        t = A_s_gamma_taylor(tp0, tau, 6)
        c = A_s_gamma_closed(tp0, tau, 6)
        for s in range(7):
            assert abs(t[s] - c[s]) < 1e-9 * (1 + abs(c[s]))
        assert max(abs(t[s]) for s in (1, 3, 5)) < 1e-12


def test_A0_against_direct_limit():
    """Third route: Richardson limit of the defining expression."""
    spec = GammaSpec(2, 1)
    tau = 1j
    tp = TorsionPoint((1, 0), spec)
    gt = tp.tilde(tau)

    def g_direct(x):
        F = theta(gt + x, tau) / (theta(gt, tau) * theta(x, tau))
        return (theta_log_deriv(gt + x, tau) - theta_log_deriv(x, tau)) * F \
            + 1 / x ** 2

    vals = [(g_direct(h) + g_direct(-h)) / 2 for h in (1e-2, 5e-3, 2.5e-3)]
    r1 = (4 * vals[1] - vals[0]) / 3
    r2 = (4 * vals[2] - vals[1]) / 3
    limit = (16 * r2 - r1) / 15
    assert abs(A_s_gamma_taylor(tp, tau, 0)[0] - limit) < 1e-9


def test_modularity():
    spec = GammaSpec(2, 2)
    tau = 1j
    tp = TorsionPoint((1, 1), spec)
    assert check_modularity(4, tp, ((1, 0), (0, 1)), tau) < 1e-12
    for s in (3, 4, 5, 6):
        assert check_modularity(s, tp, ((1, spec.N), (0, 1)), tau) < 1e-7
        assert check_modularity(s, tp, ((1, 0), (spec.M, 1)), tau) < 1e-7
    tau2 = (-1 + 2j) / 2
    assert check_modularity(3, tp, ((1, 0), (spec.M, 1)), tau2) < 1e-7
    with pytest.raises(ContractViolation):
        check_modularity(4, tp, ((1, 1), (0, 1)), tau)   # b != 0 mod N
    with pytest.raises(ContractViolation):
        check_modularity(4, tp, ((2, 1), (1, 1)), tau)   # det != 1


def test_bernoulli_values():
    from fractions import Fraction
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(12) == Fraction(-691, 2730)


def test_eta_known_value():
    # eta(i) = Gamma(1/4) / (2 pi^{3/4})
    target = math.gamma(0.25) / (2 * math.pi ** 0.75)
    assert abs(eta(1j) - target) < 1e-12


def test_hurwitz_half_value():
    assert abs(hurwitz_zeta(2, 0.5) - math.pi ** 2 / 2) < 1e-12
