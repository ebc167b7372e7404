"""Theta functions, Eisenstein and Eisenstein-Hurwitz series, and the twisted
coefficient functions A_{s,gamma}(tau) with dual-route evaluation.

Conventions: theta is the odd Jacobi theta normalized so theta(z) = z + O(z^3)
(theta'(0) = 1); q = e^{2 pi i tau}, q_N = e^{2 pi i tau / N}; torsion lifts
are canonical, gamma~ = u/M + (v/N) tau with 0 <= u < M, 0 <= v < N.
Conditionally convergent lattice sums always use the Eisenstein order
(inner m, outer n).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .presentations import GammaSpec
from .series import ContractViolation, DomainError

TWO_PI_I = 2j * math.pi


class PoleError(ValueError):
    """Evaluation at (or numerically too close to) a lattice point."""


@dataclass(frozen=True)
class Tau:
    value: complex

    def __post_init__(self):
        if self.value.imag <= 0:
            raise DomainError("tau must lie in the upper half-plane")


@dataclass(frozen=True)
class TorsionPoint:
    """A class gamma = (u, v) in Gamma with its canonical lift."""

    gamma: tuple[int, int]
    spec: GammaSpec

    def __post_init__(self):
        u, v = self.gamma
        if not (0 <= u < self.spec.M and 0 <= v < self.spec.N):
            raise ContractViolation("gamma must be reduced mod (M, N)")

    @property
    def is_zero(self) -> bool:
        return self.gamma == (0, 0)

    @property
    def lift(self) -> tuple[int, int]:
        return self.gamma

    def tilde(self, tau: complex) -> complex:
        u, v = self.gamma
        return u / self.spec.M + (v / self.spec.N) * tau


# ---------------------------------------------------------------------------
# Bernoulli numbers and the Riemann/Hurwitz zeta
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2 and n > 1:
        return Fraction(0)
    acc = Fraction(0)
    for j in range(n):
        acc += Fraction(math.comb(n + 1, j)) * bernoulli(j)
    return -acc / (n + 1)


def hurwitz_zeta(s, a, terms: int = 24, em_order: int = 10) -> complex:
    """zeta(s, a) = sum_{m>=0} (m+a)^{-s} by Euler-Maclaurin tail acceleration.

    Requires Re s > 1 and a not in {0, -1, -2, ...}; complex a is allowed.
    """
    s = complex(s)
    a = complex(a)
    if s.real <= 1:
        raise DomainError("hurwitz_zeta requires Re s > 1")
    if abs(a.imag) < 1e-300 and a.real <= 0 and abs(a.real - round(a.real)) < 1e-300:
        raise DomainError("a must avoid non-positive integers")
    K = terms
    while abs(K + a) < 15:
        K += 8
    acc = 0j
    for m in range(K):
        acc += (m + a) ** (-s)
    x = K + a
    acc += x ** (1 - s) / (s - 1)
    acc += x ** (-s) / 2
    # sum_j B_{2j}/(2j)! * (s)_{2j-1} * x^{-s-2j+1}
    rising = s
    for j in range(1, em_order + 1):
        b = float(bernoulli(2 * j))
        acc += b / math.factorial(2 * j) * rising * x ** (-s - (2 * j - 1))
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return acc


def riemann_zeta(s) -> complex:
    return hurwitz_zeta(s, 1.0)


def zeta_even_exact(k: int) -> Fraction:
    """zeta(2n)/pi^{2n} as an exact rational (used for E_k normalizations)."""
    if k % 2 or k < 2:
        raise DomainError("zeta_even_exact needs even k >= 2")
    # zeta(k) = (-1)^{k/2+1} B_k (2 pi)^k / (2 k!)
    val = Fraction((-1) ** (k // 2 + 1)) * bernoulli(k) * Fraction(2 ** k) / (2 * math.factorial(k))
    return val  # multiply by pi^k to get zeta(k)


# ---------------------------------------------------------------------------
# Theta and eta
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _theta1_terms(tau: complex, tol: float = 1e-22):
    """(sign, p^{(n+1/2)^2}, 2n+1) triples of the theta_1 sine series."""
    p = cmath.exp(1j * math.pi * tau)
    out = []
    n = 0
    while True:
        w = (-1) ** n * p ** ((n + 0.5) ** 2)
        out.append((w, 2 * n + 1))
        if abs(w) < tol and n >= 3:
            break
        n += 1
        if n > 600:
            break
    return out


def theta(z, tau, deriv: int = 0) -> complex:
    """The odd theta with theta'(0) = 1, or its deriv-th z-derivative."""
    terms = _theta1_terms(tau)
    norm = sum(2 * w * m for w, m in terms)  # theta_1'(0)
    acc = 0j
    for w, m in terms:
        # d^k/dv^k sin(m v) = m^k sin(m v + k pi/2), v = pi z
        acc += 2 * w * m ** deriv * cmath.sin(m * math.pi * z + deriv * math.pi / 2)
    return acc * math.pi ** deriv / (math.pi * norm)


def theta_taylor(z0, tau, order: int) -> list[complex]:
    """Taylor coefficients of theta(z0 + x) in x, up to x^order."""
    return [theta(z0, tau, deriv=k) / math.factorial(k) for k in range(order + 1)]


def theta_log_deriv(z, tau) -> complex:
    """theta'/theta, with a pole error near lattice points."""
    t = theta(z, tau)
    if abs(t) < 1e-12:
        raise PoleError(f"theta'(z)/theta(z) pole near z={z}")
    return theta(z, tau, deriv=1) / t


def eta(tau: complex, terms: int | None = None) -> complex:
    q = cmath.exp(TWO_PI_I * tau)
    if terms is None:
        terms = max(8, int(40 / max(tau.imag, 0.05)))
    acc = cmath.exp(1j * math.pi * tau / 12)
    for n in range(1, terms + 1):
        acc *= 1 - q ** n
    return acc


def dlog_eta(tau: complex, terms: int | None = None) -> complex:
    """d/dtau log eta(tau)."""
    q = cmath.exp(TWO_PI_I * tau)
    if terms is None:
        terms = max(8, int(40 / max(tau.imag, 0.05)))
    acc = 1j * math.pi / 12
    for n in range(1, terms + 1):
        acc -= TWO_PI_I * n * q ** n / (1 - q ** n)
    return acc


# ---------------------------------------------------------------------------
# q- and q_N-expansions
# ---------------------------------------------------------------------------

@dataclass
class QSeries:
    """A truncated expansion in q (N = 1) or q_N = e^{2 pi i tau / N}."""

    N: int
    coeffs: dict[int, object]
    order: int

    @property
    def variable(self) -> str:
        return "q" if self.N == 1 else "qN"

    def __add__(self, other: "QSeries") -> "QSeries":
        if self.N != other.N:
            raise ContractViolation("q-series in different variables")
        order = min(self.order, other.order)
        coeffs = {k: v for k, v in self.coeffs.items() if k <= order}
        for k, v in other.coeffs.items():
            if k <= order:
                coeffs[k] = coeffs.get(k, 0) + v
        return QSeries(self.N, {k: v for k, v in coeffs.items() if v != 0}, order)

    def __mul__(self, other: "QSeries") -> "QSeries":
        if self.N != other.N:
            raise ContractViolation("q-series in different variables")
        order = min(self.order, other.order)
        coeffs: dict[int, object] = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                if k1 + k2 <= order:
                    coeffs[k1 + k2] = coeffs.get(k1 + k2, 0) + v1 * v2
        return QSeries(self.N, {k: v for k, v in coeffs.items() if v != 0}, order)

    def scale(self, c) -> "QSeries":
        return QSeries(self.N, {k: c * v for k, v in self.coeffs.items()}, self.order)

    def constant_term(self):
        return self.coeffs.get(0, 0)

    def eval(self, tau: complex) -> complex:
        qN = cmath.exp(TWO_PI_I * tau / self.N)
        return sum(complex(v) * qN ** k for k, v in sorted(self.coeffs.items()))


def _sigma(k: int, m: int) -> int:
    return sum(d ** k for d in range(1, m + 1) if m % d == 0)


def eisenstein_E_qseries(k: int, order: int) -> QSeries:
    """Normalized E_k = 1 - (2k/B_k) sum sigma_{k-1}(m) q^m, exact rationals."""
    if k < 2 or k % 2:
        raise DomainError("E_k needs even k >= 2")
    factor = Fraction(-2 * k) / bernoulli(k)
    coeffs: dict[int, object] = {0: Fraction(1)}
    for m in range(1, order + 1):
        coeffs[m] = factor * _sigma(k - 1, m)
    return QSeries(1, coeffs, order)


def _q_order(tau: complex, N: int = 1, budget: float = 1e-18, s: int = 0) -> int:
    """Smallest k with k^s e^{-2 pi Im(tau) k / N} below the budget (the k^s
    accounts for the r^{s-1} coefficient growth of the Lipschitz sums)."""
    decay = 2 * math.pi * tau.imag / N
    k = max(6, int(-math.log(budget) / decay) + 2)
    while k ** s * math.exp(-decay * k) > budget and k < 100000:
        k += max(2, k // 8)
    return k


def eisenstein_E(k: int, tau: complex) -> complex:
    if k == 2:
        return 24 / TWO_PI_I * dlog_eta(tau)
    return eisenstein_E_qseries(k, _q_order(tau)).eval(tau)


def eisenstein_G(k: int, tau: complex) -> complex:
    """G_k(tau); zero for odd k, quasimodular convention at k = 2."""
    if k < 2:
        raise DomainError("G_k needs k >= 2")
    if k % 2:
        return 0j
    zk = float(zeta_even_exact(k)) * math.pi ** k
    return 2 * zk * eisenstein_E(k, tau)


def g_s_gamma_qseries(s: int, tp: TorsionPoint, tau: complex,
                      order: int | None = None) -> QSeries:
    """The q_N-expansion of G_{s,gamma}; for v = 0 the constant term is the
    Hurwitz pair zeta(s, u/M) + (-1)^s zeta(s, 1 - u/M)."""
    if tp.is_zero:
        raise ContractViolation("gamma = 0: use eisenstein_G")
    if s < 2:
        raise DomainError("G_{s,gamma} needs s >= 2")
    M, N = tp.spec.M, tp.spec.N
    u, v = tp.lift
    if order is None:
        order = _q_order(tau, N, s=s)
    coeffs: dict[int, object] = {}

    def lipschitz_row(base_exp_per_r: int, phase: complex, front: complex):
        # front * sum_{r>=1} r^{s-1} phase^r qN^{base_exp_per_r * r}
        r = 1
        while base_exp_per_r * r <= order:
            k = base_exp_per_r * r
            coeffs[k] = coeffs.get(k, 0) + front * r ** (s - 1) * phase ** r
            r += 1

    c_minus = (-TWO_PI_I) ** s / math.factorial(s - 1)
    c_plus = TWO_PI_I ** s / math.factorial(s - 1)
    ph = cmath.exp(TWO_PI_I * u / M)
    if v == 0:
        const = hurwitz_zeta(s, u / M) + (-1) ** s * hurwitz_zeta(s, 1 - u / M)
        coeffs[0] = const
    else:
        lipschitz_row(v, ph, c_minus)           # the n = 0 row
    n = 1
    while N * n - v <= order:
        lipschitz_row(N * n + v, ph, c_minus)   # rows n >= 1
        lipschitz_row(N * n - v, ph.conjugate(), c_plus)  # rows n <= -1, reflected
        n += 1
    return QSeries(N, coeffs, order)


def G_s_gamma(s: int, tp: TorsionPoint, tau: complex) -> complex:
    """Eisenstein-Hurwitz series over the shifted lattice, Eisenstein order."""
    return g_s_gamma_qseries(s, tp, tau).eval(tau)


def A_bar(s: int, tp: TorsionPoint, tau: complex) -> complex:
    """The weight-s modular object G_s + G_{s,gamma}."""
    return eisenstein_G(s, tau) + G_s_gamma(s, tp, tau)


# ---------------------------------------------------------------------------
# Weierstrass p
# ---------------------------------------------------------------------------

def weierstrass_p(z, tau) -> complex:
    """p(z) = -(theta'/theta)'(z) + c, with c fixed by p - 1/z^2 -> 0."""
    t = theta(z, tau)
    if abs(t) < 1e-12:
        raise PoleError("weierstrass_p pole")
    t1 = theta(z, tau, deriv=1)
    t2 = theta(z, tau, deriv=2)
    dd = (t2 * t - t1 * t1) / (t * t)   # (theta'/theta)'
    a3 = theta(0, tau, deriv=3) / 6
    return -dd + 2 * a3


def weierstrass_laurent(tau, order: int) -> list[complex]:
    """Taylor coefficients of p(z) - 1/z^2 at 0 (even orders only nonzero)."""
    # p - 1/z^2 = -(log theta)'' - 1/z^2... computed from the theta Taylor series
    ts = theta_taylor(0.0, tau, order + 4)
    # theta = z(1 + a2 z^2 + ...); log theta = log z + log(u); u = theta(z)/z
    u = [complex(ts[k + 1] / ts[1]) for k in range(order + 3)]  # u[0] = 1
    # series log(sum u_k z^k) with u_0 = 1
    logu = _series_log(u)
    # (log theta)'' = -1/z^2 + (log u)''
    out = []
    for k in range(order + 1):
        c2 = (k + 2) * (k + 1) * logu[k + 2] if k + 2 < len(logu) else 0j
        out.append(-c2)  # p = -(log theta)'' + c; constant chosen so out[0] ... below
    out[0] = 0j  # by construction c cancels the constant term
    return out


# ---------------------------------------------------------------------------
# Truncated power-series helpers (dense complex lists, index = power)
# ---------------------------------------------------------------------------

def _series_mul(a: list, b: list, order: int | None = None) -> list:
    n = (len(a) - 1) + (len(b) - 1) if order is None else order
    out = [0j] * (n + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if i + j <= n:
                out[i + j] += ai * bj
    return out


def _series_inv(a: list, order: int) -> list:
    if a[0] == 0:
        raise DomainError("series not invertible")
    out = [1 / a[0]] + [0j] * order
    for k in range(1, order + 1):
        s = 0j
        for j in range(1, min(k, len(a) - 1) + 1):
            s += a[j] * out[k - j]
        out[k] = -s / a[0]
    return out


def _series_exp(a: list, order: int) -> list:
    if a[0] != 0:
        raise DomainError("series exp needs zero constant term")
    out = [1 + 0j] + [0j] * order
    # out' = a' out
    for k in range(1, order + 1):
        s = 0j
        for j in range(1, min(k, len(a) - 1) + 1):
            s += j * a[j] * out[k - j]
        out[k] = s / k
    return out


def _series_log(a: list) -> list:
    if a[0] != 1:
        raise DomainError("series log needs constant term 1")
    order = len(a) - 1
    out = [0j] * (order + 1)
    # log(a)' = a'/a
    ainv = _series_inv(a, order)
    da = [(j + 1) * a[j + 1] for j in range(order)]
    d = _series_mul(da, ainv, order - 1) if order >= 1 else []
    for k in range(1, order + 1):
        out[k] = d[k - 1] / k
    return out


def _series_deriv(a: list) -> list:
    return [(j + 1) * a[j + 1] for j in range(len(a) - 1)]


# ---------------------------------------------------------------------------
# The twisted coefficients A_{s,gamma}: Taylor route and Eisenstein route
# ---------------------------------------------------------------------------

def _f_gamma_series_taylor(tp: TorsionPoint, tau: complex, order: int) -> list:
    """Coefficients of x*F_gamma(x) = e^{2 pi i c x} theta(g~+x) / (theta(g~) theta(x)/x)."""
    u, v = tp.lift
    gt = tp.tilde(tau)
    th_g = theta_taylor(gt, tau, order)            # theta(g~ + x)
    th_0 = theta_taylor(0.0, tau, order + 1)       # theta(x) = x(1 + ...)
    th0_div = [complex(th_0[k + 1] / th_0[1]) for k in range(order + 1)]  # theta(x)/x
    pref = [complex(TWO_PI_I * v) ** k / math.factorial(k) for k in range(order + 1)]
    num = _series_mul(pref, th_g, order)
    den = _series_mul([complex(th_g[0])], th0_div, order)
    return _series_mul(num, _series_inv(den, order), order)


def A_s_gamma_taylor(tp: TorsionPoint, tau: complex, s_max: int) -> list[complex]:
    """A_{s,gamma} for s = 0..s_max from theta Taylor expansions.

    For gamma = 0 this is the Laurent route (theta'/theta)'(x) + 1/x^2.
    """
    if s_max > 12:
        raise ContractViolation("s_max <= 12 supported")
    order = s_max + 2
    if tp.is_zero:
        ts = theta_taylor(0.0, tau, order + 2)
        u = [complex(ts[k + 1] / ts[1]) for k in range(order + 2)]
        logu = _series_log(u)
        # (log theta)'' = -1/x^2 + (log u)''; g_0 = (theta'/theta)' + 1/x^2
        return [(k + 2) * (k + 1) * logu[k + 2] for k in range(s_max + 1)]
    xF = _f_gamma_series_taylor(tp, tau, order)    # x*F(x), constant term 1
    # g = F' + 1/x^2; with F = (1/x) * xF: F' = (xF)'/x - xF/x^2
    dxF = _series_deriv(xF)                        # (xF)'
    out = []
    for s in range(s_max + 1):
        # [x^s] F' = [x^{s+1}](xF)' - [x^{s+2}] xF = (s+2) xF[s+2] - xF[s+2] ... careful:
        # F' = sum_k (k xF[k]) x^{k-2} - ... do it directly:
        # F = sum_k xF[k] x^{k-1}; F' = sum_k (k-1) xF[k] x^{k-2}
        # [x^s] F' = (s+1) xF[s+2]; the k=0 term is -x^{-2}, cancelled by +1/x^2.
        out.append((s + 1) * xF[s + 2])
    return out


def A_s_gamma_closed(tp: TorsionPoint, tau: complex, s_max: int) -> list[complex]:
    """A_{s,gamma} for s = 0..s_max assembled from Eisenstein-Hurwitz data.

    Uses log F_gamma = -log x + (2 pi i c + (theta'/theta)(g~)) x
    + sum_{s>=0} (-1)^s (B_{s+2,gamma}/(s+2)) x^{s+2}, B = G_s - G_{s,gamma}.
    For gamma = 0: the -sum a~_{2k} E_{2k+2} x^{2k} expansion.
    """
    order = s_max + 2
    if tp.is_zero:
        out = []
        for s in range(s_max + 1):
            if s % 2:
                out.append(0j)
            else:
                k = s // 2
                a2k = -(2 * k + 1) * float(bernoulli(2 * k + 2)) \
                    * TWO_PI_I ** (2 * k + 2) / math.factorial(2 * k + 2)
                out.append(-a2k * eisenstein_E(2 * k + 2, tau))
        return out
    u, v = tp.lift
    gt = tp.tilde(tau)
    L = TWO_PI_I * v + theta_log_deriv(gt, tau)
    S = [0j, L] + [0j] * (order - 1)
    for s in range(0, order - 1):
        B = eisenstein_G(s + 2, tau) - G_s_gamma(s + 2, tp, tau)
        S[s + 2] = (-1) ** s * B / (s + 2)
    xF = _series_exp(S, order)   # x*F_gamma, constant term 1
    # same extraction as the Taylor route: [x^s](F' + 1/x^2) = (s+1) xF[s+2]
    return [(s + 1) * xF[s + 2] for s in range(s_max + 1)]


def check_modularity(s: int, tp: TorsionPoint, mat, tau: complex) -> float:
    """|A-bar_{s,gamma}(alpha tau) - (c tau + d)^s A-bar_{s,gamma}(tau)|.

    mat = ((a,b),(c,d)) in SL2(Z) with a = 1 mod M, d = 1 mod N, b = 0 mod N,
    c = 0 mod M.
    """
    (a, b), (c, d) = mat
    if a * d - b * c != 1:
        raise ContractViolation("matrix must be in SL2(Z)")
    M, N = tp.spec.M, tp.spec.N
    if (a - 1) % M or (d - 1) % N or b % N or c % M:
        raise ContractViolation("matrix violates the congruence conditions")
    if s < 3:
        raise DomainError("modularity check needs s >= 3")
    tau2 = (a * tau + b) / (c * tau + d)
    lhs = A_bar(s, tp, tau2)
    rhs = (c * tau + d) ** s * A_bar(s, tp, tau)
    return abs(lhs - rhs)
