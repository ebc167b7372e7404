"""Numerical monodromy: the KZ associator and the twisted KZB holonomy pair.

The flat systems are integrated as linear ODEs on the truncated enveloping
algebra of a certified-free generator chart, with the log-singular endpoints
replaced by exact local models h(z) (nu z)^R (h an analytic series computed
by recursion).  Integration runs in extended precision (clongdouble) by
default; series assembly happens at machine-double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gt import GroupLike, TwistedGroupElement
from .presentations import (GammaSpec, Presentation, _tname, chart_t0,
                            get_preset)
from .series import COMPLEX, ContractViolation, NCSeries, coproduct_defect

DTYPES = {"double": np.complex128, "extended": np.clongdouble}


class ConvergenceError(RuntimeError):
    """The epsilon-schedule or step control failed to converge."""


class ClearanceError(RuntimeError):
    """A path point came too close to a singularity of the connection."""


@dataclass
class Conventions:
    """Pinned assembly conventions for the renormalized holonomies.

    Defaults were calibrated against the relation systems (pentagon/hexagons
    for Phi_KZ with mu = 2 pi i; elliptic and ellipsitomic residuals for the
    KZB pairs); scripts/calibrate_conventions.py reruns the calibration.
    """

    kz_order: str = "g0_inv_g1"        # Phi = G0^{-1} G1; alternates: "g1_inv_g0", "g0_g1_inv"
    klass_sign: int = 1                # deck class +alpha_1 or -alpha_1
    norm_nu: complex = -2j * math.pi   # J ~ (nu z)^{t0} at 0
    b_exponent_sign: int = -1          # e^{sign * 2 pi i x / N} factor of B
    prefactor: str = "covariant"       # e^{-2 pi i (c/N) ad x}; or "integer", "none"
    renormalize: bool = True           # deck renormalizations pinned by the relations
    h_order: int = 8                   # order of the analytic local model


# ---------------------------------------------------------------------------
# dtype-generic theta Taylor coefficients
# ---------------------------------------------------------------------------

def _theta1_data(tau, dtype, tol=None):
    logp = 1j * dtype(math.pi) * dtype(tau)
    if tol is None:
        tol = 1e-24 if dtype is np.complex128 else 1e-30
    ws, ms = [], []
    n = 0
    while True:
        w = (-1) ** n * np.exp(dtype((n + 0.5) ** 2) * logp)
        ws.append(w)
        ms.append(2 * n + 1)
        if abs(complex(w)) < tol and n >= 3:
            break
        n += 1
        if n > 800:
            break
    ws = np.array(ws, dtype=dtype)
    ms = np.array(ms, dtype=dtype)
    return ws, ms, np.sum(2 * ws * ms)


class ThetaTaylor:
    """Taylor coefficients of the normalized odd theta at arbitrary centers."""

    def __init__(self, tau, dtype=np.complex128):
        self.tau = dtype(tau)
        self.dtype = dtype
        self.ws, self.ms, self.norm = _theta1_data(tau, dtype)
        self.pi = dtype(math.pi)

    def coeffs(self, z0, order: int) -> np.ndarray:
        z0 = self.dtype(z0)
        out = np.zeros(order + 1, dtype=self.dtype)
        phase = self.ms * self.pi * z0
        for k in range(order + 1):
            val = np.sum(2 * self.ws * self.ms ** k * np.sin(phase + k * self.pi / 2))
            out[k] = val * self.pi ** k / (self.pi * self.norm) / math.factorial(k)
        return out


# -- truncated 1D / 2D power-series helpers (numpy arrays) --------------------

def _poly_mul(a, b, order):
    out = np.zeros(order + 1, dtype=a.dtype)
    for i in range(min(len(a) - 1, order) + 1):
        ai = a[i]
        if ai == 0:
            continue
        hi = min(order - i, len(b) - 1)
        out[i:i + hi + 1] += ai * b[:hi + 1]
    return out


def _poly_inv(a, order):
    out = np.zeros(order + 1, dtype=a.dtype)
    out[0] = 1 / a[0]
    for k in range(1, order + 1):
        s = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            s = s + a[j] * out[k - j]
        out[k] = -s / a[0]
    return out


def _exp_poly(c, order, dtype):
    out = np.zeros(order + 1, dtype=dtype)
    out[0] = 1
    for k in range(1, order + 1):
        out[k] = out[k - 1] * c / k
    return out


def _bi_mul(A, B):
    """Product of bivariate truncated series (arrays indexed [z^m, u^s])."""
    mz, mu = A.shape[0] - 1, A.shape[1] - 1
    out = np.zeros_like(A)
    for m in range(mz + 1):
        for s in range(mu + 1):
            a = A[m, s]
            if a == 0:
                continue
            out[m:, s:] += a * B[: mz + 1 - m, : mu + 1 - s]
    return out


def _bi_mul_u(A, b):
    """Multiply each z-row of A by the u-series b."""
    out = np.zeros_like(A)
    mu = A.shape[1] - 1
    for m in range(A.shape[0]):
        out[m] = _poly_mul(A[m], b, mu)
    return out


def _bi_mul_z(A, b):
    """Multiply each u-column of A by the z-series b."""
    out = np.zeros_like(A)
    mz = A.shape[0] - 1
    for s in range(A.shape[1]):
        out[:, s] = _poly_mul(A[:, s], b, mz)
    return out


# ---------------------------------------------------------------------------
# Word-space linearization of the free chart
# ---------------------------------------------------------------------------

class WordSpace:
    """Dense-vector model of the truncated word algebra of a free preset."""

    def __init__(self, preset: Presentation, dtype=np.complex128):
        self.preset = preset
        self.alphabet = preset.alphabet
        self.cutoff = preset.cutoff
        self.dtype = dtype
        self.words = self.alphabet.words_up_to(self.cutoff)
        self.index = {w: i for i, w in enumerate(self.words)}
        self.dim = len(self.words)

    def left_mult_matrix(self, s: NCSeries) -> np.ndarray:
        M = np.zeros((self.dim, self.dim), dtype=self.dtype)
        deg = self.alphabet.deg
        for w, c in s.coeffs.items():
            dw = deg(w)
            cc = self.dtype(complex(c))
            for v, j in self.index.items():
                if dw + deg(v) <= self.cutoff:
                    M[self.index[w + v], j] += cc
        return M

    def right_mult_matrix(self, s: NCSeries) -> np.ndarray:
        M = np.zeros((self.dim, self.dim), dtype=self.dtype)
        deg = self.alphabet.deg
        for w, c in s.coeffs.items():
            dw = deg(w)
            cc = self.dtype(complex(c))
            for v, j in self.index.items():
                if dw + deg(v) <= self.cutoff:
                    M[self.index[v + w], j] += cc
        return M

    def vector(self, s: NCSeries) -> np.ndarray:
        v = np.zeros(self.dim, dtype=self.dtype)
        for w, c in s.coeffs.items():
            v[self.index[w]] = self.dtype(complex(c))
        return v

    def series(self, v: np.ndarray, tol: float = 0.0) -> NCSeries:
        out = NCSeries(self.alphabet, self.cutoff, COMPLEX)
        for w, i in self.index.items():
            c = complex(v[i])
            if abs(c) > tol:
                out.coeffs[w] = c
        return out

    def unit_vector(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=self.dtype)
        v[self.index[()]] = 1
        return v


# ---------------------------------------------------------------------------
# The 2-point ellipsitomic KZB kernel on the free chart
# ---------------------------------------------------------------------------

class KZBKernel:
    """K(z) = y + sum_alpha (P_alpha(ad x) theta(z-a~+ad x)/(theta(z-a~)
    theta(ad x)) - 1/ad x)(t^alpha), truncated on the free chart."""

    def __init__(self, gamma: GammaSpec, tau: complex, cutoff: int,
                 conventions: Conventions | None = None, dtype=np.complex128):
        if complex(tau).imag <= 0:
            raise ContractViolation("tau must be in the upper half-plane")
        self.gamma = gamma
        self.tau = complex(tau)
        self.cutoff = cutoff
        self.conv = conventions or Conventions()
        self.dtype = dtype
        self.preset = get_preset(f"chart-t1G:{gamma.M}:{gamma.N}", cutoff)
        self.space = WordSpace(self.preset, dtype)
        self.theta = ThetaTaylor(self.tau, dtype)
        self.smax = max(cutoff - 2, 0)
        self.alphas = gamma.elements()
        self._build_matrices()
        self._d_u = None
        self._pref = {a: None for a in self.alphas}

    def _t_expr(self, alpha) -> NCSeries:
        if alpha == (0, 0):
            return chart_t0(self.preset)
        return NCSeries.generator(self.preset.alphabet, self.cutoff,
                                  _tname(1, 2, alpha, self.gamma))

    def _build_matrices(self):
        alph, cut = self.preset.alphabet, self.cutoff
        x = NCSeries.generator(alph, cut, "x")
        y = NCSeries.generator(alph, cut, "y")
        self.M_y = self.space.left_mult_matrix(y)
        self.M_terms: dict[tuple, np.ndarray] = {}
        self.term_series: dict[tuple, NCSeries] = {}
        for alpha in self.alphas:
            cur = self._t_expr(alpha)
            for s in range(self.smax + 1):
                if s > 0:
                    cur = x.bracket(cur)
                if cur.coeffs:
                    self.term_series[(alpha, s)] = cur
                    self.M_terms[(alpha, s)] = self.space.left_mult_matrix(cur)

    # lattice geometry ---------------------------------------------------------

    def lift(self, alpha) -> complex:
        u, v = alpha
        return u / self.gamma.M + (v / self.gamma.N) * self.tau

    def lattice_points(self, span: int = 2):
        pts = []
        for k in range(-span * self.gamma.M, span * self.gamma.M + 1):
            for l in range(-span * self.gamma.N, span * self.gamma.N + 1):
                pts.append(k / self.gamma.M + (l / self.gamma.N) * self.tau)
        return pts

    def clearance(self, z: complex) -> float:
        return min(abs(z - p) for p in self.lattice_points())

    def _prefactor_rate(self, alpha) -> complex:
        u, v = alpha
        if self.conv.prefactor == "none":
            return 0j
        if self.conv.prefactor == "integer":
            return -2j * math.pi * v
        # covariant choice: K(z + tau/N) = Ad(e^{-2 pi i x/N})(beta-relabelled K)
        return -2j * math.pi * v / self.gamma.N

    # pointwise evaluation -------------------------------------------------------

    def _du(self, order):
        if self._d_u is None or len(self._d_u) < order + 1:
            th0 = self.theta.coeffs(0.0, order + 1)
            self._d_u = th0[1:order + 2]     # theta(u)/u
            self._d_u_inv = _poly_inv(self._d_u, order)
        return self._d_u

    def kappa(self, z, alpha) -> np.ndarray:
        """[u^s] of the alpha-summand, s = 0..smax."""
        order = self.smax + 1
        w = self.dtype(z) - self.dtype(self.lift(alpha))
        th_w = self.theta.coeffs(w, order)
        if abs(complex(th_w[0])) < 1e-13:
            raise ClearanceError(f"kernel pole at z={z}, alpha={alpha}")
        N_u = th_w / th_w[0]
        self._du(order)
        if self._pref[alpha] is None:
            self._pref[alpha] = _exp_poly(
                self.dtype(self._prefactor_rate(alpha)), order, self.dtype)
        E = _poly_mul(_poly_mul(self._pref[alpha], N_u, order),
                      self._d_u_inv, order)
        return E[1:order + 1]

    def matrix(self, z) -> np.ndarray:
        K = self.M_y.copy()
        for alpha in self.alphas:
            kap = self.kappa(z, alpha)
            for s in range(self.smax + 1):
                key = (alpha, s)
                if key in self.M_terms and kap[s] != 0:
                    K += kap[s] * self.M_terms[key]
        return K

    def kernel_series(self, z) -> NCSeries:
        out = NCSeries.generator(self.preset.alphabet, self.cutoff, "y", COMPLEX)
        for alpha in self.alphas:
            kap = self.kappa(z, alpha)
            for s in range(self.smax + 1):
                key = (alpha, s)
                if key in self.term_series:
                    out = out + self.term_series[key].to_complex().scale(complex(kap[s]))
        return out

    # Taylor data of the regular part at z = 0 -----------------------------------

    def residue0(self) -> NCSeries:
        return self._t_expr((0, 0))

    def regular_taylor_at_zero(self, m_order: int) -> list[np.ndarray]:
        """Matrices K_m with K(z) = M(t^0)/z + sum_{m>=0} K_m z^m near 0."""
        mu = self.smax + 1
        out = [self.M_y.copy() if m == 0 else np.zeros_like(self.M_y)
               for m in range(m_order + 1)]
        th0 = self.theta.coeffs(0.0, m_order + mu + 2)
        d_inv_u = _poly_inv(th0[1:mu + 2], mu)
        for alpha in self.alphas:
            P = _exp_poly(self.dtype(self._prefactor_rate(alpha)), mu, self.dtype)
            if alpha == (0, 0):
                # G2(z,u) = theta(z+u) * (z/theta(z)) / d(u); kappa-reg[m,s] = H[m+1,s+1]
                big = th0
                Num = np.zeros((m_order + 2, mu + 1), dtype=self.dtype)
                for m in range(m_order + 2):
                    for s in range(mu + 1):
                        if m + s < len(big):
                            Num[m, s] = big[m + s] * math.comb(m + s, m)
                inv_zth = _poly_inv(th0[1:m_order + 3], m_order + 1)  # z/theta(z)
                G = _bi_mul_u(_bi_mul_z(Num, inv_zth), d_inv_u)
                H = G.copy()
                H[1, 0] -= 1          # subtract z
                # H[m,0] and H[0,s!=1] vanish identically
                for m in range(m_order + 1):
                    kap = _poly_mul(P, H[m + 1], mu)
                    for s in range(self.smax + 1):
                        key = (alpha, s)
                        if key in self.M_terms and kap[s + 1] != 0:
                            out[m] = out[m] + kap[s + 1] * self.M_terms[key]
            else:
                w0 = -self.dtype(self.lift(alpha))
                big = self.theta.coeffs(w0, m_order + mu + 1)
                Num = np.zeros((m_order + 1, mu + 1), dtype=self.dtype)
                for m in range(m_order + 1):
                    for s in range(mu + 1):
                        if m + s < len(big):
                            Num[m, s] = big[m + s] * math.comb(m + s, m)
                inv_den_z = _poly_inv(big[:m_order + 1], m_order)
                E = _bi_mul_u(_bi_mul_z(Num, inv_den_z), d_inv_u)
                for m in range(m_order + 1):
                    kap = _poly_mul(P, E[m], mu)
                    kap0 = kap.copy()
                    if m == 0:
                        kap0[0] -= 1   # the (E-1)/u subtraction
                    for s in range(self.smax + 1):
                        key = (alpha, s)
                        if key in self.M_terms and kap0[s + 1] != 0:
                            out[m] = out[m] + kap0[s + 1] * self.M_terms[key]
        return out


# ---------------------------------------------------------------------------
# Generic transports and local models
# ---------------------------------------------------------------------------

def rk4_transport(kernel_matrix, a, b, dim, dtype, rtol=1e-13, max_step=None,
                  min_step=1e-9):
    """Path-ordered transport T with V(b) = T V(a) for V' = K(z) V, along the
    straight segment a -> b, with step-doubling error control."""
    V = np.eye(dim, dtype=dtype)
    direction = b - a
    L = abs(direction)
    if L == 0:
        return V
    t = 0.0
    h = min(0.05, L / 8, max_step or L)
    nsteps = 0

    def f(tt):
        return kernel_matrix(a + (tt / L) * direction) * (direction / dtype(L))

    def rk4(tt, hh, V0):
        k1 = f(tt) @ V0
        k2 = f(tt + hh / 2) @ (V0 + (hh / 2) * k1)
        k3 = f(tt + hh / 2) @ (V0 + (hh / 2) * k2)
        k4 = f(tt + hh) @ (V0 + hh * k3)
        return V0 + (hh / 6) * (k1 + 2 * k2 + 2 * k3 + k4)

    while t < L - 1e-15 * L:
        h = min(h, L - t)
        big = rk4(t, h, V)
        half = rk4(t + h / 2, h / 2, rk4(t, h / 2, V))
        err = float(np.max(np.abs(half - big)))
        scale = float(max(1.0, np.max(np.abs(half))))
        tol = rtol * scale
        if err <= tol:
            V = half + (half - big) / 15
            t += h
            nsteps += 1
            factor = 2.0 if err == 0 else min(2.0, 0.9 * (tol / err) ** 0.2)
            h = min(h * factor, max_step or L)
        else:
            h *= max(0.25, 0.9 * (tol / err) ** 0.25)
            if h < min_step:
                raise ConvergenceError("step control collapsed below min_step")
        if nsteps > 2_000_000:
            raise ConvergenceError("too many integration steps")
    return V


class LocalModel:
    """J(z) = h(z) (nu z)^R with h analytic, h(0) = 1, for K = R/z + regular."""

    def __init__(self, space: WordSpace, residue: NCSeries,
                 regular_taylor: list[np.ndarray], nu: complex, order: int):
        self.space = space
        self.nu = nu
        self.order = order
        L = space.left_mult_matrix(residue)
        self.R_right = space.right_mult_matrix(residue)
        adR = L - self.R_right
        dim = space.dim
        dtype = space.dtype
        self.h = [space.unit_vector()]
        # (m - ad R) h_m = sum_j K_{m-1-j} h_j, ad R nilpotent
        for m in range(1, order + 1):
            rhs = np.zeros(dim, dtype=dtype)
            for j in range(m):
                if m - 1 - j < len(regular_taylor):
                    rhs += regular_taylor[m - 1 - j] @ self.h[j]
            sol = rhs / m
            corr = rhs / m
            for _ in range(space.cutoff + 1):
                corr = (adR @ corr) / m
                if not np.any(corr):
                    break
                sol = sol + corr
            self.h.append(sol)

    def value(self, z) -> np.ndarray:
        """The series vector of h(z) (nu z)^R."""
        dtype = self.space.dtype
        z = dtype(z)
        hz = np.zeros(self.space.dim, dtype=dtype)
        zp = dtype(1)
        for m in range(self.order + 1):
            hz = hz + self.h[m] * zp
            zp = zp * z
        lam = np.log(dtype(self.nu) * z)
        out = hz
        term = hz
        for k in range(1, self.space.cutoff + 2):
            term = (self.R_right @ term) * (lam / k)
            if not np.any(term):
                break
            out = out + term
        return out


# ---------------------------------------------------------------------------
# Richardson / convergence bookkeeping for the epsilon schedule
# ---------------------------------------------------------------------------

@dataclass
class EpsTable:
    """Raw holonomy vectors per epsilon plus extrapolation diagnostics."""

    epsilons: list[float]
    diffs: list[float]
    extrapolated_correction: float
    converged: bool

    def to_json(self) -> dict:
        return {"epsilons": self.epsilons, "successive_diffs": self.diffs,
                "extrapolated_correction": self.extrapolated_correction,
                "converged": self.converged}


def _eps_extrapolate(vectors: list[np.ndarray], epsilons: list[float]):
    """Aitken extrapolation over the epsilon family; returns (value, table).

    With the high-order local models the successive differences are already
    at roundoff level, in which case extrapolation is skipped.
    """
    diffs = [float(np.max(np.abs(vectors[i + 1] - vectors[i])))
             for i in range(len(vectors) - 1)]
    best = vectors[-1]
    corr = 0.0
    converged = True
    scale = float(max(1.0, np.max(np.abs(vectors[-1]))))
    noise = 5e-12 * scale
    if len(vectors) >= 2 and diffs[-1] > noise:
        if len(vectors) >= 3 and diffs[-2] > noise:
            # ratio test: differences must keep shrinking
            if diffs[-1] > 0.5 * diffs[-2]:
                converged = False
            d1 = vectors[-2] - vectors[-3]
            d2 = vectors[-1] - vectors[-2]
            denom = d2 - d1
            mask = np.abs(denom) > 1e-300
            corr_vec = np.where(mask, -d2 * d2 / np.where(mask, denom, 1), 0)
            best = vectors[-1] + corr_vec
            corr = float(np.max(np.abs(corr_vec)))
        else:
            converged = diffs[-1] < 1e-6 * scale
    table = EpsTable(list(epsilons), diffs, corr, converged)
    return best, table


# ---------------------------------------------------------------------------
# The KZ associator
# ---------------------------------------------------------------------------

class KZKernel:
    """K(z) = x/z + y/(z-1) on the free algebra <x, y> (x = t12, y = t23)."""

    def __init__(self, cutoff: int, dtype=np.complex128):
        self.cutoff = cutoff
        self.dtype = dtype
        self.preset = get_preset("f:2", cutoff)
        self.space = WordSpace(self.preset, dtype)
        alph = self.preset.alphabet
        self.x = NCSeries.generator(alph, cutoff, "x")
        self.y = NCSeries.generator(alph, cutoff, "y")
        self.M_x = self.space.left_mult_matrix(self.x)
        self.M_y = self.space.left_mult_matrix(self.y)

    def matrix(self, z):
        return self.M_x / self.dtype(z) + self.M_y / (self.dtype(z) - 1)

    def clearance(self, z):
        return min(abs(z), abs(z - 1))


@dataclass
class KZResult:
    phi: GroupLike
    table: EpsTable
    grouplike_defect: float


def kz_associator(cutoff: int, eps_schedule=(1e-2, 1e-3, 1e-4),
                  precision: str = "extended",
                  conventions: Conventions | None = None,
                  rtol: float = 1e-13) -> KZResult:
    """Phi_KZ as the renormalized holonomy of G' = (x/z + y/(z-1)) G on (0,1),
    with G_{0+} ~ z^x and G_{1-} ~ (1-z)^y matched by analytic local models."""
    conv = conventions or Conventions()
    dtype = DTYPES[precision]
    ker = KZKernel(cutoff, dtype)
    space = ker.space
    h = conv.h_order
    # local models: at 0 in variable z; at 1 in the variable zeta = 1 - z
    # K(z) = x/z + y/(z-1): regular part at 0: y/(z-1) = -y (1 + z + z^2 + ...)
    reg0 = [-ker.M_y for _ in range(h + 1)]
    model0 = LocalModel(space, ker.x, reg0, 1.0, h)
    # in zeta: dG/dzeta = -K(1-zeta) G = (y/zeta + x/(zeta-1)) G
    reg1 = [-ker.M_x for _ in range(h + 1)]
    model1 = LocalModel(space, ker.y, reg1, 1.0, h)

    vectors = []
    for eps in eps_schedule:
        mid = dtype(0.5)
        T0 = rk4_transport(ker.matrix, dtype(eps), mid, space.dim, dtype, rtol=rtol)
        g0 = T0 @ model0.value(eps)

        def ker1(zeta):
            return ker.M_y / zeta + ker.M_x / (zeta - 1)

        T1 = rk4_transport(ker1, dtype(eps), mid, space.dim, dtype, rtol=rtol)
        g1 = T1 @ model1.value(eps)
        s0 = space.series(g0.astype(np.complex128))
        s1 = space.series(g1.astype(np.complex128))
        if conv.kz_order == "g1_inv_g0":
            phi = s1.group_inverse() * s0
        elif conv.kz_order == "g0_inv_g1":
            phi = s0.group_inverse() * s1
        else:
            phi = s0 * s1.group_inverse()
        vectors.append(WordSpace(ker.preset, np.complex128).vector(phi))
    best, table = _eps_extrapolate(vectors, list(eps_schedule))
    if not table.converged:
        raise ConvergenceError(f"KZ epsilon schedule did not converge: {table.diffs}")
    space_d = WordSpace(ker.preset, np.complex128)
    phi_series = space_d.series(best, tol=0.0)
    defect = coproduct_defect(phi_series)
    return KZResult(GroupLike.from_series(ker.preset, phi_series), table, defect)


# ---------------------------------------------------------------------------
# The twisted KZB pair
# ---------------------------------------------------------------------------

@dataclass
class HolonomyResult:
    A: GroupLike
    B: GroupLike
    klass_A: tuple
    klass_B: tuple
    gamma: GammaSpec
    tau: complex
    table_A: EpsTable
    table_B: EpsTable
    grouplike_defect: float
    conventions: Conventions

    def diagnostics(self) -> dict:
        return {"tau": [self.tau.real, self.tau.imag],
                "M": self.gamma.M, "N": self.gamma.N,
                "klass_A": list(self.klass_A), "klass_B": list(self.klass_B),
                "grouplike_defect": self.grouplike_defect,
                "eps_table_A": self.table_A.to_json(),
                "eps_table_B": self.table_B.to_json()}


def _gamma_twist(preset, klass, series):
    elt = TwistedGroupElement.klass_only(preset, klass, series.field)
    return elt._act(elt.klass, series)


def kzb_pair(gamma: GammaSpec, tau: complex, cutoff: int,
             eps_schedule=(1e-2, 1e-3, 1e-4), precision: str = "extended",
             conventions: Conventions | None = None, rtol: float = 1e-13,
             base_shift: float = 0.0) -> HolonomyResult:
    """Renormalized holonomies A, B of the 2-point ellipsitomic KZB system.

    Transport runs from the regularized origin (analytic local model matched
    at eps*w) through the cell center w = 1/(2M) + tau/(2N), then along the
    1/M- and tau/N-translations.  The assembly is the deck-twisted z-free
    combination

        A-body = J(z+1/M)^{-1} (alpha . J(z)),
        B-body = e^{-2 pi i x/N} (e^{+2 pi i x/N} J(z+tau/N)^{-1}
                  e^{-2 pi i x/N} (beta . J(z)))^{-1},

    followed by two renormalizations that the relation systems pin: the
    t^g-coefficients of log A are balanced (all equal mu/(2M)), and B carries
    the lattice-branch cross factor exp(-(mu/2)(tau/N + 1/M)[y, t^alpha]).
    Calibration and out-of-sample validation: scripts/calibrate_conventions.py.
    """
    conv = conventions or Conventions()
    dtype = DTYPES[precision]
    ker = KZBKernel(gamma, tau, cutoff, conv, dtype)
    space = ker.space
    chart = ker.preset
    M, N = gamma.M, gamma.N
    w = 1 / (2 * M) + (tau / (2 * N)) * (1 + base_shift)
    model = LocalModel(space, ker.residue0(),
                       ker.regular_taylor_at_zero(conv.h_order),
                       conv.norm_nu, conv.h_order)
    clearance_mid = min(ker.clearance(w), ker.clearance(w + 1 / M),
                        ker.clearance(w + tau / N))
    max_step = clearance_mid / 3

    # J(w) and the two continuations, per epsilon
    vecs_w = []
    for eps in eps_schedule:
        z0 = eps * w
        if ker.clearance(z0) < abs(z0) / 2:
            raise ClearanceError("regularized start point crowds a singularity")
        T_up = rk4_transport(ker.matrix, dtype(z0), dtype(w), space.dim, dtype,
                             rtol=rtol, max_step=max_step)
        vecs_w.append((T_up @ model.value(z0)).astype(np.complex128))
    T_h = rk4_transport(ker.matrix, dtype(w), dtype(w + 1 / M), space.dim,
                        dtype, rtol=rtol, max_step=max_step).astype(np.complex128)
    T_v = rk4_transport(ker.matrix, dtype(w), dtype(w + tau / N), space.dim,
                        dtype, rtol=rtol, max_step=max_step).astype(np.complex128)
    vecs_A = [T_h @ v for v in vecs_w]
    vecs_B = [T_v @ v for v in vecs_w]

    Jw_best, table_w = _eps_extrapolate(vecs_w, list(eps_schedule))
    JA_best, table_A = _eps_extrapolate(vecs_A, list(eps_schedule))
    JB_best, table_B = _eps_extrapolate(vecs_B, list(eps_schedule))
    for tb, tag in ((table_w, "J(w)"), (table_A, "J(w+1/M)"), (table_B, "J(w+tau/N)")):
        if not tb.converged:
            raise ConvergenceError(f"epsilon schedule diverged for {tag}: {tb.diffs}")

    space_d = WordSpace(chart, np.complex128)
    Jw_s = space_d.series(Jw_best)
    JA_s = space_d.series(JA_best)
    JB_s = space_d.series(JB_best)

    ksign = conv.klass_sign
    alpha = gamma.reduce((ksign * 1, 0))
    beta = gamma.reduce((0, ksign * 1))
    klass_A = (alpha, (0, 0))
    klass_B = (beta, (0, 0))
    x = NCSeries.generator(chart.alphabet, cutoff, "x", COMPLEX)
    y = NCSeries.generator(chart.alphabet, cutoff, "y", COMPLEX)
    mu0 = 2j * math.pi

    if conv.renormalize and alpha != (0, 0):
        # balance the t^g-coefficients of log A by the (nu z)^{t0}-gauge move
        from .presentations import _tname
        A_raw = JA_s.group_inverse() * _gamma_twist(chart, klass_A, Jw_s)
        i_ta = chart.alphabet.index[_tname(1, 2, alpha, gamma)]
        r = -A_raw.log().coeffs.get((i_ta,), 0j) / 2
        q = chart_t0(chart).to_complex().scale(r).exp()
        Jw_s, JA_s, JB_s = Jw_s * q, JA_s * q, JB_s * q

    A_body = JA_s.group_inverse() * _gamma_twist(chart, klass_A, Jw_s)
    s = conv.b_exponent_sign * mu0 / N
    bfac = x.scale(s).exp()
    bfac_inv = x.scale(-s).exp()
    B_body = bfac * (bfac_inv * JB_s.group_inverse() * bfac
                     * _gamma_twist(chart, klass_B, Jw_s)).group_inverse()
    if conv.renormalize and alpha != (0, 0):
        from .presentations import _tname
        t_a = NCSeries.generator(chart.alphabet, cutoff,
                                 _tname(1, 2, alpha, gamma), COMPLEX)
        B_body = B_body * y.bracket(t_a).scale(
            -(mu0 / 2) * (tau / N + 1 / M)).exp()

    A = GroupLike.from_series(chart, A_body)
    B = GroupLike.from_series(chart, B_body)
    defect = max(coproduct_defect(A_body), coproduct_defect(B_body))
    return HolonomyResult(A, B, klass_A, klass_B, gamma, complex(tau),
                          table_A, table_B, defect, conv)


# ---------------------------------------------------------------------------
# Twisted eMZV coefficient extraction
# ---------------------------------------------------------------------------

def temzv_extract(g: GroupLike, specs: list[tuple[int, tuple[int, int]]],
                  gamma: GammaSpec) -> complex:
    """Coefficient of ad^{n1}(x)(t^{a1}) ... ad^{nr}(x)(t^{ar}) in the series,
    returned with the alternating sign (-1)^r of the generating-series
    convention.  Raises if the monomial degree exceeds the cutoff."""
    chart = g.preset
    cutoff = chart.cutoff
    degree = sum(n + 2 for n, _ in specs)
    if degree > cutoff:
        raise ContractViolation("monomial degree exceeds the cutoff")
    if not specs:
        return complex(g.series.constant_term())
    coeffs = monomial_coordinates(g.series, degree, gamma, chart)
    key = tuple((n, tuple(a)) for n, a in specs)
    return (-1) ** len(specs) * coeffs.get(key, 0j)


def _monomials_of_degree(degree: int, gamma: GammaSpec):
    """All (n_i, alpha_i) tuples with sum (n_i + 2) = degree."""
    out = []

    def grow(prefix, remaining):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for n in range(remaining - 1):
            if n + 2 > remaining:
                break
            for alpha in gamma.elements():
                grow(prefix + [(n, alpha)], remaining - n - 2)

    grow([], degree)
    return out


def monomial_coordinates(series: NCSeries, degree: int, gamma: GammaSpec,
                         chart: Presentation) -> dict:
    """Coordinates of the degree-d part in the ad^n(x)(t^alpha)-word basis.

    The monomials are linearly independent; coordinates are obtained by exact
    elimination, and the off-span remainder is required to be numerically
    small (it is reported in the error otherwise).
    """
    from fractions import Fraction
    cutoff = chart.cutoff
    alph = chart.alphabet
    x = NCSeries.generator(alph, degree, "x")
    mono_list = _monomials_of_degree(degree, gamma)
    expansions = []
    for mono in mono_list:
        acc = NCSeries.one(alph, degree)
        for n, alpha in mono:
            if alpha == (0, 0):
                t = chart_t0(chart, cutoff=degree)
            else:
                t = NCSeries.generator(alph, degree, _tname(1, 2, alpha, gamma))
            for _ in range(n):
                t = x.bracket(t)
            acc = acc * t
        expansions.append(acc)
    words = sorted({w for e in expansions for w in e.coeffs},
                   key=lambda w: (len(w), w))
    widx = {w: i for i, w in enumerate(words)}
    # exact row echelon with multiplier tracking: rows = monomial expansions
    rows = []
    for k, e in enumerate(expansions):
        vec = {widx[w]: Fraction(c) for w, c in e.coeffs.items()}
        mult = {k: Fraction(1)}
        rows.append((vec, mult))
    pivots = {}
    for vec, mult in rows:
        while vec:
            p = min(vec)
            if p not in pivots:
                c = vec[p]
                pivots[p] = ({j: v / c for j, v in vec.items()},
                             {j: v / c for j, v in mult.items()})
                break
            # eliminate against the existing pivot row
            pvec, pmult = pivots[p]
            c = vec[p]
            for j, v in pvec.items():
                nv = vec.get(j, Fraction(0)) - c * v
                if nv:
                    vec[j] = nv
                else:
                    vec.pop(j, None)
            for j, v in pmult.items():
                nv = mult.get(j, Fraction(0)) - c * v
                if nv:
                    mult[j] = nv
                else:
                    mult.pop(j, None)
        else:
            raise ContractViolation("dependent monomial family")
    # back-substitute the series vector through the echelon
    deg = alph.deg
    target = {widx[w]: complex(c) for w, c in series.coeffs.items()
              if w in widx and deg(w) == degree}
    coords = [0j] * len(mono_list)
    vec = dict(target)
    while True:
        live = sorted(j for j in vec if j in pivots and vec[j] != 0)
        if not live:
            break
        p = live[0]
        c = vec[p]
        pvec, pmult = pivots[p]
        for j, v in pvec.items():
            nv = vec.get(j, 0j) - c * complex(v)
            if nv:
                vec[j] = nv
            else:
                vec.pop(j, None)
        for k, v in pmult.items():
            coords[k] += c * complex(v)
    return {tuple((n, tuple(a)) for n, a in mono_list[k]): coords[k]
            for k in range(len(mono_list))}
