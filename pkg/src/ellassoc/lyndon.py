"""Lyndon-word bases of free Lie algebras on weighted alphabets."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .series import Alphabet, COMPLEX, NCSeries, RATIONAL


def _is_lyndon(w: tuple[int, ...]) -> bool:
    """Strictly smaller than every proper rotation."""
    n = len(w)
    if n == 0:
        return False
    for k in range(1, n):
        if w[k:] + w[:k] <= w:
            return False
    return True


def lyndon_words(degrees: tuple[int, ...], d: int) -> list[tuple[int, ...]]:
    """Lyndon words of weighted total degree d over letters 0..len(degrees)-1."""
    out = []

    def grow(prefix, remaining):
        if remaining == 0:
            if _is_lyndon(prefix):
                out.append(prefix)
            return
        for i, gd in enumerate(degrees):
            if gd <= remaining:
                grow(prefix + (i,), remaining - gd)

    grow((), d)
    return sorted(out)


def standard_factorization(w: tuple[int, ...]) -> tuple[tuple, tuple]:
    """w = uv with v the longest proper Lyndon suffix."""
    n = len(w)
    for i in range(1, n):
        if _is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise ValueError(f"{w} has no standard factorization")


def bracketing(w: tuple[int, ...]):
    """Nested-bracket tree of the standard (Shirshov) bracketing."""
    if len(w) == 1:
        return w[0]
    u, v = standard_factorization(w)
    return (bracketing(u), bracketing(v))


def expand_bracketing(tree, alphabet: Alphabet, cutoff: int,
                      field: str = RATIONAL) -> NCSeries:
    if isinstance(tree, int):
        return NCSeries.generator(alphabet, cutoff,
                                  alphabet.generators[tree].name, field)
    left = expand_bracketing(tree[0], alphabet, cutoff, field)
    right = expand_bracketing(tree[1], alphabet, cutoff, field)
    return left.bracket(right)


def lyndon_basis(alphabet: Alphabet, d: int, cutoff: int | None = None,
                 field: str = RATIONAL) -> list[tuple[tuple[int, ...], NCSeries]]:
    """Pairs (lyndon word, expanded bracketing) of degree d, in Lyndon order."""
    cut = d if cutoff is None else cutoff
    out = []
    for w in lyndon_words(alphabet.degrees, d):
        out.append((w, expand_bracketing(bracketing(w), alphabet, cut, field)))
    return out


@lru_cache(maxsize=None)
def _mobius(n: int) -> int:
    if n == 1:
        return 1
    res, m = 1, n
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    if m > 1:
        res = -res
    return res


def free_lie_dims(degrees: tuple[int, ...], up_to: int) -> list[int]:
    """Graded dimensions of the free Lie algebra, degrees 1..up_to.

    Uses the Euler-product inversion of the word generating series
    prod_n (1-t^n)^{-l_n} = 1/(1 - sum_g t^{deg g}).
    """
    # word counts W_d
    W = [0] * (up_to + 1)
    W[0] = 1
    for d in range(1, up_to + 1):
        W[d] = sum(W[d - gd] for gd in degrees if gd <= d)
    # [t^m] log W(t) via m*logW_m = m*W_m - sum_k k*logW_k W_{m-k}
    logW = [Fraction(0)] * (up_to + 1)
    for m in range(1, up_to + 1):
        s = Fraction(m) * W[m]
        for k in range(1, m):
            s -= Fraction(k) * logW[k] * W[m - k]
        logW[m] = s / m  # [t^m] log W(t)
    dims = [0] * (up_to + 1)
    for n in range(1, up_to + 1):
        total = Fraction(0)
        for d in range(1, n + 1):
            if n % d == 0:
                total += Fraction(_mobius(n // d)) * d * logW[d]
        val = total / n
        assert val.denominator == 1
        dims[n] = int(val)
    return dims[1:]


class LyndonCoordinates:
    """Coordinates of free-Lie elements of one degree in the Lyndon basis.

    The expansion of a standard bracketing is triangular: it equals the
    Lyndon word plus lexicographically larger words with the same letter
    multiset, so conversion is back-substitution inside multiset buckets.
    """

    def __init__(self, alphabet: Alphabet, d: int, cutoff: int | None = None,
                 field: str = RATIONAL):
        self.alphabet = alphabet
        self.degree = d
        self.basis = lyndon_basis(alphabet, d, cutoff, field)
        self.words = [w for w, _ in self.basis]
        for w, exp in self.basis:
            if exp.coeffs.get(w, 0) != 1:
                raise AssertionError(f"bracketing of {w} is not monic on {w}")

    def __len__(self):
        return len(self.basis)

    def from_word_vector(self, s: NCSeries, tol: float = 0.0) -> list:
        """Solve s = sum c_i * basis_i; raises if s is not in the free Lie span."""
        basis = self.basis
        if s.field == COMPLEX:
            basis = [(w, exp.to_complex()) for w, exp in basis]
        rem = NCSeries(self.alphabet, self.degree, s.field, s.coeffs)
        coords = []
        for w, exp in basis:
            c = rem.coeffs.get(w, None)
            if c is None:
                c = Fraction(0) if s.field == RATIONAL else 0j
            coords.append(c)
            if c != 0:
                rem = rem - NCSeries(self.alphabet, self.degree, s.field, exp.coeffs).scale(c)
        residue = max((abs(v) for v in rem.coeffs.values()), default=0.0)
        if residue > tol:
            raise ValueError(f"element is not in the free Lie span (residue {residue})")
        return coords

    def to_word_vector(self, coords, cutoff: int, field: str = RATIONAL) -> NCSeries:
        out = NCSeries.zero(self.alphabet, cutoff, field)
        for c, (w, _) in zip(coords, self.basis):
            if c != 0:
                exp = expand_bracketing(bracketing(w), self.alphabet, cutoff, field)
                out = out + exp.scale(c)
        return out
