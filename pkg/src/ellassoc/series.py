"""Truncated noncommutative power series over a weighted generator alphabet.

Series are stored sparsely as word -> coefficient maps, where a word is a
tuple of generator indices and every word of total degree > cutoff is
discarded.  Two scalar fields are supported: exact rationals (Fraction) for
structural computations and machine complex numbers for analytic ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

RATIONAL = "rational"
COMPLEX = "complex"


class ContractViolation(ValueError):
    """Mismatched alphabets, cutoffs or scalar fields."""


class DomainError(ValueError):
    """Input outside an operation's domain (e.g. log of a non-unit series)."""


@dataclass(frozen=True)
class Generator:
    """A named generator with a bidegree; total degree is the coordinate sum."""

    name: str
    bidegree: tuple[int, int]

    @property
    def degree(self) -> int:
        return self.bidegree[0] + self.bidegree[1]

    def __post_init__(self):
        if self.degree < 1:
            raise ContractViolation(f"generator {self.name} must have degree >= 1")


class Alphabet:
    """Ordered list of generators; fixes the word order used everywhere."""

    def __init__(self, generators: Iterable[Generator]):
        self.generators = tuple(generators)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ContractViolation("generator names must be unique")
        self.index = {g.name: i for i, g in enumerate(self.generators)}
        self.degrees = tuple(g.degree for g in self.generators)

    def __len__(self):
        return len(self.generators)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def deg(self, word: tuple[int, ...]) -> int:
        d = self.degrees
        return sum(d[i] for i in word)

    def name_word(self, word: tuple[int, ...]) -> str:
        return "*".join(self.generators[i].name for i in word) if word else "1"

    def words_of_degree(self, d: int) -> list[tuple[int, ...]]:
        """All words of exact total degree d, in the canonical order."""
        if d < 0:
            return []
        if d == 0:
            return [()]
        out = []
        for i, gd in enumerate(self.degrees):
            if gd <= d:
                out.extend((i,) + w for w in self.words_of_degree(d - gd))
        return sorted(out, key=word_key)

    def words_up_to(self, cutoff: int) -> list[tuple[int, ...]]:
        out = []
        for d in range(cutoff + 1):
            out.extend(self.words_of_degree(d))
        return out


def word_key(word: tuple[int, ...]):
    """Canonical word order: length-lexicographic by generator index."""
    return (len(word), word)


def _zero(field: str):
    return Fraction(0) if field == RATIONAL else 0j


def _is_zero(c) -> bool:
    return c == 0


class NCSeries:
    """A truncated series in the free associative algebra on an Alphabet."""

    __slots__ = ("alphabet", "cutoff", "field", "coeffs")

    def __init__(self, alphabet: Alphabet, cutoff: int, field: str,
                 coeffs: Mapping[tuple[int, ...], object] | None = None):
        if field not in (RATIONAL, COMPLEX):
            raise ContractViolation(f"unknown scalar field {field!r}")
        self.alphabet = alphabet
        self.cutoff = cutoff
        self.field = field
        self.coeffs = {}
        if coeffs:
            deg = alphabet.deg
            for w, c in coeffs.items():
                if not _is_zero(c) and deg(w) <= cutoff:
                    self.coeffs[w] = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, alphabet, cutoff, field=RATIONAL):
        return cls(alphabet, cutoff, field)

    @classmethod
    def one(cls, alphabet, cutoff, field=RATIONAL):
        unit = Fraction(1) if field == RATIONAL else 1 + 0j
        return cls(alphabet, cutoff, field, {(): unit})

    @classmethod
    def generator(cls, alphabet, cutoff, name, field=RATIONAL, coeff=1):
        i = alphabet.index[name]
        c = Fraction(coeff) if field == RATIONAL else complex(coeff)
        return cls(alphabet, cutoff, field, {(i,): c})

    def _compat(self, other: "NCSeries"):
        if self.alphabet != other.alphabet or self.cutoff != other.cutoff \
                or self.field != other.field:
            raise ContractViolation("series live in different algebras")

    # -- linear structure --------------------------------------------------

    def copy(self) -> "NCSeries":
        s = NCSeries(self.alphabet, self.cutoff, self.field)
        s.coeffs = dict(self.coeffs)
        return s

    def __add__(self, other):
        self._compat(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            v = out.get(w, _zero(self.field)) + c
            if _is_zero(v):
                out.pop(w, None)
            else:
                out[w] = v
        s = NCSeries(self.alphabet, self.cutoff, self.field)
        s.coeffs = out
        return s

    def __neg__(self):
        s = NCSeries(self.alphabet, self.cutoff, self.field)
        s.coeffs = {w: -c for w, c in self.coeffs.items()}
        return s

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar) -> "NCSeries":
        scalar = Fraction(scalar) if self.field == RATIONAL else complex(scalar)
        if _is_zero(scalar):
            return NCSeries.zero(self.alphabet, self.cutoff, self.field)
        s = NCSeries(self.alphabet, self.cutoff, self.field)
        s.coeffs = {w: c * scalar for w, c in self.coeffs.items()}
        return s

    # -- multiplicative structure -------------------------------------------

    def __mul__(self, other):
        """Concatenation (Cauchy) product, truncated at the cutoff."""
        self._compat(other)
        deg = self.alphabet.deg
        cutoff = self.cutoff
        left = sorted(self.coeffs.items(), key=lambda t: deg(t[0]))
        right = sorted(other.coeffs.items(), key=lambda t: deg(t[0]))
        out = {}
        zero = _zero(self.field)
        for w1, c1 in left:
            d1 = deg(w1)
            if d1 > cutoff:
                break
            for w2, c2 in right:
                if d1 + deg(w2) > cutoff:
                    break
                w = w1 + w2
                v = out.get(w, zero) + c1 * c2
                if _is_zero(v):
                    out.pop(w, None)
                else:
                    out[w] = v
        s = NCSeries(self.alphabet, self.cutoff, self.field)
        s.coeffs = out
        return s

    def bracket(self, other) -> "NCSeries":
        return self * other - other * self

    def constant_term(self):
        return self.coeffs.get((), _zero(self.field))

    def augmentation_part(self) -> "NCSeries":
        """The series with the empty-word term removed."""
        s = self.copy()
        s.coeffs.pop((), None)
        return s

    def degree_component(self, d: int) -> "NCSeries":
        deg = self.alphabet.deg
        s = NCSeries(self.alphabet, self.cutoff, self.field)
        s.coeffs = {w: c for w, c in self.coeffs.items() if deg(w) == d}
        return s

    def min_degree(self) -> int | None:
        deg = self.alphabet.deg
        return min((deg(w) for w in self.coeffs), default=None)

    def max_abs_by_degree(self) -> dict[int, float]:
        deg = self.alphabet.deg
        out: dict[int, float] = {}
        for w, c in self.coeffs.items():
            d = deg(w)
            out[d] = max(out.get(d, 0.0), abs(c))
        return out

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def chop(self, tol: float) -> "NCSeries":
        s = NCSeries(self.alphabet, self.cutoff, self.field)
        s.coeffs = {w: c for w, c in self.coeffs.items() if abs(c) > tol}
        return s

    def to_complex(self) -> "NCSeries":
        if self.field == COMPLEX:
            return self
        s = NCSeries(self.alphabet, self.cutoff, COMPLEX)
        s.coeffs = {w: complex(c) for w, c in self.coeffs.items()}
        return s

    def __eq__(self, other):
        return (isinstance(other, NCSeries) and self.alphabet == other.alphabet
                and self.cutoff == other.cutoff and self.field == other.field
                and self.coeffs == other.coeffs)

    def __repr__(self):
        naming = self.alphabet.name_word
        items = sorted(self.coeffs.items(), key=lambda t: word_key(t[0]))
        body = " + ".join(f"({c})*{naming(w)}" for w, c in items[:12])
        more = " + ..." if len(items) > 12 else ""
        return f"NCSeries[{body or '0'}{more}]"

    # -- exp / log / inverse -------------------------------------------------

    def exp(self) -> "NCSeries":
        """exp of a series with zero constant term."""
        if not _is_zero(self.constant_term()):
            raise DomainError("exp requires zero constant term")
        out = NCSeries.one(self.alphabet, self.cutoff, self.field)
        term = NCSeries.one(self.alphabet, self.cutoff, self.field)
        for k in range(1, self.cutoff + 1):
            term = term * self
            inv = Fraction(1, math.factorial(k)) if self.field == RATIONAL \
                else 1.0 / math.factorial(k)
            out = out + term.scale(inv)
        return out

    def log(self) -> "NCSeries":
        """log of a series with constant term 1."""
        one = Fraction(1) if self.field == RATIONAL else 1 + 0j
        if self.constant_term() != one:
            raise DomainError("log requires constant term 1")
        u = self.augmentation_part()
        out = NCSeries.zero(self.alphabet, self.cutoff, self.field)
        term = NCSeries.one(self.alphabet, self.cutoff, self.field)
        for k in range(1, self.cutoff + 1):
            term = term * u
            inv = Fraction((-1) ** (k + 1), k) if self.field == RATIONAL \
                else ((-1.0) ** (k + 1)) / k
            out = out + term.scale(inv)
        return out

    def group_inverse(self) -> "NCSeries":
        """Inverse of a series with invertible constant term."""
        c0 = self.constant_term()
        if _is_zero(c0):
            raise DomainError("series with zero constant term is not invertible")
        u = self.scale(1 / c0).augmentation_part()
        out = NCSeries.one(self.alphabet, self.cutoff, self.field)
        term = NCSeries.one(self.alphabet, self.cutoff, self.field)
        for _ in range(self.cutoff):
            term = term * u
            term.coeffs = {w: -c for w, c in term.coeffs.items()}
            out = out + term
        return out.scale(1 / c0)

    def adjoint(self, other: "NCSeries") -> "NCSeries":
        """Ad(self)(other) = self * other * self^{-1}."""
        return self * other * self.group_inverse()

    # -- substitution --------------------------------------------------------

    def substitute(self, images: Mapping[str, "NCSeries"],
                   target: "NCSeries | None" = None) -> "NCSeries":
        """Apply the algebra morphism sending each generator to its image.

        Generators absent from `images` must exist in the target alphabet and
        map to themselves.  All images must share one alphabet/cutoff/field.
        """
        tgt = target if target is not None else next(iter(images.values()), None)
        if tgt is None:
            return self.copy()
        alphabet, cutoff, field = tgt.alphabet, tgt.cutoff, tgt.field
        for img in images.values():
            if img.alphabet != alphabet or img.field != field:
                raise ContractViolation("substitution images disagree on target")
        gens = self.alphabet.generators
        table = []
        for g in gens:
            if g.name in images:
                table.append(images[g.name])
            else:
                table.append(NCSeries.generator(alphabet, cutoff, g.name, field))
        out = NCSeries.zero(alphabet, cutoff, field)
        cache: dict[tuple[int, ...], NCSeries] = {(): NCSeries.one(alphabet, cutoff, field)}

        def image_of(word):
            if word in cache:
                return cache[word]
            res = image_of(word[:-1]) * table[word[-1]]
            cache[word] = res
            return res

        for w, c in sorted(self.coeffs.items(), key=lambda t: word_key(t[0])):
            out = out + image_of(w).scale(c)
        return out


# -- Hopf structure ----------------------------------------------------------

def _unshuffles(word):
    """All splittings of a word's positions into (left, right) subwords."""
    n = len(word)
    for mask in range(1 << n):
        left = tuple(word[i] for i in range(n) if mask >> i & 1)
        right = tuple(word[i] for i in range(n) if not mask >> i & 1)
        yield left, right


def coproduct(s: NCSeries) -> dict[tuple, object]:
    """Delta(s) in the truncated tensor square, keyed by word pairs."""
    out: dict[tuple, object] = {}
    zero = _zero(s.field)
    for w, c in s.coeffs.items():
        for left, right in _unshuffles(w):
            key = (left, right)
            v = out.get(key, zero) + c
            if _is_zero(v):
                out.pop(key, None)
            else:
                out[key] = v
    return out


def coproduct_defect(s: NCSeries) -> float:
    """max-abs of Delta(s) - s (x) s over the truncated tensor square."""
    delta = coproduct(s)
    deg = s.alphabet.deg
    zero = _zero(s.field)
    for w1, c1 in s.coeffs.items():
        for w2, c2 in s.coeffs.items():
            if deg(w1) + deg(w2) > s.cutoff:
                continue
            key = (w1, w2)
            v = delta.get(key, zero) - c1 * c2
            if _is_zero(v):
                delta.pop(key, None)
            else:
                delta[key] = v
    return max((abs(c) for c in delta.values()), default=0.0)


def primitivity_defect(s: NCSeries) -> float:
    """max-abs of Delta(s) - s (x) 1 - 1 (x) s."""
    delta = coproduct(s)
    zero = _zero(s.field)
    for w, c in s.coeffs.items():
        for key in ((w, ()), ((), w)):
            v = delta.get(key, zero) - c
            if _is_zero(v):
                delta.pop(key, None)
            else:
                delta[key] = v
    return max((abs(c) for c in delta.values()), default=0.0)


def is_lie_element(s: NCSeries, tol: float = 0.0) -> bool:
    if s.constant_term() != _zero(s.field):
        return False
    return primitivity_defect(s) <= tol


def bch(a: NCSeries, b: NCSeries) -> NCSeries:
    """log(exp(a) exp(b)) truncated at the common cutoff."""
    return (a.exp() * b.exp()).log()


# -- serialization ------------------------------------------------------------

def series_to_dict(s: NCSeries) -> dict:
    terms = []
    for w, c in sorted(s.coeffs.items(), key=lambda t: word_key(t[0])):
        if s.field == RATIONAL:
            terms.append({"word": list(w), "num": c.numerator, "den": c.denominator})
        else:
            terms.append({"word": list(w), "re": c.real, "im": c.imag})
    return {
        "alphabet": [{"name": g.name, "degree": list(g.bidegree)}
                     for g in s.alphabet.generators],
        "cutoff": s.cutoff,
        "field": s.field,
        "terms": terms,
    }


def series_from_dict(data: dict) -> NCSeries:
    alphabet = Alphabet(Generator(g["name"], tuple(g["degree"]))
                        for g in data["alphabet"])
    field = data["field"]
    coeffs = {}
    for t in data["terms"]:
        w = tuple(t["word"])
        if field == RATIONAL:
            coeffs[w] = Fraction(t["num"], t["den"])
        else:
            coeffs[w] = complex(t["re"], t["im"])
    return NCSeries(alphabet, data["cutoff"], field, coeffs)
