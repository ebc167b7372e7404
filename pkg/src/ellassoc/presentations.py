"""Finitely presented graded Lie algebras, built degreewise as nilpotent quotients.

A Presentation lists weighted generators and homogeneous Lie relations; the
GradedQuotient computes, per degree up to the cutoff,

  * a basis of the quotient Lie algebra (complement of the relation ideal
    inside the free Lie algebra, in Lyndon coordinates),
  * an echelonized spanning set of the two-sided associative ideal in the
    tensor algebra, used to project enveloping-algebra elements to canonical
    complement coordinates (this is how relation residuals are measured).

All structural linear algebra is exact (Fractions).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .lyndon import LyndonCoordinates, free_lie_dims
from .series import (Alphabet, ContractViolation, Generator, NCSeries,
                     RATIONAL)


# ---------------------------------------------------------------------------
# Gamma bookkeeping
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaSpec:
    """Gamma = Z/M x Z/N with distinguished classes alpha=(1,0), beta=(0,1)."""

    M: int
    N: int

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise ContractViolation("M, N must be positive")

    @property
    def order(self) -> int:
        return self.M * self.N

    def elements(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.M) for b in range(self.N)]

    def reduce(self, g) -> tuple[int, int]:
        return (g[0] % self.M, g[1] % self.N)

    def add(self, g, h) -> tuple[int, int]:
        return ((g[0] + h[0]) % self.M, (g[1] + h[1]) % self.N)

    def neg(self, g) -> tuple[int, int]:
        return ((-g[0]) % self.M, (-g[1]) % self.N)

    @property
    def zero(self) -> tuple[int, int]:
        return (0, 0)

    @property
    def alpha(self) -> tuple[int, int]:
        return self.reduce((1, 0))

    @property
    def beta(self) -> tuple[int, int]:
        return self.reduce((0, 1))

    def is_trivial(self) -> bool:
        return self.order == 1


def klass_normalize(gamma: GammaSpec, vec: tuple) -> tuple:
    """Canonical representative of a class in Gamma^n / Gamma(diagonal)."""
    last = vec[-1]
    neg = gamma.neg(last)
    return tuple(gamma.add(g, neg) for g in vec)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------

@dataclass
class Presentation:
    label: str
    alphabet: Alphabet
    relations: list[NCSeries]
    cutoff: int
    n_strands: int = 0
    gamma: GammaSpec | None = None
    kind: str = "generic"

    def relation_degrees(self) -> list[int]:
        return [r.min_degree() for r in self.relations]


def _tname(i: int, j: int, g, gamma: GammaSpec | None) -> str:
    base = f"t{i}{j}"
    if gamma is None or gamma.is_trivial():
        return base
    return f"{base}^{g[0]}.{g[1]}"


class StrandIndex:
    """Generator-name helpers for the t / t1 / t1G presentation families."""

    def __init__(self, n: int, gamma: GammaSpec | None, with_xy: bool):
        self.n = n
        self.gamma = gamma
        self.with_xy = with_xy

    def x(self, i):
        return f"x{i}"

    def y(self, i):
        return f"y{i}"

    def t(self, i, j, g=None):
        """Canonical name of t^g_{ij}; for i > j uses t^g_{ij} = t^{-g}_{ji}."""
        gamma = self.gamma
        if g is None:
            g = (0, 0)
        if gamma is not None:
            g = gamma.reduce(g)
        if i == j:
            raise ContractViolation("t_{ii} is not a generator")
        if i > j:
            i, j = j, i
            g = gamma.neg(g) if gamma is not None else g
        return _tname(i, j, g, gamma)

    def generators(self) -> list[Generator]:
        gens = []
        if self.with_xy:
            gens.extend(Generator(self.x(i), (1, 0)) for i in range(1, self.n + 1))
            gens.extend(Generator(self.y(i), (0, 1)) for i in range(1, self.n + 1))
            tdeg = (1, 1)
        else:
            tdeg = (1, 0)
        elems = self.gamma.elements() if self.gamma is not None else [(0, 0)]
        for i, j in itertools.combinations(range(1, self.n + 1), 2):
            for g in elems:
                gens.append(Generator(_tname(i, j, g, self.gamma), tdeg))
        return gens


def _gen(alphabet, cutoff, name):
    return NCSeries.generator(alphabet, cutoff, name)


def _tsum(idx, alphabet, cutoff, i, j):
    """sum over gamma of t^gamma_{ij}."""
    elems = idx.gamma.elements() if idx.gamma is not None else [(0, 0)]
    out = NCSeries.zero(alphabet, cutoff)
    for g in elems:
        out = out + _gen(alphabet, cutoff, idx.t(i, j, g))
    return out


def _kd_relations(idx: StrandIndex, alphabet, cutoff) -> list[NCSeries]:
    """Kohno-Drinfeld relations among the t_{ij} (gamma-decorated when present)."""
    rels = []
    n = idx.n
    elems = idx.gamma.elements() if idx.gamma is not None else [(0, 0)]
    zero = (0, 0)
    # [t^g_{ij}, t^d_{kl}] = 0 for disjoint pairs
    for (i, j), (k, l) in itertools.combinations(
            itertools.combinations(range(1, n + 1), 2), 2):
        if {i, j} & {k, l}:
            continue
        for g in elems:
            for d in elems:
                a = _gen(alphabet, cutoff, idx.t(i, j, g))
                b = _gen(alphabet, cutoff, idx.t(k, l, d))
                rels.append(a.bracket(b))
    # [t^g_{ij}, t^{g+d}_{ik} + t^d_{jk}] = 0 for distinct i,j,k
    add = idx.gamma.add if idx.gamma is not None else (lambda a, b: zero)
    for i, j, k in itertools.permutations(range(1, n + 1), 3):
        for g in elems:
            for d in elems:
                a = _gen(alphabet, cutoff, idx.t(i, j, g))
                b = _gen(alphabet, cutoff, idx.t(i, k, add(g, d))) \
                    + _gen(alphabet, cutoff, idx.t(j, k, d))
                rels.append(a.bracket(b))
    return rels


def _elliptic_relations(idx: StrandIndex, alphabet, cutoff) -> list[NCSeries]:
    rels = []
    n = idx.n
    elems = idx.gamma.elements() if idx.gamma is not None else [(0, 0)]
    x, y, t = idx.x, idx.y, idx.t
    g_ = lambda name: _gen(alphabet, cutoff, name)
    for i, j in itertools.combinations(range(1, n + 1), 2):
        ts = _tsum(idx, alphabet, cutoff, i, j)
        # [x_i, y_j] = [x_j, y_i] = sum_g t^g_{ij}
        rels.append(g_(x(i)).bracket(g_(y(j))) - ts)
        rels.append(g_(x(j)).bracket(g_(y(i))) - ts)
        # [x_i, x_j] = [y_i, y_j] = 0
        rels.append(g_(x(i)).bracket(g_(x(j))))
        rels.append(g_(y(i)).bracket(g_(y(j))))
        # [x_i + x_j, t^g_{ij}] = [y_i + y_j, t^g_{ij}] = 0
        for g in elems:
            tg = g_(t(i, j, g))
            rels.append((g_(x(i)) + g_(x(j))).bracket(tg))
            rels.append((g_(y(i)) + g_(y(j))).bracket(tg))
    for i in range(1, n + 1):
        # [x_i, y_i] = -sum_{j != i} sum_g t^g_{ij}
        acc = g_(x(i)).bracket(g_(y(i)))
        for j in range(1, n + 1):
            if j != i:
                acc = acc + _tsum(idx, alphabet, cutoff, i, j)
        rels.append(acc)
        # [x_i, t^g_{jk}] = [y_i, t^g_{jk}] = 0 for i not in {j,k}
        for j, k in itertools.combinations(range(1, n + 1), 2):
            if i in (j, k):
                continue
            for g in elems:
                rels.append(g_(x(i)).bracket(g_(t(j, k, g))))
                rels.append(g_(y(i)).bracket(g_(t(j, k, g))))
    return rels


def _alt_elliptic_relations(idx: StrandIndex, alphabet, cutoff,
                            include_centrality: bool = True) -> list[NCSeries]:
    """Alternative presentation: the [x_i,y_i] relation is exchanged for the
    centrality of the diagonal x- and y-sums against every y_i / x_i (which,
    in the reduced case, is subsumed by the vanishing of the sums).

    Note: dropping the [x_i+x_j, t^g_{ij}] relations as well is NOT an
    equivalent presentation once |Gamma| > 1 (only the sum over g of those
    brackets is derivable), so they are kept here.
    """
    rels = []
    n = idx.n
    elems = idx.gamma.elements() if idx.gamma is not None else [(0, 0)]
    x, y, t = idx.x, idx.y, idx.t
    g_ = lambda name: _gen(alphabet, cutoff, name)
    for i, j in itertools.combinations(range(1, n + 1), 2):
        ts = _tsum(idx, alphabet, cutoff, i, j)
        rels.append(g_(x(i)).bracket(g_(y(j))) - ts)
        rels.append(g_(x(j)).bracket(g_(y(i))) - ts)
        rels.append(g_(x(i)).bracket(g_(x(j))))
        rels.append(g_(y(i)).bracket(g_(y(j))))
        for g in elems:
            tg = g_(t(i, j, g))
            rels.append((g_(x(i)) + g_(x(j))).bracket(tg))
            rels.append((g_(y(i)) + g_(y(j))).bracket(tg))
    for i in range(1, n + 1):
        for j, k in itertools.combinations(range(1, n + 1), 2):
            if i in (j, k):
                continue
            for g in elems:
                rels.append(g_(x(i)).bracket(g_(t(j, k, g))))
                rels.append(g_(y(i)).bracket(g_(t(j, k, g))))
    if include_centrality:
        xsum = sum((g_(x(j)) for j in range(2, n + 1)), g_(x(1)))
        ysum = sum((g_(y(j)) for j in range(2, n + 1)), g_(y(1)))
        for i in range(1, n + 1):
            rels.append(xsum.bracket(g_(y(i))))
            rels.append(ysum.bracket(g_(x(i))))
    return rels


def _sum_gens(alphabet, cutoff, names):
    out = NCSeries.zero(alphabet, cutoff)
    for nm in names:
        out = out + _gen(alphabet, cutoff, nm)
    return out


def build_preset(label: str, cutoff: int, alt: bool = False) -> Presentation:
    """Presentation presets.

    Keys: "t:n", "t1:n", "t1G:n:M:N", "bar-t1:n", "bar-t1G:n:M:N", "f:k",
    and "chart-t1G:M:N" (the certified free chart of bar-t1G:2).
    """
    parts = label.split(":")
    kind = parts[0]
    if kind == "f":
        k = int(parts[1])
        letters = ["x", "y", "z", "w", "u", "v"]
        names = letters[:k] if k <= len(letters) else [f"g{i}" for i in range(1, k + 1)]
        alphabet = Alphabet(Generator(nm, (1, 0)) for nm in names)
        return Presentation(label, alphabet, [], cutoff, kind="free")
    if kind == "t":
        n = int(parts[1])
        idx = StrandIndex(n, None, with_xy=False)
        alphabet = Alphabet(idx.generators())
        rels = _kd_relations(idx, alphabet, cutoff)
        return Presentation(label, alphabet, rels, cutoff, n_strands=n, kind="t")
    if kind in ("t1", "bar-t1", "t1G", "bar-t1G"):
        reduced = kind.startswith("bar")
        if kind.endswith("G"):
            n, M, N = int(parts[1]), int(parts[2]), int(parts[3])
            gamma = GammaSpec(M, N)
        else:
            n = int(parts[1])
            gamma = GammaSpec(1, 1)
        idx = StrandIndex(n, gamma, with_xy=True)
        alphabet = Alphabet(idx.generators())
        if alt:
            rels = _alt_elliptic_relations(idx, alphabet, cutoff,
                                           include_centrality=not reduced)
        else:
            rels = _elliptic_relations(idx, alphabet, cutoff)
        rels = rels + _kd_relations(idx, alphabet, cutoff)
        if reduced:
            xs = _sum_gens(alphabet, cutoff, [idx.x(i) for i in range(1, n + 1)])
            ys = _sum_gens(alphabet, cutoff, [idx.y(i) for i in range(1, n + 1)])
            rels = rels + [xs, ys]
        pres = Presentation(label, alphabet, rels, cutoff, n_strands=n,
                            gamma=gamma, kind=kind)
        return pres
    if kind == "chart-t1G":
        M, N = int(parts[1]), int(parts[2])
        gamma = GammaSpec(M, N)
        gens = [Generator("x", (1, 0)), Generator("y", (0, 1))]
        gens += [Generator(_tname(1, 2, g, gamma), (1, 1))
                 for g in gamma.elements() if g != (0, 0)]
        alphabet = Alphabet(gens)
        return Presentation(label, alphabet, [], cutoff, n_strands=2,
                            gamma=gamma, kind="chart")
    raise ContractViolation(f"unknown preset label {label!r}")


# ---------------------------------------------------------------------------
# Exact echelon forms
# ---------------------------------------------------------------------------

class Echelon:
    """Row echelon basis over Q with deterministic smallest-index pivoting."""

    def __init__(self):
        self.rows: dict[int, dict[int, Fraction]] = {}

    def _eliminate(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        while vec:
            p = min(vec)
            row = self.rows.get(p)
            if row is None:
                return vec
            c = vec[p]
            for j, v in row.items():
                nv = vec.get(j, Fraction(0)) - c * v
                if nv:
                    vec[j] = nv
                else:
                    vec.pop(j, None)
        return vec

    def add(self, vec: dict[int, Fraction]) -> bool:
        """Insert a vector; returns True if it enlarged the row space."""
        vec = self._eliminate(dict(vec))
        if not vec:
            return False
        p = min(vec)
        inv = 1 / vec[p]
        self.rows[p] = {j: v * inv for j, v in vec.items()}
        return True

    def reduce(self, vec: dict) -> dict:
        """Residue of vec modulo the row space (works for float scalars too)."""
        vec = dict(vec)
        pivots = self.rows
        active = sorted(j for j in vec if j in pivots)
        while active:
            p = active[0]
            c = vec.get(p, 0)
            if c:
                for j, v in pivots[p].items():
                    value = vec.get(j, 0) - c * (v if isinstance(c, Fraction) else complex(v))
                    if value:
                        vec[j] = value
                    else:
                        vec.pop(j, None)
            else:
                vec.pop(p, None)
            active = sorted(j for j in vec if j in pivots)
        return vec

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivot_indices(self) -> set[int]:
        return set(self.rows)


# ---------------------------------------------------------------------------
# Graded quotients
# ---------------------------------------------------------------------------

class GradedQuotient:
    """Degreewise data of a presented graded Lie algebra and its envelope."""

    def __init__(self, presentation: Presentation):
        self.presentation = presentation
        self.alphabet = presentation.alphabet
        self.cutoff = presentation.cutoff
        self.lyndon: dict[int, LyndonCoordinates] = {}
        self.lie_echelon: dict[int, Echelon] = {}
        self.lie_basis_words: dict[int, list[tuple[int, ...]]] = {}
        self.assoc_echelon: dict[int, Echelon] = {}
        self.words: dict[int, list[tuple[int, ...]]] = {}
        self.word_index: dict[int, dict[tuple[int, ...], int]] = {}
        self._build()

    # -- construction --------------------------------------------------------

    def _build(self):
        pres = self.presentation
        for r in pres.relations:
            d = r.min_degree()
            if d is None:
                continue
            if any(self.alphabet.deg(w) != d for w in r.coeffs):
                raise ContractViolation("non-homogeneous relation")
        rel_by_deg: dict[int, list[NCSeries]] = {}
        for r in pres.relations:
            d = r.min_degree()
            if d is not None and d <= self.cutoff:
                rel_by_deg.setdefault(d, []).append(r)

        ideal_basis: dict[int, list[NCSeries]] = {}
        for d in range(1, self.cutoff + 1):
            self.words[d] = self.alphabet.words_of_degree(d)
            self.word_index[d] = {w: i for i, w in enumerate(self.words[d])}
            lc = LyndonCoordinates(self.alphabet, d)
            self.lyndon[d] = lc
            ech = Echelon()
            members: list[NCSeries] = []
            for r in rel_by_deg.get(d, []):
                members.append(r)
            for gname, gdeg in zip((g.name for g in self.alphabet.generators),
                                   self.alphabet.degrees):
                lower = ideal_basis.get(d - gdeg, [])
                if lower:
                    g = _gen(self.alphabet, d, gname)
                    for v in lower:
                        vv = NCSeries(self.alphabet, d, RATIONAL, v.coeffs)
                        members.append(g.bracket(vv))
            kept: list[NCSeries] = []
            for m in members:
                if not m.coeffs:
                    continue
                coords = lc.from_word_vector(m)
                vec = {i: c for i, c in enumerate(coords) if c}
                if ech.add(vec):
                    kept.append(m)
            ideal_basis[d] = kept
            self.lie_echelon[d] = ech
            self.lie_basis_words[d] = [w for i, (w, _) in enumerate(lc.basis)
                                       if i not in ech.pivot_indices()]

        # associative ideal: two-sided span of the relations in the tensor algebra
        words_up_to = {d: self.alphabet.words_of_degree(d)
                       for d in range(self.cutoff + 1)}
        for d in range(1, self.cutoff + 1):
            ech = Echelon()
            widx = self.word_index[d]
            for e, rels in rel_by_deg.items():
                if e > d:
                    continue
                for r in rels:
                    for a in range(0, d - e + 1):
                        b = d - e - a
                        for u in words_up_to[a]:
                            for v in words_up_to[b]:
                                vec = {}
                                for w, c in r.coeffs.items():
                                    vec[widx[u + w + v]] = vec.get(widx[u + w + v], Fraction(0)) + c
                                vec = {i: c for i, c in vec.items() if c}
                                if vec:
                                    ech.add(vec)
            self.assoc_echelon[d] = ech

    # -- queries --------------------------------------------------------------

    def dims(self) -> list[int]:
        return [len(self.lie_basis_words[d]) for d in range(1, self.cutoff + 1)]

    def free_dims(self) -> list[int]:
        return free_lie_dims(self.alphabet.degrees, self.cutoff)

    def reduce_lie(self, elem: NCSeries, tol: float = 1e-12) -> list:
        """Coordinates of a homogeneous Lie element in the quotient basis."""
        d = elem.min_degree()
        if d is None:
            return []
        if d > self.cutoff:
            raise ContractViolation("degree exceeds cutoff")
        if any(self.alphabet.deg(w) != d for w in elem.coeffs):
            raise ContractViolation("reduce_lie expects a homogeneous element")
        lc = self.lyndon[d]
        coords = lc.from_word_vector(elem, tol=0.0 if elem.field == RATIONAL else tol)
        vec = {i: c for i, c in enumerate(coords) if c}
        vec = self.lie_echelon[d].reduce(vec)
        free_idx = [i for i in range(len(lc)) if i not in self.lie_echelon[d].pivot_indices()]
        zero = Fraction(0) if elem.field == RATIONAL else 0j
        return [vec.get(i, zero) for i in free_idx]

    def lift_lie(self, d: int, coords, cutoff: int | None = None,
                 field: str = RATIONAL) -> NCSeries:
        """Representative word vector of quotient coordinates in degree d."""
        cut = self.cutoff if cutoff is None else cutoff
        lc = self.lyndon[d]
        free_idx = [i for i in range(len(lc)) if i not in self.lie_echelon[d].pivot_indices()]
        out = NCSeries.zero(self.alphabet, cut, field)
        for c, i in zip(coords, free_idx):
            if c:
                w, _ = lc.basis[i]
                from .lyndon import bracketing, expand_bracketing
                out = out + expand_bracketing(bracketing(w), self.alphabet, cut, field).scale(c)
        return out

    def project_assoc(self, s: NCSeries) -> dict[int, dict[tuple[int, ...], object]]:
        """Canonical complement coordinates of an envelope element, per degree."""
        out: dict[int, dict] = {}
        deg = self.alphabet.deg
        by_deg: dict[int, dict] = {}
        for w, c in s.coeffs.items():
            d = deg(w)
            if d == 0:
                continue
            by_deg.setdefault(d, {})[self.word_index[d][w]] = c
        for d, vec in by_deg.items():
            red = self.assoc_echelon[d].reduce(vec)
            words = self.words[d]
            out[d] = {words[i]: c for i, c in red.items()}
        return out

    def residual_by_degree(self, s: NCSeries) -> dict[int, float]:
        """max-abs complement coordinate of s per degree (s with constant cut)."""
        proj = self.project_assoc(s)
        return {d: max((abs(c) for c in vec.values()), default=0.0)
                for d, vec in sorted(proj.items())}

    def is_zero_in_envelope(self, s: NCSeries, tol: float = 0.0) -> bool:
        res = self.residual_by_degree(s)
        return all(v <= tol for v in res.values())

    def structure_constants(self, d1: int, d2: int):
        """Brackets of quotient basis elements, reduced to coordinates."""
        if d1 + d2 > self.cutoff:
            raise ContractViolation("bracket degree exceeds cutoff")
        out = {}
        for i, wi in enumerate(self.lie_basis_words[d1]):
            from .lyndon import bracketing, expand_bracketing
            bi = expand_bracketing(bracketing(wi), self.alphabet, d1 + d2, RATIONAL)
            for j, wj in enumerate(self.lie_basis_words[d2]):
                bj = expand_bracketing(bracketing(wj), self.alphabet, d1 + d2, RATIONAL)
                out[(i, j)] = self.reduce_lie(bi.bracket(bj))
        return out


_QUOTIENT_CACHE: dict[tuple[str, int, bool], GradedQuotient] = {}
_PRESET_CACHE: dict[tuple[str, int, bool], Presentation] = {}


def get_preset(label: str, cutoff: int, alt: bool = False) -> Presentation:
    """Cached preset construction; presets are treated as immutable."""
    key = (label, cutoff, alt)
    if key not in _PRESET_CACHE:
        _PRESET_CACHE[key] = build_preset(label, cutoff, alt=alt)
    return _PRESET_CACHE[key]


def preset_quotient(label: str, cutoff: int, alt: bool = False) -> GradedQuotient:
    key = (label, cutoff, alt)
    if key not in _QUOTIENT_CACHE:
        _QUOTIENT_CACHE[key] = GradedQuotient(get_preset(label, cutoff, alt=alt))
    return _QUOTIENT_CACHE[key]


# ---------------------------------------------------------------------------
# Morphisms: insertions, symmetric & Gamma actions, comparison maps
# ---------------------------------------------------------------------------

@dataclass
class GeneratorMap:
    """A Lie/algebra morphism given on generators, applied by substitution."""

    source: Presentation
    target: Presentation
    images: dict[str, NCSeries]
    label: str = ""

    def apply(self, s: NCSeries, cutoff: int | None = None,
              field: str | None = None) -> NCSeries:
        cut = cutoff if cutoff is not None else self.target.cutoff
        fld = field if field is not None else s.field
        images = {}
        for nm, img in self.images.items():
            img2 = NCSeries(self.target.alphabet, cut, fld,
                            img.coeffs if fld == RATIONAL
                            else {w: complex(c) for w, c in img.coeffs.items()})
            images[nm] = img2
        return s.substitute(images)

    def then(self, other: "GeneratorMap") -> "GeneratorMap":
        images = {nm: other.apply(img) for nm, img in self.images.items()}
        return GeneratorMap(self.source, other.target, images,
                            f"{self.label};{other.label}")

    def verify(self, quotient: GradedQuotient) -> bool:
        """Images of all source relations vanish in the target quotient."""
        for r in self.source.relations:
            if not quotient.is_zero_in_envelope(self.apply(r)):
                return False
        return True


def _strand_map_after_insertion(n: int, slot: int, arity: int):
    """Old strand -> list of new strands after inserting `arity` at `slot`."""
    mapping = {}
    for i in range(1, n + 1):
        if i < slot:
            mapping[i] = [i]
        elif i == slot:
            mapping[i] = list(range(slot, slot + arity))
        else:
            mapping[i] = [i + arity - 1]
    return mapping


def insertion(source: Presentation, slot: int, arity: int,
              target: Presentation) -> GeneratorMap:
    """Operadic partial composition o_slot with an arity-`arity` input.

    Sends x_k, y_k, t^g_{k,j} of the source to the corresponding sums over the
    inserted block; other strands are relabelled.
    """
    n = source.n_strands
    if not 1 <= slot <= n:
        raise ContractViolation("slot out of range")
    if target.n_strands != n + arity - 1:
        raise ContractViolation("target arity mismatch")
    smap = _strand_map_after_insertion(n, slot, arity)
    cut, alph = target.cutoff, target.alphabet
    sidx = StrandIndex(n, source.gamma, source.kind not in ("t",))
    tidx = StrandIndex(target.n_strands, target.gamma, target.kind not in ("t",))
    images: dict[str, NCSeries] = {}
    has_xy = source.kind not in ("t",)
    if has_xy:
        for i in range(1, n + 1):
            images[sidx.x(i)] = _sum_gens(alph, cut, [tidx.x(p) for p in smap[i]])
            images[sidx.y(i)] = _sum_gens(alph, cut, [tidx.y(p) for p in smap[i]])
    elems = source.gamma.elements() if source.gamma is not None else [(0, 0)]
    for i, j in itertools.combinations(range(1, n + 1), 2):
        for g in elems:
            name = sidx.t(i, j, g)
            targets = [tidx.t(p, q, g) for p in smap[i] for q in smap[j]]
            images[name] = _sum_gens(alph, cut, targets)
    return GeneratorMap(source, target, images, f"insert@{slot}x{arity}")


def symmetric_action(pres: Presentation, sigma: tuple[int, ...]) -> GeneratorMap:
    """Strand relabelling i -> sigma[i-1] as a presentation automorphism."""
    n = pres.n_strands
    if sorted(sigma) != list(range(1, n + 1)):
        raise ContractViolation("sigma must be a permutation of 1..n")
    idx = StrandIndex(n, pres.gamma, pres.kind not in ("t",))
    cut, alph = pres.cutoff, pres.alphabet
    images = {}
    if pres.kind not in ("t",):
        for i in range(1, n + 1):
            images[idx.x(i)] = _gen(alph, cut, idx.x(sigma[i - 1]))
            images[idx.y(i)] = _gen(alph, cut, idx.y(sigma[i - 1]))
    elems = pres.gamma.elements() if pres.gamma is not None else [(0, 0)]
    for i, j in itertools.combinations(range(1, n + 1), 2):
        for g in elems:
            images[idx.t(i, j, g)] = _gen(alph, cut, idx.t(sigma[i - 1], sigma[j - 1], g))
    return GeneratorMap(pres, pres, images, f"perm{sigma}")


def gamma_action(pres: Presentation, gvec: tuple) -> GeneratorMap:
    """gvec in Gamma^n acts: t^d_{ij} -> t^{d+g_i-g_j}_{ij}, x and y fixed.

    On the free chart of bar-t1G:2 the image of t^d may hit the eliminated
    t^0, which is substituted by its expression [x,y] - sum_{g != 0} t^g.
    """
    gamma = pres.gamma
    if gamma is None:
        raise ContractViolation("preset has no Gamma")
    n = pres.n_strands
    if len(gvec) != n:
        raise ContractViolation("gvec length must match strand count")
    gvec = tuple(gamma.reduce(g) for g in gvec)
    cut, alph = pres.cutoff, pres.alphabet
    images = {}
    if pres.kind == "chart":
        shift = gamma.add(gvec[0], gamma.neg(gvec[1]))
        for g in gamma.elements():
            if g == (0, 0):
                continue
            tgt = gamma.add(g, shift)
            if tgt == (0, 0):
                images[_tname(1, 2, g, gamma)] = chart_t0(pres)
            else:
                images[_tname(1, 2, g, gamma)] = _gen(alph, cut, _tname(1, 2, tgt, gamma))
        return GeneratorMap(pres, pres, images, f"gamma{gvec}")
    idx = StrandIndex(n, gamma, pres.kind not in ("t",))
    for i, j in itertools.combinations(range(1, n + 1), 2):
        shift = gamma.add(gvec[i - 1], gamma.neg(gvec[j - 1]))
        for g in gamma.elements():
            images[idx.t(i, j, g)] = _gen(alph, cut, idx.t(i, j, gamma.add(g, shift)))
    return GeneratorMap(pres, pres, images, f"gamma{gvec}")


def comparison_morphism(source: Presentation, target: Presentation,
                        a, b, c, d) -> GeneratorMap:
    """x_i -> a x_i + b y_i, y_i -> c x_i + d y_i, t^g -> t^{rho(g)}.

    rho is the coordinatewise surjection Z/M1 x Z/N1 -> Z/M2 x Z/N2 (requires
    M2 | M1 and N2 | N1); the determinant must equal |ker rho| = M1 N1/(M2 N2).
    """
    g1, g2 = source.gamma, target.gamma
    if g1 is None or g2 is None:
        raise ContractViolation("comparison needs Gamma presets")
    if g1.M % g2.M or g1.N % g2.N:
        raise ContractViolation("no coordinatewise surjection between these groups")
    ker = (g1.M // g2.M) * (g1.N // g2.N)
    a, b, c, d = Fraction(a), Fraction(b), Fraction(c), Fraction(d)
    if a * d - b * c != ker:
        raise ContractViolation(f"determinant must equal |ker rho| = {ker}")
    n = source.n_strands
    if target.n_strands != n:
        raise ContractViolation("strand counts differ")
    sidx = StrandIndex(n, g1, True)
    tidx = StrandIndex(n, g2, True)
    cut, alph = target.cutoff, target.alphabet
    images = {}
    for i in range(1, n + 1):
        xi = _gen(alph, cut, tidx.x(i))
        yi = _gen(alph, cut, tidx.y(i))
        images[sidx.x(i)] = xi.scale(a) + yi.scale(b)
        images[sidx.y(i)] = xi.scale(c) + yi.scale(d)
    for i, j in itertools.combinations(range(1, n + 1), 2):
        for g in g1.elements():
            rho_g = (g[0] % g2.M, g[1] % g2.N)
            images[sidx.t(i, j, g)] = _gen(alph, cut, tidx.t(i, j, rho_g))
    return GeneratorMap(source, target, images, f"compare({a},{b},{c},{d})")


def kd_inclusion(source: Presentation, target: Presentation,
                 strands: list[int]) -> GeneratorMap:
    """The operad-input leg of a module partial composition:
    t_{uv} of t_m maps to t^0_{strands[u-1], strands[v-1]} in the target."""
    if source.kind != "t":
        raise ContractViolation("source must be a t:n preset")
    m = source.n_strands
    if len(strands) != m:
        raise ContractViolation("strand list length mismatch")
    sidx = StrandIndex(m, None, False)
    tgamma = target.gamma
    tidx = StrandIndex(target.n_strands, tgamma, target.kind not in ("t",))
    cut, alph = target.cutoff, target.alphabet
    images = {}
    for u, v in itertools.combinations(range(1, m + 1), 2):
        images[sidx.t(u, v)] = _gen(alph, cut,
                                    tidx.t(strands[u - 1], strands[v - 1], (0, 0)))
    return GeneratorMap(source, target, images, f"kd@{strands}")


def chart_embedding(chart: Presentation, target: Presentation) -> GeneratorMap:
    """Embed the free chart {x, y, t^g (g != 0)} of bar-t1G:2 into the full
    two-strand presentation: x -> x_1, y -> y_2, t^g -> t^g_{12}."""
    gamma = chart.gamma
    tidx = StrandIndex(2, gamma, True)
    cut, alph = target.cutoff, target.alphabet
    images = {"x": _gen(alph, cut, tidx.x(1)), "y": _gen(alph, cut, tidx.y(2))}
    for g in gamma.elements():
        if g != (0, 0):
            images[_tname(1, 2, g, gamma)] = _gen(alph, cut, tidx.t(1, 2, g))
    return GeneratorMap(chart, target, images, "chart")


def chart_t0(chart: Presentation, cutoff: int | None = None,
             field: str = RATIONAL) -> NCSeries:
    """t^0 = [x,y] - sum_{g != 0} t^g in the free chart."""
    cut = chart.cutoff if cutoff is None else cutoff
    alph = chart.alphabet
    x = NCSeries.generator(alph, cut, "x", field)
    y = NCSeries.generator(alph, cut, "y", field)
    out = x.bracket(y)
    for g in chart.gamma.elements():
        if g != (0, 0):
            out = out - NCSeries.generator(alph, cut, _tname(1, 2, g, chart.gamma), field)
    return out


def chart_certified_free(gamma: GammaSpec, cutoff: int) -> bool:
    """Graded dims of bar-t1G:2 match the free Lie algebra on the chart."""
    q = preset_quotient(f"bar-t1G:2:{gamma.M}:{gamma.N}", cutoff)
    chart = build_preset(f"chart-t1G:{gamma.M}:{gamma.N}", cutoff)
    return q.dims() == free_lie_dims(chart.alphabet.degrees, cutoff)
