"""Brute-force ground truth on finite structures and finite truncations.

Two independent checks live here. ``brute_k1_finite`` abelianizes full
symmetric groups of finite sets by an explicit commutator-subgroup
computation. The ``check_*`` helpers restrict symbolic objects over a finite
field to the finite submodule spanned by the first ``N`` basis vectors and
compare against plain enumeration.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from sympy.combinatorics import Permutation, PermutationGroup

from .defmaps import PiecewiseAffineBijection
from .defsets import DefinableSet, k0_class
from .errors import ShapeError, SizeBoundExceeded, UnsupportedRing
from .fields import GF, DivisionRing
from .k1 import Cyclic, DirectSum, K1Class, permutation_sign
from .modules import Space, Vector


@dataclass(frozen=True)
class FiniteStructure:
    """The finite module ``F^rank`` over a finite field, as a bare carrier."""

    field: DivisionRing
    rank: int

    def __post_init__(self):
        if not self.field.is_finite:
            raise UnsupportedRing("finite structures need a finite field")

    @property
    def size(self) -> int:
        return self.field.cardinality**self.rank

    def carrier(self, power: int = 1) -> list:
        return list(itertools.product(list(self.field.elements()), repeat=self.rank * power))


@dataclass(frozen=True)
class Stage:
    size: int
    group_order: int
    derived_order: int
    descriptor: object


@dataclass(frozen=True)
class FiniteK1Report:
    descriptor: object
    stages: tuple
    stabilized: bool

    def to_json(self):
        from .k1 import descriptor_json

        return {
            "descriptor": self.descriptor.format(),
            "structure": descriptor_json(self.descriptor),
            "stabilized": self.stabilized,
            "stages": [
                {"size": s.size, "order": s.group_order, "derived_order": s.derived_order, "abelianization": s.descriptor.format()}
                for s in self.stages
            ],
        }


def _commutator(a: Permutation, b: Permutation) -> Permutation:
    return a * b * ~a * ~b


def derived_subgroup(gens: list, degree: int) -> PermutationGroup:
    """Normal closure of the commutators of the generators."""
    cgens = [_commutator(a, b) for a, b in itertools.combinations(gens, 2)]
    cgens = [c for c in cgens if not c.is_Identity] or [Permutation(degree - 1)]
    H = PermutationGroup(cgens)
    changed = True
    while changed:
        changed = False
        for g in gens:
            for h in list(H.generators):
                c = ~g * h * g
                if not H.contains(c):
                    H = PermutationGroup(list(H.generators) + [c])
                    changed = True
    return H


def abelianization(gens: list, degree: int):
    """``(|G|, |G'|, descriptor of G/G')`` for the permutation group on the generators."""
    G = PermutationGroup(gens)
    H = derived_subgroup(gens, degree)
    index = G.order() // H.order()
    if index == 1:
        return G.order(), H.order(), Cyclic(1)
    for g in gens:
        k, p = 1, g
        while not H.contains(p):
            p = p * g
            k += 1
        if k == index:
            return G.order(), H.order(), Cyclic(index)
    raise ShapeError("non-cyclic abelianization; no descriptor for it here")


def symmetric_generators(s: int) -> list:
    """Adjacent transpositions of ``{0..s-1}``."""
    return [Permutation([[i, i + 1]], size=s) for i in range(s - 1)]


def brute_k1_finite(S: FiniteStructure, max_power: int = 1) -> FiniteK1Report:
    """Abelianized symmetric groups of finite definable sets along the chain of sizes."""
    if S.size < 2:
        raise ShapeError("the structure needs at least two elements")
    if S.size > 4 or max_power > 2:
        raise SizeBoundExceeded("carrier size 2..4 and max power <= 2 only")
    top = S.size**max_power
    stages = []
    for s in range(2, top + 1):
        order, dorder, desc = abelianization(symmetric_generators(s), s)
        stages.append(Stage(s, order, dorder, desc))
    stable = len(stages) >= 2 and stages[-1].descriptor == stages[-2].descriptor
    return FiniteK1Report(stages[-1].descriptor, tuple(stages), stable)


# -- truncations ------------------------------------------------------------------

def truncation(space: Space, N: int, limit: int = 50_000) -> list:
    """All vectors of ``M^n`` supported on basis indices ``< N`` (finite fields only)."""
    count = 1
    for i, F in enumerate(space.fields):
        if not F.is_finite:
            raise UnsupportedRing("truncations need finite fields")
        count *= F.cardinality ** (space.width(i) * N)
    if count > limit:
        raise SizeBoundExceeded(f"truncation has {count} points")
    per_comp = []
    for i, F in enumerate(space.fields):
        rows = list(itertools.product(list(F.elements()), repeat=space.width(i)))
        per_comp.append(list(itertools.product(rows, repeat=N)))
    out = []
    for choice in itertools.product(*per_comp):
        out.append(Vector.make(space, [list(enumerate(rows)) for rows in choice]))
    return out


def _data_indices(obj) -> int:
    """One more than the largest basis index appearing in a set or map."""
    from .defmaps import PiecewiseAffineBijection as PAB

    vecs = []
    cosets = []
    blocks = []
    if isinstance(obj, PAB):
        for p in obj.pieces:
            blocks += [p.domain, p.image]
            vecs.append(p.aff.shift)
    else:
        blocks = list(obj.blocks)
    for b in blocks:
        cosets += [b.ambient, *b.holes]
    for C in cosets:
        vecs.append(C.rep)
    return 1 + max((t for v in vecs for t in v.support), default=-1)


@dataclass
class Report:
    agree: bool
    details: dict = field(default_factory=dict)


def check_cardinality(D: DefinableSet, N: int) -> Report:
    """``|D n M_N^n|`` against the K0 polynomial at ``X_i = |F_i|^N``."""
    if N < _data_indices(D):
        raise ShapeError("truncation too small for the set's parameters")
    pts = truncation(D.space, N)
    count = sum(1 for x in pts if D.contains(x))
    predicted = k0_class(D).evaluate([F.cardinality**N for F in D.space.fields])
    return Report(count == predicted, {"enumerated": count, "predicted": predicted})


def check_support(f: PiecewiseAffineBijection, support_set: DefinableSet, N: int) -> Report:
    if N < _data_indices(f):
        raise ShapeError("truncation too small for the map's parameters")
    mism = [x.format() for x in truncation(f.space, N) if (f.apply(x) != x) != support_set.contains(x)]
    return Report(not mism, {"mismatches": mism[:5]})


def truncated_parity(f: PiecewiseAffineBijection, N: int) -> int:
    pts = truncation(f.space, N)
    index = {x: j for j, x in enumerate(pts)}
    mapping = {}
    for j, x in enumerate(pts):
        y = f.apply(x)
        if y not in index:
            raise ShapeError("the map does not preserve the truncation")
        mapping[j] = index[y]
    return permutation_sign(mapping)


def predicted_parity(c: K1Class, N: int) -> int:
    """Parity on the truncation from a K1 class (odd finite fields).

    A level-``m`` sign contributes one odd swap of ``q^(mN)`` points; a linear
    part with unit class ``u`` permutes ``(F^m)^N`` with parity ``N * [chi(u) = -1]``.
    """
    total = 0
    for comp in c.components:
        F = comp.field
        if not isinstance(F, GF) or F.cardinality % 2 == 0:
            raise UnsupportedRing("the parity formula needs an odd finite field")
        total += comp.sign0
        for _, u, s in comp.levels:
            total += s + N * (F.quadratic_character(u.value) == -1)
    return total % 2


def check_sign(f: PiecewiseAffineBijection, c: K1Class, N: int) -> Report:
    if N < _data_indices(f):
        raise ShapeError("truncation too small for the map's parameters")
    got, want = truncated_parity(f, N), predicted_parity(c, N)
    return Report(got == want, {"enumerated": got, "predicted": want})


def exhaustive_check(obj, N: int, **kw) -> Report:
    """Dispatch: a set gets a cardinality check; a map gets support and sign checks."""
    from .defmaps import support
    from .k1 import k1_invariant

    if isinstance(obj, DefinableSet):
        return check_cardinality(obj, N)
    sup = check_support(obj, support(obj), N)
    sgn = check_sign(obj, kw.get("k1") or k1_invariant(obj), N)
    return Report(sup.agree and sgn.agree, {"support": sup.details, "sign": sgn.details})
