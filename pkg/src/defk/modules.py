"""Elements of free right S-modules and their powers.

A module ``M = prod_i M_i`` has ``M_i`` a direct sum of ``rank_i`` copies of
``M_{1 x q_i}(R_i)``. An element of ``M^n`` is stored per component as a
finitely supported map ``index -> row of length n * q_i`` over ``R_i``: the
row at basis index ``t`` concatenates the ``n`` coordinates' ``1 x q_i`` rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from . import linalg
from .errors import DescriptorMismatch, ShapeError
from .rings import RingDescriptor, RingElement

OMEGA = math.inf


@dataclass(frozen=True)
class ModuleDescriptor:
    ring: RingDescriptor
    ranks: tuple  # int or OMEGA per component

    def __post_init__(self):
        if len(self.ranks) != self.ring.k:
            raise ShapeError("one rank per ring component required")

    @classmethod
    def of(cls, ring: RingDescriptor, rank=OMEGA):
        ranks = tuple(rank) if isinstance(rank, (tuple, list)) else (rank,) * ring.k
        return cls(ring, ranks)

    @property
    def k(self) -> int:
        return self.ring.k

    def is_infinite(self, i: int) -> bool:
        r = self.ranks[i]
        return r == OMEGA or (r >= 1 and not self.ring.field(i).is_finite)

    @property
    def all_infinite(self) -> bool:
        return all(self.is_infinite(i) for i in range(self.k))

    @property
    def is_finite(self) -> bool:
        return not any(self.is_infinite(i) for i in range(self.k))

    def component(self, i: int) -> "ModuleDescriptor":
        return ModuleDescriptor(self.ring.component(i), (self.ranks[i],))

    def format_rank(self) -> str:
        parts = ["omega" if r == OMEGA else str(r) for r in self.ranks]
        return parts[0] if len(set(parts)) == 1 else ", ".join(parts)


@dataclass(frozen=True)
class Space:
    """The ambient power ``M^n``."""

    module: ModuleDescriptor
    n: int

    def width(self, i: int) -> int:
        return self.n * self.module.ring.q(i)

    @property
    def widths(self) -> tuple:
        return tuple(self.n * q for q in self.module.ring.qs)

    @property
    def fields(self) -> tuple:
        return self.module.ring.fields

    @property
    def k(self) -> int:
        return self.module.k

    def power(self, n: int) -> "Space":
        return Space(self.module, n)


def _clean(F, width: int, items: Iterable, rank) -> tuple:
    out = {}
    for t, row in items:
        row = tuple(row)
        if len(row) != width:
            raise ShapeError(f"row of length {len(row)}, expected {width}")
        if not linalg.is_zero_row(F, row):
            if not (0 <= t < rank):
                raise ShapeError(f"basis index {t} outside rank {rank}")
            out[t] = row
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class Vector:
    """An element of ``M^n`` (an element of ``M`` when ``n == 1``)."""

    space: Space
    comps: tuple  # per component: tuple of (index, row) sorted, no zero rows

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.space, self.comps))

    @classmethod
    def make(cls, space: Space, comps: Iterable[Mapping | Iterable]) -> "Vector":
        comps = list(comps)
        if len(comps) != space.k:
            raise ShapeError("one component per ring factor required")
        out = []
        for i, c in enumerate(comps):
            items = c.items() if isinstance(c, Mapping) else c
            out.append(_clean(space.fields[i], space.width(i), items, space.module.ranks[i]))
        return cls(space, tuple(out))

    @classmethod
    def zero(cls, space: Space) -> "Vector":
        return cls(space, ((),) * space.k)

    def comp(self, i: int) -> dict:
        return dict(self.comps[i])

    def row(self, i: int, t: int) -> tuple:
        for s, r in self.comps[i]:
            if s == t:
                return r
        return linalg.zero_row(self.space.fields[i], self.space.width(i))

    @property
    def support(self) -> frozenset:
        return frozenset(t for c in self.comps for t, _ in c)

    def is_zero(self) -> bool:
        return not any(self.comps)

    def _combine(self, other: "Vector", op) -> "Vector":
        if self.space != other.space:
            raise DescriptorMismatch("vectors live in different spaces")
        out = []
        for i, F in enumerate(self.space.fields):
            a, b = dict(self.comps[i]), dict(other.comps[i])
            zero = linalg.zero_row(F, self.space.width(i))
            items = [(t, op(F, a.get(t, zero), b.get(t, zero))) for t in a.keys() | b.keys()]
            out.append(_clean(F, self.space.width(i), items, OMEGA))
        return Vector(self.space, tuple(out))

    def __add__(self, other):
        return self._combine(other, linalg.row_add)

    def __sub__(self, other):
        return self._combine(other, linalg.row_sub)

    def __neg__(self):
        return Vector.zero(self.space) - self

    def act(self, mats: tuple) -> "Vector":
        """Pointwise right multiplication by one ``n q_i x n' q_i`` matrix per component."""
        out = []
        widths = []
        for i, F in enumerate(self.space.fields):
            A = mats[i]
            w = len(A[0]) if A else 0
            widths.append(w)
            out.append(_clean(F, w, [(t, linalg.vec_mat(F, r, A)) for t, r in self.comps[i]], OMEGA))
        qs = self.space.module.ring.qs
        n_out = widths[0] // qs[0]
        return Vector(self.space.power(n_out), tuple(out))

    def scale(self, i_coeffs: tuple) -> "Vector":
        """Left multiplication of every row by a scalar per component."""
        out = []
        for i, F in enumerate(self.space.fields):
            s = i_coeffs[i]
            out.append(_clean(F, self.space.width(i), [(t, linalg.row_scale(F, s, r)) for t, r in self.comps[i]], OMEGA))
        return Vector(self.space, tuple(out))

    def concat(self, other: "Vector") -> "Vector":
        """The element ``(self, other)`` of ``M^(n + n')``."""
        if self.space.module != other.space.module:
            raise DescriptorMismatch("vectors over different modules")
        space = self.space.power(self.space.n + other.space.n)
        out = []
        for i, F in enumerate(self.space.fields):
            a, b = dict(self.comps[i]), dict(other.comps[i])
            za = linalg.zero_row(F, self.space.width(i))
            zb = linalg.zero_row(F, other.space.width(i))
            items = [(t, a.get(t, za) + b.get(t, zb)) for t in a.keys() | b.keys()]
            out.append(_clean(F, space.width(i), items, OMEGA))
        return Vector(space, tuple(out))

    def pad(self, n: int) -> "Vector":
        """Append zero coordinates up to ``M^n``."""
        if n < self.space.n:
            raise ShapeError("cannot pad to a smaller power")
        return self.concat(Vector.zero(self.space.power(n - self.space.n))) if n > self.space.n else self

    def coordinates(self, lo: int, hi: int) -> "Vector":
        """Project onto the coordinates ``lo..hi-1``."""
        space = self.space.power(hi - lo)
        out = []
        for i, F in enumerate(self.space.fields):
            q = self.space.module.ring.q(i)
            items = [(t, r[lo * q : hi * q]) for t, r in self.comps[i]]
            out.append(_clean(F, space.width(i), items, OMEGA))
        return Vector(space, tuple(out))

    def entry(self, j: int) -> "Vector":
        """The ``j``-th coordinate, an element of ``M``."""
        return self.coordinates(j, j + 1)

    def to_json(self):
        return [
            {str(t): [F.to_json(x) for x in r] for t, r in c}
            for F, c in zip(self.space.fields, self.comps)
        ]

    def format(self) -> str:
        parts = []
        for F, c in zip(self.space.fields, self.comps):
            parts.append("{" + ", ".join(f"{t}: (" + ", ".join(F.format(x) for x in r) + ")" for t, r in c) + "}")
        return parts[0] if len(parts) == 1 else "(" + "; ".join(parts) + ")"


def module_element(module: ModuleDescriptor, comps) -> Vector:
    return Vector.make(Space(module, 1), comps)


def scalar_act(x: Vector, s: RingElement) -> Vector:
    """Right action ``x . s`` applied to every coordinate of ``x``."""
    if s.ring != x.space.module.ring:
        raise DescriptorMismatch("scalar from a different ring")
    n = x.space.n
    mats = []
    for i, F in enumerate(x.space.fields):
        q = x.space.module.ring.q(i)
        blk = s.blocks[i]
        full = [[F.zero] * (n * q) for _ in range(n * q)]
        for c in range(n):
            for a in range(q):
                for b in range(q):
                    full[c * q + a][c * q + b] = blk[a][b]
        mats.append(tuple(map(tuple, full)))
    return x.act(tuple(mats))


def morita_rank(k: int, q: int) -> int:
    """R-rank of the Morita image ``F_q(R^k)`` of the free module ``R^k``."""
    return k * q


def morita_module(module: ModuleDescriptor, q: int) -> ModuleDescriptor:
    """The ``M_q(R)``-module on the same underlying data as ``module`` over ``R``."""
    if module.k != 1 or module.ring.q(0) != 1:
        raise ShapeError("Morita translation starts from a single division ring")
    ring = RingDescriptor.of((q, module.ring.field(0)))
    return ModuleDescriptor(ring, module.ranks)


def morita_translate(obj, q: int):
    """Block ``q`` consecutive R-coordinates into one ``M_{1 x q}(R)`` coordinate.

    Accepts vectors, pp-subgroups, cosets, affine maps and piecewise affine
    bijections over a single division ring ``R``; the raw R-data is unchanged,
    only the module descriptor and the coordinate count are re-read.
    """
    from .defmaps import PiecewiseAffineBijection
    from .ppsets import AffineMap, Coset, Subgroup

    def space_of(space: Space) -> Space:
        if space.n % q:
            raise ShapeError(f"power {space.n} is not a multiple of q={q}")
        return Space(morita_module(space.module, q), space.n // q)

    if isinstance(obj, Vector):
        return Vector(space_of(obj.space), obj.comps)
    if isinstance(obj, Subgroup):
        return Subgroup(space_of(obj.space), obj.bases)
    if isinstance(obj, Coset):
        return Coset(morita_translate(obj.sub, q), morita_translate(obj.rep, q))
    if isinstance(obj, AffineMap):
        return AffineMap(space_of(obj.space), obj.mats, morita_translate(obj.shift, q))
    if isinstance(obj, PiecewiseAffineBijection):
        return obj.translate(lambda o: morita_translate(o, q), space_of(obj.space))
    raise TypeError(f"cannot translate {type(obj).__name__}")
