"""pp-definable subgroups and cosets of ``M^n`` in canonical form.

A pp-subgroup is given per component ``i`` by a left subspace ``V_i`` of
``R_i^(n q_i)`` and consists of the vectors whose row at every basis index
lies in ``V_i``. Each ``V_i`` is stored by its RREF basis, so equal subgroups
have equal representations. Cosets carry the representative reduced modulo
the subgroup, which makes coset equality structural as well.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

from . import linalg
from .errors import DescriptorMismatch, ShapeError
from .modules import Space, Vector, _clean, OMEGA


@dataclass(frozen=True)
class Subgroup:
    space: Space
    bases: tuple  # per component: RREF basis rows

    @classmethod
    def spanned(cls, space: Space, gens) -> "Subgroup":
        return cls(space, tuple(linalg.rref(F, tuple(g), space.width(i)) for i, (F, g) in enumerate(zip(space.fields, gens))))

    @classmethod
    def full(cls, space: Space) -> "Subgroup":
        return cls(space, tuple(linalg.identity(F, space.width(i)) for i, F in enumerate(space.fields)))

    @classmethod
    def zero(cls, space: Space) -> "Subgroup":
        return cls(space, ((),) * space.k)

    @classmethod
    def standard(cls, space: Space, dims) -> "Subgroup":
        """Span of the first ``dims[i]`` raw coordinates in each component."""
        return cls(space, tuple(linalg.identity(F, space.width(i))[: dims[i]] for i, F in enumerate(space.fields)))

    @property
    def dims(self) -> tuple:
        return tuple(len(b) for b in self.bases)

    def contains(self, v: Vector) -> bool:
        return all(
            linalg.in_span(F, B, r) for F, B, c in zip(self.space.fields, self.bases, v.comps) for _, r in c
        )

    def reduce(self, v: Vector) -> Vector:
        comps = []
        for i, (F, B, c) in enumerate(zip(self.space.fields, self.bases, v.comps)):
            comps.append(_clean(F, self.space.width(i), [(t, linalg.reduce_mod(F, B, r)) for t, r in c], OMEGA))
        return Vector(v.space, tuple(comps))

    def le(self, other: "Subgroup") -> bool:
        return all(
            linalg.in_span(F, B2, r) for F, B1, B2 in zip(self.space.fields, self.bases, other.bases) for r in B1
        )

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.space, self.bases))

    def intersect(self, other: "Subgroup") -> "Subgroup":
        return _subgroup_intersect(self, other)

    def _intersect(self, other: "Subgroup") -> "Subgroup":
        out = []
        for i, (F, B1, B2) in enumerate(zip(self.space.fields, self.bases, other.bases)):
            w = self.space.width(i)
            if not B1 or not B2:
                out.append(())
                continue
            K = linalg.left_kernel(F, B1 + B2, len(B1) + len(B2), w)
            out.append(linalg.rref(F, [linalg.vec_mat(F, k[: len(B1)], B1) for k in K], w))
        return Subgroup(self.space, tuple(out))

    def image(self, mats) -> "Subgroup":
        return Subgroup(
            self.space,
            tuple(
                linalg.rref(F, linalg.mat_mul(F, B, A), self.space.width(i)) if B else ()
                for i, (F, B, A) in enumerate(zip(self.space.fields, self.bases, mats))
            ),
        )

    def product(self, other: "Subgroup") -> "Subgroup":
        space = self.space.power(self.space.n + other.space.n)
        out = []
        for i, F in enumerate(self.space.fields):
            w1, w2 = self.space.width(i), other.space.width(i)
            rows = [r + (F.zero,) * w2 for r in self.bases[i]] + [(F.zero,) * w1 + r for r in other.bases[i]]
            out.append(linalg.rref(F, rows, w1 + w2))
        return Subgroup(space, tuple(out))

    def pad(self, n: int) -> "Subgroup":
        """The same subgroup inside ``M^n`` (extra coordinates zero)."""
        space = self.space.power(n)
        return Subgroup(
            space,
            tuple(
                tuple(r + (F.zero,) * (space.width(i) - self.space.width(i)) for r in B)
                for i, (F, B) in enumerate(zip(self.space.fields, self.bases))
            ),
        )

    def to_json(self):
        return [[[F.to_json(x) for x in r] for r in B] for F, B in zip(self.space.fields, self.bases)]


def canonicalize(space: Space, ann=None, gens=None) -> Subgroup:
    """Canonical pp-subgroup from annihilator columns or from generator rows.

    ``ann[i]`` is an ``n q_i x m`` matrix: the subgroup is ``{x : x @ ann == 0}``.
    ``gens[i]`` is a list of rows spanning the subgroup.
    """
    if (ann is None) == (gens is None):
        raise ShapeError("give exactly one of ann= or gens=")
    if gens is not None:
        for i, g in enumerate(gens):
            if any(len(r) != space.width(i) for r in g):
                raise ShapeError("generator rows have the wrong length")
        return Subgroup.spanned(space, gens)
    out = []
    for i, (F, A) in enumerate(zip(space.fields, ann)):
        w = space.width(i)
        A = tuple(tuple(r) for r in A)
        if len(A) != w:
            raise ShapeError(f"annihilator needs {w} rows, got {len(A)}")
        m = len(A[0]) if A else 0
        out.append(linalg.left_kernel(F, A, w, m))
    return Subgroup(space, tuple(out))


def _coset_key(c: "Coset"):
    return (c.sub.dims, repr(c.sub.bases), repr(c.rep.comps))


@dataclass(frozen=True)
class Coset:
    """A non-empty pp-set ``rep + sub`` with canonical ``rep``."""

    sub: Subgroup
    rep: Vector

    @classmethod
    def make(cls, sub: Subgroup, rep: Vector | None = None) -> "Coset":
        rep = Vector.zero(sub.space) if rep is None else rep
        if rep.space != sub.space:
            raise DescriptorMismatch("representative lives in another space")
        return cls(sub, sub.reduce(rep))

    @classmethod
    def point(cls, v: Vector) -> "Coset":
        return cls(Subgroup.zero(v.space), v)

    @classmethod
    def full(cls, space: Space) -> "Coset":
        return cls(Subgroup.full(space), Vector.zero(space))

    @property
    def space(self) -> Space:
        return self.sub.space

    @property
    def colour(self) -> tuple:
        return self.sub.dims

    @cached_property
    def key(self):
        return _coset_key(self)

    def contains(self, v: Vector) -> bool:
        return self.sub.contains(v - self.rep)

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.sub, self.rep))

    def le(self, other: "Coset") -> bool:
        return _coset_le(self, other)

    def intersect(self, other: "Coset") -> "Coset | None":
        return _coset_intersect(self, other)

    def image(self, f: "AffineMap") -> "Coset":
        return _coset_image(self, f)

    def _intersect(self, other: "Coset") -> "Coset | None":
        if self.space != other.space:
            raise DescriptorMismatch("cosets in different spaces")
        sub = self.sub.intersect(other.sub)
        d = other.rep - self.rep
        comps = []
        for i, (F, B1, B2) in enumerate(zip(self.space.fields, self.sub.bases, other.sub.bases)):
            rows = []
            for t, r in d.comps[i]:
                u = linalg.solve_left(F, B1 + B2, r)
                if u is None:
                    return None
                rows.append((t, linalg.vec_mat(F, u[: len(B1)], B1) if B1 else linalg.zero_row(F, len(r))))
            comps.append(rows)
        shift = Vector.make(self.space, comps)
        return Coset.make(sub, self.rep + shift)


    def preimage(self, f: "AffineMap") -> "Coset":
        return self.image(f.inverse())

    def product(self, other: "Coset") -> "Coset":
        return Coset(self.sub.product(other.sub), self.rep.concat(other.rep))

    def pad(self, n: int) -> "Coset":
        return Coset(self.sub.pad(n), self.rep.pad(n))

    def translate(self, v: Vector) -> "Coset":
        return Coset.make(self.sub, self.rep + v)

    def to_json(self):
        return {"basis": self.sub.to_json(), "rep": self.rep.to_json()}


@lru_cache(maxsize=1 << 17)
def _subgroup_intersect(a: Subgroup, b: Subgroup) -> Subgroup:
    return a._intersect(b)


@lru_cache(maxsize=1 << 17)
def _coset_intersect(a: Coset, b: Coset) -> "Coset | None":
    return a._intersect(b)


@lru_cache(maxsize=1 << 17)
def _coset_le(a: Coset, b: Coset) -> bool:
    return a.sub.le(b.sub) and b.contains(a.rep)


@lru_cache(maxsize=1 << 17)
def _coset_image(C: Coset, f: "AffineMap") -> Coset:
    return Coset.make(C.sub.image(f.mats), f.apply(C.rep))


PPSet = Coset  # a pp-set is a Coset or None (the empty set)


def pp_intersect(P1: Coset | None, P2: Coset | None) -> Coset | None:
    if P1 is None or P2 is None:
        return None
    return P1.intersect(P2)


def colour_of(P: Coset | None) -> tuple | None:
    """Dimension vector of a pp-set; ``None`` stands for the empty colour."""
    return None if P is None else P.colour


@dataclass(frozen=True)
class AffineMap:
    """``x -> x @ A + shift`` on ``M^n``, with ``A`` invertible per component."""

    space: Space
    mats: tuple
    shift: Vector

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.space, self.mats, self.shift))

    @classmethod
    def identity(cls, space: Space) -> "AffineMap":
        return cls(space, tuple(linalg.identity(F, space.width(i)) for i, F in enumerate(space.fields)), Vector.zero(space))

    @classmethod
    def linear(cls, space: Space, mats) -> "AffineMap":
        mats = tuple(tuple(tuple(r) for r in A) for A in mats)
        for i, A in enumerate(mats):
            if len(A) != space.width(i) or any(len(r) != space.width(i) for r in A):
                raise ShapeError(f"component {i}: expected a {space.width(i)}-square matrix")
            linalg.invert(space.fields[i], A)
        return cls(space, mats, Vector.zero(space))

    @classmethod
    def translation(cls, v: Vector) -> "AffineMap":
        ident = cls.identity(v.space)
        return cls(v.space, ident.mats, v)

    @classmethod
    def from_points(cls, d1: Vector, mats, d2: Vector) -> "AffineMap":
        """``x -> (x - d1) @ A + d2``."""
        lin = cls.linear(d1.space, mats)
        return cls(d1.space, lin.mats, d2 - d1.act(lin.mats))

    def apply(self, v: Vector) -> Vector:
        return v.act(self.mats) + self.shift

    def then(self, other: "AffineMap") -> "AffineMap":
        """``other o self``."""
        F = self.space.fields
        mats = tuple(linalg.mat_mul(F[i], A, B) for i, (A, B) in enumerate(zip(self.mats, other.mats)))
        return AffineMap(self.space, mats, self.shift.act(other.mats) + other.shift)

    def __matmul__(self, other: "AffineMap") -> "AffineMap":
        """Composition ``self o other``."""
        return other.then(self)

    def inverse(self) -> "AffineMap":
        inv = tuple(linalg.invert(F, A) for F, A in zip(self.space.fields, self.mats))
        return AffineMap(self.space, inv, -self.shift.act(inv))

    def is_identity(self) -> bool:
        return self == AffineMap.identity(self.space)

    def fixed_set(self) -> Coset | None:
        """``{x : f(x) == x}`` as a pp-set."""
        space = self.space
        diff = []
        for i, (F, A) in enumerate(zip(space.fields, self.mats)):
            I = linalg.identity(F, space.width(i))
            diff.append(tuple(linalg.row_sub(F, a, e) for a, e in zip(A, I)))
        return solve_pointwise(space, tuple(diff), -self.shift)

    def pad(self, n: int) -> "AffineMap":
        """Extend by the identity on extra coordinates of ``M^n``."""
        space = self.space.power(n)
        mats = []
        for i, (F, A) in enumerate(zip(self.space.fields, self.mats)):
            w, W = self.space.width(i), space.width(i)
            I = linalg.identity(F, W)
            mats.append(tuple(A[r] + (F.zero,) * (W - w) if r < w else I[r] for r in range(W)))
        return AffineMap(space, tuple(mats), self.shift.pad(n))

    def to_json(self):
        return {
            "A": [[[F.to_json(x) for x in r] for r in A] for F, A in zip(self.space.fields, self.mats)],
            "shift": self.shift.to_json(),
        }


def solve_pointwise(space: Space, mats, rhs: Vector) -> Coset | None:
    """``{x in M^n : x @ mats == rhs}`` (pointwise), as a coset or None."""
    kernel = []
    comps = []
    for i, (F, A) in enumerate(zip(space.fields, mats)):
        w = space.width(i)
        m = len(A[0]) if A else 0
        kernel.append(linalg.left_kernel(F, A, w, m))
        rows = []
        for t, r in rhs.comps[i]:
            x = linalg.solve_left(F, A, r)
            if x is None:
                return None
            rows.append((t, x))
        comps.append(rows)
    return Coset.make(Subgroup(space, tuple(kernel)), Vector.make(space, comps))


def pp_iso_standard(P: Coset) -> AffineMap:
    """Affine bijection ``x -> (x - rep) @ G`` carrying ``P`` onto the standard
    subgroup of the same colour (span of the leading raw coordinates)."""
    mats = []
    for i, (F, B) in enumerate(zip(P.space.fields, P.sub.bases)):
        C = linalg.complete_basis(F, B, P.space.width(i))
        mats.append(linalg.invert(F, C))
    return AffineMap.from_points(P.rep, tuple(mats), Vector.zero(P.space))


def standard_coset(space: Space, dims) -> Coset:
    return Coset(Subgroup.standard(space, dims), Vector.zero(space))


def coset_iso(P: Coset, Q: Coset) -> AffineMap:
    """A global affine bijection mapping ``P`` onto ``Q`` (equal colours)."""
    if P.colour != Q.colour:
        raise ShapeError("cosets of different colours are not pp-isomorphic")
    return pp_iso_standard(Q).inverse() @ pp_iso_standard(P)
