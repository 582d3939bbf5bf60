"""Blocks, definable sets as disjoint unions of blocks, and K0 classes.

A block is ``A \\ (A_1 u ... u A_t)`` with ``A`` a coset and each ``A_j`` a
proper subcoset. Over infinite modules a coset is never a finite union of
proper subcosets, so a block is empty exactly when one of its holes is its
ambient; that is what makes all emptiness tests here syntactic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .errors import DescriptorMismatch, EmptySet, PreconditionFailed, SizeBoundExceeded, UnsupportedRing
from .modules import OMEGA, Space, Vector
from .ppsets import AffineMap, Coset, Subgroup, pp_iso_standard, standard_coset


@dataclass(frozen=True)
class Block:
    ambient: Coset
    holes: tuple = ()

    @classmethod
    def make(cls, ambient: Coset | None, holes=()) -> "Block | None":
        """Canonical block, or None when it is empty."""
        if ambient is None:
            return None
        clipped = {}
        for h in holes:
            h = ambient.intersect(h)
            if h is None:
                continue
            if h == ambient:
                return None
            clipped[h.key] = h
        hs = sorted(clipped.values(), key=lambda c: c.key)
        kept = [h for h in hs if not any(o is not h and h.le(o) for o in hs)]
        return cls(ambient, tuple(kept))

    @property
    def space(self) -> Space:
        return self.ambient.space

    @property
    def colour(self) -> tuple:
        return self.ambient.colour

    def contains(self, v: Vector) -> bool:
        return self.ambient.contains(v) and not any(h.contains(v) for h in self.holes)

    def intersect(self, other: "Block") -> "Block | None":
        return Block.make(self.ambient.intersect(other.ambient), self.holes + other.holes)

    def intersect_coset(self, C: Coset) -> "Block | None":
        return Block.make(self.ambient.intersect(C), self.holes)

    def minus_coset(self, C: Coset) -> "Block | None":
        return Block.make(self.ambient, self.holes + (C,))

    def difference(self, other: "Block") -> list:
        """Pairwise disjoint blocks covering ``self \\ other``."""
        if self.ambient.intersect(other.ambient) is None:
            return [self]
        out = []
        b = self.minus_coset(other.ambient)
        if b is not None:
            out.append(b)
        for j, h in enumerate(other.holes):
            b = Block.make(self.ambient.intersect(h), self.holes + other.holes[:j])
            if b is not None:
                out.append(b)
        return out

    def image(self, f: AffineMap) -> "Block":
        return Block.make(self.ambient.image(f), tuple(h.image(f) for h in self.holes))

    def preimage(self, f: AffineMap) -> "Block":
        return self.image(f.inverse())

    def product(self, other: "Block") -> "Block":
        A1, A2 = self.ambient, other.ambient
        holes = tuple(h.product(A2) for h in self.holes) + tuple(A1.product(h) for h in other.holes)
        return Block.make(A1.product(A2), holes)

    def pad(self, n: int) -> "Block":
        return Block(self.ambient.pad(n), tuple(h.pad(n) for h in self.holes))

    def k0(self) -> "K0Class":
        total = K0Class.monomial(self.colour)

        def rec(start, current, sign):
            nonlocal total
            for j in range(start, len(self.holes)):
                inter = current.intersect(self.holes[j])
                if inter is not None:
                    total = total + K0Class.monomial(inter.colour, sign)
                    rec(j + 1, inter, -sign)

        rec(0, self.ambient, -1)
        return total

    def to_json(self):
        return {"ambient": self.ambient.to_json(), "holes": [h.to_json() for h in self.holes]}


@dataclass(frozen=True)
class K0Class:
    """Integer polynomial in ``X_1..X_k``; ``terms`` maps exponents to coefficients."""

    terms: tuple  # sorted tuple of (exponent tuple, coeff), no zero coeffs

    @classmethod
    def from_dict(cls, d) -> "K0Class":
        return cls(tuple(sorted((e, c) for e, c in d.items() if c)))

    @classmethod
    def monomial(cls, exp, coeff=1) -> "K0Class":
        return cls.from_dict({tuple(exp): coeff})

    @classmethod
    def zero(cls) -> "K0Class":
        return cls(())

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other):
        d = self.as_dict()
        for e, c in other.terms:
            d[e] = d.get(e, 0) + c
        return K0Class.from_dict(d)

    def __neg__(self):
        return K0Class(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        d = {}
        for (e1, c1), (e2, c2) in itertools.product(self.terms, other.terms):
            e = tuple(a + b for a, b in zip(e1, e2))
            d[e] = d.get(e, 0) + c1 * c2
        return K0Class.from_dict(d)

    def coefficient(self, exp) -> int:
        return self.as_dict().get(tuple(exp), 0)

    @property
    def degree(self) -> tuple | None:
        """Componentwise maximal exponent; None for the zero class."""
        if not self.terms:
            return None
        return tuple(max(col) for col in zip(*(e for e, _ in self.terms)))

    def evaluate(self, values) -> int:
        total = 0
        for e, c in self.terms:
            term = c
            for v, p in zip(values, e):
                term *= v**p
            total += term
        return total

    def format(self) -> str:
        if not self.terms:
            return "0"
        k = len(self.terms[0][0])
        names = ["X"] if k == 1 else [f"X{i + 1}" for i in range(k)]
        parts = []
        for e, c in sorted(self.terms, key=lambda t: (-sum(t[0]), tuple(-x for x in t[0]))):
            mono = "*".join(n if p == 1 else f"{n}^{p}" for n, p in zip(names, e) if p)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def to_json(self):
        return [{"exponent": list(e), "coeff": c} for e, c in self.terms]


@dataclass(frozen=True)
class DefinableSet:
    """A finite list of pairwise disjoint blocks in one ambient power."""

    space: Space
    blocks: tuple

    @classmethod
    def empty(cls, space: Space) -> "DefinableSet":
        return cls(space, ())

    @classmethod
    def full(cls, space: Space) -> "DefinableSet":
        return cls(space, (Block(Coset.full(space)),))

    @classmethod
    def of_coset(cls, C: Coset) -> "DefinableSet":
        return cls(C.space, (Block(C),))

    @classmethod
    def of_blocks(cls, space: Space, blocks) -> "DefinableSet":
        return normalize(space, blocks)

    def contains(self, v: Vector) -> bool:
        return any(b.contains(v) for b in self.blocks)

    def is_empty(self) -> bool:
        return not self.blocks

    def union(self, other: "DefinableSet") -> "DefinableSet":
        return normalize(self.space, self.blocks + other.blocks)

    def disjoint_union(self, other: "DefinableSet") -> "DefinableSet":
        """Union of sets already known to be disjoint."""
        return DefinableSet(self.space, self.blocks + other.blocks)

    def intersect(self, other: "DefinableSet") -> "DefinableSet":
        out = []
        for a in self.blocks:
            for b in other.blocks:
                c = a.intersect(b)
                if c is not None:
                    out.append(c)
        return DefinableSet(self.space, tuple(out))

    def intersect_coset(self, C: Coset) -> "DefinableSet":
        return DefinableSet(self.space, tuple(b for b in (x.intersect_coset(C) for x in self.blocks) if b is not None))

    def minus_block(self, other: Block) -> "DefinableSet":
        out = []
        for a in self.blocks:
            out.extend(a.difference(other))
        return DefinableSet(self.space, tuple(out))

    def difference(self, other: "DefinableSet") -> "DefinableSet":
        if self.space != other.space:
            raise DescriptorMismatch("sets in different powers")
        cur = self
        for b in other.blocks:
            cur = cur.minus_block(b)
            if cur.is_empty():
                break
        return cur

    def le(self, other: "DefinableSet") -> bool:
        return self.difference(other).is_empty()

    def equals(self, other: "DefinableSet") -> bool:
        return self.space == other.space and self.le(other) and other.le(self)

    def image(self, f: AffineMap) -> "DefinableSet":
        return DefinableSet(self.space, tuple(b.image(f) for b in self.blocks))

    def product(self, other: "DefinableSet") -> "DefinableSet":
        space = self.space.power(self.space.n + other.space.n)
        return DefinableSet(space, tuple(a.product(b) for a in self.blocks for b in other.blocks))

    def pad(self, n: int) -> "DefinableSet":
        return DefinableSet(self.space.power(n), tuple(b.pad(n) for b in self.blocks))

    def to_json(self):
        return [b.to_json() for b in self.blocks]


def normalize(space: Space, blocks) -> DefinableSet:
    """Pairwise disjoint decomposition: each block loses the earlier ones."""
    out: list = []
    for b in blocks:
        if b is None:
            continue
        if b.space != space:
            raise DescriptorMismatch("block lives in another power")
        pieces = [b]
        for prev in out:
            pieces = [p for q in pieces for p in q.difference(prev)]
            if not pieces:
                break
        out.extend(pieces)
    return DefinableSet(space, tuple(out))


def dim_of(D: DefinableSet) -> tuple | None:
    """Componentwise maximum of block colours; None (bottom) for the empty set."""
    if not D.blocks:
        return None
    return tuple(max(col) for col in zip(*(b.colour for b in D.blocks)))


def k0_class(D: DefinableSet) -> K0Class:
    if not D.space.module.all_infinite:
        raise UnsupportedRing("K0 as a monoid ring needs every component module infinite")
    total = K0Class.zero()
    for b in D.blocks:
        total = total + b.k0()
    return total


# -- points ---------------------------------------------------------------

def _max_index(block: Block) -> int:
    idx = set(block.ambient.rep.support)
    for h in block.holes:
        idx |= h.rep.support
    return max(idx, default=-1)


def _basis_moves(C: Coset):
    for i, B in enumerate(C.sub.bases):
        for b in B:
            yield i, b


def _place(space: Space, i: int, t: int, row) -> Vector:
    comps = [{} for _ in range(space.k)]
    comps[i] = {t: row}
    return Vector.make(space, comps)


def block_point(block: Block) -> Vector:
    space = block.space
    A = block.ambient
    if block.contains(A.rep):
        return A.rep
    rank = min(space.module.ranks)
    # small deterministic search: basis-index-major, then basis rows, then scalars
    for t in range(int(min(rank, 3))):
        for i, b in _basis_moves(A):
            F = space.fields[i]
            for s in itertools.islice((x for x in F.elements() if not F.is_zero(x)), 4):
                x = A.rep + _place(space, i, t, tuple(F.mul(s, y) for y in b))
                if block.contains(x):
                    return x
    if all(r == OMEGA for r in space.module.ranks):
        # one fresh index per hole, each carrying a direction outside that hole
        t0 = _max_index(block) + 1
        x = A.rep
        for j, h in enumerate(block.holes):
            move = next(
                (i, b) for i, b in _basis_moves(A) if not Subgroup(space, h.sub.bases).contains(_place(space, i, 0, b))
            )
            x = x + _place(space, move[0], t0 + j, move[1])
        if block.contains(x):
            return x
    return _exhaustive_point(block)


def _exhaustive_point(block: Block, limit: int = 200_000) -> Vector:
    space = block.space
    A = block.ambient
    moves = [(i, b, t) for t in range(int(min(min(space.module.ranks), 8))) for i, b in _basis_moves(A)]
    for bound in itertools.count(2):
        pools = []
        for i, _, _ in moves:
            pools.append(list(itertools.islice(space.fields[i].elements(), bound)))
        count = 0
        for coeffs in itertools.product(*pools):
            count += 1
            if count > limit:
                raise SizeBoundExceeded("point search exceeded its budget")
            x = A.rep
            for (i, b, t), s in zip(moves, coeffs):
                F = space.fields[i]
                if not F.is_zero(s):
                    x = x + _place(space, i, t, tuple(F.mul(s, y) for y in b))
            if block.contains(x):
                return x
        if all(len(p) < bound for p in pools):
            raise EmptySet("block has no points")


def find_point(D: DefinableSet) -> Vector:
    if not D.blocks:
        raise EmptySet("the empty set has no points")
    return block_point(D.blocks[0])


# -- common chunks --------------------------------------------------------

def _tag(space: Space) -> Vector:
    """A vector in ``M^(n+1)`` that is zero except for its last coordinate."""
    big = space.power(space.n + 1)
    comps = []
    for i, F in enumerate(space.fields):
        q = space.module.ring.q(i)
        row = [F.zero] * big.width(i)
        row[space.n * q] = F.one
        comps.append({0: tuple(row)})
    return Vector.make(big, comps)


def _slice(D: DefinableSet, i: int) -> Block:
    """A block of ``D`` varying only in component ``i``, of maximal ``i``-dimension."""
    b = max(D.blocks, key=lambda blk: blk.colour[i])
    a = block_point(b)
    space = D.space
    gens = [B if j == i else () for j, B in enumerate(Subgroup.full(space).bases)]
    line = Coset.make(Subgroup(space, tuple(gens)), a)
    return b.intersect_coset(line)


def _zero_leading(v: Vector, i: int, d: int) -> Vector:
    comps = []
    for j, c in enumerate(v.comps):
        if j != i:
            comps.append(dict(c))
        else:
            F = v.space.fields[j]
            comps.append({t: tuple(F.zero if p < d else x for p, x in enumerate(r)) for t, r in c})
    return Vector.make(v.space, comps)


def common_chunk(D1: DefinableSet, D2: DefinableSet, m):
    """A set ``D`` with a definable bijection ``g : D -> D2`` and
    ``dim(D1 n D) >= m + 1`` (everything padded to a common power).

    Returns ``(D, g)``; ``g`` is a :class:`~defk.defmaps.PiecewiseAffineBijection`.
    """
    from .defmaps import AffinePiece, PiecewiseAffineBijection

    k = D1.space.k
    need = tuple(x + 1 for x in m)
    for D in (D1, D2):
        d = dim_of(D)
        if d is None or any(a < b for a, b in zip(d, need)):
            raise PreconditionFailed(f"dimension {d} is not >= {need}")
    n = max(D1.space.n, D2.space.n)
    D1p, D2p = D1.pad(n), D2.pad(n)
    if D1p.equals(D2p):
        return D2p, PiecewiseAffineBijection.identity(D2p)

    space = D1p.space
    rem1, rem2 = D1p, D2p
    chunks = []
    for i in range(k):
        C1, C2 = _slice(rem1, i), _slice(rem2, i)
        phi1, phi2 = pp_iso_standard(C1.ambient), pp_iso_standard(C2.ambient)
        s1, s2 = C1.image(phi1), C2.image(phi2)
        d1, d2 = C1.colour[i], C2.colour[i]
        dims = tuple(min(d1, d2) if j == i else 0 for j in range(k))
        low = standard_coset(space, dims)
        if d1 <= d2:
            y0 = _zero_leading(block_point(s2), i, d1)
            cut = s2.intersect_coset(low.translate(y0)).image(AffineMap.translation(-y0))
            E = s1.intersect(cut)
            e1 = phi1.inverse()
            e2 = phi2.inverse() @ AffineMap.translation(y0)
        else:
            y0 = _zero_leading(block_point(s1), i, d2)
            cut = s1.intersect_coset(low.translate(y0)).image(AffineMap.translation(-y0))
            E = cut.intersect(s2)
            e1 = phi1.inverse() @ AffineMap.translation(y0)
            e2 = phi2.inverse()
        chunks.append((E.image(e1), E.image(e2), e2 @ e1.inverse()))
        rem1 = rem1.minus_block(C1)
        rem2 = rem2.minus_block(C2)

    tag = _tag(space)
    big = n + 1
    rest = D2p
    for _, img2, _ in chunks:
        rest = rest.minus_block(img2)
    pieces = [AffinePiece.of(b1.pad(big), h.pad(big)) for b1, _, h in chunks]
    shift = AffineMap.translation(tag)
    moved = [b.pad(big).image(shift) for b in rest.blocks]
    pieces += [AffinePiece.of(b, shift.inverse()) for b in moved]
    D = DefinableSet(space.power(big), tuple(p.domain for p in pieces))
    g = PiecewiseAffineBijection.make(D, D2p.pad(big), pieces)
    return D, g
