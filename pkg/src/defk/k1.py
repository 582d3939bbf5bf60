"""K1 classes of definable automorphisms, the algebraic embedding, and the
expected shape of the group.

The invariant is extracted by peeling: the top affine part gives a Dieudonne
class at the top level; the residual automorphism has lower-dimensional
support, permutes the maximal cosets of its support by a finite permutation
(sign at that level) and acts on each cycle by an affine map (Dieudonne class
of its linear part on the direction space). Composing with a clean map that
has the same germs lowers the dimension of the support, and the last residual
is a permutation of finitely many points. Levels are raw R-dimensions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .defmaps import (
    AffinePiece,
    PiecewiseAffineBijection,
    compose,
    embed,
    extend_to_full,
    factor_components,
    invert,
    is_identity,
    support,
    support_unchecked,
)
from .defsets import Block, DefinableSet, common_chunk
from .errors import DescriptorMismatch, InvalidMap, PreconditionFailed, ShapeError, UnsupportedRing
from .fields import GF, DivisionRing, Rationals, RationalQuaternions
from .modules import ModuleDescriptor, Space, Vector
from .ppsets import AffineMap, Coset
from .rings import RingDescriptor, RingElement, UnitClass


# -- classes ----------------------------------------------------------------

@dataclass(frozen=True)
class ComponentK1:
    """``sign0`` in Z/2 and, per level ``d >= 1``, a unit class and a sign."""

    field: DivisionRing
    sign0: int = 0
    levels: tuple = ()  # sorted tuple of (level, UnitClass, sign); trivial entries dropped

    @classmethod
    def make(cls, F: DivisionRing, sign0: int, levels: dict) -> "ComponentK1":
        items = []
        for d in sorted(levels):
            u, s = levels[d]
            if not u.is_trivial or s % 2:
                items.append((d, u, s % 2))
        return cls(F, sign0 % 2, tuple(items))

    def as_dict(self) -> dict:
        return {d: (u, s) for d, u, s in self.levels}

    def level(self, d: int) -> tuple:
        return self.as_dict().get(d, (UnitClass.trivial(self.field), 0))

    def __add__(self, other: "ComponentK1") -> "ComponentK1":
        if self.field != other.field:
            raise DescriptorMismatch(f"{self.field} vs {other.field}")
        a, b = self.as_dict(), other.as_dict()
        out = {}
        for d in a.keys() | b.keys():
            u1, s1 = self.level(d)
            u2, s2 = other.level(d)
            out[d] = (u1.combine(u2), s1 + s2)
        return ComponentK1.make(self.field, self.sign0 + other.sign0, out)

    def __neg__(self) -> "ComponentK1":
        return ComponentK1.make(self.field, self.sign0, {d: (u.inverse(), s) for d, u, s in self.levels})

    @property
    def is_zero(self) -> bool:
        return self.sign0 == 0 and not self.levels

    def to_json(self):
        return {
            "sign0": self.sign0,
            "levels": [{"level": d, "det": u.to_json(), "sign": s} for d, u, s in self.levels],
        }

    def format(self) -> str:
        parts = [f"sign0={self.sign0}"]
        parts += [f"L{d}:(det={u.format()}, sign={s})" for d, u, s in self.levels]
        return " ".join(parts)


@dataclass(frozen=True)
class K1Class:
    ring: RingDescriptor
    components: tuple

    @classmethod
    def zero(cls, ring: RingDescriptor) -> "K1Class":
        return cls(ring, tuple(ComponentK1(F) for F in ring.fields))

    def __add__(self, other: "K1Class") -> "K1Class":
        return k1_add(self, other)

    def __neg__(self) -> "K1Class":
        return K1Class(self.ring, tuple(-c for c in self.components))

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def to_json(self):
        return [c.to_json() for c in self.components]

    def format(self) -> str:
        if len(self.components) == 1:
            return self.components[0].format()
        return " | ".join(f"[{i + 1}] {c.format()}" for i, c in enumerate(self.components))


def k1_add(c1: K1Class, c2: K1Class) -> K1Class:
    if c1.ring != c2.ring:
        raise DescriptorMismatch("K1 classes over different rings")
    return K1Class(c1.ring, tuple(a + b for a, b in zip(c1.components, c2.components)))


def k1_eq(c1: K1Class, c2: K1Class) -> bool:
    if c1.ring != c2.ring:
        raise DescriptorMismatch("K1 classes over different rings")
    return c1.components == c2.components


# -- the peeling engine (single component) -----------------------------------

def permutation_sign(mapping: dict) -> int:
    """Parity (0 or 1) of a permutation given as a dict."""
    seen = set()
    parity = 0
    for start in mapping:
        if start in seen:
            continue
        length = 0
        x = start
        while x not in seen:
            seen.add(x)
            x = mapping[x]
            length += 1
        parity += length - 1
    return parity % 2


def direction_det(C: Coset, aff: AffineMap) -> UnitClass:
    """Dieudonne class of the linear part of ``aff`` restricted to the direction of ``C``."""
    F = C.space.fields[0]
    B = C.sub.bases[0]
    A = aff.mats[0]
    T = []
    for b in B:
        c = linalg.coordinates(F, B, linalg.vec_mat(F, b, A))
        if c is None:
            raise InvalidMap("affine germ does not preserve the coset direction")
        T.append(c)
    return UnitClass(F, linalg.dieudonne_det(F, tuple(T)))


def _germ(h: PiecewiseAffineBijection, C: Coset) -> AffineMap:
    for p in h.pieces:
        dom = p.domain
        if C.le(dom.ambient) and not any(C.le(H) for H in dom.holes):
            return p.aff
    raise InvalidMap("no piece contains the coset generically")


def _maximal_cosets(sup: DefinableSet):
    m = max(b.colour[0] for b in sup.blocks)
    found = {}
    for b in sup.blocks:
        if b.colour[0] == m:
            found.setdefault(b.ambient.key, b.ambient)
    return m, [found[k] for k in sorted(found)]


def _realize(space: Space, cosets, germs) -> PiecewiseAffineBijection:
    """The clean map: ``germ_j`` on all of ``C_j`` (pairwise disjoint), identity elsewhere."""
    full = Coset.full(space)
    pieces = [AffinePiece.of(Block(C), g) for C, g in zip(cosets, germs)]
    rest = Block.make(full, cosets)
    if rest is not None:
        pieces.append(AffinePiece(rest, AffineMap.identity(space), rest))
    D = DefinableSet.full(space)
    return PiecewiseAffineBijection(D, D, tuple(pieces))


def _lift(space: Space, j: int) -> Vector:
    """A vector of ``space`` zero except for the first raw entry of coordinate ``j`` at basis index 0."""
    F = space.fields[0]
    q = space.module.ring.q(0)
    row = [F.zero] * space.width(0)
    row[j * q] = F.one
    return Vector.make(space, [{0: tuple(row)}])


def _swap(space: Space, C: Coset, z: Vector) -> PiecewiseAffineBijection:
    P = C.translate(z)
    full = DefinableSet.full(space)
    pieces = [
        AffinePiece(Block(C), AffineMap.translation(z), Block(P)),
        AffinePiece(Block(P), AffineMap.translation(-z), Block(C)),
    ]
    rest = Block.make(Coset.full(space), (C, P))
    pieces.append(AffinePiece(rest, AffineMap.identity(space), rest))
    return PiecewiseAffineBijection(full, full, tuple(pieces))


def _pairwise_disjoint(cosets) -> bool:
    return all(a.intersect(b) is None for i, a in enumerate(cosets) for b in cosets[i + 1 :])


def _peel_level(h, m, cosets, levels):
    """Record level ``m`` of ``h`` and return a residual with smaller-dimensional support."""
    space = h.space
    F = space.fields[0]
    index = {C.key: j for j, C in enumerate(cosets)}
    germs = [_germ(h, C) for C in cosets]
    sigma = {}
    for j, (C, g) in enumerate(zip(cosets, germs)):
        img = C.image(g)
        if img.key not in index:
            raise InvalidMap("the map does not permute the maximal cosets of its support")
        sigma[j] = index[img.key]
    if sorted(sigma.values()) != list(range(len(cosets))):
        raise InvalidMap("the maximal cosets are not permuted bijectively")
    det = UnitClass.trivial(F)
    seen = set()
    for start in range(len(cosets)):
        if start in seen:
            continue
        comp = AffineMap.identity(space)
        j = start
        while True:
            seen.add(j)
            comp = germs[j] @ comp
            j = sigma[j]
            if j == start:
                break
        det = det.combine(direction_det(cosets[start], comp))
    u, s = levels.get(m, (UnitClass.trivial(F), 0))
    levels[m] = (u.combine(det), s + permutation_sign(sigma))

    if _pairwise_disjoint(cosets):
        return compose(h, invert(_realize(space, cosets, germs)))
    # overlapping cosets: push disjoint copies into fresh coordinates first
    r = len(cosets)
    N = space.n
    big = space.power(N + r)
    hb = extend_to_full(embed(h, N + r))
    lifted = [C.pad(N + r) for C in cosets]
    zs = [_lift(big, N + j) for j in range(r)]
    c = None
    for C, z in zip(lifted, zs):
        s_j = _swap(big, C, z)
        c = s_j if c is None else compose(s_j, c)
    conj = compose(c, compose(hb, invert(c)))
    moved = [C.translate(z) for C, z in zip(lifted, zs)]
    moved_germs = [
        AffineMap.translation(zs[sigma[j]]) @ g.pad(N + r) @ AffineMap.translation(-zs[j]) for j, g in enumerate(germs)
    ]
    return compose(conj, invert(_realize(big, moved, moved_germs)))


def _peel_component(f: PiecewiseAffineBijection) -> ComponentK1:
    space = f.space
    F = space.fields[0]
    ring = space.module.ring
    if ring.is_excluded_component(0):
        raise UnsupportedRing("M_q(R) has two elements; the invariant is not computed here")
    if not space.module.is_infinite(0):
        raise UnsupportedRing("the peeling needs an infinite module")
    f = extend_to_full(f)
    W = space.width(0)
    tops = [p for p in f.pieces if p.domain.colour[0] == W]
    if len(tops) != 1:
        raise InvalidMap(f"expected one full-dimensional piece, found {len(tops)}")
    top = tops[0].aff
    levels = {}
    if W:
        levels[W] = (UnitClass(F, linalg.dieudonne_det(F, top.mats[0])), 0)
    h = compose(f, invert(PiecewiseAffineBijection.global_affine(top)))
    sign0 = 0
    while True:
        sup = support_unchecked(h)
        if sup.is_empty():
            break
        m, cosets = _maximal_cosets(sup)
        if m == 0:
            points = [C.rep for C in cosets]
            keys = {p: j for j, p in enumerate(points)}
            mapping = {}
            for j, p in enumerate(points):
                img = h.apply(p)
                if img not in keys:
                    raise InvalidMap("finite support is not permuted")
                mapping[j] = keys[img]
            sign0 += permutation_sign(mapping)
            break
        h = _peel_level(h, m, cosets, levels)
    return ComponentK1.make(F, sign0, levels)


def k1_invariant(f: PiecewiseAffineBijection, check: bool = False) -> K1Class:
    """The K1 class of a definable automorphism (levels are raw R-dimensions)."""
    from .defmaps import validate

    if check:
        problems = validate(f)
        if problems:
            raise InvalidMap("; ".join(problems))
    if not f.source.equals(f.target):
        raise InvalidMap("source and target differ; not an automorphism")
    ring = f.space.module.ring
    for i in range(ring.k):
        if ring.is_excluded_component(i):
            raise UnsupportedRing("M_q(R) has two elements; the invariant is not computed here")
    parts = factor_components(f)
    return K1Class(ring, tuple(_peel_component(p) for p in parts))


# -- algebraic K1 ------------------------------------------------------------

def block_matrix(ring: RingDescriptor, entries) -> tuple:
    """Raw ``n q_i`` square matrices per component from an ``n x n`` matrix over ``S``."""
    n = len(entries)
    if any(len(r) != n for r in entries):
        raise ShapeError("square matrix over S required")
    out = []
    for i, (q, F) in enumerate(ring.components):
        rows = []
        for a in range(n):
            for x in range(q):
                row = []
                for b in range(n):
                    row.extend(entries[a][b].blocks[i][x])
                rows.append(tuple(row))
        out.append(tuple(rows))
    return tuple(out)


def k1_of_gl(ring: RingDescriptor, mats) -> K1Class:
    """Image of ``[A]`` for ``A`` in ``GL_n(S)``, given as raw per-component matrices."""
    comps = []
    for (q, F), A in zip(ring.components, mats):
        if len(A) % q:
            raise ShapeError("matrix size must be a multiple of q")
        u = UnitClass(F, linalg.dieudonne_det(F, A))
        comps.append(ComponentK1.make(F, 0, {len(A): (u, 0)} if A else {}))
    return K1Class(ring, tuple(comps))


# -- expected group ------------------------------------------------------------

@dataclass(frozen=True)
class Cyclic:
    m: int

    def format(self) -> str:
        return "Z2" if self.m == 2 else f"C{self.m}"


@dataclass(frozen=True)
class Integers:
    def format(self) -> str:
        return "Z"


@dataclass(frozen=True)
class DirectSum:
    parts: tuple

    def format(self) -> str:
        return " + ".join(p.format() for p in self.parts)


@dataclass(frozen=True)
class CountableSum:
    body: object
    index: str = "i"

    def format(self) -> str:
        inner = self.body.format()
        if isinstance(self.body, DirectSum):
            inner = f"({inner})"
        return f"sum_{self.index} {inner}"


@dataclass(frozen=True)
class FiniteProduct:
    parts: tuple

    def format(self) -> str:
        return " x ".join(f"({p.format()})" for p in self.parts)


@dataclass(frozen=True)
class UnitGroupAb:
    """``R^x / [R^x, R^x]`` kept symbolic, with a concrete structural expansion."""

    field: DivisionRing

    @property
    def expansion(self):
        F = self.field
        if isinstance(F, GF):
            return Cyclic(F.cardinality - 1)
        if isinstance(F, Rationals):
            return DirectSum((Cyclic(2), CountableSum(Integers(), "p")))
        if isinstance(F, RationalQuaternions):
            return CountableSum(Integers(), "p")
        raise UnsupportedRing(f"no unit-group description for {F}")

    def format(self) -> str:
        return self.expansion.format()


GroupDescriptor = Cyclic | Integers | DirectSum | CountableSum | FiniteProduct | UnitGroupAb


def unit_group_ab(F: DivisionRing):
    return UnitGroupAb(F).expansion


def descriptor_json(g) -> object:
    if isinstance(g, Cyclic):
        return {"cyclic": g.m}
    if isinstance(g, Integers):
        return "integers"
    if isinstance(g, DirectSum):
        return {"direct-sum": [descriptor_json(p) for p in g.parts]}
    if isinstance(g, CountableSum):
        return {"countable-sum": descriptor_json(g.body), "index": g.index}
    if isinstance(g, FiniteProduct):
        return {"finite-product": [descriptor_json(p) for p in g.parts]}
    if isinstance(g, UnitGroupAb):
        return descriptor_json(g.expansion)
    raise TypeError(type(g).__name__)


def expected_k1_group(ring: RingDescriptor, module: ModuleDescriptor):
    if module.ring != ring:
        raise DescriptorMismatch("module is over another ring")
    if module.is_finite:
        return Cyclic(2)
    parts = []
    for i in range(ring.k):
        if not module.is_infinite(i):
            parts.append(Cyclic(2))
            continue
        if ring.is_excluded_component(i):
            raise UnsupportedRing("M_q(R) has two elements and the module is infinite")
        F = ring.field(i)
        parts.append(DirectSum((Cyclic(2), CountableSum(DirectSum((unit_group_ab(F), Cyclic(2)))))))
    return parts[0] if len(parts) == 1 else FiniteProduct(tuple(parts))


# -- transport between automorphism groups ---------------------------------------

@dataclass(frozen=True)
class Transport:
    """Conjugation by ``g : D -> E2`` carrying automorphisms supported in ``D n E1``."""

    source: DefinableSet
    target: DefinableSet
    chunk: DefinableSet
    g: PiecewiseAffineBijection

    def conjugate(self, f: PiecewiseAffineBijection) -> PiecewiseAffineBijection:
        n = self.chunk.space.n
        fe = embed(f, n)
        if not support(fe).le(self.chunk):
            raise PreconditionFailed("support is not inside the common chunk")
        fd = extend_to_full(fe)
        pieces = []
        for p in fd.pieces:
            for b in self.chunk.blocks:
                dom = p.domain.intersect(b)
                if dom is not None:
                    pieces.append(AffinePiece.of(dom, p.aff))
        restricted = PiecewiseAffineBijection(self.chunk, self.chunk, tuple(pieces))
        return compose(self.g, compose(restricted, invert(self.g)))


def transport_automorphism_group(E1: DefinableSet, E2: DefinableSet, m) -> Transport:
    D, g = common_chunk(E1, E2, m)
    return Transport(E1, E2, D, g)
