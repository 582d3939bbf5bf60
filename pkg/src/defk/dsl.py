"""The ``.dk`` session language: parser, evaluator and canonical printer.

One declaration or query per line; ``#`` starts a comment::

    ring S = M(1, GF(5))
    module M over S = rank(omega)
    ppset L = coset(M, n=2, ann=[[1], [0]], rep={0: [0, 1]})
    block B = block(L, holes=[point(M, n=2, rep={0: [0, 1]})])
    set E = union(B)
    set W = full(M, n=2)
    map f : W -> W = piece(domain=full(M, n=2), A=[[0, 1], [1, 0]])
    k1 f

Vectors are dicts from basis index to a raw row of length ``n q``; matrices
are lists of raw rows. Over a product ring every per-component value is
wrapped as ``comp(v_1, ..., v_k)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .defmaps import (
    AffinePiece,
    PiecewiseAffineBijection,
    compose,
    embed,
    extend_by_identity,
    invert,
    stabilize,
)
from .defsets import Block, DefinableSet
from .errors import DefkError, ShapeError
from .fields import parse_field
from .modules import OMEGA, ModuleDescriptor, Space, Vector
from .ppsets import AffineMap, Coset, Subgroup, canonicalize
from .rings import RingDescriptor


class DSLError(DefkError):
    code = "SyntaxError"

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {msg}" if line else msg)
        self.line, self.col = line, col


class UnknownName(DSLError):
    code = "UnknownName"


# -- lexing and values ------------------------------------------------------------

TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(->|[\[\]{}(),=:;/\-^]))")


@dataclass(frozen=True)
class Num:
    text: str


@dataclass(frozen=True)
class Tup:
    items: tuple


@dataclass(frozen=True)
class Lst:
    items: tuple


@dataclass(frozen=True)
class Dct:
    items: tuple  # (int, value) pairs


@dataclass(frozen=True)
class Ref:
    name: str
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    kwargs: tuple  # (key, value) pairs
    col: int = field(default=0, compare=False)

    def kw(self, key, default=None):
        return dict(self.kwargs).get(key, default)


def tokenize(text: str, line: int) -> list:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DSLError(f"unexpected character {text[pos:].strip()[:1]!r}", line, pos + 1)
        kind = "num" if m.group(1) else "id" if m.group(2) else "sym"
        val = m.group(1) or m.group(2) or m.group(3)
        out.append((kind, val, m.start(m.lastindex) + 1))
        pos = m.end()
    return out


class Parser:
    def __init__(self, tokens: list, line: int):
        self.toks = tokens
        self.i = 0
        self.line = line

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None, self._endcol())

    def _endcol(self):
        return (self.toks[-1][2] + len(self.toks[-1][1])) if self.toks else 1

    def error(self, msg: str):
        raise DSLError(msg, self.line, self.peek()[2])

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            want = val or kind or "token"
            self.error(f"expected {want!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def at(self, val) -> bool:
        return self.peek()[1] == val and self.peek()[0] == "sym"

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def value(self):
        kind, val, col = self.peek()
        if kind == "num" or (kind == "sym" and val == "-"):
            return self.number()
        if kind == "sym" and val in "[({":
            closer = {"[": "]", "(": ")", "{": "}"}[val]
            self.take()
            items = []
            while not self.at(closer):
                if val == "{":
                    key = self.take("num")[1]
                    self.take("sym", ":")
                    items.append((int(key), self.value()))
                else:
                    items.append(self.value())
                if not self.at(closer):
                    self.take("sym", ",")
            self.take("sym", closer)
            return {"[": Lst, "(": Tup, "{": Dct}[val](tuple(items))
        if kind == "id":
            self.take()
            if not self.at("("):
                return Ref(val, col)
            self.take()
            args, kwargs = [], []
            while not self.at(")"):
                if self.peek()[0] == "id" and self.peek(1)[1] == "=":
                    key = self.take()[1]
                    self.take()
                    kwargs.append((key, self.value()))
                else:
                    args.append(self.value())
                if not self.at(")"):
                    self.take("sym", ",")
            self.take("sym", ")")
            return Call(val, tuple(args), tuple(kwargs), col)
        self.error(f"unexpected {val!r}")

    def number(self) -> Num:
        sign = ""
        if self.at("-"):
            self.take()
            sign = "-"
        text = self.take("num")[1]
        if self.at("/") or self.at("^"):
            op = self.take()[1]
            text += op + self.take("num")[1]
        return Num(sign + text)


# -- session ------------------------------------------------------------------------

@dataclass
class Binding:
    kind: str  # ring, module, ppset, block, set, map
    name: str
    obj: object
    extra: dict = field(default_factory=dict)


@dataclass
class Session:
    bindings: dict = field(default_factory=dict)
    queries: list = field(default_factory=list)  # (command, name)
    log: list = field(default_factory=list)

    def get(self, name: str, kinds=None, line: int = 0, col: int = 0) -> Binding:
        b = self.bindings.get(name)
        if b is None:
            raise UnknownName(f"unknown name {name!r}", line, col)
        if kinds and b.kind not in kinds:
            raise DSLError(f"{name!r} is a {b.kind}, expected {' or '.join(kinds)}", line, col)
        return b

    def name_of(self, kind: str, obj) -> str | None:
        for b in self.bindings.values():
            if b.kind == kind and b.obj == obj:
                return b.name
        return None

    def bind(self, b: Binding, line: int):
        if b.name in self.bindings:
            raise DSLError(f"{b.name!r} is already bound", line, 1)
        self.bindings[b.name] = b
        self.log.append(f"{b.kind} {b.name}")


QUERIES = ("k1", "k0", "dim", "check", "support", "expected-k1")


class Evaluator:
    def __init__(self, session: Session, line: int):
        self.s = session
        self.line = line

    def fail(self, msg: str, node=None):
        raise DSLError(msg, self.line, getattr(node, "col", 0))

    def ref(self, node, kinds):
        return self.s.get(node.name, kinds, self.line, node.col)

    # scalars, rows, matrices
    def scalar(self, F, v):
        try:
            if isinstance(v, Num):
                return F.parse(v.text)
            if isinstance(v, Tup) and all(isinstance(x, Num) for x in v.items):
                return F.parse("(" + ", ".join(x.text for x in v.items) + ")")
        except ShapeError as e:
            self.fail(str(e), v)
        self.fail(f"expected a scalar of {F.name}", v)

    def row(self, F, v, width: int | None = None) -> tuple:
        if not isinstance(v, Lst):
            self.fail("expected a list of scalars", v)
        r = tuple(self.scalar(F, x) for x in v.items)
        if width is not None and len(r) != width:
            self.fail(f"row of length {len(r)}, expected {width}", v)
        return r

    def matrix(self, F, v, nrows: int | None = None, ncols: int | None = None) -> tuple:
        if not isinstance(v, Lst):
            self.fail("expected a list of rows", v)
        rows = tuple(self.row(F, r, ncols) for r in v.items)
        if nrows is not None and len(rows) != nrows:
            self.fail(f"{len(rows)} rows, expected {nrows}", v)
        return rows

    def per_comp(self, v, k: int) -> list:
        if isinstance(v, Call) and v.name == "comp":
            if len(v.args) != k:
                self.fail(f"comp(...) needs {k} entries", v)
            return list(v.args)
        if k != 1:
            self.fail("wrap per-component values in comp(...)", v)
        return [v]

    def vector(self, space: Space, v) -> Vector:
        if v is None:
            return Vector.zero(space)
        comps = []
        for i, c in enumerate(self.per_comp(v, space.k)):
            if isinstance(c, Lst):  # rows at indices 0, 1, ...
                c = Dct(tuple(enumerate(c.items)))
            if not isinstance(c, Dct):
                self.fail("expected {index: [row]} or [[row], ...]", c)
            F = space.fields[i]
            comps.append({t: self.row(F, r, space.width(i)) for t, r in c.items})
        try:
            return Vector.make(space, comps)
        except ShapeError as e:
            self.fail(str(e), v)

    # structures
    def ring(self, parts) -> RingDescriptor:
        comps = []
        for p in parts:
            if not (isinstance(p, Call) and p.name == "M" and len(p.args) == 2):
                self.fail("expected M(q, FIELD)", p)
            q, F = p.args
            if not isinstance(q, Num):
                self.fail("q must be a number", q)
            fname = F.name if isinstance(F, Ref) else f"{F.name}(" + ", ".join(a.text for a in F.args) + ")"
            try:
                comps.append((int(q.text), parse_field(fname)))
            except (ShapeError, ValueError) as e:
                self.fail(str(e), p)
        return RingDescriptor.of(*comps)

    def module(self, ring: RingDescriptor, v) -> ModuleDescriptor:
        if not (isinstance(v, Call) and v.name == "rank" and v.args):
            self.fail("expected rank(omega) or rank(n)", v)
        ranks = []
        for a in v.args:
            if isinstance(a, Ref) and a.name == "omega":
                ranks.append(OMEGA)
            elif isinstance(a, Num) and a.text.isdigit():
                ranks.append(int(a.text))
            else:
                self.fail("rank entries are omega or natural numbers", a)
        if len(ranks) == 1:
            ranks = ranks * ring.k
        if len(ranks) != ring.k:
            self.fail(f"need 1 or {ring.k} rank entries", v)
        return ModuleDescriptor(ring, tuple(ranks))

    def space_of(self, node) -> Space:
        if node.args and isinstance(node.args[0], Ref):
            M = self.ref(node.args[0], ("module",)).obj
        else:
            # the module may be left out when the session has exactly one
            mods = [b.obj for b in self.s.bindings.values() if b.kind == "module"]
            if len(mods) != 1:
                self.fail(f"{node.name}(...) needs a module as first argument", node)
            M = mods[0]
        n = node.kw("n")
        if not isinstance(n, Num) or not n.text.isdigit():
            self.fail("n= must be a natural number", node)
        return Space(M, int(n.text))

    def ppset(self, v) -> Coset:
        if isinstance(v, Ref):
            return self.ref(v, ("ppset",)).obj
        if not isinstance(v, Call):
            self.fail("expected a pp-set", v)
        if v.name == "full":
            return Coset.full(self.space_of(v))
        if v.name == "point":
            sp = self.space_of(v)
            return Coset.point(self.vector(sp, v.kw("rep")))
        if v.name == "coset":
            sp = self.space_of(v)
            ann, gens = v.kw("ann"), v.kw("gens")
            try:
                if ann is None and gens is None:
                    sub = Subgroup.full(sp)
                elif ann is not None and gens is not None:
                    self.fail("give ann= or gens=, not both", v)
                elif ann is not None:
                    mats = []
                    for i, a in enumerate(self.per_comp(ann, sp.k)):
                        m = self.matrix(sp.fields[i], a, sp.width(i))
                        mats.append(m)
                    sub = canonicalize(sp, ann=mats)
                else:
                    rows = [self.matrix(sp.fields[i], g, None, sp.width(i)) for i, g in enumerate(self.per_comp(gens, sp.k))]
                    sub = canonicalize(sp, gens=rows)
            except ShapeError as e:
                self.fail(str(e), v)
            return Coset.make(sub, self.vector(sp, v.kw("rep")))
        self.fail(f"unknown pp-set constructor {v.name!r}", v)

    def block(self, v) -> Block:
        if isinstance(v, Ref):
            b = self.ref(v, ("block", "ppset"))
            return b.obj if b.kind == "block" else Block(b.obj)
        if isinstance(v, Call) and v.name == "block":
            if len(v.args) != 1:
                self.fail("block(AMBIENT, holes=[...])", v)
            A = self.ppset(v.args[0])
            holes = v.kw("holes", Lst(()))
            if not isinstance(holes, Lst):
                self.fail("holes= takes a list", holes)
            hs = [self.ppset(h) for h in holes.items]
            if any(h.space != A.space for h in hs):
                self.fail("holes live in another power", v)
            b = Block.make(A, hs)
            if b is None:
                self.fail("a hole equals the ambient; the block is empty", v)
            return b
        return Block(self.ppset(v))

    def defset(self, v) -> DefinableSet:
        if isinstance(v, Ref):
            b = self.ref(v, ("set", "block", "ppset"))
            if b.kind == "set":
                return b.obj
            blk = b.obj if b.kind == "block" else Block(b.obj)
            return DefinableSet(blk.space, (blk,))
        if isinstance(v, Call):
            if v.name == "empty":
                return DefinableSet.empty(self.space_of(v))
            if v.name == "union":
                parts = [self.defset(a) for a in v.args]
                if not parts:
                    self.fail("union() needs at least one argument; use empty(M, n=..)", v)
                out = parts[0]
                for p in parts[1:]:
                    if p.space != out.space:
                        self.fail("union of sets in different powers", v)
                    out = out.union(p)
                return DefinableSet.of_blocks(out.space, out.blocks)
            if v.name in ("diff", "inter", "product"):
                if len(v.args) != 2:
                    self.fail(f"{v.name}(A, B)", v)
                a, b = (self.defset(x) for x in v.args)
                if v.name == "product":
                    return a.product(b)
                if a.space != b.space:
                    self.fail("sets in different powers", v)
                return a.difference(b) if v.name == "diff" else a.intersect(b)
        blk = self.block(v)
        return DefinableSet(blk.space, (blk,))

    def piece(self, space: Space, v) -> AffinePiece:
        if not (isinstance(v, Call) and v.name == "piece"):
            self.fail("expected piece(domain=..., A=..., d1=..., d2=...)", v)
        dom = v.kw("domain")
        if dom is None:
            self.fail("piece needs domain=", v)
        b = self.block(dom)
        if b.space != space:
            self.fail("piece domain lives in another power", v)
        A = v.kw("A")
        if A is None:
            mats = AffineMap.identity(space).mats
        else:
            mats = tuple(
                self.matrix(space.fields[i], a, space.width(i), space.width(i)) for i, a in enumerate(self.per_comp(A, space.k))
            )
        d1 = self.vector(space, v.kw("d1"))
        d2 = self.vector(space, v.kw("d2"))
        shift = v.kw("shift")
        try:
            aff = AffineMap.from_points(d1, mats, d2)
            if shift is not None:
                aff = AffineMap(space, aff.mats, aff.shift + self.vector(space, shift))
            return AffinePiece.of(b, aff)
        except DefkError as e:
            self.fail(f"{e.code}: {e}", v)

    def mapexpr(self, src: DefinableSet, tgt: DefinableSet, exprs: list) -> PiecewiseAffineBijection:
        if len(exprs) == 1 and isinstance(exprs[0], (Call, Ref)) and getattr(exprs[0], "name", "") != "piece":
            v = exprs[0]
            if isinstance(v, Ref):
                return self.ref(v, ("map",)).obj
            if v.name == "compose":
                maps = [self.mapexpr(src, tgt, [a]) for a in v.args]
                out = maps[-1]
                for m in reversed(maps[:-1]):
                    out = compose(m, out)
                return out
            if v.name == "invert":
                return invert(self.mapexpr(src, tgt, [v.args[0]]))
            if v.name == "identity":
                return PiecewiseAffineBijection.identity(src)
            if v.name == "extend":
                return extend_by_identity(self.mapexpr(src, tgt, [v.args[0]]), src)
            if v.name in ("stabilize", "embed"):
                f = self.mapexpr(src, tgt, [v.args[0]])
                n = int(v.args[1].text)
                return stabilize(f, n) if v.name == "stabilize" else extend_by_identity(embed(f, n), src)
            self.fail(f"unknown map constructor {v.name!r}", v)
        pieces = [self.piece(src.space, e) for e in exprs]
        return PiecewiseAffineBijection.make(src, tgt, pieces)


def _strip_comment(text: str) -> str:
    return text.split("#", 1)[0]


def _split_pieces(p: Parser) -> list:
    exprs = [p.value()]
    while not p.done():
        p.take("sym", ";")
        if p.done():
            break
        exprs.append(p.value())
    return exprs


def parse_line(session: Session, raw: str, line: int):
    text = _strip_comment(raw).strip()
    if not text:
        return
    indent = len(raw) - len(raw.lstrip())
    for q in QUERIES:
        if text.startswith(q + " "):
            name = text[len(q) :].strip()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise DSLError("query takes one name", line, indent + len(q) + 2)
            session.get(name, None, line, indent + len(q) + 2)
            session.queries.append((q, name))
            return
    toks = tokenize(raw.split("#", 1)[0], line)
    p = Parser(toks, line)
    ev = Evaluator(session, line)
    kind = p.take("id")[1]
    if kind not in ("ring", "module", "ppset", "block", "set", "map"):
        raise DSLError(f"unknown statement {kind!r}", line, toks[0][2])
    name = p.take("id")[1]
    extra = {}
    try:
        if kind == "ring":
            p.take("sym", "=")
            parts = [p.value()]
            while not p.done():
                tok = p.take("id")
                if tok[1] != "x":
                    raise DSLError("ring factors are joined by 'x'", line, tok[2])
                parts.append(p.value())
            obj = ev.ring(parts)
        elif kind == "module":
            if p.take("id")[1] != "over":
                p.error("expected 'over'")
            tok = p.take("id")
            ring = session.get(tok[1], ("ring",), line, tok[2]).obj
            extra["ring"] = tok[1]
            p.take("sym", "=")
            obj = ev.module(ring, p.value())
        elif kind == "map":
            p.take("sym", ":")
            src_v = p.value()
            p.take("sym", "->")
            tgt_v = p.value()
            p.take("sym", "=")
            src, tgt = ev.defset(src_v), ev.defset(tgt_v)
            extra["source"], extra["target"] = src_v, tgt_v
            obj = ev.mapexpr(src, tgt, _split_pieces(p))
        else:
            p.take("sym", "=")
            v = p.value()
            obj = {"ppset": ev.ppset, "block": ev.block, "set": ev.defset}[kind](v)
        if not p.done():
            p.error(f"trailing input {p.peek()[1]!r}")
    except DSLError:
        raise
    except DefkError as e:
        raise DSLError(f"{e.code}: {e}", line, 1) from e
    session.bind(Binding(kind, name, obj, extra), line)


def parse_dsl(text: str, session: Session | None = None) -> Session:
    session = session or Session()
    for n, raw in enumerate(text.splitlines(), start=1):
        parse_line(session, raw, n)
    return session


# -- printing -------------------------------------------------------------------------

def _fmt_row(F, r) -> str:
    return "[" + ", ".join(F.format(x) for x in r) + "]"


def _fmt_matrix(F, A) -> str:
    return "[" + ", ".join(_fmt_row(F, r) for r in A) + "]"


def _comp(parts: list) -> str:
    return parts[0] if len(parts) == 1 else "comp(" + ", ".join(parts) + ")"


class Printer:
    def __init__(self, session: Session):
        self.s = session

    def module_name(self, M: ModuleDescriptor) -> str:
        name = self.s.name_of("module", M)
        if name is None:
            raise ShapeError("object refers to an unnamed module")
        return name

    def vector(self, v: Vector) -> str:
        parts = []
        for F, c in zip(v.space.fields, v.comps):
            parts.append("{" + ", ".join(f"{t}: {_fmt_row(F, r)}" for t, r in c) + "}")
        return _comp(parts)

    def ppset(self, C: Coset) -> str:
        sp = C.space
        head = f"{self.module_name(sp.module)}, n={sp.n}"
        if C.sub == Subgroup.full(sp) and C.rep.is_zero():
            return f"full({head})"
        if C.sub == Subgroup.zero(sp):
            return f"point({head}, rep={self.vector(C.rep)})"
        gens = _comp([_fmt_matrix(F, B) for F, B in zip(sp.fields, C.sub.bases)])
        out = f"coset({head}, gens={gens}"
        if not C.rep.is_zero():
            out += f", rep={self.vector(C.rep)}"
        return out + ")"

    def block(self, b: Block) -> str:
        if not b.holes:
            return f"block({self.ppset(b.ambient)})"
        return f"block({self.ppset(b.ambient)}, holes=[" + ", ".join(self.ppset(h) for h in b.holes) + "])"

    def defset(self, D: DefinableSet) -> str:
        if D.is_empty():
            return f"empty({self.module_name(D.space.module)}, n={D.space.n})"
        return "union(" + ", ".join(self.block(b) for b in D.blocks) + ")"

    def set_ref(self, node, D: DefinableSet) -> str:
        if isinstance(node, Ref):
            return node.name
        return self.defset(D)

    def piece(self, p: AffinePiece) -> str:
        sp = p.aff.space
        out = f"piece(domain={self.block(p.domain)}"
        if p.aff.mats != AffineMap.identity(sp).mats:
            out += ", A=" + _comp([_fmt_matrix(F, A) for F, A in zip(sp.fields, p.aff.mats)])
        if not p.aff.shift.is_zero():
            out += f", shift={self.vector(p.aff.shift)}"
        return out + ")"

    def binding(self, b: Binding) -> str:
        if b.kind == "ring":
            return f"ring {b.name} = {b.obj.format()}"
        if b.kind == "module":
            ranks = ["omega" if r == OMEGA else str(r) for r in b.obj.ranks]
            if len(set(ranks)) == 1:
                ranks = ranks[:1]
            return f"module {b.name} over {b.extra['ring']} = rank({', '.join(ranks)})"
        if b.kind == "ppset":
            return f"ppset {b.name} = {self.ppset(b.obj)}"
        if b.kind == "block":
            return f"block {b.name} = {self.block(b.obj)}"
        if b.kind == "set":
            return f"set {b.name} = {self.defset(b.obj)}"
        f = b.obj
        src = self.set_ref(b.extra.get("source"), f.source)
        tgt = self.set_ref(b.extra.get("target"), f.target)
        return f"map {b.name} : {src} -> {tgt} = " + "; ".join(self.piece(p) for p in f.pieces)


def print_session(session: Session) -> str:
    pr = Printer(session)
    lines = [pr.binding(b) for b in session.bindings.values()]
    lines += [f"{q} {name}" for q, name in session.queries]
    return "\n".join(lines) + "\n"


def format_map(session: Session, name: str, f: PiecewiseAffineBijection) -> str:
    return Printer(session).binding(Binding("map", name, f, {}))
