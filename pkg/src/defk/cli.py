"""Command-line front end: ``defk <command> [--session FILE] [--json]``.

Exit codes: 0 success, 1 domain error (a :class:`DefkError`), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from .defmaps import compose, dim_of_map, invert, support, validate
from .defsets import dim_of, k0_class
from .dsl import Binding, Printer, Session, format_map, parse_dsl, print_session
from .errors import DefkError
from .fields import parse_field
from .k1 import descriptor_json, expected_k1_group, k1_invariant
from .modules import OMEGA, ModuleDescriptor, morita_translate
from .oracle import FiniteStructure, brute_k1_finite
from .rings import RingDescriptor


class UsageError(Exception):
    pass


def _emit(args, text: str, payload) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _load(args) -> Session:
    if not args.session:
        raise UsageError("--session FILE is required for this command")
    try:
        with open(args.session, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {args.session}: {e}") from e
    return parse_dsl(text)


def _get(session: Session, name: str | None, kinds) -> Binding:
    if not name:
        raise UsageError("a binding name is required")
    return session.get(name, kinds)


def _dim_text(d) -> str:
    return "-inf" if d is None else "(" + ", ".join(map(str, d)) + ")"


def run_query(session: Session, cmd: str, name: str, as_json: bool = False) -> tuple:
    """Evaluate one query; returns ``(text, payload)``."""
    if cmd == "k1":
        f = session.get(name, ("map",)).obj
        c = k1_invariant(f)
        return f"k1 {name} = {c.format()}", {"map": name, "k1": c.to_json()}
    if cmd == "k0":
        D = _as_set(session.get(name, ("set", "block", "ppset")))
        c = k0_class(D)
        return f"k0 {name} = {c.format()}", {"set": name, "k0": c.to_json()}
    if cmd == "dim":
        b = session.get(name, ("set", "block", "ppset", "map"))
        d = dim_of_map(b.obj) if b.kind == "map" else dim_of(_as_set(b))
        return f"dim {name} = {_dim_text(d)}", {"name": name, "dim": None if d is None else list(d)}
    if cmd == "check":
        f = session.get(name, ("map",)).obj
        problems = validate(f)
        text = f"check {name}: ok" if not problems else f"check {name}: " + "; ".join(problems)
        return text, {"map": name, "ok": not problems, "violations": problems}
    if cmd == "support":
        f = session.get(name, ("map",)).obj
        S = support(f)
        return f"support {name} = {Printer(session).defset(S)}", {"map": name, "support": S.to_json()}
    if cmd == "expected-k1":
        M = session.get(name, ("module",)).obj
        g = expected_k1_group(M.ring, M)
        return f"expected-k1 {name} = {g.format()}", {"module": name, "descriptor": g.format(), "structure": descriptor_json(g)}
    raise UsageError(f"unknown query {cmd!r}")


def _as_set(b: Binding):
    from .defsets import Block, DefinableSet

    if b.kind == "set":
        return b.obj
    blk = b.obj if b.kind == "block" else Block(b.obj)
    return DefinableSet(blk.space, (blk,))


def _single_query(cmd: str):
    def handler(args):
        if not args.name:
            raise UsageError(f"{cmd} needs a binding name")
        s = _load(args)
        text, payload = run_query(s, cmd, args.name)
        _emit(args, text, payload)

    return handler


def cmd_run(args):
    s = _load(args)
    results = [run_query(s, q, n) for q, n in s.queries]
    _emit(args, "\n".join(t for t, _ in results), [p for _, p in results])


def cmd_print(args):
    s = _load(args)
    sys.stdout.write(print_session(s))


def cmd_compose(args):
    s = _load(args)
    f = _get(s, args.f, ("map",)).obj
    g = _get(s, args.g, ("map",)).obj
    h = compose(f, g)
    name = f"{args.f}_{args.g}"
    _emit(args, format_map(s, name, h), {"map": name, "pieces": [p.to_json() for p in h.pieces]})


def cmd_invert(args):
    s = _load(args)
    f = _get(s, args.name, ("map",)).obj
    h = invert(f)
    name = f"{args.name}_inv"
    _emit(args, format_map(s, name, h), {"map": name, "pieces": [p.to_json() for p in h.pieces]})


def cmd_morita(args):
    s = _load(args)
    b = _get(s, args.name, ("ppset", "map"))
    out = morita_translate(b.obj, args.q)
    sp = out.space
    desc = f"{sp.module.ring.format()}, power {sp.n}"
    if b.kind == "map":
        c = k1_invariant(out)
        _emit(args, f"morita {args.name} q={args.q}: {desc}; k1 = {c.format()}", {"ring": sp.module.ring.format(), "n": sp.n, "k1": c.to_json()})
    else:
        _emit(args, f"morita {args.name} q={args.q}: {desc}; colour {out.colour}", {"ring": sp.module.ring.format(), "n": sp.n, "colour": list(out.colour)})


def _parse_rank(text: str):
    return OMEGA if text == "omega" else int(text)


def cmd_expected(args):
    if args.session:
        s = _load(args)
        text, payload = run_query(s, "expected-k1", args.module)
        _emit(args, text, payload)
        return
    if not args.field:
        raise UsageError("give --field (and optionally --q, --rank) or --session with --module")
    fields = [parse_field(f) for f in args.field]
    qs = args.q or [1] * len(fields)
    if len(qs) != len(fields):
        raise UsageError("one --q per --field")
    ring = RingDescriptor.of(*zip(qs, fields))
    M = ModuleDescriptor.of(ring, _parse_rank(args.rank))
    g = expected_k1_group(ring, M)
    _emit(args, g.format(), {"ring": ring.format(), "descriptor": g.format(), "structure": descriptor_json(g)})


def cmd_oracle(args):
    if args.kind != "finite":
        raise UsageError("only 'oracle finite' is available")
    rep = brute_k1_finite(FiniteStructure(parse_field(args.field), args.rank), args.max_power)
    lines = [f"size {st.size}: |G| = {st.group_order}, |G'| = {st.derived_order}, G/G' = {st.descriptor.format()}" for st in rep.stages]
    lines.append(f"K1 = {rep.descriptor.format()} (stabilized: {rep.stabilized})")
    _emit(args, "\n".join(lines), rep.to_json())


def cmd_selftest(args):
    from .selftest import selftest

    results = selftest(random.Random(args.seed), args.cases)
    ok = all(r["ok"] for r in results)
    text = "\n".join(f"{'PASS' if r['ok'] else 'FAIL'} {r['name']}: {r['detail']}" for r in results)
    _emit(args, text, {"ok": ok, "results": results})
    if not ok:
        raise DefkError("selftest failed")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--session", help="a .dk session file")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized commands")

    p = argparse.ArgumentParser(prog="defk", description="Definable sets, K0 and K1 over modules over semisimple rings.")
    sub = p.add_subparsers(dest="command", required=True)

    for cmd, kinds in (("k1", "map"), ("k0", "set"), ("dim", "set or map"), ("check", "map"), ("support", "map")):
        sp = sub.add_parser(cmd, parents=[common], help=f"{cmd} of a {kinds} binding")
        sp.add_argument("name", nargs="?", help="binding name")
        sp.add_argument("--map", "--set", "--name", dest="name_opt", help="binding name (alternative to the positional)")
        sp.set_defaults(func=_single_query(cmd))

    sp = sub.add_parser("run", parents=[common], help="evaluate every query line of the session")
    sp.set_defaults(func=cmd_run)
    sp = sub.add_parser("print", parents=[common], help="print the session in canonical form")
    sp.set_defaults(func=cmd_print)
    sp = sub.add_parser("compose", parents=[common], help="f o g")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.set_defaults(func=cmd_compose)
    sp = sub.add_parser("invert", parents=[common], help="inverse of a map")
    sp.add_argument("name")
    sp.set_defaults(func=cmd_invert)
    sp = sub.add_parser("morita", parents=[common], help="Morita translate of a pp-set or map")
    sp.add_argument("name")
    sp.add_argument("--q", type=int, required=True)
    sp.set_defaults(func=cmd_morita)
    sp = sub.add_parser("expected-k1", parents=[common], help="expected shape of the K1 group")
    sp.add_argument("--field", action="append", help="division ring, repeat for product rings")
    sp.add_argument("--q", type=int, action="append", help="matrix size per field")
    sp.add_argument("--rank", default="omega")
    sp.add_argument("--module", help="module binding when --session is used")
    sp.set_defaults(func=cmd_expected)
    sp = sub.add_parser("oracle", parents=[common], help="brute-force finite K1")
    sp.add_argument("kind", choices=["finite"])
    sp.add_argument("--field", default="GF(3)")
    sp.add_argument("--rank", type=int, default=1)
    sp.add_argument("--max-power", type=int, default=1)
    sp.set_defaults(func=cmd_oracle)
    sp = sub.add_parser("selftest", parents=[common], help="randomized self-checks")
    sp.add_argument("--cases", type=int, default=10)
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "name_opt", None):
        args.name = args.name_opt
    try:
        args.func(args)
    except UsageError as e:
        print(f"defk: usage error: {e}", file=sys.stderr)
        return 2
    except DefkError as e:
        if args.json:
            print(json.dumps({"error": e.code, "message": str(e)}, sort_keys=True))
        else:
            print(f"defk: error[{e.code}]: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
