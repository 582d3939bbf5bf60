from __future__ import annotations

import json
from pathlib import Path

import pytest

from defk.cli import main
from defk.dsl import DSLError, UnknownName, parse_dsl, print_session

SESSION = """\
# a small session over F_5
ring S = M(1, GF(5))
module M over S = rank(omega)
set W = full(M, n=2)
ppset L = coset(M, n=2, ann=[[1], [0]])
ppset L1 = coset(M, n=2, ann=[[1], [0]], rep={0: [1, 0]})
block B = block(L, holes=[point(M, n=2, rep={0: [0, 1]})])
set E = union(L, L1)
map swap : W -> W = piece(domain=L, d2={0: [1, 0]}); piece(domain=L1, d1={0: [1, 0]}); piece(domain=block(full(M, n=2), holes=[L, L1]))
map ident : W -> W = identity()
k1 swap
k0 E
"""

PRODUCT = """\
ring S = M(1, GF(5)) x M(1, QQ)
module M over S = rank(omega)
set W = full(M, n=1)
map f : W -> W = piece(domain=full(M, n=1), A=comp([[2]], [[-1/2]]), shift=comp({}, {3: [1]}))
k1 f
"""

QUAT = """\
ring H = M(1, HQ)
module M over H = rank(omega)
set W = full(M, n=1)
map f : W -> W = piece(domain=full(M, n=1), A=[[(1, 1, 0, 0)]])
k1 f
"""


@pytest.fixture
def session_file(tmp_path: Path):
    def write(text: str) -> str:
        p = tmp_path / "s.dk"
        p.write_text(text)
        return str(p)

    return write


def test_ring_line():
    s = parse_dsl("ring S = M(1, GF(5))")
    ring = s.bindings["S"].obj
    assert ring.k == 1 and ring.q(0) == 1 and ring.field(0).cardinality == 5


def test_unknown_name_has_a_location():
    with pytest.raises(UnknownName) as err:
        parse_dsl("ring S = M(1, GF(5))\nmodule M over T = rank(omega)")
    assert err.value.line == 2 and err.value.col > 1


def test_syntax_error_has_a_location():
    with pytest.raises(DSLError) as err:
        parse_dsl("ring S = M(1, GF(5)) y M(1, QQ)")
    assert err.value.line == 1


@pytest.mark.parametrize("text", [SESSION, PRODUCT, QUAT])
def test_print_parse_fixpoint(text):
    first = print_session(parse_dsl(text))
    again = parse_dsl(first)
    assert print_session(again) == first
    original = parse_dsl(text)
    for name, b in again.bindings.items():
        if b.kind != "map":
            assert b.obj == original.bindings[name].obj


def test_sample_session_counts():
    s = parse_dsl(SESSION)
    assert len(s.bindings) == 9 and s.queries == [("k1", "swap"), ("k0", "E")]


def test_k0_command(session_file, capsys):
    path = session_file(SESSION + "set F = full(M, n=2)\n")
    assert main(["k0", "--session", path, "F"]) == 0
    assert capsys.readouterr().out.strip() == "k0 F = X^2"


def test_k1_identity_json(session_file, capsys):
    assert main(["k1", "--session", session_file(SESSION), "--map", "ident", "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == {"k1": [{"levels": [], "sign0": 0}], "map": "ident"}


def test_run_product_and_quaternion_sessions(session_file, capsys):
    assert main(["run", "--session", session_file(PRODUCT), "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out[0]["k1"][0]["levels"] == [{"level": 1, "det": 2, "sign": 0}]
    assert out[0]["k1"][1]["levels"] == [{"level": 1, "det": "-1/2", "sign": 0}]
    assert main(["run", "--session", session_file(QUAT)]) == 0
    assert "det=nrd=2" in capsys.readouterr().out


def test_expected_k1_command(capsys):
    assert main(["expected-k1", "--field", "GF(5)"]) == 0
    assert capsys.readouterr().out.strip() == "Z2 + sum_i (C4 + Z2)"


def test_oracle_command(capsys):
    assert main(["oracle", "finite", "--field", "GF(3)", "--rank", "1", "--max-power", "1", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["descriptor"] == "Z2"


def test_compose_invert_morita(session_file, capsys):
    path = session_file(SESSION)
    assert main(["compose", "--session", path, "swap", "swap"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("map swap_swap : ")
    assert main(["invert", "--session", path, "swap"]) == 0
    capsys.readouterr()
    assert main(["morita", "--session", path, "swap", "--q", "2"]) == 0
    assert "M(2, GF(5))" in capsys.readouterr().out


def test_exit_codes(session_file, capsys):
    path = session_file(SESSION)
    assert main(["k1", "--session", path, "nope"]) == 1
    assert main(["k1"]) == 2
    assert main(["bogus"]) == 2
    assert main(["expected-k1", "--field", "GF(2)"]) == 1
    bad = session_file("ring S = M(1, GF(5)\n")
    assert main(["run", "--session", bad, "--json"]) == 1
    assert json.loads(capsys.readouterr().out.strip().splitlines()[-1])["error"] == "SyntaxError"


def test_selftest_command(capsys):
    assert main(["selftest", "--cases", "3", "--seed", "7"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_short_forms_with_a_single_module():
    text = """\
ring S = M(1, QQ)
module M over S = rank(omega)
map f : full(n=1) -> full(n=1) = piece(domain=full(n=1), A=[[2]])
k1 f
"""
    s = parse_dsl(text)
    assert len(s.bindings) == 3 and s.queries == [("k1", "f")]
    printed = print_session(s)
    assert print_session(parse_dsl(printed)) == printed
    P = parse_dsl("ring S = M(1, GF(5))\nmodule M over S = rank(omega)\nppset P = coset(n=2, ann=[[2],[1]], rep=[[1, 0]])")
    C = P.bindings["P"].obj
    assert C.sub.bases == (((1, 3),),)
    assert C.contains(C.rep) and C.rep.comps == (((0, (0, 2)),),)
