import json
import pathlib
from fractions import Fraction

import pytest

import flagforge

ROOT = pathlib.Path(__file__).resolve().parents[2]


def E(n, i, j):
    m = [[0] * n for _ in range(n)]
    m[i][j] = 1
    return m


def test_corpus_sessions_pass():
    for path in sorted((ROOT / "sessions").glob("*.json")):
        code, report = flagforge.run_session(path.read_text())
        assert code == 0, path
        assert report["verdict"] == "pass"


def test_parallel_matches_sequential():
    text = (ROOT / "sessions" / "fd_algebras.json").read_text()
    assert flagforge.run_session(text, seed=5) == flagforge.run_session(text, seed=5, parallel=True)


def test_input_error_exit_code():
    code, report = flagforge.run_session('{"commands": [{"cmd": "nope"}]}')
    assert code == 2
    assert report["error"]["kind"] == "SchemaError"


def test_emit_round_trip():
    text = (ROOT / "sessions" / "plain_couples.json").read_text()
    emitted = flagforge.emit(text)
    assert flagforge.emit(json.dumps(emitted)) == emitted


def test_jordan_chevalley():
    x = [[2, 1], [0, 2]]
    ss, nil = flagforge.jordan_chevalley(x)
    assert ss == [[2, 0], [0, 2]]
    assert nil == [[0, 1], [0, 0]]
    assert flagforge.minimal_polynomial(x) == [4, -4, 1]


def test_levi_and_radical_of_gl2():
    gens = [E(2, 0, 1), E(2, 1, 0), E(2, 0, 0)]
    assert len(flagforge.lie_closure(2, gens)) == 4
    assert len(flagforge.levi_component(2, gens)) == 3
    radical = flagforge.solvable_radical(2, gens)
    assert len(radical) == 1
    assert radical[0][0][0] == radical[0][1][1] != 0
    assert flagforge.linear_nilradical(2, gens) == []


def test_fractions_cross_the_boundary():
    x = [[Fraction(1, 2), 0], [0, Fraction(-1, 3)]]
    ss, nil = flagforge.jordan_chevalley(x)
    assert ss == x and nil == [[0, 0], [0, 0]]


def test_domain_errors_raise():
    with pytest.raises(ValueError):
        flagforge.jordan_chevalley([[1, 2]])
