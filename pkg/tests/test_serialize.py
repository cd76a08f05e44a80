import json
from fractions import Fraction

import pytest

from minfes.cells import RefCell, two_triangles
from minfes.construct import build_tnt
from minfes.fes import FES, element_system
from minfes.serialize import SCHEMA, decode_fes, dumps, encode_fes, loads, parse_rational, rational


def same(A, B):
    return [T.label for T in A.complex] == [T.label for T in B.complex] and \
        all(s == B[T, k] for T, k, s in A.items())


@pytest.mark.parametrize("make", [
    lambda: element_system(RefCell("cube", 2), "Qr", 2),
    lambda: element_system(RefCell("simplex", 3), "PrMinus", 1),
    lambda: FES.from_family(two_triangles(), "Pr", 1),
    lambda: build_tnt(2, 1),
])
def test_round_trip(make):
    A = make()
    text = dumps(A, {"pass": True})
    B = loads(text)
    assert same(A, B)
    assert dumps(B, {"pass": True}) == text
    assert json.loads(text)["certificate"] == {"pass": True}


def test_rationals_are_exact():
    assert rational(Fraction(-3, 6)) == {"num": "-1", "den": "2"}
    assert parse_rational({"num": "10", "den": "4"}) == Fraction(5, 2)


def test_rejects_bad_documents():
    A = element_system(RefCell("cube", 1), "Pr", 1)
    d = encode_fes(A)
    assert d["schema"] == SCHEMA
    bad = dict(d, schema="other")
    with pytest.raises(ValueError):
        decode_fes(bad)
    d["spaces"][0]["dim"] += 1
    with pytest.raises(ValueError):
        decode_fes(d)
