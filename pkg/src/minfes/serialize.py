"""JSON encoding of element systems.

Rationals are written as ``{"num": "p", "den": "q"}`` so nothing is rounded.
A space is a list of basis vectors; each vector is a list of nonzero terms
``{"dx": J, "x": exponents, "c": rational}``.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import linalg as la
from .cells import Cell, CellComplex
from .fes import FES, reference_complex
from .polyforms import AffineMap
from .spaces import FormSpace, basis

SCHEMA = "minfes.fes/1"


def rational(x) -> dict:
    q = Fraction(int(x.p), int(x.q)) if hasattr(x, "p") else Fraction(x)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def parse_rational(d: dict) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def encode_space(s: FormSpace) -> dict:
    b = s.basis
    vectors = []
    for row in la.rows_of(s.rows):
        terms = []
        for (J, e), c in zip(b.terms, row):
            if c:
                terms.append({"dx": list(J), "x": list(e), "c": rational(c)})
        vectors.append(terms)
    return {
        "k": s.k,
        "basis": {"n": b.n, "k": b.k, "degree": b.degree, "kind": b.kind},
        "dim": s.dim,
        "vectors": vectors,
    }


def decode_space(d: dict, cell) -> FormSpace:
    bd = d["basis"]
    b = basis(bd["n"], bd["k"], bd["degree"], bd["kind"])
    entries = []
    for i, terms in enumerate(d["vectors"]):
        for t in terms:
            entries.append((i, b.index[(tuple(t["dx"]), tuple(t["x"]))], parse_rational(t["c"])))
    rows = la.from_sparse(len(d["vectors"]), b.size, entries)
    s = FormSpace.span(cell, d["k"], b, rows)
    if s.dim != d["dim"]:
        raise ValueError(f"stored vectors span {s.dim} dimensions, header says {d['dim']}")
    return s


def encode_map(m: AffineMap) -> dict:
    return {
        "matrix": [[rational(x) for x in row] for row in m.matrix],
        "offset": [rational(x) for x in m.offset],
        "source_dim": m.source_dim,
    }


def decode_map(d: dict) -> AffineMap:
    return AffineMap.make([[parse_rational(x) for x in row] for row in d["matrix"]],
                          [parse_rational(x) for x in d["offset"]], d["source_dim"])


def encode_fes(A: FES, certificate: dict | None = None) -> dict:
    C = A.complex
    out = {
        "schema": SCHEMA,
        "name": A.name,
        "complex": {
            "ambient_dim": C.ambient_dim,
            "cells": [{"label": T.label, "shape": T.shape, "dim": T.dim, "map": encode_map(T.param)} for T in C],
        },
        "spaces": [{"cell": T.label, **encode_space(s)} for T, k, s in A.items()],
    }
    if certificate is not None:
        out["certificate"] = certificate
    return out


def _decode_complex(d: dict) -> CellComplex:
    cells = [Cell(c["shape"], c["dim"], decode_map(c["map"]), c["label"]) for c in d["cells"]]
    shapes = {c.shape for c in cells}
    if len(shapes) == 1:
        top = max(c.dim for c in cells)
        ref = reference_complex(shapes.pop(), top)
        if ref.ambient_dim == d["ambient_dim"] and [(c.label, c.param) for c in ref] == \
                [(c.label, c.param) for c in sorted(cells, key=lambda c: (c.dim, c.label))]:
            return ref
    return CellComplex(cells, d["ambient_dim"])


def decode_fes(d: dict) -> FES:
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unknown schema {d.get('schema')!r}")
    C = _decode_complex(d["complex"])
    spaces = {}
    for s in d["spaces"]:
        T = C[s["cell"]]
        spaces[(T.label, s["k"])] = decode_space(s, T.ref)
    return FES(C, spaces, d["name"])


def dumps(A: FES, certificate: dict | None = None, indent: int | None = None) -> str:
    return json.dumps(encode_fes(A, certificate), indent=indent, sort_keys=True)


def loads(text: str) -> FES:
    return decode_fes(json.loads(text))
