"""Command line front end: dimension tables, verification sweeps, constructions.

    minfes table1
    minfes verify trimmed --n 1..3 --r 1..4
    minfes build mcfes --n 2 --r 3 --out mc.json

The exit status is 0 exactly when every reported check passes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from .cells import RefCell, two_cubes, two_intervals, two_squares
from .construct import InnerProduct, PreconditionError, build_mcfes, build_tnt, qr_system, tnt_checks
from .fes import (
    FES,
    element_system,
    global_space_dim,
    has_extensions,
    is_element_system,
)
from .homology import (
    TABLE1,
    TABLE1_R,
    boundary_dims,
    cell_cohomology,
    kunneth_check,
    minimal_dims,
    serendipity_checks,
    table1,
    trimmed_check,
    zeroce_checks,
)
from .serialize import encode_fes
from .vem import vem_dim_sides, verify_zerodual

SUITES = ("trimmed", "serendipity", "tnt", "vem", "zeroce", "kunneth", "extdim")
MAX_N = 4
MAX_R = 10


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n_range: range
    r_range: range
    k_range: range | None = None
    cell_shape: str = "cube"
    output_format: str = "pretty"
    output_path: str | None = None
    augment_end: bool = True
    max_n: int = MAX_N
    max_r: int = MAX_R

    def __post_init__(self):
        for name in ("n_range", "r_range", "k_range"):
            rng = getattr(self, name)
            if rng is not None and len(rng) == 0:
                raise UsageError(f"{name} is empty")
        if self.n_range[-1] > self.max_n:
            raise UsageError(f"n = {self.n_range[-1]} exceeds the cost guard {self.max_n} (see --max-cost)")
        if self.r_range[-1] > self.max_r:
            raise UsageError(f"r = {self.r_range[-1]} exceeds the cost guard {self.max_r} (see --max-cost)")

    def ks(self, n: int) -> list[int]:
        return [k for k in range(n + 1) if self.k_range is None or k in self.k_range]


def parse_range(text: str) -> range:
    """``"3"`` or ``"a..b"`` (inclusive)."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return range(int(a), int(b) + 1)
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use N or A..B") from None
    return range(v, v + 1)


def parse_cost(text: str) -> tuple[int, int]:
    try:
        n, r = text.split(",")
        return int(n), int(r)
    except ValueError:
        raise argparse.ArgumentTypeError("--max-cost takes N,R") from None


def case(suite: str, n: int, r: int, k, check: str, value, expected) -> dict:
    return {"suite": suite, "n": n, "r": r, "k": k, "check": check,
            "value": value, "expected": expected, "pass": value == expected}


# ---------------------------------------------------------------- suites


def suite_trimmed(cfg: RunConfig):
    for n in cfg.n_range:
        for r in cfg.r_range:
            if r < 1:
                continue
            for k in cfg.ks(n):
                c = trimmed_check(n, r, k)
                yield case("trimmed", n, r, k, "dim", c.lhs, c.rhs)
                yield case("trimmed", n, r, k, "image", c.images_equal, True)


def suite_serendipity(cfg: RunConfig):
    for m in cfg.n_range:
        for r in cfg.r_range:
            if r < m:
                continue
            for k, h in serendipity_checks(m, r).items():
                if k in cfg.ks(m):
                    yield case("serendipity", m, r, k, "H^{k+1}", h, 0)
            for c in zeroce_checks(m, r):
                if c.k in cfg.ks(m):
                    yield case("serendipity", m, r, c.k, "exact", c.ok, True)
            for k in cfg.ks(m):
                yield case("serendipity", m, r, k, "pairing", verify_zerodual(m, r, k), True)


def suite_zeroce(cfg: RunConfig):
    for n in cfg.n_range:
        for r in cfg.r_range:
            for c in zeroce_checks(n, r):
                if c.k in cfg.ks(n):
                    yield case("zeroce", n, r, c.k, "ker=im", c.kernel_dim, c.image_dim)


def suite_tnt(cfg: RunConfig):
    for n in cfg.n_range:
        for r in cfg.r_range:
            for name, (value, expected) in tnt_checks(n, r, cfg.augment_end).items():
                if isinstance(value, dict):
                    value, expected = _keyed(value), _keyed(expected)
                yield case("tnt", n, r, None, name, value, expected)


def suite_vem(cfg: RunConfig):
    shape = "simplex" if cfg.cell_shape == "simplex" else "cube"
    for n in cfg.n_range:
        for r in cfg.r_range:
            for k in cfg.ks(n):
                lhs, rhs = vem_dim_sides(n, r, k, shape)
                yield case("vem", n, r, k, f"dim[{shape}]", lhs, rhs)


def suite_kunneth(cfg: RunConfig):
    for n in cfg.n_range:
        for r in cfg.r_range:
            for zero in (False, True):
                h, pred = kunneth_check(n, r, zero)
                got = [h[k] for k in range(n + 1)]
                yield case("kunneth", n, r, None, "zero" if zero else "full", got, [pred[k] for k in range(n + 1)])


MESHES = {1: two_intervals, 2: two_squares, 3: two_cubes}


def suite_extdim(cfg: RunConfig):
    for n in cfg.n_range:
        if n not in MESHES:
            continue
        C = MESHES[n]()
        for family in ("Pr", "Qr", "PrMinus"):
            for r in cfg.r_range:
                if r < 1:
                    continue
                A = FES.from_family(C, family, r)
                if not is_element_system(A):
                    continue
                for k in cfg.ks(n):
                    ext = all(has_extensions(A, T, k) for T in C if T.dim > k)
                    glob = global_space_dim(A, k)
                    local = sum(A.zero_part(T, k).dim for T in C if T.dim >= k)
                    yield case("extdim", n, r, k, f"{family}:{glob}/{local}:ext={ext}", glob == local, ext)


SUITE_FUNCS = {
    "trimmed": suite_trimmed,
    "serendipity": suite_serendipity,
    "tnt": suite_tnt,
    "vem": suite_vem,
    "zeroce": suite_zeroce,
    "kunneth": suite_kunneth,
    "extdim": suite_extdim,
}


def _keyed(d: dict) -> dict:
    return {f"{label}|{k}": v for (label, k), v in sorted(d.items())}


# ---------------------------------------------------------------- commands


def cmd_table1() -> list[dict]:
    rows = []
    for (k, r), (closed, brute) in sorted(table1(bruteforce=True).items()):
        published = TABLE1[k][TABLE1_R.index(r)]
        rows.append({"k": k, "r": r, "closed": closed, "brute": brute, "expected": published,
                     "pass": closed == published and brute == published})
    return rows


def cmd_verify(suite: str, cfg: RunConfig) -> list[dict]:
    if suite not in SUITE_FUNCS:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return list(SUITE_FUNCS[suite](cfg))


def certificate(A: FES, reference: FES | None = None, augment_end: bool = True) -> dict:
    C = A.complex
    ext = {f"{T.label}|{k}": has_extensions(A, T, k) for T in C for k in range(T.dim)}
    coh = {}
    for T in C:
        full = cell_cohomology(A, T)
        zero = cell_cohomology(A, T, zero=True, augment=augment_end)
        # without the integration arrow the top degree keeps the constants' dual
        expected = {} if augment_end else {T.dim: 1}
        coh[T.label] = full.is_exact() and zero.nonzero() == expected
    out = {
        "is_element_system": is_element_system(A),
        "has_extensions": ext,
        "cohomology_zero": coh,
        "boundary_dims": _keyed(boundary_dims(A)),
    }
    if reference is not None:
        out["minimal_dims"] = _keyed(minimal_dims(reference))
        out["dims_match"] = out["boundary_dims"] == out["minimal_dims"]
    out["pass"] = (out["is_element_system"] and all(ext.values()) and all(coh.values())
                   and out.get("dims_match", True))
    return out


def cmd_build(what: str, cfg: RunConfig, ip: str = "identity") -> dict:
    if cfg.cell_shape != "cube":
        raise UsageError("constructions are available on the cube only")
    if len(cfg.n_range) != 1 or len(cfg.r_range) != 1:
        raise UsageError("build takes a single n and a single r")
    n, r = cfg.n_range[0], cfg.r_range[0]
    if what == "mcfes":
        A = element_system(RefCell("cube", n), "Pr", r)
        M = build_mcfes(A, None, InnerProduct(ip))
        return encode_fes(M, certificate(M, A, cfg.augment_end))
    if what == "tnt":
        B = build_tnt(n, r)
        return encode_fes(B, certificate(B, qr_system(n, r), cfg.augment_end))
    raise UsageError(f"unknown construction {what!r}")


# ---------------------------------------------------------------- output


def _cell(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


def render(rows: list[dict], fmt: str, command: str) -> str:
    ok = all(r["pass"] for r in rows)
    if fmt == "json":
        return json.dumps({"command": command, "pass": ok, "cases": rows}, indent=2, sort_keys=True) + "\n"
    if not rows:
        return ""
    keys = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow([_cell(r[k]) for k in keys])
        return buf.getvalue()
    table = [[k for k in keys]] + [[_cell(r[k]) if k != "pass" else ("PASS" if r[k] else "FAIL") for k in keys]
                                   for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(keys))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in table]
    fails = sum(not r["pass"] for r in rows)
    lines.append(f"{len(rows) - fails}/{len(rows)} passed")
    return "\n".join(lines) + "\n"


def render_build(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    cert = doc["certificate"]
    rows = [{"check": key, "value": _cell(v), "pass": True} for key, v in cert.items() if key != "pass"]
    rows.append({"check": "all", "value": _cell(cert["pass"]), "pass": cert["pass"]})
    return render(rows, fmt, "build")


def _diff_report(rows: list[dict]) -> str:
    bad = [r for r in rows if not r["pass"]]
    return "".join(f"mismatch: {json.dumps(r, sort_keys=True)}\n" for r in bad)


# ---------------------------------------------------------------- entry point


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minfes", description="Minimal compatible finite element systems.")
    p.add_argument("command", choices=["table1", "verify", "build"])
    p.add_argument("target", nargs="?", help="suite for verify, mcfes|tnt for build")
    p.add_argument("--n", type=parse_range, default=None)
    p.add_argument("--r", type=parse_range, default=None)
    p.add_argument("--k", type=parse_range, default=None)
    p.add_argument("--cell", choices=["simplex", "cube"], default=None)
    p.add_argument("--format", choices=["json", "csv", "pretty"], default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--unaugmented", action="store_true",
                   help="drop the integration arrow from boundary-condition complexes")
    p.add_argument("--max-cost", type=parse_cost, default=None, metavar="N,R",
                   help=f"raise the guards n <= {MAX_N}, r <= {MAX_R}")
    p.add_argument("--inner-product", choices=["identity", "l2"], default="identity")
    return p


DEFAULT_CELL = {"trimmed": "simplex", "vem": "simplex"}


def run(argv=None) -> int:
    args = make_parser().parse_args(argv)
    max_n, max_r = args.max_cost or (MAX_N, MAX_R)
    try:
        if args.command == "table1":
            rows = cmd_table1()
            fmt = args.format or "pretty"
            text = render(rows, fmt, "table1")
            ok = all(r["pass"] for r in rows)
            if not ok:
                sys.stderr.write(_diff_report(rows))
        else:
            if not args.target:
                raise UsageError(f"{args.command} needs a target")
            cfg = RunConfig(
                command=args.command,
                n_range=range(1, 4) if args.n is None else args.n,
                r_range=range(1, 4) if args.r is None else args.r,
                k_range=args.k,
                cell_shape=args.cell or DEFAULT_CELL.get(args.target, "cube"),
                output_format=args.format or ("json" if args.command == "build" else "pretty"),
                output_path=args.out,
                augment_end=not args.unaugmented,
                max_n=max_n,
                max_r=max_r,
            )
            fmt = cfg.output_format
            if args.command == "verify":
                rows = cmd_verify(args.target, cfg)
                text = render(rows, fmt, f"verify {args.target}")
                ok = all(r["pass"] for r in rows)
            else:
                doc = cmd_build(args.target, cfg, args.inner_product)
                text = render_build(doc, fmt)
                ok = doc["certificate"]["pass"]
    except (UsageError, PreconditionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
