"""Command-line interface.

Subcommands: ``dim`` (dimension queries), ``gen`` (write coefficient files),
``table`` (appendix-style dimension tables), ``bench`` (timing sweeps).
Exit codes: 0 ok, 1 usage error, 2 verification failure, 3 internal
consistency error.
"""

from __future__ import annotations

import argparse
import sys

from . import bench as bench_mod
from . import coeffio, dims, recursion, tables, verify
from ._backend import BACKEND
from .halfint import HalfInt
from .indexing import LChannel, LVector, minimal_partition
from .mup import InternalConsistencyError, ge_basis, gepi_basis, o3_basis

USAGE_ERROR = 1
VERIFY_ERROR = 2
INTERNAL_ERROR = 3


class CliError(Exception):
    pass


def parse_half(text: str, two: bool) -> HalfInt:
    """Parse '2', '3/2', or (with two=True) a doubled integer."""
    text = text.strip()
    if two:
        return HalfInt(int(text))
    if "/" in text:
        num, den = text.split("/", 1)
        if int(den) != 2:
            raise CliError(f"{text!r} is not a half-integer")
        return HalfInt(int(num))
    return HalfInt(2 * int(text))


def parse_lvec(spec: str, two: bool) -> LVector:
    """Channel grammar: '1,1,2' or '(0,1)x2,(1,1)x1' ((tags..., ell) groups)."""
    channels = []
    for part in _split_commas(spec):
        part = part.strip()
        if not part:
            continue
        count = 1
        if ")" in part and "x" in part[part.index(")") :]:
            body, mult = part.rsplit("x", 1)
            count = int(mult)
            part = body.strip()
        if part.startswith("("):
            if not part.endswith(")"):
                raise CliError(f"unbalanced parentheses in {part!r}")
            fields = [f.strip() for f in part[1:-1].split(",")]
            if len(fields) < 1:
                raise CliError(f"empty channel in {spec!r}")
            *tags, ell = fields
            ch = LChannel(tuple(int(t) for t in tags), parse_half(ell, two))
        else:
            ch = LChannel((), parse_half(part, two))
        channels.extend([ch] * count)
    if not channels:
        raise CliError(f"no channels in {spec!r}")
    return minimal_partition(channels)


def _split_commas(spec: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in spec:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _make_basis(args, lvec, L):
    if args.group == "o3":
        if not args.parity:
            raise CliError("--parity is required for the O(3) group")
        return o3_basis(lvec, L, args.parity, kind=args.kind)
    group = "su2" if args.group == "su2" else None
    return (ge_basis if args.kind == "ge" else gepi_basis)(lvec, L, group=group)


def cmd_dim(args) -> int:
    lvec = parse_lvec(args.l, args.two)
    L = parse_half(args.L, args.two)
    half = any(not c.ell.is_integer for c in lvec.entries) or not L.is_integer
    if half and args.group != "su2":
        raise CliError("half-integer indices need --group su2 (and usually --two)")
    if args.group == "o3":
        if not args.parity:
            raise CliError("--parity is required for the O(3) group")
        natural = "+" if lvec.sum_ell.as_int() % 2 == 0 else "-"
        if args.parity != natural:
            print(f"l={lvec} L={L} kind={args.kind} dim=0 "
                  f"(O(3) parity {args.parity} inadmissible: sum(l) is "
                  f"{'even' if natural == '+' else 'odd'})")
            return 0
    rep = dims.report(lvec, L, args.kind, args.method)
    note = ""
    if rep.exact == 0 and not dims.parity_ok(lvec, L):
        note = "  (parity: L + sum(l) is not an integer)"
    if args.method == "asymptotic":
        print(f"l={lvec} L={L} kind={args.kind} estimate={rep.estimate:.6g} "
              f"var={rep.var_l:.6g} method={rep.method}")
    else:
        print(f"l={lvec} L={L} kind={args.kind} dim={rep.exact} method={rep.method}{note}")
    return 0


def cmd_gen(args) -> int:
    lvec = parse_lvec(args.l, args.two)
    L = parse_half(args.L, args.two)
    if args.method == "recursive":
        assembled = (
            recursion.assemble_ge(lvec, L)
            if args.kind == "ge"
            else recursion.assemble_gepi(lvec, L)
        )
        basis = assembled.basis
        if basis.n_vectors:
            vectors = recursion.dedup_span(basis.vectors)
            basis.vectors = vectors
    else:
        basis = _make_basis(args, lvec, L)
    if basis.n_vectors == 0 and not dims.parity_ok(lvec, L):
        print(
            f"warning: L + sum(l) is not an integer; writing an empty basis",
            file=sys.stderr,
        )
    coeffio.save(basis, args.out, args.format)
    print(f"wrote {basis.n_vectors} vector(s) to {args.out} [{args.format}]")
    if args.verify:
        report = verify.run_standard_checks(basis, seed=args.seed)
        print(report.to_json())
        if not report.ok:
            return VERIFY_ERROR
    return 0


def cmd_table(args) -> int:
    if args.style != "appendix-d":
        raise CliError(f"unknown table style {args.style!r}")
    l_values = [int(x) for x in args.l_values.split(",") if x != ""]
    n_fixed = [int(x) for x in args.n_fixed.split(",") if x != ""]
    render = tables.render_csv if args.format == "csv" else tables.render_markdown
    for title, label, table, cols in tables.appendix_tables(
        l_values, args.n_max, n_fixed, args.l_max
    ):
        print(f"# {title}")
        print(render(table, label, cols))
    return 0


def cmd_bench(args) -> int:
    records = bench_mod.run_sweep(
        args.l_max, args.n_max, kind=args.kind, threads=args.threads,
        backend=args.backend,
    )
    text = bench_mod.to_csv(records, args.csv)
    if args.csv:
        print(f"wrote {len(records)} records to {args.csv}")
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gcgbasis",
        description="Coupling-coefficient bases for SO(3)/SU(2)/O(3) "
        f"(compute backend: {BACKEND})",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--l", required=True, help="channel spec, e.g. '1,1,1' or '(0,1)x2,(1,1)x1'")
        sp.add_argument("--L", required=True, help="target order (accepts '3/2'; with --two, doubled)")
        sp.add_argument("--two", action="store_true", help="interpret numbers as doubled (SU(2))")
        sp.add_argument("--kind", choices=["ge", "gepi"], default="gepi")
        sp.add_argument("--group", choices=["so3", "su2", "o3"], default="so3")
        sp.add_argument("--parity", choices=["+", "-"], default=None)

    d = sub.add_parser("dim", help="dimension of a GE/GE-PI space")
    common(d)
    d.add_argument(
        "--method",
        choices=["exact", "explicit", "recursive", "asymptotic"],
        default="exact",
    )
    d.set_defaults(func=cmd_dim)

    g = sub.add_parser("gen", help="generate a coupling basis and write it to a file")
    common(g)
    g.add_argument("--out", required=True)
    g.add_argument("--format", choices=["json", "bin"], default="json")
    g.add_argument("--method", choices=["direct", "recursive"], default="direct")
    g.add_argument("--verify", action="store_true", help="run the verification battery")
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("table", help="reproduce the dimension tables")
    t.add_argument("--style", default="appendix-d")
    t.add_argument("--l-values", default="1,2,3")
    t.add_argument("--n-max", type=int, default=8)
    t.add_argument("--n-fixed", default="3,4")
    t.add_argument("--l-max", type=int, default=8)
    t.add_argument("--format", choices=["markdown", "csv"], default="markdown")
    t.set_defaults(func=cmd_table)

    b = sub.add_parser("bench", help="timing sweep over identical-l vectors")
    b.add_argument("--l-max", type=int, default=4)
    b.add_argument("--n-max", type=int, default=8)
    b.add_argument("--kind", choices=["ge", "gepi"], default="gepi")
    b.add_argument("--csv", default=None)
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--backend", choices=["auto", "c", "py"], default=None)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except InternalConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
