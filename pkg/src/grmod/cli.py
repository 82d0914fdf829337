"""Command-line interface.

Exit codes: 0 success, 1 a mathematical check failed or a module is
invalid, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

from .errors import GrmodError
from .gmodule import (
    GModule,
    dumps_module,
    h0_chi,
    isotypic_component,
    loads_module,
    quasi_idempotent_image,
    tate_pair,
    validate_module,
)
from .groups import FiniteAbelianGroup, SubgroupOfG, enumerate_characters, enumerate_subgroups
from .theorems import (
    THEOREM_IDS,
    Caps,
    RandomModuleSpec,
    compare_with_oracle,
    generate_module,
    verify_abelian_decomposition,
    verify_cyclic_decomposition,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_element(G: FiniteAbelianGroup, text: str) -> tuple[int, ...]:
    """``"1,0"`` or ``"(1,0)"`` -> a normalized element of ``G``."""
    body = text.strip().strip("()")
    try:
        g = tuple(int(x) for x in body.split(",")) if body else ()
    except ValueError:
        raise UsageError(f"bad group element {text!r}") from None
    if len(g) != G.rank:
        raise UsageError(f"element {text!r} needs {G.rank} coordinates for {G}")
    return G.normalize(g)


def parse_subgroups(G: FiniteAbelianGroup, text: str | None, cap: int) -> list[SubgroupOfG]:
    """All subgroups, ``"order:p"`` (every subgroup of order p), or
    generators separated by ``;`` (the subgroup they generate)."""
    if text is None:
        return enumerate_subgroups(G, cap=cap)
    text = text.strip()
    if text.startswith("order:"):
        try:
            p = int(text[len("order:"):])
        except ValueError:
            raise UsageError(f"bad subgroup selector {text!r}") from None
        return [H for H in enumerate_subgroups(G, cap=cap) if H.order == p]
    gens = [parse_element(G, part) for part in text.split(";") if part.strip()]
    return [SubgroupOfG.generated_by(G, gens)]


def read_module(path: str) -> GModule:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return loads_module(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(x) for x in header]] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _inv(xs) -> str:
    return "[" + ",".join(map(str, xs)) + "]"


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    M = read_module(args.module)
    rep = validate_module(M)
    if args.format == "json":
        _emit(_dump_json({"valid": rep.ok, "violations": [v.identity for v in rep.violations]}), args.out)
    elif args.format == "csv":
        _emit(_csv(["valid", "violation"], [[rep.ok, v.identity] for v in rep.violations] or [[rep.ok, ""]]), args.out)
    else:
        _emit("\n".join(rep.lines()) + "\n", args.out)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def _require_valid(M: GModule) -> int | None:
    rep = validate_module(M)
    if not rep.ok:
        sys.stderr.write("invalid module: " + "; ".join(rep.lines()) + "\n")
        return EXIT_VIOLATION
    return None


def cmd_decompose(args) -> int:
    M = read_module(args.module)
    bad = _require_valid(M)
    if bad is not None:
        return bad
    G = M.group
    if G.is_cyclic:
        tau = parse_element(G, args.generator) if args.generator else None
        rep = verify_cyclic_decomposition(M, tau)
        data = rep.to_dict()
        header = ["i", "character", "|M^chi|", "|eps M|", "|H0_chi|", "H0_chi inv", "|S|", "S inv"]
        rows = [[r.i, _inv(r.character), r.isotypic, r.eps_image, r.h0, _inv(r.h0_invariants), r.s,
                 _inv(r.s_invariants)] for r in rep.rows]
        t = rep.totals
        footer = (
            f"|M| = {t['order']}; prod |M^chi| = {t['prod_isotypic']}; prod |eps M| = {t['prod_eps_image']}; "
            f"prod |S| = {t['prod_s']}\n"
            f"kernel chain: {_inv(rep.kernel_orders)}\n"
            f"isotypic formula: {'pass' if rep.formula_a else 'FAIL'}; "
            f"image formula: {'pass' if rep.formula_b else 'FAIL'}\n"
        )
        passed = rep.passed
    else:
        if args.generator:
            raise UsageError("--generator needs a cyclic group")
        chars = enumerate_characters(G, M.e)
        rows, json_rows = [], []
        for chi in chars:
            iso = isotypic_component(M, chi)
            eps = quasi_idempotent_image(M, chi)
            h0 = h0_chi(M, chi)
            rows.append([_inv(chi.a), iso.order, eps.order, h0.order, _inv(h0.invariants)])
            json_rows.append({"character": list(chi.a), "isotypic": iso.order, "eps_image": eps.order,
                              "h0": h0.order, "h0_invariants": list(h0.invariants)})
        header = ["character", "|M^chi|", "|eps M|", "|H0_chi|", "H0_chi inv"]
        check = verify_abelian_decomposition(M)
        data = {
            "group": list(G.cyclic_orders),
            "rows": json_rows,
            "factor_rows": check.rows,
            "sides": check.sides,
            "checks": check.checks,
        }
        footer = (
            f"|M| = {M.order}; corrected product = {check.sides['corrected']}; "
            f"prod |M^chi| = {check.sides['prod_isotypic']}\n"
            f"order formula: {'pass' if check.passed else 'FAIL'}\n"
        )
        passed = check.passed
    if args.format == "json":
        _emit(_dump_json(data), args.out)
    elif args.format == "csv":
        _emit(_csv(header, rows), args.out)
    else:
        _emit(f"G = {G}, e = {M.e}\n" + _table(header, rows) + footer, args.out)
    return EXIT_OK if passed else EXIT_VIOLATION


def cmd_tate(args) -> int:
    M = read_module(args.module)
    bad = _require_valid(M)
    if bad is not None:
        return bad
    caps = _caps(args)
    subs = parse_subgroups(M.group, args.subgroup, caps.subgroups)
    header = ["subgroup", "|H|", "|H^-1|", "H^-1 inv", "|H^0|", "H^0 inv", "herbrand"]
    rows, data = [], []
    for H in subs:
        r = tate_pair(M, H)
        herb = str(r.herbrand) if H.is_cyclic else "-"
        rows.append([H.label(), H.order, r.h_minus1_order, _inv(r.h_minus1_invariants), r.h0_order,
                     _inv(r.h0_invariants), herb])
        data.append({
            "subgroup": [list(h) for h in H.elements],
            "order": H.order,
            "h_minus1_order": r.h_minus1_order,
            "h_minus1_invariants": list(r.h_minus1_invariants),
            "h0_order": r.h0_order,
            "h0_invariants": list(r.h0_invariants),
            "herbrand": herb,
        })
    if args.format == "json":
        _emit(_dump_json({"group": list(M.group.cyclic_orders), "subgroups": data}), args.out)
    elif args.format == "csv":
        _emit(_csv(header, rows), args.out)
    else:
        _emit(_table(header, rows), args.out)
    return EXIT_OK


def _caps(args) -> Caps:
    caps = Caps.from_env()
    if getattr(args, "max_order", None):
        caps = Caps.parse(f"lattice={args.max_order}", caps)
    return caps


def cmd_verify(args) -> int:
    from .theorems import campaign

    if args.theorem not in THEOREM_IDS:
        raise UsageError(f"unknown theorem id {args.theorem!r}; known: {', '.join(THEOREM_IDS)}")
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    rep = campaign(args.theorem, args.count, args.seed, _caps(args), args.min_nonvacuous)
    if args.format == "json":
        _emit(rep.to_json(), args.out)
    elif args.format == "csv":
        _emit(rep.to_csv(), args.out)
    else:
        lines = [
            f"{rep.theorem}: {rep.count} instances, seed {rep.seed}",
            f"non-vacuous: {rep.nonvacuous}  hypothesis true: {rep.hypothesis_true}  "
            f"vacuous: {rep.count - rep.nonvacuous}",
            f"violations: {len(rep.violations)}",
        ]
        lines += ["  " + v for v in rep.violations]
        if rep.nonvacuous < rep.min_nonvacuous:
            lines.append(f"too few non-vacuous instances (need {rep.min_nonvacuous})")
        lines.append("PASS" if rep.passed else "FAIL")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_random(args) -> int:
    try:
        G = FiniteAbelianGroup.parse(args.group)
        spec = RandomModuleSpec(args.seed, G, args.rank, args.modulus, args.relations, args.ring_exponent)
    except (ValueError, GrmodError) as exc:
        raise UsageError(str(exc)) from None
    M = generate_module(spec, _caps(args).lattice).module
    _emit(dumps_module(M), args.out)
    return EXIT_OK


def cmd_oracle_diff(args) -> int:
    M = read_module(args.module)
    bad = _require_valid(M)
    if bad is not None:
        return bad
    check = compare_with_oracle(M, _caps(args))
    if args.format == "json":
        _emit(_dump_json({"entries": check.sides["entries"], "mismatches": check.rows, "passed": check.passed}),
              args.out)
    elif args.format == "csv":
        _emit(_csv(["key", "oracle", "lattice"], [[r["label"], r["oracle"], r["lattice"]] for r in check.rows]),
              args.out)
    else:
        lines = [f"{check.sides['entries']} entries compared, {len(check.rows)} mismatches"]
        lines += [f"  {r['label']}: oracle {r['oracle']}, lattice {r['lattice']}" for r in check.rows]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if check.passed else EXIT_VIOLATION


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="grmod",
        description="Exact invariants of finite modules over Z[zeta_e][G] for finite abelian G.",
        epilog="Caps may be overridden with GRMOD_CAPS, e.g. GRMOD_CAPS=lattice=1000000,oracle=4096,"
        "subgroups=512,permutation=64.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, module=True):
        if module:
            sp.add_argument("module", help="module file (JSON)")
        sp.add_argument("--format", choices=("table", "json", "csv"), default="table",
                        help="output format (default: table)")
        sp.add_argument("--out", help="write output to this path instead of stdout")

    sp = sub.add_parser("validate", help="check the module axioms")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("decompose", help="isotypic orders, twisted H^0 and correction modules")
    common(sp)
    sp.add_argument("--generator", help="generator of a cyclic group, e.g. 3 (default: 1)")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("tate", help="Tate cohomology in degrees -1 and 0")
    common(sp)
    sp.add_argument("--subgroup", help="'order:p' or generators separated by ';' (default: all subgroups)")
    sp.set_defaults(func=cmd_tate)

    sp = sub.add_parser("verify", help="run a seeded verification campaign")
    sp.add_argument("theorem", help="one of: " + ", ".join(THEOREM_IDS))
    common(sp, module=False)
    sp.add_argument("--count", type=int, default=20, help="number of instances (default: 20)")
    sp.add_argument("--seed", type=int, default=0, help="campaign seed (default: 0)")
    sp.add_argument("--max-order", type=int, help="cap on |M| for generated modules (default: 1000000)")
    sp.add_argument("--min-nonvacuous", type=int, default=0,
                    help="fail unless at least this many instances satisfy the hypothesis (default: 0)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("random", help="write a seeded random module file")
    sp.add_argument("--group", required=True, help="cyclic orders separated by 'x', e.g. 2x4")
    sp.add_argument("--rank", type=int, default=1, help="free rank s (default: 1)")
    sp.add_argument("--modulus", type=int, default=2, help="modulus c (default: 2)")
    sp.add_argument("--relations", type=int, default=0, help="extra random relations (default: 0)")
    sp.add_argument("--ring-exponent", type=int, help="e with R = Z[zeta_e] (default: exponent of G)")
    sp.add_argument("--seed", type=int, default=0, help="seed (default: 0)")
    sp.add_argument("--max-order", type=int, help="cap on |M| (default: 1000000)")
    sp.add_argument("--out", help="write the module here instead of stdout")
    sp.set_defaults(func=cmd_random)

    sp = sub.add_parser("oracle-diff", help="compare every order with brute-force enumeration")
    common(sp)
    sp.set_defaults(func=cmd_oracle_diff)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GrmodError, ValueError) as exc:
        sys.stderr.write(f"grmod: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
