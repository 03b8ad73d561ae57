"""Command-line front end: verify documents, blow up branch points, search.

Exit codes are a stable contract: 0 success, 1 mathematical failure (violated
relations, singular branch, unmet expectations, parity failure), 2 parse
error, 3 unsupported or infeasible request.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .canonical import UnsupportedCanonicalData, canonical_degree, factors_through_quotient, fiber_genus, generator_set
from .chargroup import Subgroup
from .cover import UnsupportedCurve, invariants, nef_big_check, smoothness_check, validate
from .documents import Document, DocumentError, canonical_json, emit_document, parse_document, parse_plan
from .picard import h0, h0_oracle
from .resolve import ParityFixFailure, UnsupportedBlowup, search_parity_fix, transform_building_data
from .search import SearchTargets, canonical_candidate_filter, enumerate_covers

EXIT_OK = 0
EXIT_MATH = 1
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


def _json_class(cls) -> list[int]:
    return list(cls.coeffs())


def _verification_report(doc: Document) -> tuple[dict, int]:
    data = doc.data
    report: dict = {"name": doc.name, "k": data.ctx.k}
    code = EXIT_OK

    vres = validate(data)
    report["valid"] = vres.ok
    report["violations"] = [
        {"kind": v.kind, "subject": v.subject, "detail": v.detail} for v in vres.violations
    ]
    if not vres.ok:
        return report, EXIT_MATH

    try:
        sres = smoothness_check(data, doc.incidences)
    except UnsupportedCurve as exc:
        report["smooth"] = False
        report["singular_points"] = [str(exc)]
        return report, EXIT_UNSUPPORTED
    report["smooth"] = sres.smooth
    report["singular_points"] = list(sres.offenders)
    if not sres.smooth:
        return report, EXIT_MATH

    inv = invariants(data)
    report["invariants"] = {
        "KX2": inv.KX2,
        "pg": inv.pg,
        "chiO": inv.chiO,
        "q": inv.q,
        "half_2KX": _json_class(inv.half_2KX),
    }
    report["nef_big"] = nef_big_check(data)

    canon_block: dict = {}
    try:
        canon = canonical_degree(data, doc.incidences)
    except UnsupportedCanonicalData as exc:
        canon = generator_set(data)
        canon_block["note"] = str(exc)
    canon_block["J"] = [str(chi) for chi in canon.J]
    canon_block["generators"] = {
        str(chi): {
            "base_class": _json_class(gen.base_class),
            "base_h0": gen.base_h0,
            "branch_part": sorted(c.label for c in gen.branch_part),
        }
        for chi, gen in canon.generators.items()
    }
    if canon.fixed_part is not None:
        canon_block["fixed_part"] = [c.label for c in canon.fixed_part]
        canon_block["M2"] = canon.M2
        canon_block["bpf"] = canon.bpf
        canon_block["composed_with_pencil"] = canon.composed_with_pencil
        canon_block["degree"] = canon.degree
    report["canonical"] = canon_block

    expectations: list[dict] = []

    def expect(name: str, got, want) -> None:
        ok = got == want
        expectations.append({"name": name, "expected": _plain(want), "got": _plain(got), "ok": ok})

    exp = doc.expect
    if exp is not None:
        if exp.quotient is not None:
            H = Subgroup.generated(exp.quotient)
            expect("quotient_factorisation", factors_through_quotient(data, H), True)
        for name, got, want in (
            ("KX2", inv.KX2, exp.KX2),
            ("pg", inv.pg, exp.pg),
            ("chiO", inv.chiO, exp.chiO),
            ("q", inv.q, exp.q),
        ):
            if want is not None:
                expect(name, got, want)
        if exp.half_2KX is not None:
            expect("half_2KX", _json_class(inv.half_2KX), _json_class(exp.half_2KX))
        for chi, want_sum in exp.relations.items():
            expect(f"relation_{chi}", _json_class(2 * data.L[chi]), _json_class(want_sum))
        if exp.d is not None:
            expect("d", canon_block.get("degree"), exp.d)
        if exp.fixed_part_nonempty is not None:
            expect("fixed_part_nonempty", bool(canon_block.get("fixed_part")), exp.fixed_part_nonempty)
        if exp.fixed_part is not None:
            expect("fixed_part", canon_block.get("fixed_part"), list(exp.fixed_part))
        for pencil in exp.pencils:
            cls = data.ctx.templates[pencil.template].cls
            comps, genus = fiber_genus(data, cls)
            expect(f"pencil_{pencil.template}", [comps, genus], [pencil.components, pencil.genus])
    report["expectations"] = expectations
    if any(not e["ok"] for e in expectations):
        code = EXIT_MATH
    return report, code


def _plain(value):
    if isinstance(value, tuple):
        return list(value)
    return value


def _print_human_report(report: dict, out) -> None:
    name = report.get("name") or "(unnamed)"
    print(f"document {name} on a {9 - report['k']}-del Pezzo (k = {report['k']})", file=out)
    if not report["valid"]:
        print("validation: FAILED", file=out)
        for v in report["violations"]:
            print(f"  [{v['kind']}] {v['subject']}: {v['detail']}", file=out)
        return
    print("validation: ok (7 parity relations, reduced branch, nontrivial L)", file=out)
    if not report["smooth"]:
        print(f"smoothness: FAILED at {report['singular_points']}", file=out)
        return
    print("smoothness: ok", file=out)
    inv = report["invariants"]
    print(
        f"invariants: K^2 = {inv['KX2']}  p_g = {inv['pg']}  chi(O) = {inv['chiO']}  q = {inv['q']}",
        file=out,
    )
    canon = report["canonical"]
    if "degree" in canon:
        fixed = canon["fixed_part"]
        print(
            f"canonical map: degree {canon['degree']}, M^2 = {canon['M2']}, "
            f"bpf = {canon['bpf']}, fixed part = {fixed or '[]'}",
            file=out,
        )
    elif "note" in canon:
        print(f"canonical map: {canon['note']}", file=out)
    for e in report["expectations"]:
        status = "ok" if e["ok"] else "MISMATCH"
        print(f"expect {e['name']}: {status} (expected {e['expected']}, got {e['got']})", file=out)


def _cmd_verify(args) -> int:
    try:
        doc = parse_document(_read(args.file))
    except DocumentError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report, code = _verification_report(doc)
    except UnsupportedBlowup as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if args.json:
        sys.stdout.write(canonical_json(report))
    else:
        _print_human_report(report, sys.stdout)
        print("RESULT: " + ("ok" if code == EXIT_OK else "FAILED"), file=sys.stdout)
    return code


def _cmd_blowup(args) -> int:
    try:
        doc = parse_document(_read(args.file))
        plan = parse_plan(_read(args.plan))
    except DocumentError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        transformed = transform_building_data(doc.data, plan)
    except UnsupportedBlowup as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ParityFixFailure as exc:
        print(f"parity failure: {exc}", file=sys.stderr)
        fixes = search_parity_fix(doc.data, plan)
        if fixes:
            print("viable parity fixes:", file=sys.stderr)
            for fix in fixes:
                if fix:
                    parts = ", ".join(f"{lbl} -> D_{sigma}" for lbl, sigma in sorted(fix.items()))
                else:
                    parts = "(no exceptional curve in the branch)"
                print(f"  {parts}", file=sys.stderr)
        else:
            print("no parity fix makes this plan work", file=sys.stderr)
        return EXIT_MATH
    except (KeyError, ValueError) as exc:
        print(f"invalid plan: {exc}", file=sys.stderr)
        return EXIT_MATH
    name = f"{doc.name}_blowup" if doc.name else None
    text = emit_document(transformed, name=name)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_search(args) -> int:
    import tomli

    from .documents import parse_curve_table
    from .picard import surface_context

    try:
        raw = tomli.loads(_read(args.config))
        k = raw["surface"]["k"]
        ctx = surface_context(k)
        pool = list(parse_curve_table(ctx, raw.get("pool", {})).values())
        t = raw.get("targets", {})
        targets = SearchTargets(pg=t.get("pg"), q=t.get("q"), d=t.get("d"), KX2=t.get("KX2"))
        max_per_slot = raw.get("bounds", {}).get("max_per_slot", 3)
    except (tomli.TOMLDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    if not pool or len(pool) > 24 or max_per_slot < 1 or max_per_slot > 3:
        print("infeasible search bounds (need 1..24 pool curves, 1..3 per slot)", file=sys.stderr)
        return EXIT_UNSUPPORTED

    if args.seed is not None:
        for cls in sorted({c.cls for c in pool}, key=lambda c: c.coeffs()):
            expected = h0(ctx, cls)
            got = h0_oracle(ctx, cls, args.seed)
            if expected != got:
                print(
                    f"oracle disagreement on {cls}: reduction gives {expected}, interpolation gives {got}",
                    file=sys.stderr,
                )
                return EXIT_MATH

    if args.limit == 0:
        return EXIT_OK
    emitted = 0
    for result in enumerate_covers(ctx, pool, targets, max_per_slot=max_per_slot):
        if args.limit is not None and emitted >= args.limit:
            break
        line = {
            "branch": {
                str(sigma): [c.label for c in result.data.branch[sigma]]
                for sigma in sorted(result.data.branch)
            },
            "L": {str(chi): _json_class(cls) for chi, cls in sorted(result.data.L.items())},
            "invariants": {
                "KX2": result.invariants.KX2,
                "pg": result.invariants.pg,
                "chiO": result.invariants.chiO,
                "q": result.invariants.q,
            },
            "degree": result.report.degree,
            "quotient_filter": canonical_candidate_filter(result.data),
        }
        sys.stdout.write(json.dumps(line, sort_keys=True, separators=(",", ":")) + "\n")
        emitted += 1
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dpcover",
        description="(Z/2)^3-covers of del Pezzo surfaces: verify, blow up, search",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="validate a building-data document and check its expectations")
    p_verify.add_argument("file")
    p_verify.add_argument("--json", action="store_true", help="emit a canonical JSON report")
    p_verify.set_defaults(func=_cmd_verify)

    p_blowup = sub.add_parser("blowup", help="apply a blow-up plan to a building-data document")
    p_blowup.add_argument("file")
    p_blowup.add_argument("plan")
    p_blowup.add_argument("-o", "--output", help="write the transformed document here instead of stdout")
    p_blowup.set_defaults(func=_cmd_blowup)

    p_search = sub.add_parser("search", help="enumerate building data over a curve pool")
    p_search.add_argument("config")
    p_search.add_argument("--limit", type=int, default=None, help="stop after this many results")
    p_search.add_argument("--seed", type=int, default=None, help="run h0 oracle spot-checks on the pool first")
    p_search.set_defaults(func=_cmd_search)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
