"""The seven reference constructions and a reproduction harness.

One entry per realised (degree, irregularity) pair: (10,0), (10,1), (10,2),
(12,1), (12,2), (14,0) and (14,1).  Each ships as a TOML document carrying
the full divisor table plus the invariants it is expected to reproduce;
``reproduce`` reruns the whole pipeline against those expectations.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .canonical import canonical_degree, factors_through_quotient, fiber_genus
from .chargroup import Subgroup
from .cover import BuildingData, IncidenceSpec, invariants, nef_big_check, smoothness_check, validate
from .documents import Document, Expectations, parse_document

ENTRY_NAMES = ("d10q0", "d10q1", "d10q2", "d12q1", "d12q2", "d14q0", "d14q1")

DEFAULT_QUOTIENT = Subgroup.generated(["001"])


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    data: BuildingData
    incidences: IncidenceSpec
    expected: Expectations


@dataclass(frozen=True)
class CheckLine:
    name: str
    ok: bool
    detail: str

    def __str__(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.detail}"


@dataclass(frozen=True)
class ReproduceResult:
    entry: str
    passed: bool
    checks: tuple[CheckLine, ...]

    def __str__(self) -> str:
        head = f"{'PASS' if self.passed else 'FAIL'} {self.entry}"
        return "\n".join([head] + [f"  {line}" for line in self.checks])


def catalog_document_text(name: str) -> str:
    return resources.files("dpcover").joinpath(f"data/{name}.toml").read_text(encoding="utf-8")


def plan_document_text(name: str) -> str:
    return resources.files("dpcover").joinpath(f"data/plans/{name}.toml").read_text(encoding="utf-8")


def _entry_from_document(doc: Document) -> CatalogEntry:
    if doc.expect is None or doc.name is None:
        raise ValueError("catalog documents must carry a name and an expect block")
    return CatalogEntry(name=doc.name, data=doc.data, incidences=doc.incidences, expected=doc.expect)


def load_entry(name: str) -> CatalogEntry:
    return _entry_from_document(parse_document(catalog_document_text(name)))


def load_catalog() -> tuple[CatalogEntry, ...]:
    return tuple(load_entry(name) for name in ENTRY_NAMES)


def reproduce(entry: CatalogEntry) -> ReproduceResult:
    """Rerun validation, smoothness, invariants, the canonical map, the
    quotient factorisation and the pencil genera against the entry's table row."""
    exp = entry.expected
    checks: list[CheckLine] = []

    def check(name: str, ok: bool, detail: str) -> None:
        checks.append(CheckLine(name=name, ok=ok, detail=detail))

    report = validate(entry.data)
    check("validate", report.ok, "all 7 parity relations hold" if report.ok else "; ".join(map(str, report.violations)))
    if not report.ok:
        return ReproduceResult(entry=entry.name, passed=False, checks=tuple(checks))

    for chi, expected_sum in exp.relations.items():
        got = 2 * entry.data.L[chi]
        check(f"relation {chi}", got == expected_sum, f"2L = {got}")

    smooth = smoothness_check(entry.data, entry.incidences)
    check("smooth", smooth.smooth, "branch is simple normal crossings" if smooth.smooth else str(smooth.offenders))

    inv = invariants(entry.data)
    for field_name, got, want in (
        ("KX2", inv.KX2, exp.KX2),
        ("pg", inv.pg, exp.pg),
        ("chiO", inv.chiO, exp.chiO),
        ("q", inv.q, exp.q),
    ):
        if want is not None:
            check(field_name, got == want, f"{got} (expected {want})")
    if exp.half_2KX is not None:
        check("half_2KX", inv.half_2KX == exp.half_2KX, f"{inv.half_2KX}")
    check("nef_big", nef_big_check(entry.data), f"(2K+B)^2 = {inv.half_2KX.dot(inv.half_2KX)}")

    try:
        canon = canonical_degree(entry.data, entry.incidences)
    except Exception as exc:
        check("canonical_map", False, str(exc))
        return ReproduceResult(entry=entry.name, passed=False, checks=tuple(checks))
    if exp.d is not None:
        check("degree", canon.degree == exp.d, f"{canon.degree} (expected {exp.d})")
    fixed_labels = tuple(c.label for c in canon.fixed_part or ())
    if exp.fixed_part_nonempty is not None:
        check(
            "fixed_part_nonempty",
            bool(fixed_labels) == exp.fixed_part_nonempty,
            f"fixed part {list(fixed_labels)}",
        )
    if exp.fixed_part is not None:
        check("fixed_part", fixed_labels == exp.fixed_part, f"{list(fixed_labels)}")
    check("bpf", bool(canon.bpf), f"moving part M^2 = {canon.M2}")
    check("not_composed_with_pencil", canon.composed_with_pencil is False, f"M^2 = {canon.M2}")

    quotient = Subgroup.generated(exp.quotient) if exp.quotient else DEFAULT_QUOTIENT
    check(
        "quotient_factorisation",
        factors_through_quotient(entry.data, quotient),
        f"subgroup generated by {[str(g) for g in quotient.generators]}",
    )

    for pencil in exp.pencils:
        cls = entry.data.ctx.templates[pencil.template].cls
        comps, genus = fiber_genus(entry.data, cls)
        check(
            f"pencil {pencil.template}",
            (comps, genus) == (pencil.components, pencil.genus),
            f"components={comps} genus={genus} (expected {pencil.components}, {pencil.genus})",
        )

    if exp.d is not None and exp.pg is not None and exp.KX2 is not None and exp.chiO is not None:
        bmy = exp.d * (exp.pg - 2) <= inv.KX2 <= 9 * inv.chiO
        check("bmy_chain", bmy, f"{exp.d * (exp.pg - 2)} <= {inv.KX2} <= {9 * inv.chiO}")

    return ReproduceResult(entry=entry.name, passed=all(c.ok for c in checks), checks=tuple(checks))


def chi_o_profile(entries=None) -> tuple[int, ...]:
    """chi(O_X) across the catalog in table order."""
    entries = load_catalog() if entries is None else entries
    return tuple(invariants(e.data).chiO for e in entries)


__all__ = [
    "ENTRY_NAMES",
    "CatalogEntry",
    "ReproduceResult",
    "CheckLine",
    "catalog_document_text",
    "plan_document_text",
    "load_catalog",
    "load_entry",
    "reproduce",
    "chi_o_profile",
]
