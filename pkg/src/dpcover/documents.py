"""TOML document format for building data, incidences and blow-up plans.

A document transcribes a divisor table line by line: a surface block with the
number of blown-up points, a curves table (label -> curated template and
member index, or an explicit class), a branch table keyed by the 3-bit sigma
strings, an optional L table keyed by the chi strings (solved as half the
branch sums when omitted), optional declared points, and an optional expect
block with the invariants the document claims.  All numbers are integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

import tomli

from .chargroup import Character, GroupElement, negative_set, nontrivial_characters, nontrivial_elements
from .cover import BuildingData, DeclaredPoint, IncidenceSpec
from .picard import DivClass, NamedCurve, SurfaceContext, surface_context, template_class, zero_class
from .resolve import BlowupPlan, PlanPoint

N = 3


class DocumentError(ValueError):
    """A document that cannot be parsed into building data."""


@dataclass(frozen=True)
class PencilExpectation:
    template: str
    components: int
    genus: int


@dataclass(frozen=True)
class Expectations:
    d: int | None = None
    q: int | None = None
    pg: int | None = None
    KX2: int | None = None
    chiO: int | None = None
    fixed_part_nonempty: bool | None = None
    fixed_part: tuple[str, ...] | None = None
    quotient: tuple[GroupElement, ...] | None = None
    half_2KX: DivClass | None = None
    relations: Mapping[Character, DivClass] = field(default_factory=dict)
    pencils: tuple[PencilExpectation, ...] = ()


@dataclass(frozen=True)
class Document:
    name: str | None
    data: BuildingData
    incidences: IncidenceSpec
    expect: Expectations | None
    point_labels: tuple[str, ...] = ()


def _bits(key: str, what: str) -> tuple[int, ...]:
    if len(key) != N or any(c not in "01" for c in key):
        raise DocumentError(f"{what} key must be a {N}-character bit string, got {key!r}")
    return tuple(int(c) for c in key)


def _class_from_coeffs(ctx: SurfaceContext, coeffs, what: str) -> DivClass:
    if not isinstance(coeffs, list) or len(coeffs) != ctx.k + 1 or not all(isinstance(c, int) for c in coeffs):
        raise DocumentError(f"{what}: expected a list of {ctx.k + 1} integers, got {coeffs!r}")
    return DivClass(coeffs[0], tuple(coeffs[1:]))


def _class_from_coeff_map(ctx: SurfaceContext, table, what: str) -> DivClass:
    if not isinstance(table, dict):
        raise DocumentError(f"{what}: expected a template -> coefficient table")
    total = zero_class(ctx.k)
    for name, coeff in table.items():
        if not isinstance(coeff, int):
            raise DocumentError(f"{what}: coefficient of {name!r} must be an integer")
        try:
            total = total + coeff * template_class(ctx.k, name)
        except ValueError as exc:
            raise DocumentError(f"{what}: {exc}") from exc
    return total


def parse_curve_table(ctx: SurfaceContext, table) -> dict[str, NamedCurve]:
    curves: dict[str, NamedCurve] = {}
    for label, spec in table.items():
        if not isinstance(spec, dict):
            raise DocumentError(f"curve {label!r}: expected a table")
        member = spec.get("member", 1)
        if not isinstance(member, int) or member < 1:
            raise DocumentError(f"curve {label!r}: member must be a positive integer")
        if "template" in spec:
            name = spec["template"]
            if name not in ctx.templates:
                raise DocumentError(f"curve {label!r}: unknown template {name!r} for k={ctx.k}")
            cls = ctx.templates[name].cls
        elif "class" in spec:
            cls = _class_from_coeffs(ctx, spec["class"], f"curve {label!r}")
        else:
            raise DocumentError(f"curve {label!r}: needs a template or an explicit class")
        curves[label] = NamedCurve(label=label, cls=cls, member=member)
    return curves


def _parse_points(raw, what: str = "points") -> tuple[DeclaredPoint, ...]:
    points = []
    for entry in raw:
        if not isinstance(entry, dict) or "label" not in entry or "curves" not in entry:
            raise DocumentError(f"{what}: each entry needs a label and a curves table")
        mults = entry["curves"]
        if not isinstance(mults, dict) or not all(isinstance(v, int) for v in mults.values()):
            raise DocumentError(f"{what} {entry['label']!r}: curve multiplicities must be integers")
        points.append(DeclaredPoint(label=str(entry["label"]), mults=dict(mults)))
    return tuple(points)


def _parse_expect(ctx: SurfaceContext, raw) -> Expectations:
    known = {
        "d", "q", "pg", "KX2", "chiO", "fixed_part_nonempty", "fixed_part",
        "quotient", "half_2KX", "relations", "pencils",
    }
    for key in raw:
        if key not in known:
            raise DocumentError(f"expect: unknown key {key!r}")
    quotient = None
    if "quotient" in raw:
        gens = raw["quotient"]
        if isinstance(gens, str):
            gens = [gens]
        quotient = tuple(GroupElement(_bits(g, "quotient")) for g in gens)
    half = None
    if "half_2KX" in raw:
        half = _class_from_coeff_map(ctx, raw["half_2KX"], "expect.half_2KX")
    relations = {}
    for key, table in raw.get("relations", {}).items():
        chi = Character(_bits(key, "relation"))
        relations[chi] = _class_from_coeff_map(ctx, table, f"expect.relations.{key}")
    pencils = tuple(
        PencilExpectation(template=p["template"], components=p["components"], genus=p["genus"])
        for p in raw.get("pencils", [])
    )
    fixed = tuple(raw["fixed_part"]) if "fixed_part" in raw else None
    return Expectations(
        d=raw.get("d"),
        q=raw.get("q"),
        pg=raw.get("pg"),
        KX2=raw.get("KX2"),
        chiO=raw.get("chiO"),
        fixed_part_nonempty=raw.get("fixed_part_nonempty"),
        fixed_part=fixed,
        quotient=quotient,
        half_2KX=half,
        relations=relations,
        pencils=pencils,
    )


def solve_character_classes(ctx: SurfaceContext, branch: Mapping[GroupElement, tuple[NamedCurve, ...]]) -> dict[Character, DivClass]:
    """L_chi = (1/2) sum of D_sigma over chi(sigma) = -1; unique since Pic is torsion free."""
    out = {}
    for chi in nontrivial_characters(N):
        total = zero_class(ctx.k)
        for sigma in negative_set(chi):
            for curve in branch.get(sigma, ()):
                total = total + curve.cls
        try:
            out[chi] = total.halve()
        except ValueError as exc:
            raise DocumentError(f"branch sum for chi={chi} is not 2-divisible; supply L explicitly") from exc
    return out


def parse_document(text: str) -> Document:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise DocumentError(f"TOML parse error: {exc}") from exc

    surface = raw.get("surface")
    if not isinstance(surface, dict) or "k" not in surface:
        raise DocumentError("missing [surface] block with the number of blown-up points k")
    k = surface["k"]
    if not isinstance(k, int) or not 0 <= k <= 4:
        raise DocumentError(f"surface.k must be an integer in 0..4, got {k!r}")
    ctx = surface_context(k)
    point_labels = tuple(surface.get("points", ()))
    if point_labels and len(point_labels) != k:
        raise DocumentError(f"surface.points names {len(point_labels)} blown-up points but k = {k}")

    curves = parse_curve_table(ctx, raw.get("curves", {}))

    branch: dict[GroupElement, tuple[NamedCurve, ...]] = {}
    used: set[str] = set()
    for key, labels in raw.get("branch", {}).items():
        sigma = GroupElement(_bits(key, "branch"))
        if sigma.is_zero():
            raise DocumentError("branch slot 000 does not exist")
        if not isinstance(labels, list):
            raise DocumentError(f"branch {key!r}: expected a list of curve labels")
        entry = []
        for label in labels:
            if label not in curves:
                raise DocumentError(f"branch {key!r}: unknown curve {label!r}")
            entry.append(curves[label])
            used.add(label)
        branch[sigma] = tuple(entry)
    unused = set(curves) - used
    if unused:
        raise DocumentError(f"curves declared but not placed in any branch slot: {sorted(unused)}")

    if "L" in raw:
        L = {}
        for key, coeffs in raw["L"].items():
            chi = Character(_bits(key, "L"))
            if chi.is_trivial():
                raise DocumentError("L table must not contain the trivial character")
            L[chi] = _class_from_coeffs(ctx, coeffs, f"L[{key}]")
        missing = [str(c) for c in nontrivial_characters(N) if c not in L]
        if missing:
            raise DocumentError(f"L table is incomplete; missing {missing}")
    else:
        L = solve_character_classes(ctx, branch)

    data = BuildingData(ctx=ctx, branch=branch, L=L)
    incidences = IncidenceSpec(points=_parse_points(raw.get("points", [])))
    expect = _parse_expect(ctx, raw["expect"]) if "expect" in raw else None
    name = raw.get("name")
    return Document(name=name, data=data, incidences=incidences, expect=expect, point_labels=point_labels)


def parse_plan(text: str) -> BlowupPlan:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise DocumentError(f"TOML parse error: {exc}") from exc
    points = tuple(
        PlanPoint(label=p.label, mults=dict(p.mults)) for p in _parse_points(raw.get("points", []), "plan points")
    )
    fix = {}
    for label, key in raw.get("parity_fix", {}).items():
        fix[label] = GroupElement(_bits(key, "parity_fix"))
    return BlowupPlan(points=points, parity_fix=fix)


def _toml_str(value: str) -> str:
    return json.dumps(value)


def _toml_key(key: str) -> str:
    if key and all(c.isalnum() or c in "-_" for c in key):
        return key
    return _toml_str(key)


def emit_document(
    data: BuildingData,
    incidences: IncidenceSpec = IncidenceSpec(),
    name: str | None = None,
) -> str:
    """Deterministic TOML for a building-data document (curves sorted by label)."""
    ctx = data.ctx
    lines: list[str] = []
    if name is not None:
        lines.append(f"name = {_toml_str(name)}")
        lines.append("")
    lines.append("[surface]")
    lines.append(f"k = {ctx.k}")
    lines.append("")
    lines.append("[curves]")
    all_curves = sorted((curve for _, curve in data.curves()), key=lambda c: c.label)
    for curve in all_curves:
        tpl = ctx.template_for_class(curve.cls)
        if tpl is not None:
            fields = [f"template = {_toml_str(tpl.name)}"]
            if tpl.moving:
                fields.append(f"member = {curve.member}")
        else:
            fields = [f"class = [{', '.join(str(c) for c in curve.cls.coeffs())}]"]
        lines.append(f"{_toml_key(curve.label)} = {{ {', '.join(fields)} }}")
    lines.append("")
    lines.append("[branch]")
    for sigma in nontrivial_elements(N):
        labels = ", ".join(_toml_str(c.label) for c in data.branch[sigma])
        lines.append(f'"{sigma}" = [{labels}]')
    lines.append("")
    lines.append("[L]")
    for chi in nontrivial_characters(N):
        coeffs = ", ".join(str(c) for c in data.L[chi].coeffs())
        lines.append(f'"{chi}" = [{coeffs}]')
    for point in incidences.points:
        lines.append("")
        lines.append("[[points]]")
        lines.append(f"label = {_toml_str(point.label)}")
        mults = ", ".join(f"{_toml_key(lbl)} = {m}" for lbl, m in sorted(point.mults.items()))
        lines.append(f"curves = {{ {mults} }}")
    return "\n".join(lines) + "\n"


def canonical_json(obj: Any) -> str:
    """Stable JSON used for all machine-readable reports (ints only, sorted keys)."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
