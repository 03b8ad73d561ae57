"""Imposing singular points on a branch configuration and blowing them up.

A blow-up plan declares points of the total branch with local multiplicities
(an ordinary triple point is three curves of multiplicity 1, a node is one
curve of multiplicity 2).  Blowing up replaces each incident curve by its
strict transform and may require absorbing the new exceptional curve into one
branch slot to restore the parity relations: the slot is forced, namely the
multiplicity-weighted sum of the incident sigma over F_2.  The character
classes are re-solved from scratch as half the branch sums, which is unique
because the Picard lattice is torsion free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Mapping

from .chargroup import GroupElement, negative_set, nontrivial_characters, nontrivial_elements
from .cover import BuildingData, UnsupportedCurve, validate
from .picard import (
    MAX_BLOWUPS,
    DivClass,
    NamedCurve,
    SurfaceContext,
    exceptional_class,
    h0,
    surface_context,
)

N = 3


class UnsupportedBlowup(ValueError):
    """The plan leaves the supported del Pezzo range or configuration table."""


class ParityFixFailure(ValueError):
    """Some branch sum is not 2-divisible after the blow-up."""

    def __init__(self, characters, message):
        super().__init__(message)
        self.characters = tuple(characters)


@dataclass(frozen=True)
class PlanPoint:
    """A declared singular point: curve label -> local multiplicity."""

    label: str
    mults: Mapping[str, int]


@dataclass(frozen=True)
class BlowupPlan:
    points: tuple[PlanPoint, ...]
    parity_fix: Mapping[str, GroupElement]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "parity_fix", dict(self.parity_fix))


def exceptional_labels(ctx: SurfaceContext, plan: BlowupPlan) -> tuple[str, ...]:
    return tuple(f"e_{ctx.k + i}" for i in range(1, len(plan.points) + 1))


def validate_plan(data: BuildingData, plan: BlowupPlan) -> None:
    """Reject plans that are out of range or geometrically infeasible."""
    ctx = data.ctx
    if ctx.k + len(plan.points) > MAX_BLOWUPS:
        raise UnsupportedBlowup(
            f"blowing up {len(plan.points)} points on a k={ctx.k} surface leaves the del Pezzo range"
        )
    labels = {curve.label: curve for _, curve in data.curves()}
    unknown = set(plan.parity_fix) - set(exceptional_labels(ctx, plan))
    if unknown:
        raise ValueError(f"parity fix names unknown exceptional curves {sorted(unknown)}")

    per_curve_mults: dict[str, list[int]] = {lbl: [] for lbl in labels}
    for point in plan.points:
        total = 0
        for label, mult in point.mults.items():
            if label not in labels:
                raise KeyError(f"plan point {point.label} references unknown curve {label!r}")
            if mult < 1:
                raise ValueError(f"plan point {point.label}: multiplicity on {label} must be >= 1")
            if mult > 2:
                raise UnsupportedBlowup(f"multiplicity {mult} at {point.label} is outside the supported table")
            per_curve_mults[label].append(mult)
            total += mult
        if total < 3:
            raise ValueError(f"plan point {point.label} has total multiplicity {total} < 3: no blow-up needed")
    for label, mults in per_curve_mults.items():
        if mults.count(2) > 1:
            raise UnsupportedBlowup(f"{label} is asked to be singular at two points")

    # Each strict transform must still move through the assigned points, and a
    # pair of curves cannot be asked for more meetings than their classes have.
    new_ctx = surface_context(ctx.k + len(plan.points))
    for label, curve in labels.items():
        strict = _strict_class(new_ctx, ctx, curve.cls, _point_mults(plan, label))
        if h0(new_ctx, strict) < 1:
            raise ValueError(f"no member of |{curve.label}| passes through the declared points as required")
    for (la, a), (lb, b) in itertools.combinations(labels.items(), 2):
        declared = sum(p.mults.get(la, 0) * p.mults.get(lb, 0) for p in plan.points)
        if declared > a.cls.dot(b.cls):
            raise ValueError(
                f"plan declares {declared} meetings of {la} and {lb}, classes only meet {a.cls.dot(b.cls)} times"
            )


def _point_mults(plan: BlowupPlan, label: str) -> tuple[int, ...]:
    return tuple(p.mults.get(label, 0) for p in plan.points)


def _lift(new_ctx: SurfaceContext, cls: DivClass) -> DivClass:
    return DivClass(cls.d, cls.m + (0,) * (new_ctx.k - cls.k))


def _strict_class(new_ctx: SurfaceContext, ctx: SurfaceContext, cls: DivClass, mults: tuple[int, ...]) -> DivClass:
    out = _lift(new_ctx, cls)
    for i, mult in enumerate(mults):
        if mult:
            out = out - mult * exceptional_class(new_ctx.k, ctx.k + 1 + i)
    return out


def blow_up_surface(ctx: SurfaceContext, plan: BlowupPlan) -> tuple[SurfaceContext, Callable[[DivClass], DivClass]]:
    """Blow up the plan's points: new context and the total-transform map."""
    k_new = ctx.k + len(plan.points)
    if k_new > MAX_BLOWUPS:
        raise UnsupportedBlowup(f"k = {k_new} leaves the curated del Pezzo range")
    new_ctx = surface_context(k_new)
    return new_ctx, lambda cls: _lift(new_ctx, cls)


def _split_nodal(new_ctx: SurfaceContext, strict: DivClass, nodal_index: int) -> tuple[DivClass, DivClass]:
    """Decompose the strict transform of a curve nodal at one blown-up point.

    The node separates into two local branches, each meeting the exceptional
    curve once, so the strict transform is a sum of two curated classes whose
    e-coefficient at the node is 1.  The decomposition must be unique.
    """
    found = []
    classes = sorted({tpl.cls.coeffs() for tpl in new_ctx.templates.values()})
    for ca, cb in itertools.combinations_with_replacement(classes, 2):
        A = DivClass(ca[0], ca[1:])
        B = DivClass(cb[0], cb[1:])
        if A + B != strict:
            continue
        if A.m[nodal_index - 1] == 1 and B.m[nodal_index - 1] == 1:
            found.append((A, B))
    if len(found) != 1:
        raise UnsupportedBlowup(
            f"nodal strict transform {strict} has {len(found)} curated decompositions; expected exactly 1"
        )
    return found[0]


def _member_label(template_name: str, member: int) -> str:
    if template_name == "l":
        return f"l_{member}"
    if "+" not in template_name and template_name.startswith("f_"):
        return f"{template_name}{member}"
    return f"C_{member}"


class _LabelAllocator:
    def __init__(self) -> None:
        self.labels: set[str] = set()
        self.members: dict[str, set[int]] = {}

    def reserve(self, template_name: str, label: str, member: int) -> None:
        self.labels.add(label)
        self.members.setdefault(template_name, set()).add(member)

    def allocate(self, new_ctx: SurfaceContext, cls: DivClass) -> NamedCurve:
        tpl = new_ctx.template_for_class(cls)
        if tpl is None:
            raise UnsupportedCurve(f"transformed class {cls} left the curated dictionary")
        if not tpl.moving:
            if tpl.name in self.labels:
                raise ValueError(f"two branch curves collapse onto the rigid curve {tpl.name}")
            self.reserve(tpl.name, tpl.name, 1)
            return NamedCurve(label=tpl.name, cls=cls, member=1)
        used = self.members.setdefault(tpl.name, set())
        member = 1
        while member in used or _member_label(tpl.name, member) in self.labels:
            member += 1
        label = _member_label(tpl.name, member)
        self.reserve(tpl.name, label, member)
        return NamedCurve(label=label, cls=cls, member=member)


def transform_building_data(data: BuildingData, plan: BlowupPlan) -> BuildingData:
    """Blow up, take strict transforms, absorb exceptionals, re-solve the L_chi."""
    validate_plan(data, plan)
    ctx = data.ctx
    new_ctx, _ = blow_up_surface(ctx, plan)
    exc_labels = exceptional_labels(ctx, plan)

    pieces: dict[GroupElement, list] = {s: [] for s in nontrivial_elements(N)}
    for sigma in nontrivial_elements(N):
        for curve in data.branch[sigma]:
            mults = _point_mults(plan, curve.label)
            strict = _strict_class(new_ctx, ctx, curve.cls, mults)
            if 2 in mults:
                nodal_index = ctx.k + 1 + mults.index(2)
                pieces[sigma].append((curve, _split_nodal(new_ctx, strict, nodal_index), False))
            else:
                pieces[sigma].append((curve, (strict,), not any(mults)))

    alloc = _LabelAllocator()
    # Untouched curves keep their labels; everything else gets fresh ones.
    for sigma in nontrivial_elements(N):
        for curve, classes, untouched in pieces[sigma]:
            if untouched:
                tpl = new_ctx.template_for_class(classes[0])
                if tpl is None:
                    raise UnsupportedCurve(f"{curve.label}: class {classes[0]} is not in the curated dictionary")
                alloc.reserve(tpl.name, curve.label, curve.member)

    branch: dict[GroupElement, list[NamedCurve]] = {s: [] for s in nontrivial_elements(N)}
    for sigma in nontrivial_elements(N):
        for curve, classes, untouched in pieces[sigma]:
            if untouched:
                branch[sigma].append(NamedCurve(label=curve.label, cls=classes[0], member=curve.member))
            else:
                for cls in classes:
                    branch[sigma].append(alloc.allocate(new_ctx, cls))
    for i, label in enumerate(exc_labels):
        slot = plan.parity_fix.get(label)
        if slot is None:
            continue
        cls = exceptional_class(new_ctx.k, ctx.k + 1 + i)
        branch[slot].append(NamedCurve(label=label, cls=cls, member=1))

    failures = []
    L: dict = {}
    for chi in nontrivial_characters(N):
        total = sum(
            (c.cls for s in negative_set(chi) for c in branch[s]),
            start=DivClass(0, (0,) * new_ctx.k),
        )
        try:
            L[chi] = total.halve()
        except ValueError:
            failures.append(chi)
    if failures:
        raise ParityFixFailure(
            failures,
            "branch sums for chi in {%s} are not 2-divisible; the exceptional curves "
            "must be absorbed differently" % ", ".join(str(c) for c in failures),
        )

    out = BuildingData(ctx=new_ctx, branch={s: tuple(cs) for s, cs in branch.items()}, L=L)
    report = validate(out)
    if not report.ok:
        raise ValueError("transformed building data is invalid: " + "; ".join(map(str, report.violations)))
    return out


def search_parity_fix(data: BuildingData, plan: BlowupPlan) -> list[dict[str, GroupElement]]:
    """All assignments of the new exceptionals to branch slots (or to none)
    whose transform produces valid building data."""
    if len(plan.points) > 2:
        raise ValueError("parity-fix search is limited to at most 2 new points")
    labels = exceptional_labels(data.ctx, plan)
    options: list[GroupElement | None] = [None, *nontrivial_elements(N)]
    viable = []
    for choice in itertools.product(options, repeat=len(labels)):
        fix = {lbl: slot for lbl, slot in zip(labels, choice) if slot is not None}
        try:
            transform_building_data(data, replace(plan, parity_fix=fix))
        except (ParityFixFailure, ValueError):
            continue
        viable.append(fix)
    return viable


class SingularityType(Enum):
    TWO_QUARTER_POINTS = "two_quarter_points"
    ELLIPTIC_GORENSTEIN = "elliptic_gorenstein"
    A1 = "A1"
    UNSUPPORTED = "unsupported"


def classify_singularity(data: BuildingData, point: PlanPoint) -> SingularityType:
    """Type of the cover singularity over a declared point, by configuration.

    Three transverse branch curves from slots summing to zero give a pair of
    1/4(1,1) points; if the slots sum to a nonzero element (so the exceptional
    must be absorbed on blow-up) the point is A_1.  A node on one curve plus
    two transverse curves gives a Gorenstein elliptic point.  Anything else is
    outside the supported table.
    """
    incident: list[tuple[GroupElement, int]] = []
    for label, mult in point.mults.items():
        try:
            sigma, _ = data.curve_by_label(label)
        except KeyError:
            return SingularityType.UNSUPPORTED
        incident.append((sigma, mult))
    if len(incident) != 3:
        return SingularityType.UNSUPPORTED
    sigmas = [s for s, _ in incident]
    if len(set(sigmas)) != 3:
        return SingularityType.UNSUPPORTED
    mults = sorted(m for _, m in incident)
    total = sigmas[0] + sigmas[1] + sigmas[2]
    if mults == [1, 1, 1]:
        return SingularityType.TWO_QUARTER_POINTS if total.is_zero() else SingularityType.A1
    if mults == [1, 1, 2]:
        return SingularityType.ELLIPTIC_GORENSTEIN
    return SingularityType.UNSUPPORTED
