"""Building data of (Z/2)^3-covers and the invariants of the covering surface.

A cover f: X -> Y of degree 8 is encoded by effective branch divisors D_sigma
(one per nonzero group element, possibly zero) and classes L_chi (one per
nontrivial character) subject to the seven parity relations

    2 L_chi  ==  sum of D_sigma over { sigma : chi(sigma) = -1 },

together with L_chi != 0 and the total branch B = sum D_sigma reduced.  When
the branch is a simple normal crossings divisor with smooth components, X is
smooth and

    2 K_X   == f^*(2 K_Y + B)
    K_X^2   == 2 (2 K_Y + B)^2
    p_g(X)  == p_g(Y) + sum_chi h^0(L_chi + K_Y)
    chi(O_X)== 8 chi(O_Y) + sum_chi (1/2) L_chi (L_chi + K_Y).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .chargroup import (
    Character,
    GroupElement,
    Matrix,
    apply_matrix,
    apply_matrix_to_character,
    matrix_inverse,
    matrix_transpose,
    negative_set,
    nontrivial_characters,
    nontrivial_elements,
)
from .picard import DivClass, NamedCurve, SurfaceContext, canonical_class, h0, is_nef, zero_class

N = 3


class UnsupportedCurve(ValueError):
    """A branch curve whose class is outside the curated dictionary."""


@dataclass(frozen=True)
class BuildingData:
    """Branch assignment sigma -> curves and character classes chi -> L_chi.

    Missing branch slots denote D_sigma = 0; the maps are normalised so every
    nonzero sigma and every nontrivial chi is present.
    """

    ctx: SurfaceContext
    branch: Mapping[GroupElement, tuple[NamedCurve, ...]]
    L: Mapping[Character, DivClass]

    def __post_init__(self) -> None:
        branch = {s: tuple(self.branch.get(s, ())) for s in nontrivial_elements(N)}
        object.__setattr__(self, "branch", branch)
        object.__setattr__(self, "L", dict(self.L))

    def curves(self) -> Iterator[tuple[GroupElement, NamedCurve]]:
        for sigma in nontrivial_elements(N):
            for curve in self.branch[sigma]:
                yield sigma, curve

    def curve_by_label(self, label: str) -> tuple[GroupElement, NamedCurve]:
        for sigma, curve in self.curves():
            if curve.label == label:
                return sigma, curve
        raise KeyError(f"no branch curve labelled {label!r}")

    def branch_class(self, sigma: GroupElement) -> DivClass:
        total = zero_class(self.ctx.k)
        for curve in self.branch[sigma]:
            total = total + curve.cls
        return total

    def total_branch_class(self) -> DivClass:
        total = zero_class(self.ctx.k)
        for _, curve in self.curves():
            total = total + curve.cls
        return total

    def half_2kx(self) -> DivClass:
        """The class 2K_Y + B, whose pullback is 2K_X."""
        return 2 * canonical_class(self.ctx) + self.total_branch_class()


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.subject}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return self.ok


def validate(data: BuildingData) -> ValidationReport:
    """Check the parity relations, reducedness and nontriviality of the L_chi."""
    violations: list[Violation] = []
    ctx = data.ctx

    seen_labels: set[str] = set()
    seen_members: dict[tuple[tuple[int, ...], int], str] = {}
    rigid_class_owner: dict[tuple[int, ...], str] = {}
    for sigma, curve in data.curves():
        if curve.label in seen_labels:
            violations.append(Violation("reduced", curve.label, "curve label used twice in the branch"))
        seen_labels.add(curve.label)
        if curve.cls.k != ctx.k:
            violations.append(Violation("dimension", curve.label, f"class has k={curve.cls.k}, surface has k={ctx.k}"))
            continue
        tpl = ctx.template_for_class(curve.cls)
        key = (curve.cls.coeffs(), curve.member)
        if key in seen_members and seen_members[key] != curve.label:
            violations.append(
                Violation("reduced", curve.label, f"same class and member index as {seen_members[key]!r}")
            )
        seen_members.setdefault(key, curve.label)
        if tpl is not None and not tpl.moving:
            owner = rigid_class_owner.get(curve.cls.coeffs())
            if owner is not None and owner != curve.label:
                violations.append(
                    Violation("reduced", curve.label, f"rigid class {tpl.name} has a unique member, already used as {owner!r}")
                )
            rigid_class_owner.setdefault(curve.cls.coeffs(), curve.label)

    for chi in nontrivial_characters(N):
        L = data.L.get(chi)
        if L is None:
            violations.append(Violation("missing", str(chi), "no L class supplied"))
            continue
        if L.k != ctx.k:
            violations.append(Violation("dimension", str(chi), f"L has k={L.k}, surface has k={ctx.k}"))
            continue
        if L.is_zero():
            violations.append(Violation("nontrivial", str(chi), "L must not be linearly trivial"))
        rhs = zero_class(ctx.k)
        for sigma in negative_set(chi):
            rhs = rhs + data.branch_class(sigma)
        if 2 * L != rhs:
            violations.append(
                Violation("parity", str(chi), f"2L = {2 * L} but the branch sum over chi = -1 is {rhs}")
            )

    return ValidationReport(ok=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class DeclaredPoint:
    """A point of the branch locus with prescribed local multiplicities."""

    label: str
    mults: Mapping[str, int]


@dataclass(frozen=True)
class IncidenceSpec:
    """Declared special points; all undeclared crossings are generic transverse
    double points of the total branch."""

    points: tuple[DeclaredPoint, ...] = ()

    def declared_meetings(self, a: str, b: str) -> int:
        return sum(p.mults.get(a, 0) * p.mults.get(b, 0) for p in self.points)


EMPTY_INCIDENCES = IncidenceSpec()


@dataclass(frozen=True)
class SmoothnessReport:
    smooth: bool
    offenders: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.smooth


def smoothness_check(data: BuildingData, inc: IncidenceSpec = EMPTY_INCIDENCES) -> SmoothnessReport:
    """Decide whether the cover over this branch configuration is smooth.

    Smoothness requires every branch curve smooth and the total branch simple
    normal crossings.  Under the generic-position model that fails exactly at:
    declared points of total multiplicity >= 3, declared multiplicity >= 2 on
    a single curve (the curve itself acquires a singular point), and
    crossings of two curves belonging to the same branch slot (a node of one
    D_sigma).  The offender list feeds the blow-up workflow.
    """
    ctx = data.ctx
    labels = {}
    for sigma, curve in data.curves():
        if ctx.template_for_class(curve.cls) is None:
            raise UnsupportedCurve(f"{curve.label}: class {curve.cls} is not in the curated dictionary")
        labels[curve.label] = (sigma, curve)

    offenders: list[str] = []
    for point in inc.points:
        total = 0
        singular_curve = False
        for label, mult in point.mults.items():
            if label not in labels:
                raise KeyError(f"declared point {point.label} references unknown curve {label!r}")
            if mult < 1:
                raise ValueError(f"declared point {point.label}: multiplicity on {label} must be >= 1")
            total += mult
            singular_curve = singular_curve or mult >= 2
        if total >= 3 or singular_curve:
            offenders.append(point.label)

    for sigma in nontrivial_elements(N):
        curves = data.branch[sigma]
        for i, a in enumerate(curves):
            for b in curves[i + 1 :]:
                if a.cls.dot(b.cls) > 0:
                    offenders.append(f"{a.label}*{b.label} (both in D_{sigma})")

    # A declared point cannot impose more crossings than the classes afford.
    all_curves = list(labels.values())
    for i, (_, a) in enumerate(all_curves):
        for _, b in all_curves[i + 1 :]:
            declared = inc.declared_meetings(a.label, b.label)
            if declared > a.cls.dot(b.cls):
                raise ValueError(
                    f"incidences declare {declared} meetings of {a.label} and {b.label}, "
                    f"but the classes only meet {a.cls.dot(b.cls)} times"
                )

    return SmoothnessReport(smooth=not offenders, offenders=tuple(offenders))


@dataclass(frozen=True)
class CoverInvariants:
    half_2KX: DivClass
    KX2: int
    pg: int
    chiO: int
    q: int


def invariants(data: BuildingData) -> CoverInvariants:
    """Numerical invariants of the smooth cover (validate + smoothness assumed)."""
    ctx = data.ctx
    K = canonical_class(ctx)
    half = data.half_2kx()
    kx2 = 2 * half.dot(half)
    pg = 0
    chi_o = 8
    for chi in nontrivial_characters(N):
        L = data.L[chi]
        pg += h0(ctx, L + K)
        twice = L.dot(L + K)
        if twice % 2:
            raise ValueError(f"L_{chi}(L_{chi} + K) = {twice} is odd; corrupt building data")
        chi_o += twice // 2
    q = 1 + pg - chi_o
    return CoverInvariants(half_2KX=half, KX2=kx2, pg=pg, chiO=chi_o, q=q)


def nef_big_check(data: BuildingData) -> bool:
    """Minimality/general-type certificate: 2K_X pulls back a nef and big class."""
    half = data.half_2kx()
    return is_nef(data.ctx, half) and half.dot(half) > 0


def relabel(data: BuildingData, M: Matrix) -> BuildingData:
    """Transport the building data along an automorphism of (Z/2)^3.

    Branch slots move by sigma -> M sigma and the character classes follow so
    that the parity relations are preserved: L'_{chi} = L_{chi o M}.
    """
    Minv_t = matrix_transpose(matrix_inverse(M))
    branch = {apply_matrix(M, sigma): curves for sigma, curves in data.branch.items()}
    L = {apply_matrix_to_character(Minv_t, chi): cls for chi, cls in data.L.items()}
    return BuildingData(ctx=data.ctx, branch=branch, L=L)
