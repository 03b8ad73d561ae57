"""The canonical system of the cover: generators, fixed part, map degree.

For a smooth cover f: X -> Y with building data {D_sigma, L_chi}, |K_X| is
generated by the divisors

    f^*|K_Y + L_chi|  +  sum of R_sigma over { sigma != 0 : chi(sigma) = +1 }

for the characters chi with h^0(K_Y + L_chi) > 0, where R_sigma is the reduced
divisor over D_sigma (half the full pullback as a rational class).  With
p_g = 3 the canonical image is a plane, and once the common fixed part F is
split off the map degree is M^2 for the moving part M = K_X - F, provided |M|
is base point free and M^2 > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .chargroup import (
    Character,
    GroupElement,
    Subgroup,
    chi_value,
    nontrivial_characters,
    nontrivial_elements,
    perp,
)
from .cover import BuildingData, IncidenceSpec, EMPTY_INCIDENCES
from .picard import DivClass, NamedCurve, canonical_class, h0, zero_class

N = 3


class UnsupportedCanonicalData(ValueError):
    """Canonical-system analysis outside the supported regime."""


@dataclass(frozen=True)
class HalfPullback:
    """A class on X of the form (1/2) f^*(base) for an integer class base on Y.

    Reduced divisors over branch curves and the canonical class of X are all
    of this shape: R_C = (1/2) f^*(C) and K_X = (1/2) f^*(2K_Y + B).
    """

    base: DivClass

    def __add__(self, other: "HalfPullback") -> "HalfPullback":
        return HalfPullback(self.base + other.base)

    def __sub__(self, other: "HalfPullback") -> "HalfPullback":
        return HalfPullback(self.base - other.base)


def reduced_pullback(cls: DivClass) -> HalfPullback:
    return HalfPullback(cls)


def full_pullback(cls: DivClass) -> HalfPullback:
    return HalfPullback(2 * cls)


def half_pullback_pairing(data: BuildingData, A: HalfPullback, B: HalfPullback) -> int:
    """Intersection number on X: (1/2 f^*a).(1/2 f^*b) = 2 a.b for degree 8."""
    if A.base.k != data.ctx.k or B.base.k != data.ctx.k:
        raise ValueError("pullback classes do not live on this surface")
    return 2 * A.base.dot(B.base)


def canonical_x(data: BuildingData) -> HalfPullback:
    return HalfPullback(data.half_2kx())


@dataclass(frozen=True)
class Generator:
    """One generator of |K_X|: a pulled-back base class plus reduced branch curves."""

    character: Character
    base_class: DivClass
    base_h0: int
    branch_part: tuple[NamedCurve, ...]


@dataclass(frozen=True)
class CanonicalReport:
    J: tuple[Character, ...]
    generators: Mapping[Character, Generator]
    pg: int
    fixed_part: tuple[NamedCurve, ...] | None = None
    M2: int | None = None
    degree: int | None = None
    bpf: bool | None = None
    composed_with_pencil: bool | None = None

    @property
    def degenerate(self) -> bool:
        return not self.J


def generator_set(data: BuildingData) -> CanonicalReport:
    """Generators of |K_X| indexed by the characters with effective K_Y + L_chi.

    The branch part of the chi-generator collects the curves of every D_sigma
    with chi(sigma) = +1, sigma != 0.  The rational surfaces in range have
    p_g(Y) = 0, so the trivial character never contributes.
    """
    ctx = data.ctx
    K = canonical_class(ctx)
    J: list[Character] = []
    generators: dict[Character, Generator] = {}
    pg = 0
    for chi in nontrivial_characters(N):
        base = K + data.L[chi]
        n = h0(ctx, base)
        pg += n
        if n == 0:
            continue
        J.append(chi)
        part = tuple(
            curve
            for sigma in nontrivial_elements(N)
            if chi_value(chi, sigma) == 1
            for curve in data.branch[sigma]
        )
        generators[chi] = Generator(character=chi, base_class=base, base_h0=n, branch_part=part)
    return CanonicalReport(J=tuple(J), generators=generators, pg=pg)


def fixed_part(report: CanonicalReport) -> tuple[NamedCurve, ...]:
    """Curves common to every generator of |K_X|.

    Only the regime where every base class is trivial (h^0 = 1, class 0) is
    supported; there each generator is a sum of reduced branch curves and the
    fixed part is the intersection of their supports.
    """
    if report.degenerate:
        raise UnsupportedCanonicalData("the canonical system is empty (p_g = 0)")
    for gen in report.generators.values():
        if gen.base_h0 >= 2:
            raise UnsupportedCanonicalData(
                f"generator for chi={gen.character} has a moving base class (h^0 = {gen.base_h0})"
            )
        if not gen.base_class.is_zero():
            raise UnsupportedCanonicalData(
                f"generator for chi={gen.character} has a nonzero rigid base class {gen.base_class}"
            )
    parts = [set(gen.branch_part) for gen in report.generators.values()]
    common = set.intersection(*parts)
    return tuple(sorted(common, key=lambda c: c.label))


def _is_base_point_free(
    report: CanonicalReport, fixed: tuple[NamedCurve, ...], inc: IncidenceSpec
) -> bool:
    """Combinatorial base-point test for the moving part, generic-position model.

    After removing the fixed part, a base point needs either a curve shared by
    several generators that still meets the remaining ones, or a declared
    point carrying a curve from every generator; undeclared crossings involve
    only two curves and cannot lie on all supports otherwise.
    """
    supports = {
        chi: [c for c in gen.branch_part if c not in fixed] for chi, gen in report.generators.items()
    }
    chis = list(supports)
    for chi in chis:
        for curve in supports[chi]:
            containing = [c2 for c2 in chis if any(x.label == curve.label for x in supports[c2])]
            if len(containing) < 2:
                continue
            for other in chis:
                if other in containing:
                    continue
                if any(curve.cls.dot(x.cls) > 0 for x in supports[other]):
                    return False
    for point in inc.points:
        incident = set(point.mults)
        if all(any(c.label in incident for c in supports[chi]) for chi in chis):
            return False
    return True


def canonical_degree(data: BuildingData, inc: IncidenceSpec = EMPTY_INCIDENCES) -> CanonicalReport:
    """Complete canonical-map analysis: fixed part, moving part, degree.

    Requires p_g = 3 (plane canonical image).  The degree is M^2 when |M| is
    base point free and M^2 > 0; otherwise it is left undetermined and the
    report's flags say why.
    """
    report = generator_set(data)
    if report.pg != 3:
        raise UnsupportedCanonicalData(f"degree analysis needs p_g = 3, got p_g = {report.pg}")
    fixed = fixed_part(report)
    fixed_sum = zero_class(data.ctx.k)
    for curve in fixed:
        fixed_sum = fixed_sum + curve.cls
    moving = canonical_x(data) - reduced_pullback(fixed_sum)
    m2 = half_pullback_pairing(data, moving, moving)
    bpf = _is_base_point_free(report, fixed, inc)
    composed = m2 == 0
    degree = m2 if (bpf and m2 > 0) else None
    return replace(
        report,
        fixed_part=fixed,
        M2=m2,
        bpf=bpf,
        composed_with_pencil=composed,
        degree=degree,
    )


def factors_through_quotient(data: BuildingData, H: Subgroup) -> bool:
    """True iff the canonical map factors through X -> X/H.

    H acts trivially on H^0(K_X) exactly when every character outside the
    annihilator of H contributes no canonical sections.
    """
    ctx = data.ctx
    K = canonical_class(ctx)
    allowed = perp(H)
    return all(
        h0(ctx, K + data.L[chi]) == 0 for chi in nontrivial_characters(N) if chi not in allowed
    )


class GenericityViolation(ValueError):
    """A fiber-genus computation left the generic-position model."""


def fiber_genus(data: BuildingData, p: DivClass) -> tuple[int, int]:
    """Connected components and genus of the pullback of a pencil fiber.

    p must be a pencil class (p^2 = 0, h^0 = 2).  The fiber over a general
    member is a degree-8 cover of P^1 whose monodromy group is generated by
    the sigma of the branch slots actually meeting the member, so the number
    of components is the index of that subgroup.  Riemann-Hurwitz over P^1
    gives the total 2g - 2; components share it equally.
    """
    ctx = data.ctx
    if p.dot(p) != 0 or h0(ctx, p) != 2:
        raise ValueError(f"{p} is not a pencil class (need p^2 = 0 and h^0 = 2)")
    meeting: list[GroupElement] = []
    for sigma, curve in data.curves():
        n = curve.cls.dot(p)
        if n < 0:
            raise GenericityViolation(f"{curve.label} pairs negatively with the pencil class")
        if n > 0 and sigma not in meeting:
            meeting.append(sigma)
    H = Subgroup.generated(meeting, n=N)
    components = H.index()
    K = canonical_class(ctx)
    total = 8 * K.dot(p) + 4 * data.total_branch_class().dot(p)
    if total % (2 * components):
        raise GenericityViolation(
            f"total 2g-2 = {total} does not split over {components} components"
        )
    return components, 1 + total // (2 * components)
