"""Exact intersection theory on blow-ups of the projective plane.

Divisor classes on Bl_k P^2 live in the lattice Z*l + Z*e_1 + ... + Z*e_k with
intersection form diag(1, -1, ..., -1).  For k <= 4 general points the surface
is del Pezzo of degree 9 - k, the effective cone is spanned by a short known
list of classes, and both nefness and h^0 reduce to finite integer
computations: nefness is a pairing test against the extremal classes, and h^0
is fixed-part reduction followed by Riemann-Roch on the nef residue.

Everything here is pure integer arithmetic; the independent cross-check
``h0_oracle`` does exact linear algebra on an interpolation matrix built from
random integer points in general position.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

MAX_BLOWUPS = 4


class DimensionMismatch(ValueError):
    """Two divisor classes from surfaces with different numbers of blow-ups."""


class OracleUnstable(RuntimeError):
    """Retry signal: interpolation rank differed between two point samples."""


@dataclass(frozen=True)
class DivClass:
    """Integer class d*l - sum(m_i * e_i) on the blow-up of P^2 at k points."""

    d: int
    m: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.m)

    def coeffs(self) -> tuple[int, ...]:
        return (self.d, *self.m)

    def is_zero(self) -> bool:
        return self.d == 0 and all(c == 0 for c in self.m)

    def _check(self, other: "DivClass") -> None:
        if self.k != other.k:
            raise DimensionMismatch(f"classes live on different surfaces (k={self.k} vs k={other.k})")

    def __add__(self, other: "DivClass") -> "DivClass":
        self._check(other)
        return DivClass(self.d + other.d, tuple(a + b for a, b in zip(self.m, other.m)))

    def __sub__(self, other: "DivClass") -> "DivClass":
        self._check(other)
        return DivClass(self.d - other.d, tuple(a - b for a, b in zip(self.m, other.m)))

    def __neg__(self) -> "DivClass":
        return DivClass(-self.d, tuple(-a for a in self.m))

    def __mul__(self, n: int) -> "DivClass":
        return DivClass(self.d * n, tuple(a * n for a in self.m))

    __rmul__ = __mul__

    def dot(self, other: "DivClass") -> int:
        self._check(other)
        return self.d * other.d - sum(a * b for a, b in zip(self.m, other.m))

    def halve(self) -> "DivClass":
        """Exact division by 2; raises if some coefficient is odd."""
        if self.d % 2 or any(a % 2 for a in self.m):
            raise ValueError(f"class {self} is not 2-divisible")
        return DivClass(self.d // 2, tuple(a // 2 for a in self.m))

    def __str__(self) -> str:
        parts = []
        if self.d:
            parts.append(f"{self.d}l" if self.d != 1 else "l")
        for i, a in enumerate(self.m, start=1):
            if a:
                coeff = "" if abs(a) == 1 else str(abs(a))
                parts.append(("-" if a > 0 else "+") + f"{coeff}e{i}")
        if not parts:
            return "0"
        out = parts[0] + "".join(p if p[0] in "+-" else "+" + p for p in parts[1:])
        return out.lstrip("+")


def zero_class(k: int) -> DivClass:
    return DivClass(0, (0,) * k)


def line_class(k: int) -> DivClass:
    return DivClass(1, (0,) * k)


def exceptional_class(k: int, i: int) -> DivClass:
    """e_i, 1-indexed."""
    if not 1 <= i <= k:
        raise ValueError(f"e_{i} does not exist on a {k}-point blow-up")
    return DivClass(0, tuple(-1 if j == i else 0 for j in range(1, k + 1)))


def pairing(a: DivClass, b: DivClass) -> int:
    """Intersection number in the signature (1, -1, ..., -1) lattice."""
    return a.dot(b)


@dataclass(frozen=True)
class CurveTemplate:
    """A curated linear system whose generic member is smooth and irreducible."""

    name: str
    cls: DivClass
    h0: int

    @property
    def moving(self) -> bool:
        return self.h0 >= 2


@dataclass(frozen=True)
class NamedCurve:
    """A concrete irreducible curve: a member of a curated linear system.

    Distinct labels always denote distinct curves, even when the classes agree
    (e.g. two members of the pencil |f_1|); the member index records which
    member of a moving system the label refers to.
    """

    label: str
    cls: DivClass
    member: int = 1


@dataclass(frozen=True, eq=False)
class SurfaceContext:
    """Bl_k P^2 with k <= 4 general points: del Pezzo of degree 9 - k.

    ``negative_curves`` spans the effective cone; for k >= 2 these are the
    (-1)-curves e_i and h_ij, while for k = 1 the extremal set is {e_1, f_1}
    and for k = 0 it is {l}.  Contexts are canonical per k (``surface_context``
    caches them), so identity comparison and hashing are intended.
    """

    k: int
    canonical: DivClass
    negative_curves: tuple[DivClass, ...]
    templates: Mapping[str, CurveTemplate]

    def template_for_class(self, cls: DivClass) -> CurveTemplate | None:
        for tpl in self.templates.values():
            if tpl.cls == cls:
                return tpl
        return None


def canonical_class(ctx: SurfaceContext) -> DivClass:
    """K = -3l + e_1 + ... + e_k."""
    return ctx.canonical


def _template_names(k: int) -> list[str]:
    names = ["l"]
    names += [f"e_{i}" for i in range(1, k + 1)]
    names += [f"f_{i}" for i in range(1, k + 1)]
    names += [f"h_{i}{j}" for i, j in itertools.combinations(range(1, k + 1), 2)]
    names += [f"l+f_{i}" for i in range(1, k + 1)]
    if k >= 3:
        names += [f"f_{i}+f_{j}" for i, j in itertools.combinations(range(1, k + 1), 2)]
        for i in range(1, k + 1):
            for a, b in itertools.combinations(sorted(set(range(1, k + 1)) - {i}), 2):
                names.append(f"f_{i}+h_{a}{b}")
    return names


def template_class(k: int, name: str) -> DivClass:
    """Class of a curated template, e.g. "f_1+h_34" -> 2l - e_1 - e_3 - e_4."""
    total = zero_class(k)
    for part in name.split("+"):
        if part == "l":
            total = total + line_class(k)
        elif part.startswith("e_"):
            total = total + exceptional_class(k, int(part[2:]))
        elif part.startswith("f_"):
            i = int(part[2:])
            total = total + line_class(k) - exceptional_class(k, i)
        elif part.startswith("h_"):
            i, j = int(part[2]), int(part[3])
            total = total + line_class(k) - exceptional_class(k, i) - exceptional_class(k, j)
        else:
            raise ValueError(f"unknown template component {part!r}")
    return total


@lru_cache(maxsize=None)
def surface_context(k: int) -> SurfaceContext:
    if not 0 <= k <= MAX_BLOWUPS:
        raise ValueError(f"only 0 <= k <= {MAX_BLOWUPS} blown-up points are supported, got {k}")
    K = DivClass(-3, (-1,) * k)
    if k == 0:
        negative = (line_class(0),)
    elif k == 1:
        negative = (exceptional_class(1, 1), template_class(1, "f_1"))
    else:
        negative = tuple(
            [exceptional_class(k, i) for i in range(1, k + 1)]
            + [template_class(k, f"h_{i}{j}") for i, j in itertools.combinations(range(1, k + 1), 2)]
        )
    ctx = SurfaceContext(k=k, canonical=K, negative_curves=negative, templates={})
    templates = {}
    for name in _template_names(k):
        cls = template_class(k, name)
        templates[name] = CurveTemplate(name=name, cls=cls, h0=h0(ctx, cls))
    object.__setattr__(ctx, "templates", templates)
    return ctx


def is_nef(ctx: SurfaceContext, D: DivClass) -> bool:
    """True iff D pairs >= 0 with every extremal curve of the effective cone."""
    if D.k != ctx.k:
        raise DimensionMismatch(f"class has k={D.k}, surface has k={ctx.k}")
    return all(D.dot(C) >= 0 for C in ctx.negative_curves)


def h0(ctx: SurfaceContext, D: DivClass) -> int:
    """dim H^0 of the line bundle with class D, by fixed-part reduction.

    While some extremal curve C has D.C < 0 it lies in the base locus (or, if
    C moves, |D| is empty), so D can be replaced by D - C without changing
    h^0.  The reduction strictly decreases D.(-K), and a nonzero class with
    D.(-K) < 0 cannot be effective since -K is ample, so the loop terminates
    with either 0 or a nef residue, where h^0 = chi = 1 + D.(D - K)/2.
    """
    if D.k != ctx.k:
        raise DimensionMismatch(f"class has k={D.k}, surface has k={ctx.k}")
    return _h0_reduced(ctx, D)


@lru_cache(maxsize=None)
def _h0_reduced(ctx: SurfaceContext, D: DivClass) -> int:
    K = ctx.canonical
    cur = D
    while True:
        if cur.is_zero():
            return 1
        if cur.dot(-K) < 0:
            return 0
        fixed = next((C for C in ctx.negative_curves if cur.dot(C) < 0), None)
        if fixed is None:
            twice = cur.dot(cur - K)
            assert twice % 2 == 0, cur
            return 1 + twice // 2
        cur = cur - fixed


def _integer_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    if not rows:
        return 0
    m = [row[:] for row in rows]
    ncols = len(m[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, len(m)):
            for c in range(col + 1, ncols):
                m[r][c] = (m[r][c] * m[rank][col] - m[r][col] * m[rank][c]) // prev
            m[r][col] = 0
        prev = m[rank][col]
        rank += 1
        if rank == len(m):
            break
    return rank


def _collinear(p: tuple[int, int], q: tuple[int, int], r: tuple[int, int]) -> bool:
    return (q[0] - p[0]) * (r[1] - p[1]) == (q[1] - p[1]) * (r[0] - p[0])


def _general_points(rng: random.Random, k: int) -> list[tuple[int, int]]:
    """k distinct integer points, no three collinear.

    Any two such configurations are projectively equivalent for k <= 4, so the
    interpolation ranks below do not depend on the sample.
    """
    while True:
        pts = [(rng.randint(-40, 40), rng.randint(-40, 40)) for _ in range(k)]
        if len(set(pts)) != k:
            continue
        if any(_collinear(*tri) for tri in itertools.combinations(pts, 3)):
            continue
        return pts


def _interpolation_defect(d: int, points: list[tuple[int, int]], mults: Iterable[int]) -> int:
    """h^0 of degree-d plane curves with assigned point multiplicities."""
    if d < 0:
        return 0
    monomials = [(a, b) for a in range(d + 1) for b in range(d + 1 - a)]
    rows = []
    for (px, py), mult in zip(points, mults):
        for i in range(mult):
            for j in range(mult - i):
                row = []
                for a, b in monomials:
                    if a < i or b < j:
                        row.append(0)
                    else:
                        row.append(math.perm(a, i) * math.perm(b, j) * px ** (a - i) * py ** (b - j))
                rows.append(row)
    return len(monomials) - _integer_rank(rows)


def h0_oracle(ctx: SurfaceContext, D: DivClass, seed: int) -> int:
    """Independent h^0 via an exact interpolation-matrix rank.

    Sections of d*l - sum(m_i e_i) are degree-d plane curves vanishing to
    order m_i at the i-th point; negative m_i impose no condition.  Two point
    samples are drawn from the seed and must give the same rank, otherwise the
    configuration is flagged as degenerate.
    """
    if D.k != ctx.k:
        raise DimensionMismatch(f"class has k={D.k}, surface has k={ctx.k}")
    if D.d > 12:
        raise ValueError(f"oracle is restricted to degree <= 12, got {D.d}")
    rng = random.Random(seed)
    mults = [max(mi, 0) for mi in D.m]
    values = []
    for _ in range(2):
        pts = _general_points(rng, ctx.k)
        values.append(_interpolation_defect(D.d, pts, mults))
    if values[0] != values[1]:
        raise OracleUnstable(f"interpolation rank unstable for {D} (seed {seed})")
    return max(values[0], 0)
