"""Exhaustive enumeration of building data over a pool of candidate curves.

Every curve of the pool is assigned to one of the seven branch slots or left
out.  An assignment extends to building data iff all seven doubled character
classes are 2-divisible, which over F_2 collapses to one tensor identity:

    sum over assigned curves of (class mod 2) (x) sigma  ==  0

in F_2^(1+k) (x) F_2^3.  The depth-first search tracks that tensor and prunes
a prefix as soon as its residue leaves the span reachable by the remaining
curves.  Survivors are filtered through validation, smoothness, the nef-and-
big test and the requested invariant targets, and deduplicated up to the 168
relabelings of the group (pencil members are anonymous, so only the class
multiset per slot matters).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .canonical import CanonicalReport, UnsupportedCanonicalData, canonical_degree, factors_through_quotient, generator_set
from .chargroup import (
    GroupElement,
    Subgroup,
    apply_matrix,
    automorphisms,
    chi_value,
    nontrivial_characters,
    nontrivial_elements,
)
from .cover import BuildingData, CoverInvariants, invariants, nef_big_check, smoothness_check, validate
from .picard import NamedCurve, SurfaceContext

N = 3
MAX_POOL = 24
_NONTRIVIAL_CHARACTERS = nontrivial_characters(N)

CanonicalKey = tuple


@dataclass(frozen=True)
class SearchTargets:
    pg: int | None = None
    q: int | None = None
    d: int | None = None
    KX2: int | None = None


@dataclass(frozen=True)
class SearchResult:
    data: BuildingData
    invariants: CoverInvariants
    report: CanonicalReport
    key: CanonicalKey


_SLOT_PERMS: list[tuple[int, ...]] | None = None


def _slot_permutations() -> list[tuple[int, ...]]:
    """For each automorphism, where each branch slot index is sent."""
    global _SLOT_PERMS
    if _SLOT_PERMS is None:
        slots = nontrivial_elements(N)
        index = {sigma: i for i, sigma in enumerate(slots)}
        _SLOT_PERMS = [
            tuple(index[apply_matrix(M, sigma)] for sigma in slots) for M in automorphisms(N)
        ]
    return _SLOT_PERMS


def canonical_form(data: BuildingData) -> CanonicalKey:
    """Dedup key: minimal slot-by-slot class multisets over all relabelings."""
    slots = nontrivial_elements(N)
    multisets = [tuple(sorted(c.cls.coeffs() for c in data.branch[sigma])) for sigma in slots]
    return (data.ctx.k, _min_permuted_key(multisets))


def _min_permuted_key(multisets: list[tuple]) -> tuple:
    best = None
    placed = [None] * len(multisets)
    for perm in _slot_permutations():
        for i, ms in enumerate(multisets):
            placed[perm[i]] = ms
        key = tuple(placed)
        if best is None or key < best:
            best = key
    return best


def canonical_candidate_filter(data: BuildingData) -> bool:
    """Pruning flag: does the canonical map factor through some Z/2 quotient?

    Vacuously true when p_g = 0.  This mirrors the quotient design pattern of
    the reference constructions and is a heuristic only, never a correctness
    gate.
    """
    if generator_set(data).pg == 0:
        return True
    return any(
        factors_through_quotient(data, Subgroup.generated([sigma]))
        for sigma in nontrivial_elements(N)
    )


def _mod2_vector(curve: NamedCurve) -> int:
    mask = 0
    for i, c in enumerate(curve.cls.coeffs()):
        if c % 2:
            mask |= 1 << i
    return mask


def _reduce(mask: int, basis: list[int]) -> int:
    for b in basis:
        mask = min(mask, mask ^ b)
    return mask


def _suffix_spans(vectors: list[int]) -> list[list[int]]:
    """Echelon basis of {vectors[i:]} for every suffix, innermost first."""
    spans: list[list[int]] = [[]]
    basis: list[int] = []
    for v in reversed(vectors):
        r = _reduce(v, basis)
        if r:
            basis = sorted(basis + [r], reverse=True)
        spans.append(list(basis))
    spans.reverse()
    return spans


def enumerate_covers(
    ctx: SurfaceContext,
    pool: Sequence[NamedCurve],
    targets: SearchTargets = SearchTargets(),
    max_per_slot: int = 3,
) -> Iterator[SearchResult]:
    """Stream all admissible building data over the pool, deduplicated.

    Emission order is deterministic for a fixed pool order.  An empty stream
    only certifies exhaustion of this pool, nothing more.
    """
    if len(pool) > MAX_POOL:
        raise ValueError(f"pool of {len(pool)} curves exceeds the supported size {MAX_POOL}")
    labels = [c.label for c in pool]
    if len(set(labels)) != len(labels):
        raise ValueError("pool curves must carry distinct labels")
    for curve in pool:
        if curve.cls.k != ctx.k:
            raise ValueError(f"pool curve {curve.label} does not live on this surface")

    slots = nontrivial_elements(N)
    vectors = [_mod2_vector(c) for c in pool]
    coeffs = [c.cls.coeffs() for c in pool]
    spans = _suffix_spans(vectors)
    n = len(pool)
    width = ctx.k + 1
    assignment: list[int | None] = [None] * n
    counts = [0] * len(slots)
    sums = [[0] * width for _ in slots]
    seen: set[CanonicalKey] = set()
    tensor = [0, 0, 0]
    leaf = _LeafFilter(ctx, slots, targets)
    # The span test is vacuous while the suffix still spans every prefix vector.
    vacuous = [
        all(_reduce(v, spans[depth]) == 0 for v in vectors[:depth]) for depth in range(n + 1)
    ]

    def feasible(depth: int) -> bool:
        if vacuous[depth]:
            return True
        basis = spans[depth]
        return all(_reduce(col, basis) == 0 for col in tensor)

    def walk(depth: int) -> Iterator[SearchResult]:
        if not feasible(depth):
            return
        if depth == n:
            if any(idx is not None for idx in assignment) and leaf.admissible(sums):
                result = _finish(ctx, pool, slots, assignment, targets, seen)
                if result is not None:
                    yield result
            return
        vec = vectors[depth]
        cs = coeffs[depth]
        assignment[depth] = None
        yield from walk(depth + 1)
        for idx, sigma in enumerate(slots):
            if counts[idx] == max_per_slot:
                continue
            assignment[depth] = idx
            counts[idx] += 1
            row = sums[idx]
            for j, c in enumerate(cs):
                row[j] += c
            for c in range(N):
                if sigma.bits[c]:
                    tensor[c] ^= vec
            yield from walk(depth + 1)
            for c in range(N):
                if sigma.bits[c]:
                    tensor[c] ^= vec
            for j, c in enumerate(cs):
                row[j] -= c
            counts[idx] -= 1
        assignment[depth] = None

    yield from walk(0)


class _LeafFilter:
    """Integer-only admissibility test run on every parity-passing assignment.

    Checks nontriviality of the character classes, the nef-and-big test for
    2K + B, and the invariant targets, all on plain coefficient tuples; the
    expensive object pipeline only runs on survivors.
    """

    def __init__(self, ctx: SurfaceContext, slots: Sequence[GroupElement], targets: SearchTargets):
        from .picard import canonical_class, h0

        self.ctx = ctx
        self.targets = targets
        self.width = ctx.k + 1
        self.neg_slots = [
            [i for i, sigma in enumerate(slots) if chi_value(chi, sigma) == -1]
            for chi in _NONTRIVIAL_CHARACTERS
        ]
        self.K = canonical_class(ctx).coeffs()
        self.neg_curves = [C.coeffs() for C in ctx.negative_curves]
        self._h0 = h0
        self._h0_cache: dict[tuple[int, ...], int] = {}

    def _dot(self, a, b) -> int:
        total = a[0] * b[0]
        for x, y in zip(a[1:], b[1:]):
            total -= x * y
        return total

    def _h0_of(self, coeffs: tuple[int, ...]) -> int:
        cached = self._h0_cache.get(coeffs)
        if cached is None:
            from .picard import DivClass

            cached = self._h0(self.ctx, DivClass(coeffs[0], coeffs[1:]))
            self._h0_cache[coeffs] = cached
        return cached

    def admissible(self, sums: list[list[int]]) -> bool:
        width = self.width
        K = self.K
        halves = []
        for neg in self.neg_slots:
            half = tuple(sum(sums[i][j] for i in neg) // 2 for j in range(width))
            if not any(half):
                return False
            halves.append(half)
        half2k = [2 * K[j] for j in range(width)]
        for row in sums:
            for j in range(width):
                half2k[j] += row[j]
        if self._dot(half2k, half2k) <= 0:
            return False
        for curve in self.neg_curves:
            if self._dot(half2k, curve) < 0:
                return False
        t = self.targets
        if t.KX2 is not None and 2 * self._dot(half2k, half2k) != t.KX2:
            return False
        if t.pg is None and t.q is None:
            return True
        pg = 0
        chi_o = 8
        for half in halves:
            shifted = tuple(h + k for h, k in zip(half, K))
            pg += self._h0_of(shifted)
            chi_o += self._dot(half, shifted) // 2
        if t.pg is not None and pg != t.pg:
            return False
        if t.q is not None and 1 + pg - chi_o != t.q:
            return False
        return True


def _finish(
    ctx: SurfaceContext,
    pool: Sequence[NamedCurve],
    slots: Sequence[GroupElement],
    assignment: list[int | None],
    targets: SearchTargets,
    seen: set[CanonicalKey],
) -> SearchResult | None:
    from .documents import solve_character_classes

    branch = {sigma: tuple(c for c, i in zip(pool, assignment) if i == idx) for idx, sigma in enumerate(slots)}
    # Every later check is relabeling-invariant, so one representative per
    # orbit decides for all 168 copies the enumeration will also reach.
    multisets = [tuple(sorted(c.cls.coeffs() for c in branch[sigma])) for sigma in slots]
    key: CanonicalKey = (ctx.k, _min_permuted_key(multisets))
    if key in seen:
        return None
    seen.add(key)
    L = solve_character_classes(ctx, branch)
    data = BuildingData(ctx=ctx, branch=branch, L=L)
    if not validate(data).ok:
        return None
    if not smoothness_check(data).smooth:
        return None
    assert nef_big_check(data)
    inv = invariants(data)
    if targets.pg is not None and inv.pg != targets.pg:
        return None
    if targets.q is not None and inv.q != targets.q:
        return None
    if targets.KX2 is not None and inv.KX2 != targets.KX2:
        return None
    try:
        report = canonical_degree(data)
    except UnsupportedCanonicalData:
        if targets.d is not None:
            return None
        report = generator_set(data)
    if targets.d is not None and report.degree != targets.d:
        return None
    return SearchResult(data=data, invariants=inv, report=report, key=key)
