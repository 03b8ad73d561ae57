"""The group (Z/2)^n, its characters, subgroups and automorphisms.

Group elements and characters are both stored as bit vectors; a character
takes the value (-1)^<chi, sigma> on a group element, so all values live in
{+1, -1} as integers and no complex arithmetic ever appears.  n = 3 is the
case of interest (degree-8 covers), but nothing below assumes it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

Bits = tuple[int, ...]


def _parse_bits(value) -> Bits:
    if isinstance(value, str):
        return tuple(int(c) for c in value)
    return tuple(int(b) % 2 for b in value)


@dataclass(frozen=True, order=True)
class GroupElement:
    bits: Bits

    @classmethod
    def of(cls, value) -> "GroupElement":
        return cls(_parse_bits(value))

    @property
    def n(self) -> int:
        return len(self.bits)

    def is_zero(self) -> bool:
        return not any(self.bits)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if self.n != other.n:
            raise ValueError("group elements of different rank")
        return GroupElement(tuple((a + b) % 2 for a, b in zip(self.bits, other.bits)))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True, order=True)
class Character:
    bits: Bits

    @classmethod
    def of(cls, value) -> "Character":
        return cls(_parse_bits(value))

    @property
    def n(self) -> int:
        return len(self.bits)

    def is_trivial(self) -> bool:
        return not any(self.bits)

    def __mul__(self, other: "Character") -> "Character":
        if self.n != other.n:
            raise ValueError("characters of different rank")
        return Character(tuple((a + b) % 2 for a, b in zip(self.bits, other.bits)))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def chi_value(chi: Character, sigma: GroupElement) -> int:
    """chi(sigma) = (-1)^(sum chi_i * sigma_i), in {+1, -1}."""
    if chi.n != sigma.n:
        raise ValueError(f"character rank {chi.n} != element rank {sigma.n}")
    return -1 if sum(a * b for a, b in zip(chi.bits, sigma.bits)) % 2 else 1


@lru_cache(maxsize=None)
def group_elements(n: int) -> tuple[GroupElement, ...]:
    return tuple(GroupElement(bits) for bits in itertools.product((0, 1), repeat=n))


def nontrivial_elements(n: int) -> tuple[GroupElement, ...]:
    return tuple(s for s in group_elements(n) if not s.is_zero())


@lru_cache(maxsize=None)
def characters(n: int) -> tuple[Character, ...]:
    return tuple(Character(bits) for bits in itertools.product((0, 1), repeat=n))


def nontrivial_characters(n: int) -> tuple[Character, ...]:
    return tuple(c for c in characters(n) if not c.is_trivial())


def negative_set(chi: Character) -> frozenset[GroupElement]:
    """The 2^(n-1) group elements on which a nontrivial character is -1."""
    if chi.is_trivial():
        raise ValueError("the trivial character is never -1")
    return frozenset(s for s in group_elements(chi.n) if chi_value(chi, s) == -1)


@dataclass(frozen=True)
class Subgroup:
    generators: tuple[GroupElement, ...]
    elements: frozenset[GroupElement]

    @classmethod
    def generated(cls, gens, n: int | None = None) -> "Subgroup":
        gens = tuple(g if isinstance(g, GroupElement) else GroupElement.of(g) for g in gens)
        if n is None:
            if not gens:
                raise ValueError("rank n is required for the trivial subgroup")
            n = gens[0].n
        elems = {GroupElement((0,) * n)}
        frontier = list(elems)
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = cur + g
                if nxt not in elems:
                    elems.add(nxt)
                    frontier.append(nxt)
        return cls(generators=gens, elements=frozenset(elems))

    @property
    def n(self) -> int:
        return next(iter(self.elements)).n

    def order(self) -> int:
        return len(self.elements)

    def index(self) -> int:
        return 2 ** self.n // self.order()


def perp(H: Subgroup) -> frozenset[Character]:
    """Characters trivial on H; a subgroup of the dual of order 2^n / |H|."""
    return frozenset(c for c in characters(H.n) if all(chi_value(c, h) == 1 for h in H.elements))


@lru_cache(maxsize=None)
def all_subgroups(n: int) -> tuple[Subgroup, ...]:
    """Every subgroup of (Z/2)^n, by closing each subset of nonzero elements."""
    seen: dict[frozenset, Subgroup] = {}
    for size in range(n + 1):
        for gens in itertools.combinations(nontrivial_elements(n), size):
            H = Subgroup.generated(gens, n=n)
            seen.setdefault(H.elements, H)
    return tuple(seen.values())


Matrix = tuple[Bits, ...]


def apply_matrix(M: Matrix, sigma: GroupElement) -> GroupElement:
    return GroupElement(tuple(sum(r * b for r, b in zip(row, sigma.bits)) % 2 for row in M))


def apply_matrix_to_character(M: Matrix, chi: Character) -> Character:
    return Character(tuple(sum(r * b for r, b in zip(row, chi.bits)) % 2 for row in M))


def matrix_transpose(M: Matrix) -> Matrix:
    return tuple(zip(*M))


def matrix_inverse(M: Matrix) -> Matrix:
    """Inverse over F_2 by Gauss-Jordan; raises if M is singular."""
    n = len(M)
    work = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular over F_2")
        work[col], work[piv] = work[piv], work[col]
        for r in range(n):
            if r != col and work[r][col]:
                work[r] = [(a + b) % 2 for a, b in zip(work[r], work[col])]
    return tuple(tuple(row[n:]) for row in work)


def _is_invertible(M: Matrix) -> bool:
    try:
        matrix_inverse(M)
        return True
    except ValueError:
        return False


@lru_cache(maxsize=None)
def automorphisms(n: int) -> tuple[Matrix, ...]:
    """All of GL(n, F_2) as bit matrices (168 elements for n = 3)."""
    if n > 3:
        raise ValueError("automorphism enumeration is only needed for n <= 3")
    rows = list(itertools.product((0, 1), repeat=n))
    return tuple(M for M in itertools.product(rows, repeat=n) if _is_invertible(M))
