"""Permutations on {0, ..., degree-1} with exact integer arithmetic.

Composition convention: ``p * q`` applies ``p`` first, then ``q``, i.e.
``(p * q)(i) == q(p(i))``.  Every function in this package follows that
convention.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from .errors import DegreeMismatch


class Permutation:
    """An immutable bijection of {0, ..., degree-1}, stored as an image tuple."""

    __slots__ = ("images", "_hash")

    def __init__(self, images: Sequence[int]):
        images = tuple(images)
        n = len(images)
        seen = [False] * n
        for i in images:
            if not isinstance(i, int) or not 0 <= i < n or seen[i]:
                raise ValueError(f"not a permutation of 0..{n - 1}: {images!r}")
            seen[i] = True
        self.images = images
        self._hash = hash(images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, degree: int, *cycles: Iterable[int]) -> "Permutation":
        """Build from disjoint cycles; points absent from every cycle are fixed."""
        images = list(range(degree))
        for cycle in cycles:
            cycle = list(cycle)
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                images[a] = b
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if not isinstance(other, Permutation):
            return NotImplemented
        if other.degree != self.degree:
            raise DegreeMismatch(
                f"cannot compose degree {self.degree} with degree {other.degree}"
            )
        oi = other.images
        return Permutation([oi[i] for i in self.images])

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def __pow__(self, n: int) -> "Permutation":
        if n < 0:
            return self.inverse() ** (-n)
        result = Permutation.identity(self.degree)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self, by: "Permutation") -> "Permutation":
        """Return ``by^-1 * self * by``."""
        return by.inverse() * self * by

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def identity_element(self) -> "Permutation":
        return Permutation.identity(self.degree)

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles()))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each rotated to start at its minimum."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start] or self.images[start] == start:
                seen[start] = True
                continue
            cycle = [start]
            seen[start] = True
            j = self.images[start]
            while j != start:
                cycle.append(j)
                seen[j] = True
                j = self.images[j]
            out.append(tuple(cycle))
        return out

    def key(self):
        """Hashable canonical form, used for interning across element kinds."""
        return self.images

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return f"Permutation.identity({self.degree})"
        body = "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)
        return f"Permutation[{self.degree}: {body}]"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Compose two permutations, applying ``p`` first."""
    return p * q


def commutator(a, b):
    """Left-normed commutator ``a^-1 b^-1 a b`` of two group elements."""
    return a.inverse() * b.inverse() * a * b


def conjugate(a, by):
    """Return ``by^-1 a by``."""
    return by.inverse() * a * by
