"""Regular permutation representations backed by completed coset tables.

A coset table over the trivial subgroup is the Cayley graph of the group:
cosets are elements, columns are generator actions.  Elements are carried
around as plain coset indices; multiplication walks the second factor's
defining word through the table, so nothing of size ``degree`` is ever
materialized per element.  This keeps groups with a few million elements
(the regular representation of a large chi group) inside desk-scale memory.
"""

from __future__ import annotations

import math

import numpy as np

from .coset import CosetTable
from .errors import CapExceeded, DegreeMismatch, IncompleteTable, InvariantViolation
from .groups import Homomorphism, PermGroup
from .words import Presentation, Word

_FAST_EXPONENT_THRESHOLD = 50_000


class CayleyTable:
    """Canonical complete table plus the breadth-first spanning tree.

    Canonical numbering guarantees ``parent[c] < c``, so every coset has a
    defining word reachable by backtracking; ``letter[c]`` is the column
    that maps ``parent[c]`` to ``c``.
    """

    def __init__(self, cols: np.ndarray):
        n, ncols = cols.shape
        self.cols = cols
        self.n = int(n)
        self.ncols = int(ncols)
        flat = cols.reshape(-1)
        uniq, first_pos = np.unique(flat, return_index=True)
        if n > 1 and not np.array_equal(uniq, np.arange(n)):
            raise InvariantViolation("table columns do not cover every coset")
        self.parent = (first_pos // ncols).astype(np.int64)
        self.letter = (first_pos % ncols).astype(np.int64)
        if n > 1 and not (self.parent[1:] < np.arange(1, n)).all():
            raise InvariantViolation("table is not breadth-first numbered")

    @classmethod
    def from_coset_table(cls, table: CosetTable) -> "CayleyTable":
        return cls(table.cols)

    @property
    def n_generators(self) -> int:
        return self.ncols // 2

    def letters_of(self, point: int) -> list[int]:
        """Column letters of the defining word of ``point``, in application order."""
        out = []
        c = point
        while c != 0:
            out.append(int(self.letter[c]))
            c = int(self.parent[c])
        out.reverse()
        return out

    def apply_letters(self, start: int, letters) -> int:
        cols = self.cols
        c = start
        for col in letters:
            c = int(cols[c, col])
        return c

    def mul_points(self, a: int, b: int) -> int:
        return self.apply_letters(a, self.letters_of(b))

    def inv_point(self, b: int) -> int:
        cols = self.cols
        c = 0
        letters = self.letters_of(b)
        for col in reversed(letters):
            c = int(cols[c, col ^ 1])
        return c

    def order_of(self, point: int) -> int:
        if point == 0:
            return 1
        letters = self.letters_of(point)
        c = point
        k = 1
        while c != 0:
            c = self.apply_letters(c, letters)
            k += 1
        return k

    def depths(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        for c in range(1, self.n):
            out[c] = out[self.parent[c]] + 1
        return out


class CayleyElement:
    """A group element identified with its coset index in a regular action."""

    __slots__ = ("table", "point")

    def __init__(self, table: CayleyTable, point: int):
        self.table = table
        self.point = point

    @property
    def degree(self) -> int:
        return self.table.n

    def __mul__(self, other: "CayleyElement") -> "CayleyElement":
        if not isinstance(other, CayleyElement) or other.table is not self.table:
            raise DegreeMismatch("elements belong to different regular carriers")
        return CayleyElement(self.table, self.table.mul_points(self.point, other.point))

    def inverse(self) -> "CayleyElement":
        return CayleyElement(self.table, self.table.inv_point(self.point))

    def __pow__(self, k: int) -> "CayleyElement":
        if k < 0:
            return self.inverse() ** (-k)
        out = CayleyElement(self.table, 0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_identity(self) -> bool:
        return self.point == 0

    def identity_element(self) -> "CayleyElement":
        return CayleyElement(self.table, 0)

    def order(self) -> int:
        return self.table.order_of(self.point)

    def key(self):
        return self.point

    def to_permutation(self):
        from .permutation import Permutation

        letters = self.table.letters_of(self.point)
        cols = self.table.cols
        v = np.arange(self.table.n, dtype=np.int64)
        for col in letters:
            v = cols[v, col]
        return Permutation(int(x) for x in v)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CayleyElement)
            and other.table is self.table
            and other.point == self.point
        )

    def __hash__(self) -> int:
        return hash(self.point)

    def __repr__(self) -> str:
        return f"CayleyElement({self.point})"


class RegularGroup(PermGroup):
    """The full group carried by a regular (Cayley) table.

    Order and membership are known without enumeration; the element list
    is materialized lazily (idempotently) and only under the element cap.
    """

    def __init__(
        self,
        table: CayleyTable,
        *,
        element_cap=None,
        name=None,
        presentation: Presentation | None = None,
    ):
        from .groups import DEFAULT_ELEMENT_CAP

        self.table = table
        gens = [
            CayleyElement(table, int(table.cols[0, 2 * i]))
            for i in range(table.n_generators)
        ]
        super().__init__(
            gens,
            CayleyElement(table, 0),
            order=table.n,
            element_cap=element_cap or DEFAULT_ELEMENT_CAP,
            name=name,
            presentation=presentation,
        )

    def _materialize(self) -> None:
        if self.order > self.element_cap:
            raise CapExceeded(self.element_cap)
        self._elements = [CayleyElement(self.table, i) for i in range(self.order)]
        self._index = {i: i for i in range(self.order)}

    def __contains__(self, e) -> bool:
        return isinstance(e, CayleyElement) and e.table is self.table

    def index_of(self, e) -> int:
        if not isinstance(e, CayleyElement) or e.table is not self.table:
            raise KeyError(e)
        return e.point

    def element(self, point: int) -> CayleyElement:
        return CayleyElement(self.table, point)

    def letters_for(self, e) -> list[tuple[int, int]]:
        if isinstance(e, Word):
            return list(e.letters)
        return [
            (col // 2, 1 - 2 * (col & 1)) for col in self.table.letters_of(e.point)
        ]

    def sweep_images(self, images):
        """Evaluate a homomorphism at every element in one table sweep.

        Returns ``(kernel_elements, image_order)``.  Images are interned, so
        memory stays proportional to the image, not the domain.
        """
        table = self.table
        letter_img = []
        for i in range(table.n_generators):
            letter_img.append(images[i])
            letter_img.append(images[i].inverse())
        identity = letter_img[0].identity_element() if letter_img else None
        if identity is None:
            return [CayleyElement(table, 0)], 1
        distinct = [identity]
        intern = {identity.key(): 0}
        step_memo: dict[tuple[int, int], int] = {}
        out = np.zeros(table.n, dtype=np.int64)
        parent, letter = table.parent, table.letter
        for c in range(1, table.n):
            src = int(out[parent[c]])
            col = int(letter[c])
            pos = step_memo.get((src, col))
            if pos is None:
                img = distinct[src] * letter_img[col]
                k = img.key()
                pos = intern.get(k)
                if pos is None:
                    pos = len(distinct)
                    distinct.append(img)
                    intern[k] = pos
                step_memo[(src, col)] = pos
            out[c] = pos
        kernel_points = np.nonzero(out == 0)[0]
        kernel = [CayleyElement(table, int(pt)) for pt in kernel_points]
        return kernel, len(distinct)

    def exponent(self) -> int:
        if self.order > _FAST_EXPONENT_THRESHOLD:
            from . import _fastenum

            if _fastenum.available():
                return _fastenum.table_exponent(
                    self.table.cols, self.table.parent, self.table.letter
                )
        result = 1
        for point in range(self.order):
            result = math.lcm(result, self.table.order_of(point))
        return result

    def element_orders(self) -> list[int]:
        return [self.table.order_of(point) for point in range(self.order)]


def table_to_perm_group(
    table: CosetTable,
    presentation: Presentation | None = None,
    element_cap=None,
    name=None,
):
    """Turn a complete coset table into the permutation group of its columns.

    For an enumeration over the trivial subgroup this is the regular
    representation.  The returned homomorphism maps the presentation's
    (free) generators onto the column permutations; all relators evaluate
    to the identity, which ``CosetTable.verify`` already established.
    """
    if getattr(table, "status", None) != "complete":
        raise IncompleteTable("need a complete table")
    cay = CayleyTable.from_coset_table(table)
    group = RegularGroup(
        cay, element_cap=element_cap, name=name, presentation=presentation
    )
    hom = Homomorphism(group, list(group.generators), group, name="presentation-image")
    return group, hom


def regular_table_from_action(
    stage1: CosetTable,
    stabilizer_col_words: list[list[int]],
    expected_order: int,
) -> CosetTable | None:
    """Rebuild the full regular table of a group from a faithful coset action.

    ``stage1`` is the action on cosets of a subgroup whose elements are given
    by ``stabilizer_col_words`` (column-letter words, identity included), and
    ``expected_order`` is the group order (coset count times subgroup order,
    which the caller must know to be exact).

    The subgroup is the stabilizer of coset 0, so the action is faithful
    exactly when no nonidentity subgroup element acts trivially; that is
    checked outright.  Elements of the group are then keyed by their images
    on a small separating base and closed breadth-first under the generator
    columns.  Discovering exactly ``expected_order`` distinct keys proves the
    result is the regular representation: a transitive action of the group
    on as many points as it has elements.

    Returns None when the action is unfaithful or no compact base exists;
    callers fall back to a direct enumeration.
    """
    cols1 = stage1.cols
    m = stage1.n_cosets
    if expected_order != m * len(stabilizer_col_words):
        raise InvariantViolation("expected order does not tile the coset count")

    idx = np.arange(m, dtype=np.int64)
    stab = np.empty((len(stabilizer_col_words), m), dtype=np.int32)
    for i, word in enumerate(stabilizer_col_words):
        v = idx
        for col in word:
            v = cols1[v, col]
        stab[i] = v
    fixes_zero = stab[:, 0] == 0
    if not fixes_zero.all():
        raise InvariantViolation("stabilizer word moves the base coset")
    trivial = (stab == idx[None, :]).all(axis=1)
    if trivial.sum() != 1:
        return None  # unfaithful action

    # greedy separating base: point 0 plus points cutting the fixer set down
    base = [0]
    fixers = stab
    while fixers.shape[0] > 1:
        fix_counts = (fixers == idx[None, :]).sum(axis=0)
        b = int(np.argmin(fix_counts))
        if int(fix_counts[b]) == fixers.shape[0]:
            return None  # no point separates anything further
        base.append(b)
        fixers = fixers[fixers[:, b] == b]
    bits = max(1, int(m - 1).bit_length())
    if bits * len(base) > 62:
        return None

    from . import _fastenum

    result = _fastenum.action_closure(cols1, base, bits, expected_order)
    if result is None:
        n, out = _pure_action_closure(cols1, base, expected_order)
    else:
        n, out = result
    if n == -1:
        raise InvariantViolation("action closure found too many elements")
    if n != expected_order:
        return None  # base failed to separate; caller falls back
    return CosetTable(out, defined_total=n, high_water=n)


def _pure_action_closure(cols1, base, expected):
    t = len(base)
    imgs = [tuple(base)]
    index = {tuple(base): 0}
    out = np.empty((expected, cols1.shape[1]), dtype=np.int32)
    e = 0
    while e < len(imgs):
        cur = imgs[e]
        for col in range(cols1.shape[1]):
            key = tuple(int(cols1[cur[i], col]) for i in range(t))
            pos = index.get(key)
            if pos is None:
                if len(imgs) >= expected:
                    return -1, out
                pos = len(imgs)
                index[key] = pos
                imgs.append(key)
            out[e, col] = pos
        e += 1
    return len(imgs), out


def element_words(G: PermGroup) -> dict:
    """One word per element, keyed by the element, shortest found breadth-first."""
    if isinstance(G, RegularGroup):
        return {
            CayleyElement(G.table, point): Word(
                G.letters_for(CayleyElement(G.table, point))
            )
            for point in range(G.order)
        }
    word_map = G.word_map()
    return {e: Word(word_map[e.key()]) for e in G.elements}
