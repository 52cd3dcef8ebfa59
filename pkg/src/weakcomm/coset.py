"""Todd-Coxeter coset enumeration over finite presentations.

The default strategy is HLT (relator scanning with fill), with lookahead
and table compaction when space runs low; a Felsch-style deduction-stacking
strategy is available behind a flag.  Both are deterministic: no hashing
or randomized iteration order feeds the enumeration, so coset counts and
completed tables are reproducible bit for bit.

Letters are column indices: generator ``i`` occupies column ``2*i`` and its
inverse column ``2*i + 1``, so ``col ^ 1`` inverts a letter.

Completed tables are canonicalized (dead cosets dropped, live cosets
renumbered breadth-first) and verified against the relators before being
returned, which makes the enumeration core self-checking.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import CosetCapExceeded, IncompleteTable, InvariantViolation
from .words import Presentation, Word

DEFAULT_COSET_CAP = 5_000_000

# compaction kicks in once this many rows exist and half of them are dead
_COMPACT_MIN_ROWS = 16_384
_FELSCH_MAX_STACK = 256
# pure-python scan work (letters walked) after which the compiled core takes over
_AUTO_SWITCH_WORK = 1_500_000


def word_to_cols(w: Word) -> list[int]:
    return [2 * g + (0 if s > 0 else 1) for g, s in w.letters]


def prepare_relators(relators: Sequence[Word]) -> list[list[int]]:
    """Cyclically reduce, deduplicate (up to rotation and inversion), translate."""
    seen = set()
    out = []
    for r in relators:
        r = r.cyclic_reduction()
        if r.is_empty():
            continue
        k = r.cyclic_key()
        if k in seen:
            continue
        seen.add(k)
        out.append(word_to_cols(r))
    return out


class _NeedSpace(Exception):
    def __init__(self, want_lookahead: bool):
        self.want_lookahead = want_lookahead


class _WorkBudgetExceeded(Exception):
    """The pure-Python path has done enough work to justify the compiled one."""


class CosetTable:
    """A completed, canonicalized coset table.

    ``cols`` is an int32 array of shape (cosets, 2 * generators); row ``a``,
    column ``2i`` holds the image of coset ``a`` under generator ``i`` and
    column ``2i + 1`` the image under its inverse.
    """

    def __init__(self, cols: np.ndarray, defined_total: int, high_water: int):
        self.cols = cols
        self.defined_total = defined_total
        self.high_water = high_water
        self.status = "complete"

    @property
    def n_cosets(self) -> int:
        return int(self.cols.shape[0])

    @property
    def n_generators(self) -> int:
        return int(self.cols.shape[1]) // 2

    def apply(self, coset: int, letters: Sequence[int]) -> int:
        c = coset
        for col in letters:
            c = int(self.cols[c, col])
        return c

    def verify(self, relator_cols, subgroup_cols) -> None:
        cols = self.cols
        n = self.n_cosets
        idx = np.arange(n)
        for c in range(cols.shape[1]):
            column = cols[:, c]
            if not np.array_equal(np.sort(column), idx):
                raise InvariantViolation(f"column {c} is not a permutation")
        for rel in relator_cols:
            v = idx
            for col in rel:
                v = cols[v, col]
            if not np.array_equal(v, idx):
                raise InvariantViolation("relator does not close on every coset")
        for wordcols in subgroup_cols:
            if self.apply(0, wordcols) != 0:
                raise InvariantViolation("subgroup word does not fix coset 0")


class _Enumerator:
    """Shared working state for both strategies (plain Python lists)."""

    def __init__(self, ncols: int, cap: int, work_budget: int | None = None):
        self.ncols = ncols
        self.cap = cap
        self.table: list[list[int]] = []
        self.p: list[int] = []
        self.dead = 0
        self.defined_total = 0
        self.high_water = 0
        self.deductions: list[tuple[int, int]] = []
        self.record_deductions = False
        self.alpha = 0
        self.subgroup_done = False
        self.work = 0
        self.work_budget = work_budget
        self._new_row()  # coset 0

    # -- basic bookkeeping --

    def live_count(self) -> int:
        return len(self.table) - self.dead

    def _new_row(self) -> int:
        if len(self.table) >= self.cap:
            raise _NeedSpace(want_lookahead=True)
        if (
            len(self.table) >= _COMPACT_MIN_ROWS
            and self.dead * 2 >= len(self.table)
        ):
            raise _NeedSpace(want_lookahead=False)
        beta = len(self.table)
        self.table.append([-1] * self.ncols)
        self.p.append(beta)
        self.defined_total += 1
        self.high_water = max(self.high_water, self.live_count())
        return beta

    def define(self, alpha: int, col: int) -> None:
        beta = self._new_row()
        self.table[alpha][col] = beta
        self.table[beta][col ^ 1] = alpha
        if self.record_deductions:
            self.deductions.append((alpha, col))

    def rep(self, k: int) -> int:
        p = self.p
        root = k
        while p[root] != root:
            root = p[root]
        while p[k] != root:
            p[k], k = root, p[k]
        return root

    def _merge(self, a: int, b: int, queue: list[int]) -> None:
        a, b = self.rep(a), self.rep(b)
        if a != b:
            mu, v = (a, b) if a < b else (b, a)
            self.p[v] = mu
            self.dead += 1
            queue.append(v)

    def coincidence(self, a: int, b: int) -> None:
        table = self.table
        queue: list[int] = []
        self._merge(a, b, queue)
        head = 0
        while head < len(queue):
            gamma = queue[head]
            head += 1
            for col in range(self.ncols):
                delta = table[gamma][col]
                if delta < 0:
                    continue
                table[delta][col ^ 1] = -1
                if self.record_deductions:
                    self.deductions.append((delta, col ^ 1))
                mu = self.rep(gamma)
                nu = self.rep(delta)
                if table[mu][col] >= 0:
                    self._merge(nu, table[mu][col], queue)
                elif table[nu][col ^ 1] >= 0:
                    self._merge(mu, table[nu][col ^ 1], queue)
                else:
                    table[mu][col] = nu
                    table[nu][col ^ 1] = mu

    def scan(self, alpha: int, word: list[int], fill: bool) -> None:
        self.work += len(word)
        if self.work_budget is not None and self.work > self.work_budget:
            raise _WorkBudgetExceeded
        table = self.table
        f = alpha
        i = 0
        b = alpha
        j = len(word) - 1
        while True:
            while i <= j and table[f][word[i]] >= 0:
                f = table[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and table[b][word[j] ^ 1] >= 0:
                b = table[b][word[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if j == i:
                table[f][word[i]] = b
                table[b][word[i] ^ 1] = f
                if self.record_deductions:
                    self.deductions.append((f, word[i]))
                return
            if not fill:
                return
            self.define(f, word[i])

    # -- space recovery --

    def lookahead(self, relators: list[list[int]]) -> None:
        """Scan every relator at every live coset without defining new ones."""
        for beta in range(len(self.table)):
            if self.p[beta] != beta:
                continue
            for w in relators:
                self.scan(beta, w, fill=False)
                if self.p[beta] != beta:
                    break

    def compress(self, cursor: int) -> int:
        """Drop dead cosets, renumber live ones in order; returns new cursor."""
        table = self.table
        new_of = [-1] * len(table)
        nxt = 0
        for i in range(len(table)):
            if self.p[i] == i:
                new_of[i] = nxt
                nxt += 1
        new_cursor = sum(1 for i in range(min(cursor, len(table))) if self.p[i] == i)
        new_table = []
        for i in range(len(table)):
            if new_of[i] < 0:
                continue
            row = table[i]
            new_row = [-1] * self.ncols
            for col in range(self.ncols):
                t = row[col]
                if t >= 0:
                    new_row[col] = new_of[self.rep(t)]
            new_table.append(new_row)
        self.table = new_table
        self.p = list(range(nxt))
        self.dead = 0
        self.deductions.clear()
        return new_cursor


def _run_hlt(enum: _Enumerator, relators, subgroup_words, cap) -> None:
    while True:
        try:
            if not enum.subgroup_done:
                for w in subgroup_words:
                    enum.scan(0, w, fill=True)
                enum.subgroup_done = True
            while enum.alpha < len(enum.table):
                alpha = enum.alpha
                if enum.p[alpha] == alpha:
                    for w in relators:
                        enum.scan(alpha, w, fill=True)
                        if enum.p[alpha] != alpha:
                            break
                    if enum.p[alpha] == alpha:
                        for col in range(enum.ncols):
                            if enum.table[alpha][col] < 0:
                                enum.define(alpha, col)
                enum.alpha += 1
            return
        except _NeedSpace as need:
            if need.want_lookahead:
                enum.lookahead(relators)
            enum.alpha = enum.compress(enum.alpha)
            if need.want_lookahead and len(enum.table) > 0.95 * cap:
                raise CosetCapExceeded(
                    cap, enum.high_water, enum.defined_total
                ) from None


def _conjugate_classes(relators: list[list[int]], ncols: int) -> list[list[list[int]]]:
    """All cyclic rotations of each relator and its inverse, grouped by the
    first letter; used by the Felsch deduction scan."""
    everything = set()
    for rel in relators:
        inv = [c ^ 1 for c in reversed(rel)]
        for base in (rel, inv):
            for i in range(len(base)):
                everything.add(tuple(base[i:] + base[:i]))
    grouped: list[list[list[int]]] = [[] for _ in range(ncols)]
    for w in sorted(everything):
        grouped[w[0]].append(list(w))
    return grouped


def _run_felsch(enum: _Enumerator, relators, subgroup_words, cap) -> None:
    grouped = _conjugate_classes(relators, enum.ncols)
    enum.record_deductions = True

    def process_deductions():
        table = enum.table
        while enum.deductions:
            if len(enum.deductions) > _FELSCH_MAX_STACK:
                enum.lookahead(relators)
                enum.deductions.clear()
                return
            alpha, col = enum.deductions.pop()
            if enum.p[alpha] == alpha:
                for w in grouped[col]:
                    enum.scan(alpha, w, fill=False)
                    if enum.p[alpha] != alpha:
                        break
            beta = table[alpha][col] if enum.p[alpha] == alpha else -1
            if beta >= 0 and enum.p[beta] == beta:
                for w in grouped[col ^ 1]:
                    enum.scan(beta, w, fill=False)
                    if enum.p[beta] != beta:
                        break

    while True:
        try:
            if not enum.subgroup_done:
                for w in subgroup_words:
                    enum.scan(0, w, fill=True)
                    process_deductions()
                enum.subgroup_done = True
            while enum.alpha < len(enum.table):
                alpha = enum.alpha
                if enum.p[alpha] == alpha:
                    for col in range(enum.ncols):
                        if enum.p[alpha] != alpha:
                            break
                        if enum.table[alpha][col] < 0:
                            enum.define(alpha, col)
                            process_deductions()
                enum.alpha += 1
            return
        except _NeedSpace as need:
            # pending deductions are lost below, so a full lookahead is
            # required either way to keep every relator consequence applied
            enum.lookahead(relators)
            enum.deductions.clear()
            enum.alpha = enum.compress(enum.alpha)
            if need.want_lookahead and len(enum.table) > 0.95 * cap:
                raise CosetCapExceeded(
                    cap, enum.high_water, enum.defined_total
                ) from None


def _canonical(cols: np.ndarray) -> np.ndarray:
    """Renumber cosets breadth-first from 0 (row-major first occurrence)."""
    n, ncols = cols.shape
    new = np.full(n, -1, dtype=np.int64)
    new[0] = 0
    assigned = 1
    frontier = np.array([0], dtype=np.int64)
    while assigned < n:
        block = cols[frontier].reshape(-1)
        fresh = block[new[block] < 0]
        if fresh.size == 0:
            raise InvariantViolation("coset graph is not connected")
        uniq, first_pos = np.unique(fresh, return_index=True)
        labels = uniq[np.argsort(first_pos, kind="stable")]
        new[labels] = assigned + np.arange(len(labels))
        assigned += len(labels)
        frontier = labels
    old_of = np.empty(n, dtype=np.int64)
    old_of[new] = np.arange(n)
    return new[cols[old_of]].astype(np.int32)


def finish_table(
    table_rows, p, ncols, defined_total, high_water, relator_cols, subgroup_cols
) -> CosetTable:
    """Compress, canonicalize, and verify a completed enumeration."""
    raw = np.asarray(table_rows, dtype=np.int64).reshape(len(p), ncols)
    p_arr = np.asarray(p, dtype=np.int64)
    while True:
        q = p_arr[p_arr]
        if np.array_equal(q, p_arr):
            break
        p_arr = q
    live = np.nonzero(p_arr == np.arange(len(p_arr)))[0]
    new_of = np.full(len(p_arr), -1, dtype=np.int64)
    new_of[live] = np.arange(len(live))
    sub = raw[live]
    if (sub < 0).any():
        raise IncompleteTable("table has undefined entries")
    cols = new_of[p_arr[sub]].astype(np.int32)
    cols = _canonical(cols)
    result = CosetTable(cols, defined_total, high_water)
    result.verify(relator_cols, subgroup_cols)
    return result


def todd_coxeter(
    presentation: Presentation,
    subgroup_words: Sequence[Word] = (),
    max_cosets: int = DEFAULT_COSET_CAP,
    strategy: str = "hlt",
    use_fast: bool | None = None,
) -> CosetTable:
    """Enumerate cosets of the subgroup generated by ``subgroup_words``.

    Returns the completed table; the number of cosets is the subgroup's
    index.  Raises ``CosetCapExceeded`` if more than ``max_cosets`` rows
    would be needed even after lookahead and compaction.

    ``use_fast`` selects the compiled HLT core (None = automatic: used when
    available and the strategy is HLT).
    """
    if max_cosets < 1:
        raise ValueError("max_cosets must be at least 1")
    if strategy not in ("hlt", "felsch"):
        raise ValueError(f"unknown strategy {strategy!r}")
    ncols = 2 * presentation.rank
    relators = prepare_relators(presentation.relators)
    sub = [word_to_cols(w.cyclic_reduction()) for w in subgroup_words]
    sub = [w for w in sub if w]

    def run_fast():
        from . import _fastenum

        if not _fastenum.available():
            return None
        if strategy == "felsch":
            grouped = _conjugate_classes(relators, ncols)
            rows, p, defined_total, high_water = _fastenum.run_felsch(
                ncols, relators, sub, max_cosets, grouped
            )
        else:
            rows, p, defined_total, high_water = _fastenum.run_hlt(
                ncols, relators, sub, max_cosets
            )
        return finish_table(rows, p, ncols, defined_total, high_water, relators, sub)

    if use_fast:
        result = run_fast()
        if result is None:
            raise RuntimeError("fast enumeration requested but numba is unavailable")
        return result

    # Start on the pure path and switch to the compiled core once the work
    # done shows this is a large enumeration.  Small jobs never pay the
    # compiled path's import cost, and both paths canonicalize to the same
    # table, so the switch is invisible in the results.
    budget = _AUTO_SWITCH_WORK if use_fast is None else None
    enum = _Enumerator(ncols, max_cosets, work_budget=budget)
    runner = _run_hlt if strategy == "hlt" else _run_felsch
    try:
        runner(enum, relators, sub, max_cosets)
    except _WorkBudgetExceeded:
        result = run_fast()
        if result is not None:
            return result
        enum.work_budget = None
        runner(enum, relators, sub, max_cosets)
    return finish_table(
        enum.table,
        enum.p,
        ncols,
        enum.defined_total,
        enum.high_water,
        relators,
        sub,
    )
