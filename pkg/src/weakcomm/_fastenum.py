"""Compiled coset-enumeration cores (numba), with graceful absence.

Same algorithms as the pure-Python enumerator in ``coset.py`` (HLT with
lookahead and compaction, and Felsch-style deduction stacking), operating
on flat int32 arrays.  Both paths canonicalize their tables, so results
are interchangeable; the compiled ones exist purely for throughput on
enumerations with millions of cosets.

numba is imported lazily so that small enumerations, which never come
here, do not pay its import and compilation cost.
"""

from __future__ import annotations

import numpy as np

from .errors import CosetCapExceeded

_COMPACT_MIN_ROWS = 16_384
_MAX_STACK = 256
_DED_BUFFER = 4096

# state vector slots
_ALPHA, _NROWS, _DEAD, _DEFINED, _HIGH, _SUBDONE, _DEDN, _DEDOVF = range(8)

_compiled = None
_import_failed = False


def available() -> bool:
    return _get_compiled() is not None


def _get_compiled():
    global _compiled, _import_failed
    if _compiled is None and not _import_failed:
        try:
            _compiled = _build()
        except ImportError:
            _import_failed = True
    return _compiled


def _build():
    from numba import njit

    @njit(cache=True)
    def rep(p, k):
        root = k
        while p[root] != root:
            root = p[root]
        while p[k] != root:
            nxt = p[k]
            p[k] = root
            k = nxt
        return root

    @njit(cache=True)
    def ded_push(ded, state, a, col):
        n = state[_DEDN]
        if n < ded.shape[0]:
            ded[n, 0] = a
            ded[n, 1] = col
            state[_DEDN] = n + 1
        else:
            state[_DEDOVF] = 1

    @njit(cache=True)
    def merge(p, queue, qtail, a, b, state):
        a = rep(p, a)
        b = rep(p, b)
        if a == b:
            return qtail
        if a > b:
            a, b = b, a
        p[b] = a
        state[_DEAD] += 1
        queue[qtail] = b
        return qtail + 1

    @njit(cache=True)
    def coincidence(table, p, queue, a, b, state, ded, record):
        ncols = table.shape[1]
        qhead = 0
        qtail = merge(p, queue, 0, a, b, state)
        while qhead < qtail:
            gamma = queue[qhead]
            qhead += 1
            for col in range(ncols):
                delta = table[gamma, col]
                if delta < 0:
                    continue
                table[delta, col ^ 1] = -1
                if record == 1:
                    ded_push(ded, state, delta, col ^ 1)
                mu = rep(p, gamma)
                nu = rep(p, delta)
                if table[mu, col] >= 0:
                    qtail = merge(p, queue, qtail, nu, table[mu, col], state)
                elif table[nu, col ^ 1] >= 0:
                    qtail = merge(p, queue, qtail, mu, table[nu, col ^ 1], state)
                else:
                    table[mu, col] = nu
                    table[nu, col ^ 1] = mu

    @njit(cache=True)
    def define(table, p, alpha, col, state, alloc, ded, record):
        # returns the new coset, or -1 when out of space
        nrows = state[_NROWS]
        if nrows >= alloc:
            return -1
        if nrows >= _COMPACT_MIN_ROWS and 2 * state[_DEAD] >= nrows:
            return -1
        beta = nrows
        state[_NROWS] = nrows + 1
        p[beta] = beta
        table[alpha, col] = beta
        table[beta, col ^ 1] = alpha
        state[_DEFINED] += 1
        if record == 1:
            ded_push(ded, state, alpha, col)
        live = state[_NROWS] - state[_DEAD]
        if live > state[_HIGH]:
            state[_HIGH] = live
        return beta

    @njit(cache=True)
    def scan(table, p, queue, alpha, word, fill, state, alloc, ded, record):
        # returns 0: done with this word, 1: out of space
        f = alpha
        i = 0
        b = alpha
        j = word.shape[0] - 1
        while True:
            while i <= j and table[f, word[i]] >= 0:
                f = table[f, word[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(table, p, queue, f, b, state, ded, record)
                return 0
            while j >= i and table[b, word[j] ^ 1] >= 0:
                b = table[b, word[j] ^ 1]
                j -= 1
            if j < i:
                coincidence(table, p, queue, f, b, state, ded, record)
                return 0
            if j == i:
                table[f, word[i]] = b
                table[b, word[i] ^ 1] = f
                if record == 1:
                    ded_push(ded, state, f, word[i])
                return 0
            if fill == 0:
                return 0
            if define(table, p, f, word[i], state, alloc, ded, record) < 0:
                return 1

    @njit(cache=True)
    def lookahead(table, p, queue, rel_flat, rel_off, state, alloc, ded):
        nrel = rel_off.shape[0] - 1
        for beta in range(state[_NROWS]):
            if p[beta] != beta:
                continue
            for w in range(nrel):
                word = rel_flat[rel_off[w] : rel_off[w + 1]]
                scan(table, p, queue, beta, word, 0, state, alloc, ded, 0)
                if p[beta] != beta:
                    break

    @njit(cache=True)
    def hlt_step(
        table, p, queue, rel_flat, rel_off, sub_flat, sub_off, state, alloc, ded
    ):
        # returns 0: complete, 1: out of space
        ncols = table.shape[1]
        nrel = rel_off.shape[0] - 1
        if state[_SUBDONE] == 0:
            nsub = sub_off.shape[0] - 1
            for w in range(nsub):
                word = sub_flat[sub_off[w] : sub_off[w + 1]]
                if scan(table, p, queue, 0, word, 1, state, alloc, ded, 0) == 1:
                    return 1
            state[_SUBDONE] = 1
        while state[_ALPHA] < state[_NROWS]:
            alpha = state[_ALPHA]
            if p[alpha] == alpha:
                for w in range(nrel):
                    word = rel_flat[rel_off[w] : rel_off[w + 1]]
                    if scan(table, p, queue, alpha, word, 1, state, alloc, ded, 0) == 1:
                        return 1
                    if p[alpha] != alpha:
                        break
                if p[alpha] == alpha:
                    for col in range(ncols):
                        if table[alpha, col] < 0:
                            if define(table, p, alpha, col, state, alloc, ded, 0) < 0:
                                return 1
            state[_ALPHA] = alpha + 1
        return 0

    @njit(cache=True)
    def process_deductions(
        table, p, queue, conj_flat, conj_off, col_first, rel_flat, rel_off,
        state, alloc, ded,
    ):
        while state[_DEDN] > 0:
            if state[_DEDN] > _MAX_STACK or state[_DEDOVF] == 1:
                lookahead(table, p, queue, rel_flat, rel_off, state, alloc, ded)
                state[_DEDN] = 0
                state[_DEDOVF] = 0
                return
            n = state[_DEDN] - 1
            state[_DEDN] = n
            alpha = ded[n, 0]
            col = ded[n, 1]
            if p[alpha] == alpha:
                for w in range(col_first[col], col_first[col + 1]):
                    word = conj_flat[conj_off[w] : conj_off[w + 1]]
                    scan(table, p, queue, alpha, word, 0, state, alloc, ded, 1)
                    if p[alpha] != alpha:
                        break
            if p[alpha] != alpha:
                continue
            beta = table[alpha, col]
            if beta >= 0 and p[beta] == beta:
                inv = col ^ 1
                for w in range(col_first[inv], col_first[inv + 1]):
                    word = conj_flat[conj_off[w] : conj_off[w + 1]]
                    scan(table, p, queue, beta, word, 0, state, alloc, ded, 1)
                    if p[beta] != beta:
                        break

    @njit(cache=True)
    def felsch_step(
        table, p, queue, conj_flat, conj_off, col_first, rel_flat, rel_off,
        sub_flat, sub_off, state, alloc, ded,
    ):
        # returns 0: complete, 1: out of space
        ncols = table.shape[1]
        if state[_SUBDONE] == 0:
            nsub = sub_off.shape[0] - 1
            for w in range(nsub):
                word = sub_flat[sub_off[w] : sub_off[w + 1]]
                if scan(table, p, queue, 0, word, 1, state, alloc, ded, 1) == 1:
                    return 1
                process_deductions(
                    table, p, queue, conj_flat, conj_off, col_first,
                    rel_flat, rel_off, state, alloc, ded,
                )
            state[_SUBDONE] = 1
        while state[_ALPHA] < state[_NROWS]:
            alpha = state[_ALPHA]
            if p[alpha] == alpha:
                for col in range(ncols):
                    if p[alpha] != alpha:
                        break
                    if table[alpha, col] < 0:
                        if define(table, p, alpha, col, state, alloc, ded, 1) < 0:
                            return 1
                        process_deductions(
                            table, p, queue, conj_flat, conj_off, col_first,
                            rel_flat, rel_off, state, alloc, ded,
                        )
            state[_ALPHA] = alpha + 1
        return 0

    @njit(cache=True)
    def compress(table, p, scratch, state):
        ncols = table.shape[1]
        nrows = state[_NROWS]
        alpha = state[_ALPHA]
        nxt = 0
        new_alpha = 0
        for i in range(nrows):
            if p[i] == i:
                scratch[i] = nxt
                if i < alpha:
                    new_alpha += 1
                nxt += 1
            else:
                scratch[i] = -1
        w = 0
        for i in range(nrows):
            if scratch[i] < 0:
                continue
            for c in range(ncols):
                t = table[i, c]
                if t < 0:
                    table[w, c] = -1
                else:
                    table[w, c] = scratch[rep(p, t)]
            w += 1
        for i in range(w, nrows):
            for c in range(ncols):
                table[i, c] = -1
        for i in range(w):
            p[i] = i
        state[_NROWS] = w
        state[_DEAD] = 0
        state[_ALPHA] = new_alpha
        state[_DEDN] = 0
        state[_DEDOVF] = 0

    @njit(cache=True)
    def action_bfs(cols1, base, bits, expected):
        """Breadth-first closure of the group generated by the columns of a
        faithful action, elements keyed by their images on the base points.

        Returns (count, table); count < expected means the base did not
        separate elements, count == -1 means more keys than expected
        appeared (which would indicate corrupt input).
        """
        m, ncols = cols1.shape
        t = base.shape[0]
        hbits = 1
        while (1 << hbits) < 2 * expected:
            hbits += 1
        hsize = 1 << hbits
        hmask = hsize - 1
        hkeys = np.full(hsize, -1, dtype=np.int64)
        hvals = np.empty(hsize, dtype=np.int32)
        imgs = np.empty((expected, t), dtype=np.int32)
        out = np.empty((expected, ncols), dtype=np.int32)
        key0 = np.int64(0)
        for i in range(t):
            imgs[0, i] = base[i]
            key0 |= np.int64(base[i]) << (bits * i)
        idx = (key0 * np.int64(-7046029254386353131)) >> (64 - hbits) & hmask
        hkeys[idx] = key0
        hvals[idx] = 0
        n = 1
        e = 0
        while e < n:
            for col in range(ncols):
                k = np.int64(0)
                for i in range(t):
                    v = cols1[imgs[e, i], col]
                    k |= np.int64(v) << (bits * i)
                idx = (k * np.int64(-7046029254386353131)) >> (64 - hbits) & hmask
                cand = -1
                while True:
                    kk = hkeys[idx]
                    if kk == k:
                        cand = hvals[idx]
                        break
                    if kk == -1:
                        if n >= expected:
                            return -1, out
                        hkeys[idx] = k
                        hvals[idx] = n
                        for i in range(t):
                            imgs[n, i] = cols1[imgs[e, i], col]
                        cand = n
                        n += 1
                        break
                    idx = (idx + 1) & hmask
                out[e, col] = cand
            e += 1
        return n, out

    @njit(cache=True)
    def orders_lcm(cols, parent, letter):
        n = cols.shape[0]
        depth = np.zeros(n, dtype=np.int64)
        maxd = 0
        for c in range(1, n):
            d = depth[parent[c]] + 1
            depth[c] = d
            if d > maxd:
                maxd = d
        buf = np.empty(maxd + 1, dtype=np.int64)
        result = 1
        for c0 in range(1, n):
            length = 0
            x = c0
            while x != 0:
                buf[length] = letter[x]
                x = parent[x]
                length += 1
            q = c0
            k = 1
            while q != 0:
                for i in range(length - 1, -1, -1):
                    q = cols[q, buf[i]]
                k += 1
            a = result
            b = k
            while b:
                a, b = b, a % b
            result = (result // a) * k
        return result

    return {
        "hlt_step": hlt_step,
        "felsch_step": felsch_step,
        "lookahead": lookahead,
        "compress": compress,
        "action_bfs": action_bfs,
        "orders_lcm": orders_lcm,
    }


def _flatten(words):
    off = np.zeros(len(words) + 1, dtype=np.int64)
    for i, w in enumerate(words):
        off[i + 1] = off[i] + len(w)
    flat = np.empty(off[-1], dtype=np.int32)
    for i, w in enumerate(words):
        flat[off[i] : off[i + 1]] = w
    return flat, off


def _flatten_grouped(grouped):
    """Conjugate words grouped per starting column -> flat arrays plus the
    per-column word-index ranges."""
    col_first = np.zeros(len(grouped) + 1, dtype=np.int64)
    words = []
    for c, bucket in enumerate(grouped):
        col_first[c + 1] = col_first[c] + len(bucket)
        words.extend(bucket)
    flat, off = _flatten(words)
    return flat, off, col_first


def _run(ncols: int, relators, subgroup_words, cap: int, strategy: str, grouped=None):
    fns = _get_compiled()
    if fns is None:
        raise RuntimeError("numba is not available")
    rel_flat, rel_off = _flatten(relators)
    sub_flat, sub_off = _flatten(subgroup_words)
    if strategy == "felsch":
        conj_flat, conj_off, col_first = _flatten_grouped(grouped)
    alloc = min(cap, 4096)
    table = np.full((alloc, ncols), -1, dtype=np.int32)
    p = np.zeros(alloc, dtype=np.int32)
    queue = np.empty(alloc, dtype=np.int32)
    ded = np.empty((_DED_BUFFER, 2), dtype=np.int32)
    state = np.zeros(8, dtype=np.int64)
    state[_NROWS] = 1
    state[_DEFINED] = 1
    state[_HIGH] = 1

    while True:
        if strategy == "felsch":
            status = fns["felsch_step"](
                table, p, queue, conj_flat, conj_off, col_first, rel_flat, rel_off,
                sub_flat, sub_off, state, alloc, ded,
            )
        else:
            status = fns["hlt_step"](
                table, p, queue, rel_flat, rel_off, sub_flat, sub_off, state,
                alloc, ded,
            )
        if status == 0:
            break
        nrows = int(state[_NROWS])
        dead_trigger = nrows >= _COMPACT_MIN_ROWS and 2 * int(state[_DEAD]) >= nrows
        if dead_trigger:
            if strategy == "felsch":
                # pending deductions do not survive renumbering
                fns["lookahead"](table, p, queue, rel_flat, rel_off, state, alloc, ded)
            fns["compress"](table, p, queue, state)
            continue
        if nrows >= alloc and alloc < cap:
            new_alloc = min(cap, alloc * 2)
            grown = np.full((new_alloc, ncols), -1, dtype=np.int32)
            grown[:alloc] = table
            table = grown
            p = np.concatenate([p, np.zeros(new_alloc - alloc, dtype=np.int32)])
            queue = np.empty(new_alloc, dtype=np.int32)
            alloc = new_alloc
            continue
        # at the cap: lookahead, compact, and give up if that freed nothing
        fns["lookahead"](table, p, queue, rel_flat, rel_off, state, alloc, ded)
        fns["compress"](table, p, queue, state)
        if state[_NROWS] > 0.95 * cap:
            raise CosetCapExceeded(cap, int(state[_HIGH]), int(state[_DEFINED]))

    nrows = int(state[_NROWS])
    return (
        table[:nrows],
        p[:nrows],
        int(state[_DEFINED]),
        int(state[_HIGH]),
    )


def run_hlt(ncols: int, relators, subgroup_words, cap: int):
    """Run the compiled HLT enumeration; returns (table, p, defined, high_water)."""
    return _run(ncols, relators, subgroup_words, cap, "hlt")


def run_felsch(ncols: int, relators, subgroup_words, cap: int, grouped):
    """Run the compiled Felsch enumeration.

    ``grouped`` holds the cyclic conjugates of every relator and inverse,
    bucketed by first letter (one bucket per column).
    """
    return _run(ncols, relators, subgroup_words, cap, "felsch", grouped=grouped)


def table_exponent(cols, parent, letter) -> int:
    fns = _get_compiled()
    if fns is None:
        raise RuntimeError("numba is not available")
    return int(fns["orders_lcm"](np.ascontiguousarray(cols), parent, letter))


def action_closure(cols1, base, bits, expected):
    """Compiled breadth-first closure over base-point images, or None."""
    fns = _get_compiled()
    if fns is None:
        return None
    n, out = fns["action_bfs"](
        np.ascontiguousarray(cols1, dtype=np.int32),
        np.asarray(base, dtype=np.int64),
        bits,
        expected,
    )
    return int(n), out
