"""Finite groups with cached element sets and enumeration-based algorithms.

Everything here is exact and deterministic: element sets are kept in the
insertion order of a breadth-first closure, so two runs over the same
generators always enumerate in the same order.  Algorithms are written
against a small element protocol (``*``, ``inverse()``, ``key()``,
``is_identity()``, ``order()``), which is satisfied by explicit
permutations, by coset-table backed elements, and by tuples over the two.

At desk scale (corpus groups and their derived objects) plain enumeration
is both correct and fast; no stabilizer-chain machinery is used.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

from .errors import (
    CapExceeded,
    DegreeMismatch,
    InvariantViolation,
    NotNormal,
)
from .permutation import Permutation, commutator, conjugate

DEFAULT_ELEMENT_CAP = 2_000_000


class TupleElement:
    """Element of a direct product, acting componentwise on disjoint point sets."""

    __slots__ = ("components", "_key", "_hash")

    def __init__(self, components):
        self.components = tuple(components)
        self._key = tuple(c.key() for c in self.components)
        self._hash = hash(self._key)

    @property
    def degree(self) -> int:
        return sum(c.degree for c in self.components)

    def __mul__(self, other: "TupleElement") -> "TupleElement":
        if not isinstance(other, TupleElement) or len(other.components) != len(
            self.components
        ):
            raise DegreeMismatch("direct product arity mismatch")
        return TupleElement(
            a * b for a, b in zip(self.components, other.components)
        )

    def inverse(self) -> "TupleElement":
        return TupleElement(c.inverse() for c in self.components)

    def is_identity(self) -> bool:
        return all(c.is_identity() for c in self.components)

    def identity_element(self) -> "TupleElement":
        return TupleElement(c.identity_element() for c in self.components)

    def order(self) -> int:
        return math.lcm(*(c.order() for c in self.components))

    def key(self):
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, TupleElement) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"TupleElement{self.components!r}"


def _with_inverses(gens) -> list:
    """Generators followed by any missing inverses, deduplicated, order kept."""
    out, seen = [], set()
    for g in gens:
        for h in (g, g.inverse()):
            k = h.key()
            if k not in seen:
                seen.add(k)
                out.append(h)
    return out


def close_elements(gens: Sequence, identity, cap: int = DEFAULT_ELEMENT_CAP):
    """Breadth-first closure of ``gens`` under multiplication and inversion.

    Returns ``(elements, index)`` where ``elements`` is insertion-ordered
    starting with the identity and ``index`` maps ``key() -> position``.
    """
    step = _with_inverses(gens)
    elements = [identity]
    index = {identity.key(): 0}
    frontier = [identity]
    while frontier:
        new = []
        for e in frontier:
            for g in step:
                f = e * g
                k = f.key()
                if k not in index:
                    if len(elements) >= cap:
                        raise CapExceeded(cap)
                    index[k] = len(elements)
                    elements.append(f)
                    new.append(f)
        frontier = new
    return elements, index


def closure(gens: Sequence, cap: int = DEFAULT_ELEMENT_CAP) -> list:
    """Smallest set containing ``gens``, the identity, and all products/inverses."""
    if not gens:
        raise ValueError("closure needs at least one generator")
    degree = gens[0].degree
    for g in gens:
        if g.degree != degree:
            raise DegreeMismatch("generators act on different point sets")
    elements, _ = close_elements(gens, gens[0].identity_element(), cap)
    return elements


class PermGroup:
    """A finite group given by generators, with a cached ordered element list.

    ``order`` may be supplied when known in advance (regular carriers,
    direct products); otherwise it is the length of the enumerated element
    list.  Instances are immutable once the element list exists, and
    element materialization is idempotent, so concurrent readers are safe.
    """

    def __init__(
        self,
        generators: Sequence,
        identity,
        *,
        elements: list | None = None,
        index: dict | None = None,
        order: int | None = None,
        element_cap: int = DEFAULT_ELEMENT_CAP,
        name: str | None = None,
        presentation=None,
    ):
        self.generators = list(generators)
        self.identity = identity
        self.element_cap = element_cap
        self.name = name
        self.presentation = presentation
        self._elements = elements
        self._index = index
        self._order = order
        self._words = None
        if elements is not None and index is None:
            self._index = {e.key(): i for i, e in enumerate(elements)}
        if elements is None and order is None:
            self._materialize()

    def _materialize(self) -> None:
        self._elements, self._index = close_elements(
            self.generators, self.identity, self.element_cap
        )
        if self._order is not None and self._order != len(self._elements):
            raise InvariantViolation(
                f"declared order {self._order} != enumerated {len(self._elements)}"
            )
        self._order = len(self._elements)

    @property
    def degree(self) -> int:
        return self.identity.degree

    @property
    def order(self) -> int:
        if self._order is None:
            self._order = len(self.elements)
        return self._order

    @property
    def elements(self) -> list:
        if self._elements is None:
            self._materialize()
        return self._elements

    def index_of(self, e) -> int:
        if self._elements is None:
            self._materialize()
        return self._index[e.key()]

    def __contains__(self, e) -> bool:
        if self._elements is None:
            self._materialize()
        return e.key() in self._index

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return self.order

    def exponent(self) -> int:
        """Least e >= 1 with g^e trivial for every element; lcm of element orders."""
        return math.lcm(*(e.order() for e in self.elements))

    def element_orders(self) -> list[int]:
        return [e.order() for e in self.elements]

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(
            (a * b).key() == (b * a).key() for a in gens for b in gens
        )

    def word_map(self) -> dict:
        """key() -> word (list of (gen index, sign)), one shortest-found per element.

        Breadth-first over the Cayley graph, trying each generator and then
        its inverse in declaration order; the identity maps to the empty word.
        """
        if self._words is not None:
            return self._words
        letters = []
        for i, g in enumerate(self.generators):
            letters.append((g, (i, 1)))
            inv = g.inverse()
            if inv.key() != g.key():
                letters.append((inv, (i, -1)))
        words = {self.identity.key(): []}
        frontier = [(self.identity, [])]
        while frontier:
            new = []
            for e, w in frontier:
                for g, letter in letters:
                    f = e * g
                    k = f.key()
                    if k not in words:
                        fw = w + [letter]
                        words[k] = fw
                        new.append((f, fw))
            frontier = new
        if len(words) != self.order:
            raise InvariantViolation("Cayley BFS did not reach every element")
        self._words = words
        return words

    def evaluate_word(self, word: Iterable[tuple[int, int]]):
        """Multiply out a word of (generator index, sign) letters."""
        e = self.identity
        for i, sign in word:
            g = self.generators[i]
            e = e * (g if sign > 0 else g.inverse())
        return e

    def whole_handle(self) -> "SubgroupHandle":
        return SubgroupHandle(
            self, self.generators, _elements=self._elements, _index=self._index,
            _order=self._order,
        )

    def __repr__(self) -> str:
        label = self.name or f"degree {self.degree}"
        order = self._order if self._order is not None else "?"
        return f"<PermGroup {label}, order {order}>"


class SubgroupHandle:
    """A subgroup of a parent group, with generators and a cached element list."""

    def __init__(
        self,
        parent: PermGroup,
        generators: Sequence,
        *,
        _elements: list | None = None,
        _index: dict | None = None,
        _order: int | None = None,
        check_membership: bool = False,
    ):
        self.parent = parent
        self.generators = list(generators)
        self._elements = _elements
        self._index = _index
        self._order = _order
        if check_membership:
            for g in self.generators:
                if g not in parent:
                    raise InvariantViolation("subgroup generator outside parent")

    @property
    def elements(self) -> list:
        if self._elements is None:
            self._elements, self._index = close_elements(
                self.generators, self.parent.identity, self.parent.element_cap
            )
            self._order = len(self._elements)
        return self._elements

    @property
    def order(self) -> int:
        if self._order is None:
            self._order = len(self.elements)
        return self._order

    def __contains__(self, e) -> bool:
        self.elements
        return e.key() in self._index

    def __iter__(self):
        return iter(self.elements)

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_abelian(self) -> bool:
        els = self.elements
        return all(
            ((a * b).key() == (b * a).key())
            for i, a in enumerate(els)
            for b in els[i + 1 :]
        )

    def exponent(self) -> int:
        return math.lcm(*(e.order() for e in self.elements))

    def as_group(self) -> PermGroup:
        """View this subgroup as a group in its own right, sharing caches."""
        gens = self.generators or [self.parent.identity]
        return PermGroup(
            gens,
            self.parent.identity,
            elements=self.elements,
            index=self._index,
            element_cap=self.parent.element_cap,
        )

    def reduced_generators(self) -> list:
        """A smaller generating list, grown greedily over the element order."""
        gens: list = []
        have = {self.parent.identity.key()}
        for e in self.elements:
            if e.key() not in have:
                gens.append(e)
                els, idx = close_elements(gens, self.parent.identity)
                have = set(idx)
                if len(have) == self.order:
                    break
        return gens

    def __repr__(self) -> str:
        return f"<Subgroup order {self._order if self._order is not None else '?'}>"


def subgroup(parent: PermGroup, generators: Sequence) -> SubgroupHandle:
    handle = SubgroupHandle(parent, list(generators))
    handle.elements
    return handle


def trivial_subgroup(parent: PermGroup) -> SubgroupHandle:
    e = parent.identity
    return SubgroupHandle(parent, [], _elements=[e], _index={e.key(): 0}, _order=1)


def normal_closure(
    parent: PermGroup,
    seeds: Sequence,
    conjugators: Sequence,
    cap: int | None = None,
) -> SubgroupHandle:
    """Smallest subgroup containing ``seeds`` and closed under conjugation
    by the given conjugating elements.

    The returned handle's generator list is the (small) set of seeds and
    conjugates that were actually needed, not the full element list.
    """
    cap = cap if cap is not None else parent.element_cap
    identity = parent.identity
    gens: list = []
    elements, index = [identity], {identity.key(): 0}
    pending = [s for s in seeds]
    conjugators = _with_inverses(conjugators)
    while pending:
        fresh, batch_seen = [], set()
        for s in pending:
            k = s.key()
            if k not in index and k not in batch_seen:
                batch_seen.add(k)
                fresh.append(s)
        pending = []
        if fresh:
            gens.extend(fresh)
            elements, index = close_elements(gens, identity, cap)
        for g in gens:
            for c in conjugators:
                t = conjugate(g, c)
                if t.key() not in index:
                    pending.append(t)
    return SubgroupHandle(
        parent, gens, _elements=elements, _index=index, _order=len(elements)
    )


def commutator_subgroup(
    parent: PermGroup, a: SubgroupHandle, b: SubgroupHandle
) -> SubgroupHandle:
    """The subgroup generated by all commutators between ``a`` and ``b``.

    Computed as the normal closure, inside the join of ``a`` and ``b``, of
    the commutators of their generators; this equals the full commutator
    subgroup generated over all element pairs.
    """
    seeds = [
        commutator(x, y)
        for x in a.generators
        for y in b.generators
    ]
    seeds = [s for s in seeds if not s.is_identity()]
    if not seeds:
        return trivial_subgroup(parent)
    conjugators = list(a.generators) + list(b.generators)
    return normal_closure(parent, seeds, conjugators)


def series(G: PermGroup, kind: str) -> tuple[list[SubgroupHandle], bool]:
    """Lower central or derived series of ``G``.

    Returns ``(terms, stabilized_above_trivial)``.  Terms start at the whole
    group and stop at the first trivial term, or at the first repeated term
    when the series stabilizes without reaching it (the stable term is the
    last entry, and the flag is True in that case).
    """
    if kind not in ("lower-central", "derived"):
        raise ValueError(f"unknown series kind: {kind!r}")
    whole = G.whole_handle()
    terms = [whole]
    while True:
        prev = terms[-1]
        if prev.order == 1:
            return terms, False
        other = whole if kind == "lower-central" else prev
        nxt = commutator_subgroup(G, prev, other)
        if nxt.order == prev.order:
            return terms, True
        terms.append(nxt)


def nilpotency_class(G: PermGroup) -> int | None:
    """Length of the lower central series before triviality; None if undefined."""
    terms, stuck = series(G, "lower-central")
    return None if stuck else len(terms) - 1


def derived_length(G: PermGroup) -> int | None:
    terms, stuck = series(G, "derived")
    return None if stuck else len(terms) - 1


def is_normal(G: PermGroup, N: SubgroupHandle) -> bool:
    return all(
        conjugate(n, g) in N for n in N.generators for g in G.generators
    )


def quotient(G: PermGroup, N: SubgroupHandle):
    """The action of ``G`` on the coset space of ``N``, plus the projection.

    Cosets are ``xN`` and a group element ``g`` sends ``xN`` to ``(x*g)N``;
    with the apply-left-first composition convention this right translation
    is what makes the projection a homomorphism.  Requires ``N`` normal.
    """
    if not is_normal(G, N):
        raise NotNormal("quotient by a non-normal subgroup")
    n_elements = N.elements
    coset_of: dict = {}
    reps: list = []
    for e in G.elements:
        if e.key() in coset_of:
            continue
        cid = len(reps)
        reps.append(e)
        for n in n_elements:
            coset_of[(n * e).key()] = cid
    k = len(reps)
    if k * N.order != G.order:
        raise InvariantViolation("coset partition does not tile the group")
    gen_images = []
    for g in G.generators:
        gen_images.append(Permutation([coset_of[(x * g).key()] for x in reps]))
    Q = PermGroup(
        gen_images or [Permutation.identity(k)],
        Permutation.identity(k),
        element_cap=G.element_cap,
    )
    if Q.order != k:
        raise InvariantViolation("coset action has wrong order")
    proj = Homomorphism(G, gen_images, Q)
    return Q, proj


def intersect(a: SubgroupHandle, b: SubgroupHandle) -> SubgroupHandle:
    """Element-wise intersection of two subgroups of the same parent."""
    if a.parent is not b.parent:
        raise DegreeMismatch("intersection requires a common parent group")
    small, big = (a, b) if a.order <= b.order else (b, a)
    elements = [e for e in small.elements if e in big]
    index = {e.key(): i for i, e in enumerate(elements)}
    handle = SubgroupHandle(
        a.parent, [], _elements=elements, _index=index, _order=len(elements)
    )
    handle.generators = handle.reduced_generators()
    return handle


def centralizing_elements(candidates: Iterable, targets: Sequence) -> list:
    """Those candidates commuting with every target element."""
    out = []
    for e in candidates:
        if all((e * t).key() == (t * e).key() for t in targets):
            out.append(e)
    return out


def center(G: PermGroup) -> SubgroupHandle:
    elements = centralizing_elements(G.elements, G.generators)
    index = {e.key(): i for i, e in enumerate(elements)}
    handle = SubgroupHandle(
        G, [], _elements=elements, _index=index, _order=len(elements)
    )
    handle.generators = handle.reduced_generators()
    return handle


class ProductGroup(PermGroup):
    """Direct product acting on the disjoint union of the factors' points."""

    def __init__(self, factors: Sequence[PermGroup], element_cap=None):
        if not factors:
            raise ValueError("direct product of no factors")
        self.factors = list(factors)
        gens = []
        ids = [f.identity for f in factors]
        for i, f in enumerate(factors):
            for g in f.generators:
                comps = list(ids)
                comps[i] = g
                gens.append(TupleElement(comps))
        order = math.prod(f.order for f in factors)
        cap = element_cap or max(f.element_cap for f in factors)
        super().__init__(
            gens,
            TupleElement(ids),
            order=order,
            element_cap=cap,
        )

    def _materialize(self) -> None:
        if self.order > self.element_cap:
            raise CapExceeded(self.element_cap)
        from itertools import product as iproduct

        elements = [
            TupleElement(comps)
            for comps in iproduct(*(f.elements for f in self.factors))
        ]
        self._elements = elements
        self._index = {e.key(): i for i, e in enumerate(elements)}

    def embed(self, i: int, e) -> TupleElement:
        comps = [f.identity for f in self.factors]
        comps[i] = e
        return TupleElement(comps)

    def __contains__(self, e) -> bool:
        return isinstance(e, TupleElement) and all(
            c in f for c, f in zip(e.components, self.factors)
        )


def direct_product(factors: Sequence[PermGroup]) -> ProductGroup:
    return ProductGroup(factors)


class Homomorphism:
    """A homomorphism fixed by images of the domain's generators.

    ``apply`` works on arbitrary domain elements by rewriting them as words
    in the generators (breadth-first words for explicit groups, coset-table
    words for regular carriers).
    """

    def __init__(
        self,
        domain: PermGroup,
        images: Sequence,
        codomain: PermGroup,
        name: str | None = None,
    ):
        if len(images) != len(domain.generators):
            raise ValueError("one image per domain generator required")
        self.domain = domain
        self.images = list(images)
        self.codomain = codomain
        self.name = name
        self._kernel = None
        self._image_order = None

    def apply(self, e):
        word = self.word_for(e)
        out = self.codomain.identity
        for i, sign in word:
            g = self.images[i]
            out = out * (g if sign > 0 else g.inverse())
        return out

    def word_for(self, e) -> list[tuple[int, int]]:
        letters = getattr(e, "letters", None)
        if letters is not None:  # a free word applied directly
            return list(letters)
        word_of = getattr(self.domain, "letters_for", None)
        if word_of is not None:
            return word_of(e)
        return self.domain.word_map()[e.key()]

    def check_relators(self, relators) -> bool:
        """True when every relator word maps to the identity."""
        return all(self.apply(r).is_identity() for r in relators)

    def kernel(self) -> SubgroupHandle:
        """Elements mapping to the identity, as a subgroup of the domain."""
        if self._kernel is not None:
            return self._kernel
        sweep = getattr(self.domain, "sweep_images", None)
        if sweep is not None:
            kernel_elements, image_order = sweep(self.images)
        else:
            kernel_elements, image_order = self._kernel_by_pairs()
        self._image_order = image_order
        if len(kernel_elements) * image_order != self.domain.order:
            raise InvariantViolation("kernel/image orders do not tile the domain")
        index = {e.key(): i for i, e in enumerate(kernel_elements)}
        handle = SubgroupHandle(
            self.domain,
            [],
            _elements=kernel_elements,
            _index=index,
            _order=len(kernel_elements),
        )
        handle.generators = handle.reduced_generators()
        self._kernel = handle
        return handle

    def _kernel_by_pairs(self):
        # closure of the graph subgroup {(g, f(g))} inside domain x codomain
        pair_gens = [
            TupleElement((g, im)) for g, im in zip(self.domain.generators, self.images)
        ]
        ident = TupleElement((self.domain.identity, self.codomain.identity))
        graph, _ = close_elements(pair_gens, ident, self.domain.element_cap)
        kernel = [
            p.components[0] for p in graph if p.components[1].is_identity()
        ]
        if len(graph) != self.domain.order:
            raise InvariantViolation("graph subgroup order mismatch")
        image_order = len(graph) // len(kernel)
        return kernel, image_order

    def image_order(self) -> int:
        if self._image_order is None:
            self.kernel()
        return self._image_order

    def image_subgroup(self) -> SubgroupHandle:
        return subgroup(self.codomain, [im for im in self.images])

    def __repr__(self) -> str:
        return f"<Homomorphism {self.name or ''} {self.domain!r} -> {self.codomain!r}>"


def hom_kernel(h: Homomorphism) -> SubgroupHandle:
    return h.kernel()


def exponent(G: PermGroup) -> int:
    return G.exponent()
