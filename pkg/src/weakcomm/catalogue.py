"""Catalogue of standard presentations for small groups.

Each family yields a presentation whose enumeration over the trivial
subgroup produces the advertised order.  Parameters follow the group
order where sensible: ``dihedral(12)`` is the dihedral group of order 12,
``quaternion(16)`` the generalized quaternion (dicyclic) group of order 16.
"""

from __future__ import annotations

from .errors import BadParams, UnknownFamily
from .words import Presentation, Word, commutator_word, generator_word, parse_presentation


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _cyclic(n: int) -> Presentation:
    if n < 1:
        raise BadParams("cyclic order must be >= 1")
    return Presentation(["a"], [generator_word(0) ** n])


def _elementary_abelian(p: int, k: int) -> Presentation:
    if not _is_prime(p):
        raise BadParams(f"{p} is not prime")
    if k < 1:
        raise BadParams("rank must be >= 1")
    names = [f"a{i}" for i in range(k)] if k > 1 else ["a"]
    rels = [generator_word(i) ** p for i in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            rels.append(commutator_word(generator_word(i), generator_word(j)))
    return Presentation(names, rels)


def _dihedral(order: int) -> Presentation:
    if order < 2 or order % 2:
        raise BadParams("dihedral groups have even order >= 2")
    n = order // 2
    r, s = generator_word(0), generator_word(1)
    return Presentation(["r", "s"], [r**n, s**2, (r * s) ** 2])


def _quaternion(order: int) -> Presentation:
    # dicyclic of order 4n: a^(2n) = 1, b^2 = a^n, b^-1 a b = a^-1
    if order < 8 or order % 4:
        raise BadParams("quaternion/dicyclic groups have order 4n with n >= 2")
    n = order // 4
    a, b = generator_word(0), generator_word(1)
    return Presentation(
        ["a", "b"],
        [a ** (2 * n), b**2 * a ** (-n), b.inverse() * a * b * a],
    )


def _semidihedral(order: int) -> Presentation:
    if order != 16:
        raise BadParams("only the semidihedral group of order 16 is catalogued")
    return parse_presentation("gens a,b; rels a^8, b^2, b^-1*a*b*a^-3")


def _modular(order: int) -> Presentation:
    if order != 16:
        raise BadParams("only the modular group of order 16 is catalogued")
    return parse_presentation("gens a,b; rels a^8, b^2, b^-1*a*b*a^-5")


def _heisenberg(p: int) -> Presentation:
    # order p^3, exponent p (p odd), class 2
    if not _is_prime(p) or p == 2:
        raise BadParams("heisenberg needs an odd prime")
    a, b = generator_word(0), generator_word(1)
    c = commutator_word(a, b)
    return Presentation(
        ["a", "b"],
        [a**p, b**p, commutator_word(c, a), commutator_word(c, b)],
    )


def _extraspecial_exp_p2(p: int) -> Presentation:
    # the other extraspecial group of order p^3: exponent p^2
    if not _is_prime(p) or p == 2:
        raise BadParams("extraspecial-exp-p2 needs an odd prime")
    a, b = generator_word(0), generator_word(1)
    return Presentation(
        ["a", "b"],
        [a ** (p * p), b**p, b.inverse() * a * b * a ** (-(1 + p))],
    )


def _symmetric(n: int) -> Presentation:
    if n == 3:
        return parse_presentation("gens a,b; rels a^2, b^2, (a*b)^3")
    if n == 4:
        return parse_presentation(
            "gens a,b,c; rels a^2, b^2, c^2, (a*b)^3, (b*c)^3, (a*c)^2"
        )
    raise BadParams("symmetric groups are catalogued for n in {3, 4}")


def _alternating(n: int) -> Presentation:
    if n != 4:
        raise BadParams("alternating groups are catalogued for n = 4 only")
    return parse_presentation("gens a,b; rels a^3, b^3, (a*b)^2")


_FAMILIES = {
    "cyclic": (_cyclic, 1),
    "elementary-abelian": (_elementary_abelian, 2),
    "dihedral": (_dihedral, 1),
    "quaternion": (_quaternion, 1),
    "dicyclic": (_quaternion, 1),
    "semidihedral": (_semidihedral, 1),
    "modular": (_modular, 1),
    "heisenberg": (_heisenberg, 1),
    "extraspecial-exp-p2": (_extraspecial_exp_p2, 1),
    "symmetric": (_symmetric, 1),
    "alternating": (_alternating, 1),
}

# short names accepted by the CLI and the corpus
ALIASES = {
    "s3": ("symmetric", (3,)),
    "s4": ("symmetric", (4,)),
    "a4": ("alternating", (4,)),
    "q8": ("quaternion", (8,)),
    "q12": ("quaternion", (12,)),
    "q16": ("quaternion", (16,)),
    "q32": ("quaternion", (32,)),
    "sd16": ("semidihedral", (16,)),
    "m16": ("modular", (16,)),
    "v4": ("elementary-abelian", (2, 2)),
    # geometric naming: dN = symmetries of the N-gon, order 2N
    "d3": ("dihedral", (6,)),
    "d4": ("dihedral", (8,)),
    "d5": ("dihedral", (10,)),
    "d6": ("dihedral", (12,)),
    "d8": ("dihedral", (16,)),
    "d16": ("dihedral", (32,)),
}


def standard_presentation(family: str, params: tuple[int, ...] = ()) -> Presentation:
    """Look up a catalogue presentation by family name and integer parameters."""
    if family in ALIASES:
        if params:
            raise BadParams(f"{family!r} takes no parameters")
        family, params = ALIASES[family]
    if family not in _FAMILIES:
        raise UnknownFamily(f"unknown catalogue family {family!r}")
    builder, arity = _FAMILIES[family]
    if len(params) != arity:
        raise BadParams(
            f"family {family!r} takes {arity} parameter(s), got {len(params)}"
        )
    return builder(*params)


def resolve_group_name(text: str) -> Presentation:
    """Parse a CLI-style group name: ``family[:p1[:p2]]`` or an alias like ``s3``."""
    parts = text.split(":")
    name = parts[0].strip().lower()
    try:
        params = tuple(int(x) for x in parts[1:])
    except ValueError as exc:
        raise BadParams(f"non-integer parameter in {text!r}") from exc
    return standard_presentation(name, params)
