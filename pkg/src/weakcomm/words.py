"""Free-group words and finite presentations, with a small text format.

Grammar (whitespace insignificant, names are ASCII identifiers):

    presentation ::= "gens" name ("," name)* ";" "rels" word ("," word)*
    word         ::= factor ("*" factor)*
    factor       ::= name | name "^" int | "(" word ")" "^" int
                   | "[" word "," word "]"

``[u, v]`` expands to ``u^-1 v^-1 u v``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import PresentationSyntaxError, UnknownGenerator

Letter = tuple[int, int]  # (generator index, +1 or -1)


def _reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for gen, sign in letters:
        if sign not in (1, -1):
            raise ValueError(f"letter sign must be +1 or -1, got {sign}")
        if stack and stack[-1][0] == gen and stack[-1][1] == -sign:
            stack.pop()
        else:
            stack.append((gen, sign))
    return tuple(stack)


class Word:
    """A freely reduced word over numbered generators."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[Letter] = ()):
        self.letters = _reduce(letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word((g, -s) for g, s in reversed(self.letters))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def is_empty(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def cyclic_reduction(self) -> "Word":
        letters = list(self.letters)
        while (
            len(letters) >= 2
            and letters[0][0] == letters[-1][0]
            and letters[0][1] == -letters[-1][1]
        ):
            letters = letters[1:-1]
        return Word(letters)

    def cyclic_key(self) -> tuple[Letter, ...]:
        """Canonical form shared by all cyclic rotations of the word and its
        inverse; used to deduplicate relator sets."""
        w = self.cyclic_reduction()
        candidates = []
        for base in (w.letters, w.inverse().letters):
            for i in range(len(base) or 1):
                candidates.append(base[i:] + base[:i])
        return min(candidates)

    def __repr__(self) -> str:
        return f"Word({list(self.letters)!r})"


def commutator_word(u: Word, v: Word) -> Word:
    return u.inverse() * v.inverse() * u * v


def generator_word(index: int, sign: int = 1) -> Word:
    return Word([(index, sign)])


class Presentation:
    """Named generators plus freely reduced relator words.

    Relators that reduce to the empty word are dropped; every surviving
    relator must reference only declared generators.
    """

    def __init__(self, generator_names: Sequence[str], relators: Iterable[Word]):
        names = tuple(generator_names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names!r}")
        kept = []
        for r in relators:
            if r.is_empty():
                continue
            if r.max_generator() >= len(names):
                raise ValueError("relator references an undeclared generator")
            kept.append(r)
        self.generator_names = names
        self.relators = tuple(kept)

    @property
    def rank(self) -> int:
        return len(self.generator_names)

    def word_text(self, w: Word) -> str:
        parts = []
        run_gen, run_count = None, 0
        for gen, sign in list(w.letters) + [(-1, 0)]:
            if gen == run_gen and sign == (1 if run_count > 0 else -1):
                run_count += sign
                continue
            if run_gen is not None and run_gen >= 0:
                name = self.generator_names[run_gen]
                parts.append(name if run_count == 1 else f"{name}^{run_count}")
            run_gen, run_count = gen, sign
        return "*".join(parts)

    def to_text(self) -> str:
        gens = ",".join(self.generator_names)
        rels = ", ".join(self.word_text(r) for r in self.relators)
        return f"gens {gens}; rels {rels}"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Presentation)
            and self.generator_names == other.generator_names
            and self.relators == other.relators
        )

    def __hash__(self) -> int:
        return hash((self.generator_names, self.relators))

    def __repr__(self) -> str:
        return f"Presentation({self.to_text()!r})"


# --- parsing ---------------------------------------------------------------

_SYMBOLS = set(",;*^()[]")


class _Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind, text, line, column):
        self.kind = kind  # 'name' | 'int' | symbol itself | 'end'
        self.text = text
        self.line = line
        self.column = column


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            col += 1
            i += 1
            continue
        if c in _SYMBOLS:
            tokens.append(_Token(c, c, line, col))
            col += 1
            i += 1
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < len(text) and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            tokens.append(_Token("name", word, line, col))
            col += i - start
            continue
        if c.isdigit() or c == "-":
            start = i
            i += 1
            while i < len(text) and text[i].isdigit():
                i += 1
            number = text[start:i]
            if number == "-":
                raise PresentationSyntaxError("bare '-' is not a number", line, col)
            tokens.append(_Token("int", number, line, col))
            col += i - start
            continue
        raise PresentationSyntaxError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.gen_index: dict[str, int] = {}

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self, kind: str, what: str | None = None) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != kind:
            raise PresentationSyntaxError(
                f"expected {what or kind}, found {tok.text!r}", tok.line, tok.column
            )
        self.pos += 1
        return tok

    def take_keyword(self, word: str) -> None:
        tok = self.tokens[self.pos]
        if tok.kind != "name" or tok.text != word:
            raise PresentationSyntaxError(
                f"expected keyword {word!r}, found {tok.text!r}", tok.line, tok.column
            )
        self.pos += 1

    def parse(self) -> Presentation:
        self.take_keyword("gens")
        names = [self.take("name", "generator name").text]
        while self.peek().kind == ",":
            self.pos += 1
            names.append(self.take("name", "generator name").text)
        for idx, name in enumerate(names):
            if name in self.gen_index:
                tok = self.peek()
                raise PresentationSyntaxError(
                    f"duplicate generator {name!r}", tok.line, tok.column
                )
            self.gen_index[name] = idx
        self.take(";")
        self.take_keyword("rels")
        relators = [self.parse_word()]
        while self.peek().kind == ",":
            self.pos += 1
            relators.append(self.parse_word())
        self.take("end", "end of input")
        return Presentation(names, relators)

    def parse_word(self) -> Word:
        w = self.parse_factor()
        while self.peek().kind == "*":
            self.pos += 1
            w = w * self.parse_factor()
        return w

    def parse_factor(self) -> Word:
        tok = self.peek()
        if tok.kind == "name":
            self.pos += 1
            base = Word([(self.lookup(tok), 1)])
            if self.peek().kind == "^":
                self.pos += 1
                return base ** self.take_int()
            return base
        if tok.kind == "(":
            self.pos += 1
            inner = self.parse_word()
            self.take(")")
            self.take("^")
            return inner ** self.take_int()
        if tok.kind == "[":
            self.pos += 1
            left = self.parse_word()
            self.take(",")
            right = self.parse_word()
            self.take("]")
            return commutator_word(left, right)
        raise PresentationSyntaxError(
            f"expected a word factor, found {tok.text!r}", tok.line, tok.column
        )

    def take_int(self) -> int:
        tok = self.take("int", "an integer exponent")
        return int(tok.text)

    def lookup(self, tok: _Token) -> int:
        if tok.text not in self.gen_index:
            raise UnknownGenerator(
                f"unknown generator {tok.text!r}", tok.line, tok.column
            )
        return self.gen_index[tok.text]


def parse_presentation(text: str) -> Presentation:
    """Parse presentation text, raising ``PresentationSyntaxError`` on bad input."""
    return _Parser(text).parse()
