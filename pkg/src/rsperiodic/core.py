"""Alphabets, words and random substitutions.

Words are stored as ``bytes``: byte ``i`` of a word is the index of its
``i``-th letter in the alphabet.  Indices are 0-based; the textual symbols
only live in :class:`Alphabet`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

Word = bytes


def word_key(w: Word) -> tuple[int, bytes]:
    """Canonical order: shorter words first, then lexicographic by index."""
    return (len(w), w)


def sort_words(words: Iterable[Word]) -> list[Word]:
    return sorted(set(words), key=word_key)


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("alphabet must contain at least one letter")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in alphabet {self.symbols!r}")
        if len(self.symbols) > 256:
            raise ValueError("at most 256 letters are supported")
        for s in self.symbols:
            if not s or any(ch.isspace() for ch in s) or s in {".", "|", "#"}:
                raise ValueError(f"invalid letter symbol {s!r}")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    @classmethod
    def of(cls, symbols: str | Iterable[str]) -> Alphabet:
        """``Alphabet.of("ab")`` or ``Alphabet.of(["a1", "a2"])``."""
        return cls(tuple(symbols))

    @property
    def d(self) -> int:
        return len(self.symbols)

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise ValueError(f"unknown letter {symbol!r}") from None

    def word(self, text: str) -> Word:
        """Parse a word.

        Dot-separated tokens are always accepted; bare strings are split into
        characters when every symbol is a single character.
        """
        text = text.strip()
        if text in ("", "ε"):
            return b""
        if "." in text or not self.single_char:
            tokens = text.split(".")
        else:
            tokens = list(text)
        return bytes(self.index(t) for t in tokens)

    def format(self, w: Word) -> str:
        sep = "" if self.single_char else "."
        return sep.join(self.symbols[i] for i in w)

    def letters(self) -> list[Word]:
        return [bytes([i]) for i in range(self.d)]


def abelianise(u: Word, d: int) -> tuple[int, ...]:
    """Letter-count vector of ``u`` over an alphabet of size ``d``."""
    return tuple(u.count(i) for i in range(d))


def cyclic_permute(u: Word, i: int = 1) -> Word:
    """Rotate ``u`` left by ``i`` positions."""
    if not u:
        raise ValueError("cannot rotate the empty word")
    if i < 0:
        raise ValueError("rotation count must be nonnegative")
    i %= len(u)
    return u[i:] + u[:i]


def rotations(u: Word) -> list[Word]:
    return [u[i:] + u[:i] for i in range(len(u))]


def least_rotation(u: Word) -> Word:
    return min(rotations(u)) if u else u


def primitive_root(u: Word) -> Word:
    """Shortest ``r`` with ``u == r * k``."""
    n = len(u)
    for q in range(1, n + 1):
        if n % q == 0 and u[:q] * (n // q) == u:
            return u[:q]
    return u


def occurrences(pattern: Word, text: Word) -> int:
    """Number of (possibly overlapping) occurrences of ``pattern`` in ``text``."""
    if not pattern:
        raise ValueError("empty pattern")
    count = 0
    start = text.find(pattern)
    while start != -1:
        count += 1
        start = text.find(pattern, start + 1)
    return count


def factors(w: Word, n: int) -> set[Word]:
    return {w[i:i + n] for i in range(len(w) - n + 1)}


class RandomSubstitution:
    """A finite-range random substitution on an alphabet.

    ``images[i]`` is the canonically sorted tuple of distinct realisations of
    letter ``i``.  Instances are immutable and hashable.
    """

    __slots__ = ("alphabet", "images", "max_image_len", "_hash")

    def __init__(self, alphabet: Alphabet, images: Sequence[Iterable[Word]]):
        if len(images) != alphabet.d:
            raise ValueError(f"expected {alphabet.d} image sets, got {len(images)}")
        canon = []
        for i, imgs in enumerate(images):
            ws = sort_words(bytes(w) for w in imgs)
            if not ws:
                raise ValueError(f"letter {alphabet.symbols[i]!r} has no images")
            for w in ws:
                if not w:
                    raise ValueError(f"letter {alphabet.symbols[i]!r} has an empty image")
                if max(w) >= alphabet.d:
                    raise ValueError(f"image of {alphabet.symbols[i]!r} uses an unknown letter")
            canon.append(tuple(ws))
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "images", tuple(canon))
        object.__setattr__(self, "max_image_len", max(len(w) for ws in canon for w in ws))
        object.__setattr__(self, "_hash", hash((alphabet.symbols, self.images)))

    def __setattr__(self, name, value):
        raise AttributeError("RandomSubstitution is immutable")

    def __reduce__(self):
        return (RandomSubstitution, (self.alphabet, self.images))

    @classmethod
    def from_strings(cls, rules: Mapping[str, str | Iterable[str]],
                     alphabet: Alphabet | str | Iterable[str] | None = None) -> RandomSubstitution:
        """Build from ``{"a": "ab|ba", "b": ["aa"]}``.

        Without an explicit alphabet, letters are taken in rule order.
        """
        if alphabet is None:
            alphabet = Alphabet.of(list(rules))
        elif not isinstance(alphabet, Alphabet):
            alphabet = Alphabet.of(alphabet)
        images: list[list[Word]] = [[] for _ in range(alphabet.d)]
        for sym, imgs in rules.items():
            if isinstance(imgs, str):
                imgs = imgs.split("|")
            images[alphabet.index(sym)] = [alphabet.word(t) for t in imgs]
        return cls(alphabet, images)

    @property
    def d(self) -> int:
        return self.alphabet.d

    def inflation_words(self) -> set[Word]:
        """The set of all realisations over all letters."""
        return {w for ws in self.images for w in ws}

    def __eq__(self, other):
        if not isinstance(other, RandomSubstitution):
            return NotImplemented
        return self.alphabet == other.alphabet and self.images == other.images

    def __hash__(self):
        return self._hash

    def __repr__(self):
        fmt = self.alphabet.format
        rules = ", ".join(
            f"{s} -> {'|'.join(fmt(w) for w in ws)}"
            for s, ws in zip(self.alphabet.symbols, self.images)
        )
        return f"RandomSubstitution({rules})"


def iter_realisations(sub: RandomSubstitution, u: Word) -> Iterator[Word]:
    """Lazily yield every realisation of ``sub`` on ``u`` (duplicates possible)."""
    if not u:
        raise ValueError("cannot substitute the empty word")
    for parts in itertools.product(*(sub.images[a] for a in u)):
        yield b"".join(parts)


def apply(sub: RandomSubstitution, u: Word) -> list[Word]:
    """All distinct realisations of ``sub`` on ``u``, canonically sorted."""
    return sort_words(iter_realisations(sub, u))


def apply_set(sub: RandomSubstitution, words: Iterable[Word]) -> list[Word]:
    out: set[Word] = set()
    for w in words:
        out.update(iter_realisations(sub, w))
    return sort_words(out)


def apply_power(sub: RandomSubstitution, u: Word, k: int) -> list[Word]:
    if not u:
        raise ValueError("cannot substitute the empty word")
    if k < 0:
        raise ValueError("power must be nonnegative")
    level = [u]
    for _ in range(k):
        level = apply_set(sub, level)
    return level


def power(sub: RandomSubstitution, k: int) -> RandomSubstitution:
    """The random substitution ``sub`` composed with itself ``k`` times."""
    if k < 1:
        raise ValueError("power must be at least 1")
    return RandomSubstitution(
        sub.alphabet, [apply_power(sub, a, k) for a in sub.alphabet.letters()]
    )
