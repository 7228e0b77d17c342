"""Plain-text substitution files.

    # random period doubling
    alphabet: a b
    a -> ab | ba
    b -> aa

Multi-character symbols are written dot-separated inside images (``a1.a2``).
"""

from __future__ import annotations

import warnings
from pathlib import Path

from .core import Alphabet, RandomSubstitution


class SpecError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = f"{path or '<spec>'}:{line}: " if line is not None else (f"{path}: " if path else "")
        super().__init__(where + message)


class DuplicateImageWarning(UserWarning):
    pass


def parse_spec_text(text: str, path: str | None = None) -> RandomSubstitution:
    alphabet = None
    rules: dict[str, tuple[int, list]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("alphabet"):
            head, sep, rest = line.partition(":")
            if not sep or head.strip() != "alphabet":
                raise SpecError("expected 'alphabet: <sym> <sym> ...'", lineno, path)
            if alphabet is not None:
                raise SpecError("alphabet declared twice", lineno, path)
            try:
                alphabet = Alphabet.of(rest.split())
            except ValueError as e:
                raise SpecError(str(e), lineno, path) from None
            continue
        if "->" not in line:
            raise SpecError(f"syntax error: {raw.strip()!r}", lineno, path)
        if alphabet is None:
            raise SpecError("rule before alphabet declaration", lineno, path)
        sym, rhs = (part.strip() for part in line.split("->", 1))
        if sym not in alphabet.symbols:
            raise SpecError(f"unknown letter {sym!r}", lineno, path)
        if sym in rules:
            raise SpecError(f"second rule for {sym!r} (first at line {rules[sym][0]})", lineno, path)
        images = []
        for tok in rhs.split("|"):
            tok = tok.strip()
            if not tok:
                raise SpecError(f"empty image for {sym!r}", lineno, path)
            try:
                w = alphabet.word(tok)
            except ValueError as e:
                raise SpecError(f"{e} in image {tok!r}", lineno, path) from None
            if w in images:
                warnings.warn(f"line {lineno}: duplicate image {tok!r} for {sym!r} dropped",
                              DuplicateImageWarning, stacklevel=2)
                continue
            images.append(w)
        rules[sym] = (lineno, images)
    if alphabet is None:
        raise SpecError("missing alphabet declaration", None, path)
    missing = [s for s in alphabet.symbols if s not in rules]
    if missing:
        raise SpecError(f"missing rule for {', '.join(missing)}", None, path)
    return RandomSubstitution(alphabet, [rules[s][1] for s in alphabet.symbols])


def parse_spec(path: str | Path) -> RandomSubstitution:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"cannot read: {e.strerror}", None, str(path)) from None
    return parse_spec_text(text, str(path))


def format_spec(sub: RandomSubstitution) -> str:
    fmt = sub.alphabet.format
    lines = ["alphabet: " + " ".join(sub.alphabet.symbols)]
    for sym, imgs in zip(sub.alphabet.symbols, sub.images):
        lines.append(f"{sym} -> " + " | ".join(fmt(w) for w in imgs))
    return "\n".join(lines) + "\n"


# substitutions that come up in the tests and docs
CATALOG = {
    "random-fibonacci": "alphabet: a b\na -> ab | ba\nb -> a\n",
    "random-period-doubling": "alphabet: a b\na -> ab | ba\nb -> aa\n",
    "aperiodic-five": "alphabet: a b\na -> aabba | ababa\nb -> aaaaa\n",
    "three-letter": "alphabet: 0 1 2\n0 -> 0102 | 1200 | 0012\n1 -> 010\n2 -> 20102010\n",
    "two-letter-disjoint": "alphabet: 0 1\n0 -> 010 | 100\n1 -> 0101\n",
}


def catalog(name: str) -> RandomSubstitution:
    try:
        return parse_spec_text(CATALOG[name], name)
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}") from None
