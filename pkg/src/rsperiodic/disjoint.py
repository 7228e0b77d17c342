"""Deciding the disjoint images property.

A random substitution has disjoint images when distinct legal words never
share a realisation.  For substitutions whose images of any one letter all
have the same length, a shared realisation of ``u != v`` must at some point
branch into images of two different letters where one image is a prefix of
the other.  From every such branching point the search below tracks the
unmatched remainder of the side that is ahead, extending the other side one
inflation word at a time until the two sides line up again.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .core import RandomSubstitution, Word, apply_power, word_key
from .language import LanguageCache, is_legal
from .spectral import constant_length, require_compatible


class ProcedureInapplicable(ValueError):
    """Images of one letter have different lengths."""


@dataclass(frozen=True)
class Witness:
    u: Word
    v: Word
    w: Word


@dataclass(frozen=True)
class Quadruple:
    a: int
    b: int
    wa: Word
    wb: Word


@dataclass(frozen=True)
class DisjointReport:
    disjoint: bool
    method: str
    witness: Optional[Witness] = None
    # per quadruple, the (remainder, owing side) states that were explored
    certificate: tuple[tuple[Quadruple, tuple[tuple[Word, str], ...]], ...] = ()

    def __bool__(self):
        return self.disjoint


def _check_lengths(sub: RandomSubstitution) -> None:
    for sym, imgs in zip(sub.alphabet.symbols, sub.images):
        if len({len(w) for w in imgs}) > 1:
            raise ProcedureInapplicable(f"images of {sym} have different lengths")


def _oriented(u: Word, v: Word, w: Word) -> Witness:
    if word_key(v) < word_key(u):
        u, v = v, u
    return Witness(u, v, w)


def starting_quadruples(sub: RandomSubstitution) -> list[Quadruple]:
    out = []
    for a, ia in enumerate(sub.images):
        for b, ib in enumerate(sub.images):
            if a == b:
                continue
            for wa in ia:
                for wb in ib:
                    if wb.startswith(wa):
                        out.append(Quadruple(a, b, wa, wb))
    out.sort(key=lambda q: (q.a, q.b, word_key(q.wa), word_key(q.wb)))
    return out


@dataclass
class _Path:
    u: Word
    v: Word
    img_u: Word
    img_v: Word
    rem: Word
    owing: str
    seen: frozenset = field(default_factory=frozenset)


def _search(sub: RandomSubstitution, q: Quadruple, legal,
            explored: set) -> Optional[Witness]:
    a, b = bytes([q.a]), bytes([q.b])
    if q.wa == q.wb:
        return Witness(a, b, q.wa) if legal(a) and legal(b) else None
    if not (legal(a) and legal(b)):
        return None
    start = _Path(a, b, q.wa, q.wb, q.wb[len(q.wa):], "u")
    start.seen = frozenset({(start.rem, start.owing)})
    explored.add((start.rem, start.owing))
    queue = deque([start])
    letters = list(enumerate(sub.images))
    while queue:
        p = queue.popleft()
        for c, imgs in letters:
            for x in imgs:
                if x == p.rem:
                    rem, owing = b"", p.owing
                elif x.startswith(p.rem):
                    rem, owing = x[len(p.rem):], ("v" if p.owing == "u" else "u")
                elif p.rem.startswith(x):
                    rem, owing = p.rem[len(x):], p.owing
                else:
                    continue
                if p.owing == "u":
                    nu, nv, iu, iv = p.u + bytes([c]), p.v, p.img_u + x, p.img_v
                    grown = nu
                else:
                    nu, nv, iu, iv = p.u, p.v + bytes([c]), p.img_u, p.img_v + x
                    grown = nv
                if not legal(grown):
                    continue  # legality is factor closed
                if not rem:
                    assert iu == iv
                    return _oriented(nu, nv, iu)
                state = (rem, owing)
                if state in p.seen:
                    continue
                explored.add(state)
                queue.append(_Path(nu, nv, iu, iv, rem, owing, p.seen | {state}))
    return None


def has_disjoint_images(sub: RandomSubstitution, method: str = "auto",
                        cache: Optional[LanguageCache] = None) -> DisjointReport:
    """Decide whether distinct legal words always have disjoint image sets.

    ``method`` is ``"auto"``, ``"constant_length"`` or ``"general"``.
    """
    _check_lengths(sub)
    ell = constant_length(sub)
    if method == "constant_length" or (method == "auto" and ell is not None):
        if ell is None:
            raise ProcedureInapplicable("substitution is not of constant length")
        for a in range(sub.d):
            for b in range(a + 1, sub.d):
                common = sorted(set(sub.images[a]) & set(sub.images[b]))
                if common:
                    w = Witness(bytes([a]), bytes([b]), common[0])
                    return DisjointReport(False, "constant_length", w)
        return DisjointReport(True, "constant_length")
    if method not in ("auto", "general"):
        raise ValueError(f"unknown method {method!r}")

    def legal(w: Word) -> bool:
        return is_legal(sub, w, cache)

    cert = []
    for q in starting_quadruples(sub):
        explored: set = set()
        found = _search(sub, q, legal, explored)
        if found is not None:
            return DisjointReport(False, "general", found)
        cert.append((q, tuple(sorted(explored, key=lambda s: (word_key(s[0]), s[1])))))
    return DisjointReport(True, "general", certificate=tuple(cert))


def common_image(sub: RandomSubstitution, u: Word, v: Word) -> Optional[Word]:
    """Some word in both ``sub(u)`` and ``sub(v)``, or ``None``.

    Walks ``u`` and ``v`` in parallel, tracking which side is ahead and by
    what remainder; the walk has finitely many states, so it is memoised.
    """
    images = sub.images

    # returns the rest of the u-side realisation, or None
    @lru_cache(maxsize=None)
    def go(i: int, j: int, rem: Word, owing: str) -> Optional[Word]:
        if not rem:
            if i == len(u) or j == len(v):
                return b"" if i == len(u) and j == len(v) else None
            for x in images[u[i]]:
                for y in images[v[j]]:
                    if x == y:
                        tail = go(i + 1, j + 1, b"", "")
                    elif y.startswith(x):
                        tail = go(i + 1, j + 1, y[len(x):], "u")
                    elif x.startswith(y):
                        tail = go(i + 1, j + 1, x[len(y):], "v")
                    else:
                        continue
                    if tail is not None:
                        return x + tail
            return None
        if owing == "u":
            if i == len(u):
                return None
            for x in images[u[i]]:
                if x == rem:
                    tail = go(i + 1, j, b"", "")
                elif x.startswith(rem):
                    tail = go(i + 1, j, x[len(rem):], "v")
                elif rem.startswith(x):
                    tail = go(i + 1, j, rem[len(x):], "u")
                else:
                    continue
                if tail is not None:
                    return x + tail
            return None
        if j == len(v):
            return None
        for y in images[v[j]]:
            if y == rem:
                tail = go(i, j + 1, b"", "")
            elif y.startswith(rem):
                tail = go(i, j + 1, y[len(rem):], "u")
            elif rem.startswith(y):
                tail = go(i, j + 1, rem[len(y):], "v")
            else:
                continue
            if tail is not None:
                return tail
        return None

    if not u or not v:
        raise ValueError("empty word")
    return go(0, 0, b"", "")


@dataclass(frozen=True)
class InflationReport:
    violated: bool
    m_max: int
    letter: Optional[int] = None
    m: Optional[int] = None
    witness: Optional[Witness] = None

    def __bool__(self):
        return not self.violated


def has_disjoint_inflation_images(sub: RandomSubstitution, m_max: int) -> InflationReport:
    """Look for ``u != v`` in some ``sub^m(a)``, ``m <= m_max``, with a common image.

    A hit shows the substitution is not globally uniquely recognisable;
    finding nothing says nothing about ``m > m_max``.
    """
    require_compatible(sub)
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    for m in range(1, m_max + 1):
        for a, letter in enumerate(sub.alphabet.letters()):
            words = apply_power(sub, letter, m)
            for i, u in enumerate(words):
                for v in words[i + 1:]:
                    w = common_image(sub, u, v)
                    if w is not None:
                        return InflationReport(True, m_max, a, m, Witness(u, v, w))
    return InflationReport(False, m_max)
