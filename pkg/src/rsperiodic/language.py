"""Legal words, exact inflation-word decomposition and unavoidable words."""

from __future__ import annotations

import hashlib
import os
import threading
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional

from .core import RandomSubstitution, Word, sort_words, word_key
from .spectral import NotPrimitiveError, primitivity_exponent


@lru_cache(maxsize=None)
def fingerprint(sub: RandomSubstitution) -> str:
    """Stable hash of the canonicalised rules.

    Independent of rule order and of image order within a rule; depends on
    the letter symbols only, not on their declaration order.
    """
    fmt = sub.alphabet.format
    lines = sorted(
        f"{sym}->{'|'.join(sorted(fmt(w) for w in imgs))}"
        for sym, imgs in zip(sub.alphabet.symbols, sub.images)
    )
    text = "alphabet:" + " ".join(sorted(sub.alphabet.symbols)) + "\n" + "\n".join(lines)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# -- window summaries ---------------------------------------------------------

class _Summary:
    """Everything about a set of equal-level words that length-n windows need.

    ``short``: the words shorter than n, kept whole.  For the remaining (long)
    words only the length-n factors, the length-(n-1) prefixes and the
    length-(n-1) suffixes are kept.
    """

    __slots__ = ("short", "facs", "pre", "suf")

    def __init__(self, short=None, facs=None, pre=None, suf=None):
        self.short = short if short is not None else set()
        self.facs = facs if facs is not None else set()
        self.pre = pre if pre is not None else set()
        self.suf = suf if suf is not None else set()

    def has_long(self) -> bool:
        return bool(self.pre)

    def update(self, other: _Summary) -> None:
        self.short |= other.short
        self.facs |= other.facs
        self.pre |= other.pre
        self.suf |= other.suf

    def frozen(self):
        return (frozenset(self.short), frozenset(self.facs),
                frozenset(self.pre), frozenset(self.suf))


def _by_length(words: set[Word]) -> dict[int, list[Word]]:
    groups: dict[int, list[Word]] = {}
    for w in words:
        groups.setdefault(len(w), []).append(w)
    return groups


def _concat(x: _Summary, y: _Summary, n: int) -> _Summary:
    """Summary of all concatenations ``uv`` with ``u`` from ``x``, ``v`` from ``y``.

    Every product runs over deduplicated tails/heads, so its size is bounded
    by the number of distinct legal words of the resulting length.
    """
    out = _Summary()
    xs, ys = _by_length(x.short), _by_length(y.short)
    for l1, us in xs.items():
        for l2, vs in ys.items():
            if l1 + l2 < n:
                out.short.update(u + v for u in us for v in vs)
    if x.has_long():
        out.facs |= x.facs
        out.pre |= x.pre
    if y.has_long():
        out.facs |= y.facs
        out.suf |= y.suf

    # windows straddling the boundary: r letters from the left part
    left = x.short | x.suf
    right = y.short | y.pre
    for r in range(1, n):
        tails = {a[len(a) - r:] for a in left if len(a) >= r}
        if not tails:
            continue
        heads = {b[:n - r] for b in right if len(b) >= n - r}
        out.facs.update(t + h for t in tails for h in heads)

    # prefixes of long results that start with a short left word
    for l1, us in xs.items():
        need = n - 1 - l1
        heads = {b[:need] for b in y.pre}
        heads.update(b[:need] for l2, vs in ys.items() if l1 + l2 >= n for b in vs)
        out.pre.update(u + h for u in us for h in heads)
    # suffixes of long results that end with a short right word
    for l2, vs in ys.items():
        need = n - 1 - l2
        tails = {a[len(a) - need:] for a in x.suf}
        tails.update(a[len(a) - need:] for l1, us in xs.items() if l1 + l2 >= n for a in us)
        out.suf.update(t + v for t in tails for v in vs)
    return out


def _initial(sub: RandomSubstitution, n: int) -> list[_Summary]:
    states = []
    for a in sub.alphabet.letters():
        if n > 1:
            states.append(_Summary(short={a}))
        else:
            states.append(_Summary(facs={a}, pre={b""}, suf={b""}))
    return states


def _step(sub: RandomSubstitution, states: list[_Summary], n: int) -> list[_Summary]:
    nxt = []
    for imgs in sub.images:
        acc = _Summary()
        for w in imgs:
            cur = states[w[0]]
            for b in w[1:]:
                cur = _concat(cur, states[b], n)
            acc.update(cur)
        nxt.append(acc)
    return nxt


@dataclass(frozen=True)
class LanguageSlice:
    n: int
    words: tuple[Word, ...]
    depth: int

    def __contains__(self, w: Word) -> bool:
        return w in self._set

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    @property
    def _set(self) -> frozenset:
        s = self.__dict__.get("_s")
        if s is None:
            s = frozenset(self.words)
            object.__setattr__(self, "_s", s)
        return s


def compute_legal_words(sub: RandomSubstitution, n: int) -> LanguageSlice:
    """Compute the length-``n`` slice of the language from scratch.

    Iterates the window summaries of ``sub^k(a)`` for ``k = 0, 1, ...``.  The
    summary sequence is deterministic on a finite state space, so it is
    eventually periodic; the iteration stops at the first repeated state and
    returns the union of all length-``n`` windows seen.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if primitivity_exponent(sub) is None:
        raise NotPrimitiveError("language slices need a primitive substitution")
    states = _initial(sub, n)
    seen = {tuple(s.frozen() for s in states): 0}
    found: set[Word] = set()
    for s in states:
        found |= s.facs
    depth = 0
    while True:
        states = _step(sub, states, n)
        depth += 1
        for s in states:
            found |= s.facs
        key = tuple(s.frozen() for s in states)
        if key in seen:
            break
        seen[key] = depth
    return LanguageSlice(n, tuple(sorted(found)), depth)


class LanguageCache:
    """Per-substitution cache of language slices.

    Readers never block each other; computing a missing slice is serialised
    per ``(fingerprint, n)`` key.  With ``directory`` set, slices are also
    persisted as ``<fingerprint>-<n>.txt`` (first line: depth, then one word
    per line in index order).
    """

    def __init__(self, directory: Optional[str | os.PathLike] = None):
        self.directory = Path(directory) if directory else None
        self._slices: dict[tuple[str, int], LanguageSlice] = {}
        self._locks: dict[tuple[str, int], threading.Lock] = {}
        self._guard = threading.Lock()

    def get(self, sub: RandomSubstitution, n: int) -> LanguageSlice:
        key = (fingerprint(sub), n)
        got = self._slices.get(key)
        if got is not None:
            return got
        with self._guard:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            got = self._slices.get(key)
            if got is None:
                got = self._load(sub, key) or compute_legal_words(sub, n)
                self._store(sub, key, got)
                self._slices[key] = got
        return got

    def peek(self, sub: RandomSubstitution, n: int) -> Optional[LanguageSlice]:
        return self._slices.get((fingerprint(sub), n))

    def _path(self, key) -> Optional[Path]:
        if self.directory is None:
            return None
        return self.directory / f"{key[0]}-{key[1]}.txt"

    def _load(self, sub, key) -> Optional[LanguageSlice]:
        path = self._path(key)
        if path is None or not path.exists():
            return None
        lines = path.read_text(encoding="utf-8").splitlines()
        depth = int(lines[0])
        words = tuple(sorted(sub.alphabet.word(t) for t in lines[1:]))
        return LanguageSlice(key[1], words, depth)

    def _store(self, sub, key, sl: LanguageSlice) -> None:
        path = self._path(key)
        if path is None or path.exists():
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        body = "".join(sub.alphabet.format(w) + "\n" for w in sl.words)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(f"{sl.depth}\n{body}", encoding="utf-8")
        tmp.replace(path)

    def clear(self) -> None:
        self._slices.clear()


default_cache = LanguageCache()


def legal_words(sub: RandomSubstitution, n: int,
                cache: Optional[LanguageCache] = None) -> list[Word]:
    """The legal words of length ``n``, sorted."""
    return list((cache or default_cache).get(sub, n).words)


# -- legality of arbitrary words ------------------------------------------------

def _base_length(sub: RandomSubstitution) -> int:
    return 2 * sub.max_image_len + 2


def _covers(sub: RandomSubstitution, w: Word, legal_pair) -> Iterable[Word]:
    """Preimages ``v`` such that ``w`` is a factor of ``sub(v)`` meeting every
    inflation word.

    ``legal_pair`` is a cheap necessary test on the last two preimage letters.
    """
    n = len(w)
    by_letter = list(enumerate(sub.images))
    # (pos, previous letter) pairs known to admit no completion
    dead: set[tuple[int, int]] = set()

    def tail(pos: int, prev: int) -> Iterable[tuple[int, ...]]:
        if (pos, prev) in dead:
            return
        produced = False
        rest = n - pos
        for c, imgs in by_letter:
            if not legal_pair(prev, c):
                continue
            for x in imgs:
                if len(x) >= rest:
                    if x[:rest] == w[pos:]:
                        produced = True
                        yield (c,)
                elif w.startswith(x, pos):
                    for more in tail(pos + len(x), c):
                        produced = True
                        yield (c,) + more
        if not produced:
            dead.add((pos, prev))

    for c, imgs in by_letter:
        if any(w in x for x in imgs):
            yield bytes((c,))
    for c, imgs in by_letter:
        for x in imgs:
            for t in range(1, min(len(x), n - 1) + 1):
                if x.endswith(w[:t]):
                    for more in tail(t, c):
                        yield bytes((c,) + more)


class _LegalityOracle:
    """Legality of words of any length via recursive de-substitution.

    Short words are looked up in cached slices; a longer word is legal iff
    it has a cover whose preimage is legal.
    """

    def __init__(self, sub: RandomSubstitution, cache: LanguageCache):
        self.sub = sub
        self.cache = cache
        self.base = _base_length(sub)
        self.known: dict[Word, bool] = {}
        pairs = cache.get(sub, 2) if sub.d > 0 else ()
        self.pairs = {(w[0], w[1]) for w in pairs}

    def _pair(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs

    def __call__(self, w: Word) -> bool:
        if len(w) <= self.base:
            return w in self.cache.get(self.sub, len(w))
        got = self.known.get(w)
        if got is not None:
            return got
        sl = self.cache.peek(self.sub, len(w))
        if sl is not None:
            return w in sl
        result, _ = self._check(w, set())
        return result

    def _check(self, w: Word, stack: set[Word]) -> tuple[bool, bool]:
        """Returns (legal, depended_on_open_node)."""
        if len(w) <= self.base:
            return w in self.cache.get(self.sub, len(w)), False
        got = self.known.get(w)
        if got is not None:
            return got, False
        if w in stack:
            return False, True
        stack.add(w)
        tainted = False
        result = False
        tried: set[Word] = set()
        for v in _covers(self.sub, w, self._pair):
            if v in tried:
                continue
            tried.add(v)
            ok, t = self._check(v, stack)
            tainted |= t
            if ok:
                result = True
                break
        stack.discard(w)
        # a negative answer that leaned on an unfinished ancestor is provisional
        if result or not tainted:
            self.known[w] = result
        return result, tainted and not result


_oracles: dict[tuple[int, RandomSubstitution], _LegalityOracle] = {}
_oracle_lock = threading.Lock()


def _oracle(sub: RandomSubstitution, cache: Optional[LanguageCache]) -> _LegalityOracle:
    cache = cache or default_cache
    key = (id(cache), sub)
    with _oracle_lock:
        o = _oracles.get(key)
        if o is None:
            o = _oracles[key] = _LegalityOracle(sub, cache)
    return o


def is_legal(sub: RandomSubstitution, u: Word, cache: Optional[LanguageCache] = None) -> bool:
    if not u:
        raise ValueError("empty word")
    return _oracle(sub, cache)(u)


# -- exact decomposition into inflation words ------------------------------------

@dataclass(frozen=True)
class Decomposition:
    preimage: Word
    cut_points: tuple[int, ...]
    realisations: tuple[Word, ...]


def _exact_parses(sub: RandomSubstitution, w: Word) -> list[tuple[tuple[int, Word], ...]]:
    n = len(w)
    by_letter = list(enumerate(sub.images))
    # reach[pos]: pos can be completed to n with full inflation words
    reach = [False] * (n + 1)
    reach[n] = True
    for pos in range(n - 1, -1, -1):
        reach[pos] = any(
            reach[pos + len(x)] and w.startswith(x, pos)
            for _, imgs in by_letter for x in imgs if pos + len(x) <= n
        )
    if not reach[0]:
        return []
    out = []

    def walk(pos, acc):
        if pos == n:
            out.append(tuple(acc))
            return
        for c, imgs in by_letter:
            for x in imgs:
                end = pos + len(x)
                if end <= n and reach[end] and w.startswith(x, pos):
                    acc.append((c, x))
                    walk(end, acc)
                    acc.pop()

    walk(0, [])
    return out


def decompose(sub: RandomSubstitution, w: Word,
              cache: Optional[LanguageCache] = None) -> list[Decomposition]:
    """All ways to write ``w`` as consecutive full inflation words whose
    preimage is legal, sorted by preimage."""
    if not w:
        return []
    legal = _oracle(sub, cache)
    out = []
    for parse in _exact_parses(sub, w):
        pre = bytes(c for c, _ in parse)
        if not legal(pre):
            continue
        cuts, pos = [], 0
        for _, x in parse:
            pos += len(x)
            cuts.append(pos)
        out.append(Decomposition(pre, tuple(cuts), tuple(x for _, x in parse)))
    out.sort(key=lambda d: (word_key(d.preimage), d.cut_points))
    return out


def preimages(sub: RandomSubstitution, w: Word,
              cache: Optional[LanguageCache] = None) -> list[Word]:
    return sort_words(d.preimage for d in decompose(sub, w, cache))


# -- unavoidable words -----------------------------------------------------------

@dataclass(frozen=True)
class Unavoidability:
    unavoidable: bool
    n: int
    witness: Optional[Word] = None

    def __bool__(self):
        return self.unavoidable


def unavoidable(sub: RandomSubstitution, words: Iterable[Word], n: int,
                cache: Optional[LanguageCache] = None) -> Unavoidability:
    """Does every legal word of length ``n`` contain one of ``words``?

    On failure the least legal ``n``-word avoiding all of them is returned.
    """
    pats = sort_words(words)
    if not pats:
        raise ValueError("need at least one word")
    if n < max(len(v) for v in pats):
        raise ValueError("n must be at least the longest word")
    for w in (cache or default_cache).get(sub, n):
        if not any(v in w for v in pats):
            return Unavoidability(False, n, w)
    return Unavoidability(True, n)
