"""Periodic points: existence criteria, the periodic-block test, enumeration.

A periodic point ``x`` with ``x = ...uuu...`` is represented by its block
``u``; ``Per_p`` is the set of length-``p`` words ``u`` with ``u^∞`` in the
subshift (so every rotation of a block is a block).
"""

from __future__ import annotations

import multiprocessing as mp
from dataclasses import dataclass, field
from typing import Optional

from .core import (RandomSubstitution, Word, abelianise, apply, least_rotation,
                   primitive_root, rotations)
from .disjoint import has_disjoint_images
from .language import LanguageCache, decompose, default_cache, is_legal, legal_words, unavoidable
from .spectral import (NotPrimitiveError, PerronData, constant_length, is_primitive,
                       perron_analysis, require_compatible)


class NotDisjointError(ValueError):
    pass


def _analysis(sub: RandomSubstitution) -> PerronData:
    require_compatible(sub)
    if not is_primitive(sub):
        raise NotPrimitiveError("substitution is not primitive")
    return perron_analysis(sub)


@dataclass(frozen=True)
class Conditions:
    ok: bool
    reason: Optional[str] = None
    forced: Optional[tuple[int, ...]] = None

    def __bool__(self):
        return self.ok


def necessary_conditions(sub: RandomSubstitution, p: int,
                         perron: Optional[PerronData] = None) -> Conditions:
    """Cheap tests every length-``p`` periodic block must pass.

    On success ``forced`` is the letter-count vector all such blocks share.
    """
    if p < 1:
        raise ValueError("period must be positive")
    pd = perron or _analysis(sub)
    if pd.lambda_exact is None:
        return Conditions(False, "irrational_lambda")
    if p % pd.virtual_period:
        return Conditions(False, f"virtual period {pd.virtual_period} does not divide {p}")
    k = p // pd.virtual_period
    return Conditions(True, forced=tuple(k * r for r in pd.r_hat))


# -- emptiness -------------------------------------------------------------------

@dataclass(frozen=True)
class ExistenceReport:
    lambda_integer: bool
    virtual_period: Optional[int]
    proven_empty: bool
    reason: Optional[str] = None      # irrational_lambda | unavoidable_word | unavoidable_set
    words: tuple[Word, ...] = ()
    depth: Optional[int] = None
    witness: Optional[Word] = None    # inconclusive: a legal word avoiding all candidates


def emptiness_check(sub: RandomSubstitution, n: int,
                    cache: Optional[LanguageCache] = None) -> ExistenceReport:
    """Try to prove that the subshift has no periodic points.

    First an irrational expansion factor.  Otherwise, with constant length
    ``ℓ`` and disjoint images, let ``V`` be the legal length-``ℓ`` words that
    are not inflation words; for ``N = ℓ..n`` look for a single word of ``V``,
    then ``V`` itself, occurring in every legal word of length ``N``.
    """
    pd = _analysis(sub)
    if pd.lambda_exact is None:
        return ExistenceReport(False, None, True, "irrational_lambda")
    ell = constant_length(sub)
    base = dict(lambda_integer=True, virtual_period=pd.virtual_period)
    if ell is None or not has_disjoint_images(sub, cache=cache):
        return ExistenceReport(**base, proven_empty=False)
    images = sub.inflation_words()
    cands = [v for v in legal_words(sub, ell, cache) if v not in images]
    if not cands:
        return ExistenceReport(**base, proven_empty=False)
    last = None
    for depth in range(ell, n + 1):
        for v in cands:
            if unavoidable(sub, [v], depth, cache):
                return ExistenceReport(**base, proven_empty=True, reason="unavoidable_word",
                                       words=(v,), depth=depth)
        last = unavoidable(sub, cands, depth, cache)
        if last:
            return ExistenceReport(**base, proven_empty=True, reason="unavoidable_set",
                                   words=tuple(cands), depth=depth)
    return ExistenceReport(**base, proven_empty=False, words=tuple(cands),
                           depth=n if last is not None else None,
                           witness=last.witness if last is not None else None)


# -- periodic-block test ------------------------------------------------------------

@dataclass(frozen=True)
class LoopStep:
    """``cyclic_permute(word * j, i)`` is a realisation of ``preimage``."""
    word: Word
    i: int
    j: int
    preimage: Word


@dataclass(frozen=True)
class TraceEntry:
    word: Word
    failure: str     # illegal | repeat_illegal | conditions | no_decomposition | exhausted | known_bad
    detail: str = ""


@dataclass(frozen=True)
class PeriodicBlockVerdict:
    word: Word
    root: Word
    is_block: bool
    certificate: tuple[LoopStep, ...] = ()
    trace: tuple[TraceEntry, ...] = ()

    def __bool__(self):
        return self.is_block


def _realises(sub: RandomSubstitution, target: Word, preimage: Word) -> bool:
    """Is ``target`` in ``sub(preimage)``?  (No enumeration of realisations.)"""
    ends = {0}
    for a in preimage:
        ends = {e + len(x) for e in ends for x in sub.images[a] if target.startswith(x, e)}
        if not ends:
            return False
    return len(target) in ends


def validate_certificate(sub: RandomSubstitution, steps: tuple[LoopStep, ...]) -> bool:
    """Check each step and that the chain closes a loop of rotation classes."""
    if not steps:
        return False
    classes = []
    for k, st in enumerate(steps):
        src = st.word * st.j
        target = src[st.i:] + src[:st.i]
        if not _realises(sub, target, st.preimage):
            return False
        if k and least_rotation(primitive_root(steps[k - 1].preimage)) != least_rotation(st.word):
            return False
        classes.append(least_rotation(st.word))
    return least_rotation(primitive_root(steps[-1].preimage)) in classes


class BlockDecider:
    """Decides whether words are periodic blocks, remembering every verdict.

    The candidates reachable from a word by taking unique legal preimages of
    rotated powers form a finite graph on rotation classes; the word is a
    block exactly when that graph, restricted to candidates passing the
    cheap filters, reaches a cycle.
    """

    def __init__(self, sub: RandomSubstitution, cache: Optional[LanguageCache] = None,
                 check_disjoint: bool = True):
        self.sub = sub
        self.cache = cache or default_cache
        self.perron = _analysis(sub)
        if check_disjoint and not has_disjoint_images(sub, cache=self.cache):
            raise NotDisjointError("periodic-block test needs disjoint images")
        self.ell = constant_length(sub)
        self.good: dict[Word, tuple[LoopStep, ...]] = {}
        self.bad: set[Word] = set()

    def _filter(self, c: Word) -> Optional[TraceEntry]:
        cond = necessary_conditions(self.sub, len(c), self.perron)
        if not cond:
            return TraceEntry(c, "conditions", cond.reason)
        if abelianise(c, self.sub.d) != cond.forced:
            return TraceEntry(c, "conditions", f"letter counts differ from {cond.forced}")
        if not is_legal(self.sub, c, self.cache):
            return TraceEntry(c, "illegal")
        if not is_legal(self.sub, c + c, self.cache):
            return TraceEntry(c + c, "repeat_illegal")
        return None

    def successors(self, c: Word) -> list[LoopStep]:
        q = len(c)
        out, seen = [], set()
        for j in range(1, self.sub.max_image_len + 1):
            if self.ell is not None and (j * q) % self.ell:
                continue
            src = c * j
            for i in range(q):
                for d in decompose(self.sub, src[i:] + src[:i], self.cache):
                    key = least_rotation(primitive_root(d.preimage))
                    if key not in seen:
                        seen.add(key)
                        out.append(LoopStep(c, i, j, d.preimage))
        return out

    def decide(self, u: Word, trace: bool = False) -> PeriodicBlockVerdict:
        if not u:
            raise ValueError("empty word")
        root = primitive_root(u)
        log: list[TraceEntry] = []
        ok, cert = self._search(root, log if trace else None)
        return PeriodicBlockVerdict(u, root, ok, cert, tuple(log))

    def _search(self, start: Word, log) -> tuple[bool, tuple[LoopStep, ...]]:
        key0 = least_rotation(start)
        if key0 in self.good:
            return True, self.good[key0]
        if key0 in self.bad:
            if log is not None:
                log.append(TraceEntry(start, "known_bad"))
            return False, ()
        # iterative DFS; frames are (key, word, successor steps, next index, step taken)
        on_stack: dict[Word, int] = {}
        frames: list[list] = []
        path: list[LoopStep] = []

        def push(word: Word) -> bool:
            fail = self._filter(word)
            key = least_rotation(word)
            if fail is not None:
                self.bad.add(key)
                if log is not None:
                    log.append(fail)
                return False
            steps = self.successors(word)
            if not steps and log is not None:
                log.append(TraceEntry(word, "no_decomposition"))
            on_stack[key] = len(frames)
            frames.append([key, word, steps, 0])
            return True

        def succeed(tail: tuple[LoopStep, ...]) -> tuple[bool, tuple[LoopStep, ...]]:
            cert = tuple(path) + tail
            for depth, frame in enumerate(frames):
                self.good[frame[0]] = cert[depth:]
            return True, cert

        if not push(start):
            return False, ()
        while frames:
            frame = frames[-1]
            key, word, steps, idx = frame
            if idx == len(steps):
                frames.pop()
                del on_stack[key]
                self.bad.add(key)
                if log is not None and steps:
                    log.append(TraceEntry(word, "exhausted"))
                if path:
                    path.pop()
                continue
            frame[3] += 1
            step = steps[idx]
            nxt = primitive_root(step.preimage)
            nkey = least_rotation(nxt)
            if nkey in on_stack:
                path.append(step)
                return succeed(())
            if nkey in self.good:
                path.append(step)
                return succeed(self.good[nkey])
            if nkey in self.bad:
                if log is not None:
                    log.append(TraceEntry(nxt, "known_bad"))
                continue
            path.append(step)
            if not push(nxt):
                path.pop()
        return False, ()


def is_periodic_block(sub: RandomSubstitution, u: Word, cache: Optional[LanguageCache] = None,
                      trace: bool = True) -> PeriodicBlockVerdict:
    return BlockDecider(sub, cache).decide(u, trace=trace)


def periodic_image_blocks(sub: RandomSubstitution, u: Word,
                          cache: Optional[LanguageCache] = None) -> list[Word]:
    """All realisations of a periodic block; each is a block ``λ`` times longer."""
    pd = _analysis(sub)
    if pd.lambda_exact is None:
        raise ValueError("expansion factor is not an integer")
    if not BlockDecider(sub, cache).decide(u):
        raise ValueError(f"{sub.alphabet.format(u)} is not a periodic block")
    return apply(sub, u)


# -- enumeration -----------------------------------------------------------------------

def mobius(n: int) -> int:
    result, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            result = -result
        k += 1
    return -result if n > 1 else result


def divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


@dataclass(frozen=True)
class EnumerationReport:
    period: int
    blocks: tuple[Word, ...]
    per_count: int
    per_counts: dict[int, int] = field(default_factory=dict)    # divisor -> |Per_d|
    orbit_counts: dict[int, int] = field(default_factory=dict)  # divisor -> |Orb_d|


_worker: Optional[BlockDecider] = None


def _init_worker(sub, cache):
    global _worker
    _worker = BlockDecider(sub, cache, check_disjoint=False)


def _decide_chunk(words: list[Word]) -> list[Word]:
    return [w for w in words if _worker.decide(w).is_block]


class Enumerator:
    """Computes ``Per_p`` for one substitution, caching every period it sees.

    ``method`` selects how periods divisible by the constant length ``ℓ`` are
    handled: ``"auto"`` substitutes the blocks of period ``p/ℓ``, ``"general"``
    always runs the block test on candidates.
    """

    def __init__(self, sub: RandomSubstitution, jobs: int = 1,
                 cache: Optional[LanguageCache] = None, method: str = "auto"):
        if method not in ("auto", "general"):
            raise ValueError(f"unknown method {method!r}")
        self.sub = sub
        self.jobs = max(1, jobs)
        self.cache = cache or default_cache
        self.method = method
        self.perron = _analysis(sub)
        self._decider: Optional[BlockDecider] = None
        self.ell = constant_length(sub)
        self._blocks: dict[int, list[Word]] = {}

    @property
    def decider(self) -> BlockDecider:
        # built lazily so that periods ruled out by the necessary conditions
        # need no disjoint-images verdict
        if self._decider is None:
            self._decider = BlockDecider(self.sub, self.cache)
        return self._decider

    def blocks(self, p: int) -> list[Word]:
        got = self._blocks.get(p)
        if got is None:
            got = self._compute(p)
            self._blocks[p] = got
        return got

    def _compute(self, p: int) -> list[Word]:
        cond = necessary_conditions(self.sub, p, self.perron)
        if not cond:
            return []
        if self._decider is None:
            self._decider = BlockDecider(self.sub, self.cache)
        if self.method == "auto" and self.ell and self.ell > 1 and p % self.ell == 0:
            return self._fast(p)
        return self._general(p, cond.forced)

    def _fast(self, p: int) -> list[Word]:
        out: set[Word] = set()
        for b in self.blocks(p // self.ell):
            for w in apply(self.sub, b):
                out.update(rotations(w))
        return sorted(out)

    def candidates(self, p: int, forced: tuple[int, ...]) -> list[Word]:
        """Least rotations of the legal words with the forced letter counts
        all of whose rotations are legal."""
        pool = {w for w in legal_words(self.sub, p, self.cache)
                if abelianise(w, self.sub.d) == forced}
        reps = set()
        for w in pool:
            rots = rotations(w)
            if all(r in pool for r in rots):
                reps.add(min(rots))
        return sorted(reps)

    def _general(self, p: int, forced: tuple[int, ...]) -> list[Word]:
        reps = self.candidates(p, forced)
        if self.jobs > 1 and len(reps) > 1:
            accepted = self._parallel(reps)
        else:
            accepted = [w for w in reps if self.decider.decide(w).is_block]
        out: set[Word] = set()
        for w in accepted:
            out.update(rotations(w))
        return sorted(out)

    def _parallel(self, reps: list[Word]) -> list[Word]:
        chunks = [reps[k::self.jobs] for k in range(self.jobs)]
        ctx = mp.get_context("fork")
        with ctx.Pool(self.jobs, initializer=_init_worker, initargs=(self.sub, self.cache)) as pool:
            parts = pool.map(_decide_chunk, chunks)
        return sorted(w for part in parts for w in part)

    def report(self, p: int) -> EnumerationReport:
        if p < 1:
            raise ValueError("period must be positive")
        blocks = self.blocks(p)
        per = {d: len(self.blocks(d)) for d in divisors(p)}
        orbits = {}
        for d in per:
            total = sum(mobius(d // e) * per[e] for e in divisors(d))
            if total % d:
                raise ArithmeticError(f"orbit count for period {d} is not an integer")
            orbits[d] = total // d
        return EnumerationReport(p, tuple(blocks), len(blocks), per, orbits)


def enumerate_blocks(sub: RandomSubstitution, p: int, jobs: int = 1,
                     cache: Optional[LanguageCache] = None,
                     method: str = "auto") -> EnumerationReport:
    return Enumerator(sub, jobs, cache, method).report(p)
