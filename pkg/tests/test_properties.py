"""Property-based checks of the library's invariants."""

import math

from hypothesis import HealthCheck, given, settings, strategies as st

from oracles import legal_upto
from rsperiodic.core import (Alphabet, RandomSubstitution, abelianise, apply, cyclic_permute,
                             power, rotations)
from rsperiodic.disjoint import has_disjoint_images
from rsperiodic.language import decompose, fingerprint, legal_words
from rsperiodic.periodic import BlockDecider, Enumerator, divisors
from rsperiodic.spectral import is_primitive, perron_analysis
from rsperiodic.specfile import catalog

RPD = catalog("random-period-doubling")
SETTINGS = settings(max_examples=100, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])

words2 = st.binary(max_size=30).map(lambda b: bytes(x % 3 for x in b))
nonempty = st.binary(min_size=1, max_size=30).map(lambda b: bytes(x % 3 for x in b))


@SETTINGS
@given(words2, words2)
def test_abelianisation_additive(u, v):
    assert abelianise(u + v, 3) == tuple(x + y for x, y in zip(abelianise(u, 3), abelianise(v, 3)))
    assert sum(abelianise(u, 3)) == len(u)


@SETTINGS
@given(nonempty, st.integers(min_value=0, max_value=100))
def test_abelianisation_rotation_invariant(u, i):
    assert abelianise(cyclic_permute(u, i), 3) == abelianise(u, 3)
    assert cyclic_permute(cyclic_permute(u, i), len(u) - i % len(u)) == u


@SETTINGS
@given(st.integers(min_value=2, max_value=10), st.data())
def test_language_factor_closed(n, data):
    slice_n = legal_words(RPD, n)
    w = data.draw(st.sampled_from(slice_n))
    shorter = set(legal_words(RPD, n - 1))
    assert w[1:] in shorter and w[:-1] in shorter


@SETTINGS
@given(st.integers(min_value=1, max_value=10), st.data())
def test_language_extendable(n, data):
    # every legal word extends to a legal word one letter longer, on both sides
    w = data.draw(st.sampled_from(legal_words(RPD, n)))
    longer = legal_words(RPD, n + 1)
    assert any(x[1:] == w for x in longer) and any(x[:-1] == w for x in longer)


def test_disjoint_images_stable_under_powers():
    for k in (2, 3):
        sub = power(RPD, k)
        assert has_disjoint_images(sub)
        assert has_disjoint_images(sub, method="general")


def test_decompose_unique_under_disjoint_images():
    assert has_disjoint_images(RPD)
    for n in range(1, 11):
        for w in legal_words(RPD, n):
            assert len(decompose(RPD, w)) <= 1


def test_image_closure_of_blocks():
    en = Enumerator(RPD)
    dec = BlockDecider(RPD)
    for u in en.blocks(3) + en.blocks(6):
        for w in apply(RPD, u):
            assert dec.decide(w).is_block


def test_mobius_consistency():
    en = Enumerator(RPD)
    for p in (6, 12, 18, 24):
        rep = en.report(p)
        assert rep.per_count == sum(d * rep.orbit_counts[d] for d in divisors(p))


def test_fast_path_equals_general_path():
    fast, general = Enumerator(RPD), Enumerator(RPD, method="general")
    for p in (6, 12):
        assert fast.blocks(p) == general.blocks(p)


def test_growth_upper_bound():
    en = Enumerator(RPD)
    for p in (3, 6, 12):
        bound = (2 ** (2 * p // 3 + 1) * p - 1) * len(en.blocks(p))
        assert len(en.blocks(2 * p)) <= bound


# -- random substitutions ---------------------------------------------------------

@st.composite
def constant_length_subs(draw):
    """Compatible constant-length substitutions on two letters."""
    ell = draw(st.integers(min_value=2, max_value=4))
    images = []
    for _ in range(2):
        count_a = draw(st.integers(min_value=0, max_value=ell))
        base = [0] * count_a + [1] * (ell - count_a)
        perms = draw(st.lists(st.permutations(base), min_size=1, max_size=3))
        images.append([bytes(p) for p in perms])
    return RandomSubstitution(Alphabet.of("ab"), images)


@SETTINGS
@given(constant_length_subs())
def test_disjoint_routes_agree(sub):
    if not is_primitive(sub):
        return
    assert bool(has_disjoint_images(sub)) == bool(has_disjoint_images(sub, method="general"))


@settings(max_examples=40, deadline=None)
@given(constant_length_subs())
def test_random_language_matches_oracle(sub):
    if not is_primitive(sub):
        return
    table = legal_upto(sub, 6)
    for n, words in table.items():
        assert set(legal_words(sub, n)) == words


@SETTINGS
@given(constant_length_subs())
def test_perron_vector_is_eigenvector(sub):
    if not is_primitive(sub):
        return
    pd = perron_analysis(sub)
    # constant length ell always gives lambda = ell
    assert pd.lambda_exact == len(sub.images[0][0])
    m = pd.matrix
    for i in range(2):
        assert sum(m[i][j] * pd.r_hat[j] for j in range(2)) == pd.lambda_exact * pd.r_hat[i]
    assert math.gcd(*pd.r_hat) == 1


@SETTINGS
@given(st.permutations(["a", "b"]), st.booleans())
def test_fingerprint_order_invariant(order, flip):
    rules = {"a": "ab|ba" if flip else "ba|ab", "b": "aa"}
    sub = RandomSubstitution.from_strings({k: rules[k] for k in order}, alphabet="ab")
    assert fingerprint(sub) == fingerprint(RPD)


@SETTINGS
@given(st.sampled_from(Enumerator(RPD).blocks(9)), st.integers(min_value=0, max_value=8))
def test_blocks_rotation_closed(u, i):
    assert cyclic_permute(u, i) in set(Enumerator(RPD).blocks(9))
    assert set(rotations(u)) <= set(Enumerator(RPD).blocks(9))
