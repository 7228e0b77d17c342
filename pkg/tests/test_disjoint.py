import pytest

from oracles import legal_upto
from rsperiodic.core import RandomSubstitution, apply, power
from rsperiodic.disjoint import (ProcedureInapplicable, common_image, has_disjoint_images,
                                 has_disjoint_inflation_images, starting_quadruples)
from rsperiodic.language import is_legal


def check_witness(sub, rep):
    u, v, w = rep.witness.u, rep.witness.v, rep.witness.w
    assert u != v and is_legal(sub, u) and is_legal(sub, v)
    assert w in apply(sub, u) and w in apply(sub, v)


def test_fibonacci(fib):
    rep = has_disjoint_images(fib)
    assert not rep
    fmt = fib.alphabet.format
    assert (fmt(rep.witness.u), fmt(rep.witness.v), fmt(rep.witness.w)) == ("ab", "ba", "aba")
    check_witness(fib, rep)


def test_three_letter(tri):
    rep = has_disjoint_images(tri)
    assert not rep
    fmt = tri.alphabet.format
    assert (fmt(rep.witness.u), fmt(rep.witness.v), fmt(rep.witness.w)) == ("12", "001", "01020102010")
    check_witness(tri, rep)


def test_two_letter_disjoint(di):
    rep = has_disjoint_images(di)
    assert rep and rep.method == "general"
    assert len(rep.certificate) == len(starting_quadruples(di))


def test_rpd_both_routes(rpd):
    assert has_disjoint_images(rpd).method == "constant_length"
    assert has_disjoint_images(rpd)
    assert has_disjoint_images(rpd, method="general")


def test_constant_length_shortcut_finds_shared_image():
    sub = RandomSubstitution.from_strings({"a": "ab|ba", "b": "ab"})
    rep = has_disjoint_images(sub)
    assert not rep and sub.alphabet.format(rep.witness.w) == "ab"
    assert not has_disjoint_images(sub, method="general")


def test_inapplicable():
    sub = RandomSubstitution.from_strings({"a": "ab|b", "b": "a"})
    with pytest.raises(ProcedureInapplicable):
        has_disjoint_images(sub)
    with pytest.raises(ProcedureInapplicable):
        has_disjoint_images(RandomSubstitution.from_strings({"a": "ab|ba", "b": "a"}),
                            method="constant_length")


def brute_disjoint(sub, n):
    """No two distinct legal words of length <= n share a realisation."""
    table = legal_upto(sub, n)
    owner = {}
    for k, words in table.items():
        for u in words:
            for img in apply(sub, u):
                if img in owner and owner[img] != u:
                    return False
                owner[img] = u
    return True


@pytest.mark.parametrize("name", ["fib", "rpd", "tri", "di"])
def test_verdicts_agree_with_brute_force(name, request):
    sub = request.getfixturevalue(name)
    assert bool(has_disjoint_images(sub)) == brute_disjoint(sub, 5)


def test_common_image_matches_brute_force(fib, rpd, di):
    for sub in (fib, rpd, di):
        words = sorted(set().union(*legal_upto(sub, 4).values()))
        for u in words:
            for v in words:
                if u >= v:
                    continue
                got = common_image(sub, u, v)
                shared = set(apply(sub, u)) & set(apply(sub, v))
                assert (got is not None) == bool(shared)
                if got is not None:
                    assert got in shared


def test_inflation_images(fib, rpd, di):
    rep = has_disjoint_inflation_images(fib, 1)
    assert not rep and rep.m == 1
    assert fib.alphabet.format(rep.witness.w) == "aba"
    assert has_disjoint_inflation_images(rpd, 2)
    assert has_disjoint_inflation_images(di, 2)
    with pytest.raises(ValueError):
        has_disjoint_inflation_images(rpd, 0)


def test_powers_of_rpd_keep_disjoint_images(rpd):
    for k in (2, 3):
        assert has_disjoint_images(power(rpd, k))
