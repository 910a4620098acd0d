import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.stallings import (
    BasisExpresser,
    NotABasis,
    ResourceCapExceeded,
    SubgroupGraph,
    build,
    conjugate_intersections,
    cyclic_malnormal_fastpath,
    height,
    height_leq,
    intersect,
    is_finite_index,
    is_malnormal,
    membership,
    rank,
)
from artifact.words import Alphabet, CyclicWord, Word, WordError, substitute

import oracles

AB = Alphabet.of("a b")


def w(text):
    return Word.parse(text, AB)


def sub(*texts):
    return build([w(t) for t in texts], AB)


def random_word(rng, n, max_len, min_len=1):
    letters = []
    length = rng.randint(min_len, max_len)
    while len(letters) < length:
        x = rng.choice([1, -1, 2, -2][: 2 * n])
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return tuple(letters)


def check_witness(H, x):
    wit = membership(H, x)
    assert wit is not None
    assert substitute(wit, dict(zip(H.basis_alphabet, H.basis())), AB) == x


gens_strategy = st.lists(
    st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=6), min_size=1, max_size=3)


# -- build / rank / index -------------------------------------------------------


def test_build_examples():
    H = sub("a^2", "b")
    assert (H.num_vertices, len(H.edges)) == (2, 3)
    E = build([], AB)
    assert (E.num_vertices, E.edges) == (1, ())
    A = sub("a", "a^-1")
    assert (A.num_vertices, A.edges) == (1, ((0, 0, 0),))


def test_build_empty_needs_alphabet():
    with pytest.raises(WordError):
        build([])


def test_rank_examples():
    assert rank(sub("a^2", "b", "a b a^-1")) == 3
    assert rank(build([], AB)) == 0


def test_rank_of_long_word():
    from artifact.repro import block_word

    x1 = block_word(1, 464)
    assert len(x1) == 107879
    assert rank(build([x1])) == 1


def test_finite_index_examples():
    assert is_finite_index(sub("a^2", "b", "a b a^-1")) == 2
    assert is_finite_index(sub("a")) is None
    assert is_finite_index(sub("a", "b")) == 1


def test_serialization_round_trip():
    H = sub("a^2", "b a b^-1")
    assert SubgroupGraph.parse(H.serialize(), AB) == H
    with pytest.raises(WordError):
        SubgroupGraph.parse("2\n0 a 1\n", AB)  # vertex 1 is a hanging leaf
    with pytest.raises(WordError):
        SubgroupGraph.parse("1\n0 a 0\n0 a 0\n", AB)


@settings(max_examples=100, deadline=None)
@given(gens_strategy, st.integers(0, 10**6))
def test_folding_confluence(gens, seed):
    words = [Word(AB, tuple(g)) for g in gens]
    ref = build(words, AB).serialize()
    rng = random.Random(seed)
    for _ in range(10):
        order = list(words)
        rng.shuffle(order)
        assert build(order, AB, rng=rng).serialize() == ref


@settings(max_examples=100, deadline=None)
@given(gens_strategy)
def test_folding_matches_naive_folding(gens):
    words = [Word(AB, tuple(g)) for g in gens]
    H = build(words, AB)
    naive = oracles.naive_build([w.letters for w in words])
    # same subgroup: equal rank (E - V + 1 ignores hanging trees) and shared loops
    assert H.rank == len(naive.edges) - len(naive.vertices()) + 1
    for b in H.basis():
        assert naive.read(b.letters) == 0
    for g in words:
        assert H.contains(g)


# -- membership -----------------------------------------------------------------


def test_membership_examples():
    H = sub("a^2", "b")
    check_witness(H, w("a^2 b a^2"))
    assert membership(H, w("a")) is None
    assert membership(H, Word(AB)) == Word(H.basis_alphabet)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=6), min_size=1, max_size=3))
def test_membership_vs_enumerated_products(gens):
    words = [Word(AB, tuple(g)) for g in gens]
    H = build(words, AB)
    products = oracles.enumerate_products([x.letters for x in words], 4 if len(words) < 3 else 3)
    for p in products:
        check_witness(H, Word(AB, p))
    # short words: the library and the naive folded graph agree
    for x in oracles.reduced_words(2, 5):
        assert (membership(H, Word(AB, x)) is not None) == oracles.naive_member([g.letters for g in words], x)


# -- intersections -------------------------------------------------------------


def test_intersect_examples():
    assert intersect(sub("a"), sub("b")).rank == 0
    assert intersect(sub("a^2"), sub("a^3")) == sub("a^6")


def test_intersect_against_short_elements():
    H, K = sub("a", "b^2"), sub("a^2", "b")
    I = intersect(H, K)
    short = oracles.reduced_words(2, 8)
    for x in short:
        xw = Word(AB, x)
        inH, inK = H.contains(xw), K.contains(xw)
        assert I.contains(xw) == (inH and inK)
    assert I == sub("a^2", "b^2")


@settings(max_examples=60, deadline=None)
@given(gens_strategy, gens_strategy)
def test_intersect_soundness_and_rank(g1, g2):
    H = build([Word(AB, tuple(g)) for g in g1], AB)
    K = build([Word(AB, tuple(g)) for g in g2], AB)
    I = intersect(H, K)
    assert I.rank == oracles.naive_intersection_rank(g1, g2, 2)
    for b in I.basis():
        assert H.contains(b) and K.contains(b)
    for x in oracles.reduced_words(2, 6):
        xw = Word(AB, x)
        assert I.contains(xw) == (H.contains(xw) and K.contains(xw))


def test_intersect_cap():
    with pytest.raises(ResourceCapExceeded):
        intersect(sub("a b a b^-1"), sub("a b^2 a^-1 b"), cap=2)


# -- malnormality ----------------------------------------------------------------


def test_conjugate_intersection_examples():
    entries = conjugate_intersections(sub("a^2"))
    assert [(str(e.representative), e.core) for e in entries] == [("a", sub("a^2"))]
    assert conjugate_intersections(sub("a")) == []


def test_malnormal_examples():
    assert is_malnormal(sub("a")) == (True, None)
    ok, g = is_malnormal(sub("a^2"))
    assert not ok and g == w("a")
    assert is_malnormal(sub("a", "b^2"))[0] is False


def test_conjugate_intersection_cores_are_correct():
    H = sub("a^2", "b a b^-1")
    for e in conjugate_intersections(H):
        g = e.representative
        assert not H.contains(g)
        direct = intersect(H, build([x.conjugate_by(g) for x in H.basis()], AB))
        assert direct == e.core


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=4), min_size=1, max_size=2))
def test_malnormal_vs_conjugator_search(gens):
    words = [Word(AB, tuple(g)) for g in gens]
    H = build(words, AB)
    if H.rank == 0:
        return
    ok, g = is_malnormal(H)
    brute = oracles.naive_malnormal_witness([x.letters for x in words], 2, 4)
    if brute is not None:
        assert not ok
    if not ok:
        assert not oracles.naive_member([x.letters for x in words], g.letters)
        conj = [oracles.conj(g.letters, x.letters) for x in words]
        assert oracles.naive_intersection_rank([x.letters for x in words], conj, 2) > 0


def test_fastpath_on_all_short_cyclic_words():
    classes = oracles.cyclic_classes(2, 12)
    for x in classes:
        c = CyclicWord(AB, x)
        assert c.letters == x
        assert cyclic_malnormal_fastpath(c) == is_malnormal(build([c.word]))[0], c
    assert len(classes) == 69996


def test_fastpath_examples():
    assert cyclic_malnormal_fastpath(CyclicWord.parse("a", AB))
    assert not cyclic_malnormal_fastpath(CyclicWord.parse("a^2", AB))
    with pytest.raises(WordError):
        cyclic_malnormal_fastpath(CyclicWord(AB))


def test_commutator_generates_malnormal_subgroup():
    # [a,b] is not a proper power, and its inverse is not a rotation of it
    c = CyclicWord.parse("a b a^-1 b^-1", AB)
    assert c != c.inverse()
    assert cyclic_malnormal_fastpath(c)
    assert is_malnormal(build([c.word]))[0]


# -- height --------------------------------------------------------------------


def test_height_examples():
    A = sub("a")
    assert height_leq(A, 2).holds
    assert not height_leq(A, 1).holds
    idx2 = sub("a^2", "b", "a b a^-1")
    assert height_leq(idx2, 3).holds
    assert not height_leq(idx2, 2).holds
    assert height(build([], AB)) == 1


def test_height_of_square_found_by_oracle():
    # the failing family for <a^2> stops at three conjugates
    H = sub("a^2")
    assert oracles.naive_height_failure([w("a^2").letters], 2, 2, 3) is not None
    assert oracles.naive_height_failure([w("a^2").letters], 2, 3, 3) is None
    assert not height_leq(H, 1).holds
    cert = height_leq(H, 2)
    assert not cert.holds
    assert height_leq(H, 3).holds
    assert height(H) == 3


def _verify_failure(H, cert):
    gs = cert.witness
    assert len(gs) == cert.n
    for i in range(len(gs)):
        for j in range(i + 1, len(gs)):
            assert not H.contains(gs[i].inverse() * gs[j])
    x = cert.element
    assert x is not None and x.letters
    for g in gs:
        assert H.contains(g.inverse() * x * g)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=4), min_size=1, max_size=2),
       st.integers(1, 3))
def test_height_leq_vs_conjugator_search(gens, n):
    words = [Word(AB, tuple(g)) for g in gens]
    H = build(words, AB)
    cert = height_leq(H, n)
    if not cert.holds:
        _verify_failure(H, cert)
    brute = oracles.naive_height_failure([x.letters for x in words], 2, n, 2)
    if brute is not None:
        assert not cert.holds
    if cert.holds:
        assert height_leq(H, n + 1).holds
    if H.rank and is_malnormal(H)[0]:
        assert height_leq(H, 2).holds


# -- basis expression --------------------------------------------------------------


def test_basis_expresser():
    imgs = [w("a^2"), w("b a b^-1")]
    ex = BasisExpresser(imgs, AB)
    x = w("a^2 b a^-1 b^-1 a^-2")
    y = ex.express(x)
    assert str(y) == "y1 y2^-1 y1^-1"
    assert substitute(y, dict(zip(ex.target, imgs)), AB) == x
    assert ex.express(w("a")) is None
    with pytest.raises(NotABasis):
        BasisExpresser([w("a"), w("a^2")], AB)
