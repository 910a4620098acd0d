import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.words import (
    Alphabet,
    CyclicWord,
    Word,
    WordError,
    are_conjugate,
    cyclic_reduce,
    exponent_sum,
    least_rotation,
    reduce,
    substitute,
)

from oracles import cyclic_naive, inv, reduce_naive

AB = Alphabet.of("a b")
ABC = Alphabet.of("a b c")
EX37 = "a^2 b a^-1 b^2 a^-2 b a^3 b^-2 a^-1 b a^-2 b^-2 a b a^-1 b^-1 a b^-1"

raw_letters = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=64)


def w(text, A=AB):
    return Word.parse(text, A)


def test_reduce_examples():
    assert reduce([(0, 1), (0, -1), (1, 1)], AB) == w("b")
    assert reduce([], AB) == Word.identity(AB)
    assert reduce([(0, 1), (1, 1), (1, -1), (0, -1)], AB).letters == ()


def test_reduce_rejects_bad_index():
    with pytest.raises(WordError):
        reduce([(2, 1)], AB)
    with pytest.raises(WordError):
        reduce([(0, 0)], AB)


def test_alphabet_validation():
    with pytest.raises(WordError):
        Alphabet.of(["a", "a"])
    with pytest.raises(WordError):
        Alphabet.of(["a^"])
    assert AB.index("b") == 1


def test_parse_and_format():
    assert str(w("a^2 b a^-1")) == "a^2 b a^-1"
    assert w("a a^-1") == Word.identity(AB)
    assert str(Word.identity(AB)) == "1"
    with pytest.raises(WordError):
        w("c")
    with pytest.raises(WordError):
        w("a^0")
    with pytest.raises(WordError):
        w("a^x")


def test_cyclic_reduce_examples():
    c, u = cyclic_reduce(w("a b a^-1"))
    assert c == CyclicWord.parse("b", AB) and u == w("a")
    c, u = cyclic_reduce(w("b a"))
    assert c == CyclicWord.parse("a b", AB)
    x = w("a b a b^-1 a^-1 a^-1")
    c, u = cyclic_reduce(x)
    assert u * c.word * u.inverse() == x


def test_canonical_rotation_puts_inverse_first():
    # order is a^-1 < a < b^-1 < b
    assert CyclicWord.parse("a b a^-1 b^-1", AB).letters == (-1, -2, 1, 2)


def test_exponent_sums():
    r = w(EX37)
    assert len(r) == 26
    assert exponent_sum(r, "a") == 0
    assert exponent_sum(r, "b") == 0
    assert exponent_sum(w("a^3"), "a") == 3
    with pytest.raises(WordError):
        exponent_sum(r, "z")


def test_substitute_examples():
    X = Alphabet.of("x")
    assert substitute(w("a b"), {"a": Word.parse("x", X), "b": Word.parse("x^-1", X)}) == Word.identity(X)
    assert substitute(w("a", Alphabet.of("a")), {"a": w("a", Alphabet.of("a"))}) == w("a", Alphabet.of("a"))
    with pytest.raises(WordError):
        substitute(w("a b"), {"a": w("a")})


def test_substitute_pulls_rewritten_relator_back():
    # b_j -> a^j b a^-j applied to the rewritten relator gives the relator again, up to rotation
    B = Alphabet.of("c d e f")
    shifts = {"c": -1, "d": 0, "e": 1, "f": 2}
    images = {g: w(f"a^{j} b a^{-j}") if j else w("b") for g, j in shifts.items()}
    back = substitute(Word.parse("f e^2 c f^-2 e c^-2 d c^-1 d^-1", B), images, AB)
    assert CyclicWord(AB, back.letters) == CyclicWord.parse(EX37, AB)


@given(raw_letters)
def test_reduce_matches_naive_and_is_idempotent(xs):
    r = Word(AB, tuple(xs))
    assert r.letters == reduce_naive(xs)
    assert Word(AB, r.letters) == r


@settings(max_examples=1000)
@given(raw_letters)
def test_word_times_inverse_is_trivial(xs):
    u = Word(AB, tuple(xs))
    assert Word(AB, u.letters + inv(u.letters)).letters == ()


@given(raw_letters)
def test_cyclic_reduce_round_trip(xs):
    x = Word(AB, tuple(xs))
    c, u = cyclic_reduce(x)
    assert u * c.word * u.inverse() == x
    assert len(c) == len(cyclic_naive(xs))
    if len(c) >= 2:
        assert c.letters[0] != -c.letters[-1]


@given(raw_letters)
def test_canonical_rotation_is_least(xs):
    c = CyclicWord(AB, tuple(xs))
    key = lambda t: [2 * (abs(x) - 1) + (x > 0) for x in t]
    assert all(key(c.letters) <= key(r) for r in c.rotations())
    assert least_rotation([5, 1, 1]) == 1


@given(raw_letters, raw_letters)
def test_exponent_sum_is_homomorphism(xs, ys):
    u, v = Word(AB, tuple(xs)), Word(AB, tuple(ys))
    for g in "ab":
        assert exponent_sum(u * v, g) == exponent_sum(u, g) + exponent_sum(v, g)


words_abc = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=6)


@given(raw_letters, words_abc, words_abc, st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6),
       st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6), st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6))
def test_substitute_composes(xs, fa, fb, g1, g2, g3):
    x = Word(AB, tuple(xs))
    f = {"a": Word(ABC, tuple(fa)), "b": Word(ABC, tuple(fb))}
    g = {"a": Word(AB, tuple(g1)), "b": Word(AB, tuple(g2)), "c": Word(AB, tuple(g3))}
    gf = {k: substitute(v, g, AB) for k, v in f.items()}
    assert substitute(substitute(x, f, ABC), g, AB) == substitute(x, gf, AB)


@given(raw_letters, st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8))
def test_conjugates_are_detected(xs, gs):
    x, g = Word(AB, tuple(xs)), Word(AB, tuple(gs))
    assert are_conjugate(x, x.conjugate_by(g))
