import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from zipent.alphabets import (
    AlphabetPair,
    ProbabilityVector,
    check_invariance_condition,
    induce_z_distribution,
    parse_word,
    shannon_entropy,
    validate_transition,
)
from zipent.errors import DomainMismatchError, NonSurjectiveError


def test_validate_example_pair(ex31):
    rep = validate_transition(ex31)
    assert rep.surjective and rep.uniform and rep.n == 2
    assert rep.fiber_sizes == {"a": 2, "b": 2}


def test_validate_identity():
    rep = validate_transition(AlphabetPair.identity("0123"))
    assert rep.uniform and rep.n == 1


def test_validate_nonuniform(fibers21):
    rep = validate_transition(fibers21)
    assert rep.fiber_sizes == {"a": 2, "b": 1}
    assert not rep.uniform and rep.n is None


def test_non_surjective():
    pair = AlphabetPair(("0", "1"), ("a", "b", "c"), {"0": "a", "1": "b"})
    with pytest.raises(NonSurjectiveError) as info:
        validate_transition(pair)
    assert info.value.missing == ("c",)


def test_tau_must_be_total():
    with pytest.raises(DomainMismatchError):
        AlphabetPair(("0", "1"), ("a",), {"0": "a"})
    with pytest.raises(DomainMismatchError):
        AlphabetPair(("0",), ("a",), {"0": "z"})


def test_uniform_constructor():
    pair = AlphabetPair.uniform(2, 3)
    assert pair.l == 6 and pair.m == 2
    assert validate_transition(pair).n == 3


def test_induce_examples(ex31, fibers21):
    p = ProbabilityVector.uniform(ex31.s_symbols)
    assert induce_z_distribution(p, ex31).weights == (Fraction(1, 2), Fraction(1, 2))
    q = ProbabilityVector(fibers21.s_symbols, ("1/2", "1/4", "1/4"))
    assert induce_z_distribution(q, fibers21).weights == (Fraction(3, 4), Fraction(1, 4))
    ident = AlphabetPair.identity("xyz")
    r = ProbabilityVector(ident.s_symbols, ("1/6", "1/3", "1/2"))
    assert induce_z_distribution(r, ident).weights == r.weights


def test_induce_domain_mismatch(ex31):
    with pytest.raises(DomainMismatchError):
        induce_z_distribution(ProbabilityVector.uniform(("0", "1")), ex31)


def test_invariance_condition(ex31):
    p = ProbabilityVector.uniform(ex31.s_symbols)
    assert check_invariance_condition(p, ProbabilityVector(("a", "b"), ("1/2", "1/2")), ex31) == (True, [])
    ok, bad = check_invariance_condition(p, ProbabilityVector(("a", "b"), ("3/10", "7/10")), ex31)
    assert not ok and bad == ["a", "b"]


def test_probability_vector_rejects_bad_weights():
    with pytest.raises(ValueError):
        ProbabilityVector(("a", "b"), ("1/2", "1/3"))
    with pytest.raises(ValueError):
        ProbabilityVector(("a", "b"), ("3/2", "-1/2"))


def test_shannon_examples():
    assert shannon_entropy(ProbabilityVector.uniform("0123")) == pytest.approx(math.log(4), abs=1e-15)
    assert shannon_entropy(ProbabilityVector(("0", "1", "2"), (1, 0, 0))) == 0.0
    # frozen: 1.5 ln 2
    assert shannon_entropy([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]) == pytest.approx(1.0397207708399179, abs=1e-15)


def test_parse_word():
    assert parse_word("ab", ("a", "b")) == ("a", "b")
    assert parse_word("a0 a1", ("a0", "a1")) == ("a0", "a1")
    with pytest.raises(DomainMismatchError):
        parse_word("ac", ("a", "b"))


@st.composite
def pair_and_vector(draw):
    l = draw(st.integers(1, 6))
    m = draw(st.integers(1, l))
    images = list(range(m)) + draw(st.lists(st.integers(0, m - 1), min_size=l - m, max_size=l - m))
    images = draw(st.permutations(images))
    s = tuple(str(i) for i in range(l))
    z = tuple(f"z{j}" for j in range(m))
    pair = AlphabetPair(s, z, {s[i]: z[images[i]] for i in range(l)})
    raw = draw(st.lists(st.integers(0, 20), min_size=l, max_size=l).filter(lambda w: sum(w) > 0))
    total = sum(raw)
    return pair, ProbabilityVector(s, tuple(Fraction(w, total) for w in raw))


@given(pair_and_vector())
def test_induced_vector_is_invariant(data):
    pair, p = data
    q = induce_z_distribution(p, pair)
    assert sum(q.weights) == 1
    assert check_invariance_condition(p, q, pair)[0]


@given(pair_and_vector())
def test_entropy_bounds(data):
    pair, p = data
    h = shannon_entropy(p)
    assert -1e-12 <= h <= math.log(len(p)) + 1e-12
    if len(set(p.weights)) == 1:
        assert h == pytest.approx(math.log(len(p)), abs=1e-12)
    # a deterministic pushforward never adds entropy
    assert shannon_entropy(induce_z_distribution(p, pair)) <= h + 1e-12


@given(st.integers(2, 8))
def test_uniform_is_the_unique_maximizer(k):
    symbols = tuple(str(i) for i in range(k))
    skew = [Fraction(1, k)] * k
    skew[0] += Fraction(1, 10 * k)
    skew[1] -= Fraction(1, 10 * k)
    assert shannon_entropy(ProbabilityVector(symbols, skew)) < math.log(k)
