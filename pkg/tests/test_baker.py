import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zipent.alphabets import AlphabetPair
from zipent.baker import (
    BakerSpec,
    SquarePoint,
    baker_apply,
    baker_apply_array,
    baker_preimages,
    code_point,
    coded_square_entropy,
    coding_mismatch,
    conjugacy_check,
    measure_preservation_mc,
)
from zipent.errors import BoundaryOrbitError, HypothesisViolatedError
from zipent.space import apply_zip_shift


@pytest.fixture
def spec(ex31):
    return BakerSpec(ex31)


def test_apply_examples(spec):
    assert baker_apply(SquarePoint(F(3, 10), F(3, 5)), spec) == SquarePoint(F(1, 5), F(4, 5))
    assert baker_apply(SquarePoint(0, 0), spec) == SquarePoint(0, 0)
    assert baker_apply(SquarePoint(F(7, 10), F(1, 5)), spec) == SquarePoint(F(4, 5), F(1, 10))
    p = baker_apply(SquarePoint(0.3, 0.6), spec)
    assert p.x == pytest.approx(0.2, abs=1e-12) and p.y == pytest.approx(0.8, abs=1e-12)


def test_preimage_examples(spec):
    pre = baker_preimages(SquarePoint(F(1, 5), F(4, 5)), spec)
    assert set(pre) == {SquarePoint(F(3, 10), F(3, 5)), SquarePoint(F(4, 5), F(3, 5))}
    assert set(baker_preimages(SquarePoint(0, 0), spec)) == {SquarePoint(0, 0), SquarePoint(F(1, 2), 0)}


def test_classical_baker_is_invertible():
    classical = BakerSpec(AlphabetPair.identity("01"))
    assert len(baker_preimages(SquarePoint(0.3, 0.7), classical)) == 1


def test_nonuniform_fibers_rejected(fibers21):
    with pytest.raises(HypothesisViolatedError):
        BakerSpec(fibers21)


def test_square_membership():
    with pytest.raises(ValueError):
        SquarePoint(1.0, 0.2)


def test_code_examples(spec):
    c = code_point(SquarePoint(F(3, 10), F(3, 5)), spec, 2, 2)
    assert c.right_window == ("1", "0")
    assert (c[-1], c[-2]) == ("b", "a")
    zero = code_point(SquarePoint(F(1, 3), 0), spec, 6, 0)
    assert zero.left_window == ("a",) * 6


def test_boundary_orbit(spec):
    with pytest.raises(BoundaryOrbitError):
        code_point(SquarePoint(F(1, 2), F(1, 3)), spec, 3, 3)
    with pytest.raises(BoundaryOrbitError):
        code_point(SquarePoint(F(1, 3), F(1, 2)), spec, 3, 3)


def test_conjugacy(spec):
    rep = conjugacy_check(spec, samples=500, depth=12, seed=7)
    assert rep.mismatches == 0 and rep.checked > 0
    assert conjugacy_check(spec, samples=10, depth=0, seed=1).max_mismatch_fraction == 0.0


def test_conjugacy_exact_mode(spec):
    rep = conjugacy_check(spec, samples=100, depth=30, seed=3, exact=True)
    assert rep.mismatches == 0 and rep.checked == 100


def test_classical_baker_conjugacy():
    rep = conjugacy_check(BakerSpec(AlphabetPair.identity("01")), samples=300, depth=12, seed=4)
    assert rep.mismatches == 0


def test_three_to_one_exact():
    rep = conjugacy_check(BakerSpec(AlphabetPair.uniform(2, 3)), samples=100, depth=20, seed=5, exact=True)
    assert rep.mismatches == 0


def test_float_depth_limit(spec):
    with pytest.raises(ValueError):
        conjugacy_check(spec, samples=1, depth=25, seed=0)


def test_measure_preservation(spec):
    checks = measure_preservation_mc(spec, samples=200_000, seed=9)
    assert len(checks) == 10
    assert checks[0].z == 0.0 and checks[0].preimage_vol_estimate == 1.0
    assert all(abs(c.z) <= 3 for c in checks)


def test_measure_preservation_is_seeded(spec):
    a = measure_preservation_mc(spec, samples=20_000, seed=1, batch=5000)
    b = measure_preservation_mc(spec, samples=20_000, seed=1, batch=5000)
    assert [c.to_dict() for c in a] == [c.to_dict() for c in b]


def test_coded_entropy(spec):
    ent = coded_square_entropy(spec, 4)
    assert ent.h_minus == pytest.approx(math.log(4), abs=1e-12)
    assert ent.h_plus == pytest.approx(math.log(2), abs=1e-12)
    assert ent.h_square == pytest.approx(math.sqrt(math.log(2) * math.log(4)), abs=1e-12)


def test_vectorised_apply_matches_scalar(spec):
    pts = np.random.default_rng(0).random((200, 2))
    img = baker_apply_array(pts, spec)
    for (x, y), (u, v) in zip(pts, img):
        q = baker_apply(SquarePoint(float(x), float(y)), spec)
        assert (q.x, q.y) == (u, v)


coords = st.fractions(min_value=0, max_value=F(999, 1000), max_denominator=10**6)


@given(coords, coords, st.sampled_from([(2, 2), (2, 1), (3, 2), (1, 3)]))
def test_round_trip(x, y, mn):
    spec = BakerSpec(AlphabetPair.uniform(*mn))
    p = SquarePoint(x, y)
    pre = baker_preimages(p, spec)
    assert len(pre) == spec.n
    assert len(set(pre)) == spec.n
    for q in pre:
        assert baker_apply(q, spec) == p


@given(st.integers(1, 2**61 - 2), st.integers(1, 2**61 - 2))
def test_coding_equivariance_exact(a, b):
    spec = BakerSpec(AlphabetPair.uniform(2, 2))
    p = SquarePoint(F(a, 2**61 - 1), F(b, 2**61 - 1))
    assert not coding_mismatch(p, spec, 15)
    # the coded shift agrees with the zip shift on the overlap
    before = apply_zip_shift(code_point(p, spec, 15, 15), 1, spec.pair)
    after = code_point(baker_apply(p, spec), spec, 15, 15)
    assert all(before[i] == after[i] for i in range(-15, 14))
