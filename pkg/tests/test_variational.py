import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zipent.alphabets import AlphabetPair
from zipent.errors import HypothesisViolatedError, OracleDisagreementError
from zipent.space import SubZipShift
from zipent.variational import (
    classify_uniform,
    fiber_matrix,
    grid_oracle,
    intrinsic_ergodicity_probe,
    maximize_square_entropy,
    mirror_ascent,
    semicontinuity_probe,
    simplex_compositions,
    square_entropy_increments,
    square_objective,
    uniform_square_entropy,
    variational_gap,
)

# frozen independent oracle for fibers (2,1): fine grid plus Nelder-Mead polish
FIBERS21_SUP = 0.8584452263
FIBERS21_ARGMAX = (0.283455, 0.283455, 0.433091)


def test_objective_at_uniform(ex31):
    assert square_objective(np.full(4, 0.25), ex31) == pytest.approx(0.9802581434685471, abs=1e-14)


def test_objective_on_simplex_boundary(fibers21):
    # a point mass has zero entropy on both sides
    assert square_objective(np.array([1.0, 0.0, 0.0]), fibers21) == 0.0


def test_fiber_matrix(fibers21):
    np.testing.assert_array_equal(fiber_matrix(fibers21), [[1, 0], [1, 0], [0, 1]])


def test_simplex_compositions():
    comps = simplex_compositions(4, 3)
    assert len(comps) == math.comb(6, 2)
    assert (comps.sum(axis=1) == 4).all()


def test_uniform_fibers_maximum(ex31):
    rep = maximize_square_entropy(ex31, starts=5, seed=1)
    assert abs(rep.value - 0.9802581434685471) <= 1e-6
    np.testing.assert_allclose(rep.argmax, 0.25, atol=1e-4)


def test_nonuniform_fibers_maximum(fibers21):
    rep = maximize_square_entropy(fibers21, starts=5, seed=2)
    assert rep.value == pytest.approx(FIBERS21_SUP, abs=1e-9)
    np.testing.assert_allclose(rep.argmax, FIBERS21_ARGMAX, atol=1e-5)
    assert abs(rep.value - rep.oracle_value) <= 1e-4


def test_identity_maximum():
    rep = maximize_square_entropy(AlphabetPair.identity("01"), starts=3, seed=0)
    assert rep.value == pytest.approx(math.log(2), abs=1e-9)


def test_oracle_disagreement_is_raised(fibers21):
    # a handful of steps cannot reach the optimum
    with pytest.raises(OracleDisagreementError):
        maximize_square_entropy(fibers21, starts=1, iters=1, step=1e-6, seed=0, tol=1e-9)


def test_grid_oracle(ex31):
    value, arg = grid_oracle(ex31)
    assert value == pytest.approx(0.9802581434685471, abs=1e-12)
    np.testing.assert_allclose(arg, 0.25)


def test_seed_determinism(fibers21):
    a = maximize_square_entropy(fibers21, starts=3, seed=11, oracle=False)
    b = maximize_square_entropy(fibers21, starts=3, seed=11, oracle=False)
    assert a.to_dict() == b.to_dict()


def test_variational_gap(ex31, fibers21):
    gap = variational_gap(SubZipShift.full(ex31), starts=5, seed=0)
    assert -1e-9 <= gap.gap <= 1e-6
    gap21 = variational_gap(SubZipShift.full(fibers21), starts=5, seed=0)
    assert gap21.gap >= -1e-9
    assert not gap21.equality_expected


def test_variational_gap_full_only(ex2):
    with pytest.raises(ValueError):
        variational_gap(ex2)


def test_ergodicity_probe(ex31, fibers21):
    probe = intrinsic_ergodicity_probe(ex31, starts=20, seed=5)
    assert probe.unique and probe.argmax_cluster_diameter < 1e-4
    assert intrinsic_ergodicity_probe(fibers21, starts=20, seed=5).unique
    with pytest.raises(ValueError):
        intrinsic_ergodicity_probe(ex31, starts=5)


def test_semicontinuity(ex31):
    target = np.full(4, 0.25)
    seq = [target + (0.1 / k) * np.array([1, -1, 0, 0]) for k in range(1, 30)]
    probe = semicontinuity_probe(ex31, target, seq)
    assert probe.ok and probe.limsup_values <= probe.value_at_target


def test_classify():
    assert classify_uniform(2, 4, 2, 4).isomorphic
    assert classify_uniform(2, 4, 3, 6).status == "not_isomorphic"
    assert classify_uniform(3, 6, 4, 8).status == "not_isomorphic"
    # frozen closed forms
    assert uniform_square_entropy(3, 6) == pytest.approx(1.40301424484265, abs=1e-12)
    assert uniform_square_entropy(4, 8) == pytest.approx(1.6978569090206654, abs=1e-12)


def test_classify_hypotheses():
    with pytest.raises(HypothesisViolatedError):
        uniform_square_entropy(2, 5)
    with pytest.raises(HypothesisViolatedError):
        uniform_square_entropy(1, 3)


def test_monotone_in_m():
    for n in (2, 3, 4):
        assert (square_entropy_increments(n, range(2, 65)) > 0).all()


FIBERS21 = AlphabetPair(("0", "1", "2"), ("a", "b"), {"0": "a", "1": "a", "2": "b"})


@given(st.lists(st.floats(0.01, 1.0), min_size=3, max_size=3))
def test_mirror_ascent_never_decreases(raw):
    fibers21 = FIBERS21
    p0 = np.array(raw) / sum(raw)
    start = square_objective(p0, fibers21)
    p, value, trace, _ = mirror_ascent(p0, fiber_matrix(fibers21), iters=200)
    assert value >= start - 1e-12
    assert value <= FIBERS21_SUP + 1e-9
    assert p.sum() == pytest.approx(1.0) and (p >= 0).all()
