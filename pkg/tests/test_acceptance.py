"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line."""

import io
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from zipent.alphabets import AlphabetPair
from zipent.baker import BakerSpec, conjugacy_check, measure_preservation_mc
from zipent.cli import run
from zipent.entropy import (
    fekete_estimate,
    power_entropy_check,
    product_entropy_check,
    square_measure_entropy,
    topological_entropy_side,
    word_counts,
)
from zipent.measure import index_span, mixing_correlation, random_cylinder, verify_invariance
from zipent.space import CylinderSpec, SubZipShift, WindowPoint, distance, expansivity_witness
from zipent.specfile import load_spec, shipped_path
from zipent.variational import (
    classify_uniform,
    grid_oracle,
    intrinsic_ergodicity_probe,
    maximize_square_entropy,
    square_entropy_increments,
    variational_gap,
)

LN2, LN4 = math.log(2), math.log(4)
H_SQUARE_24 = math.sqrt(LN2 * LN4)
LN_PHI = math.log((1 + math.sqrt(5)) / 2)


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_square_entropy():
    out = io.StringIO()
    t0 = time.perf_counter()
    code = run(["square", "--spec", str(shipped_path("ex31")), "--depth", "8"], out=out)
    elapsed = time.perf_counter() - t0
    rep = json.loads(out.getvalue())
    exact = square_measure_entropy(load_spec("ex31").measure, 8)
    err_sq = abs(rep["h_square"] - H_SQUARE_24)
    err_m = abs(exact.h_minus - LN4)
    err_p = abs(exact.h_plus - LN2)
    ok = code == 0 and err_sq <= 1e-9 and err_m <= 1e-12 and err_p <= 1e-12 and elapsed < 1.0
    record(1, ok, f"h_square err {err_sq:.1e}, h_minus err {err_m:.1e}, h_plus err {err_p:.1e}, {elapsed:.2f}s")


def test_criterion_2_invariance():
    t0 = time.perf_counter()
    good = verify_invariance(load_spec("ex31").measure, depth=4)
    bad = verify_invariance(load_spec("ex31_perturbed").measure, depth=4)
    elapsed = time.perf_counter() - t0
    ok = (
        good.passed
        and good.max_discrepancy == 0
        and good.checked == 3**4 * 5**4
        and not bad.passed
        and bad.counterexample == CylinderSpec({-1: "a"})
        and elapsed < 30
    )
    record(2, ok, f"{good.checked} cylinders exact, perturbed counterexample {bad.counterexample}, {elapsed:.1f}s")


def test_criterion_3_topological(ex2, golden):
    full = SubZipShift.full(AlphabetPair.uniform(2, 2))
    wc4 = topological_entropy_side(full, "S", 16).value
    tm4 = topological_entropy_side(full, "S", method="transfer-matrix").value
    ex2_counts = word_counts(ex2, "Z", 16)
    ex2_h = topological_entropy_side(ex2, "Z", 16).value
    wc_g = topological_entropy_side(golden, "S", 16).value
    tm_g = topological_entropy_side(golden, "S", method="transfer-matrix").value
    ok = (
        abs(wc4 - LN4) <= 1e-6
        and abs(tm4 - LN4) <= 1e-12
        and ex2_counts == [2] * 16
        and ex2_h == 0.0
        and abs(wc_g - tm_g) <= 1e-6
        and abs(wc_g - LN_PHI) <= 1e-6
        and abs(tm_g - LN_PHI) <= 1e-6
    )
    record(3, ok, f"l=4 wc err {abs(wc4 - LN4):.1e}, golden wc/tm err {abs(wc_g - LN_PHI):.1e}/{abs(tm_g - LN_PHI):.1e}")


def test_criterion_4_variational(ex31, fibers21):
    t0 = time.perf_counter()
    g24 = variational_gap(SubZipShift.full(ex31), starts=20, seed=7)
    g21 = variational_gap(SubZipShift.full(fibers21), starts=20, seed=7)
    oracle21, _ = grid_oracle(fibers21)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(g24.sup_h_s_mu - H_SQUARE_24) <= 1e-6
        and -1e-9 <= g24.gap <= 1e-6
        and g21.gap >= -1e-9
        and abs(g21.sup_h_s_mu - oracle21) <= 1e-4
        and elapsed < 60
    )
    record(4, ok, f"(2,4) gap {g24.gap:.1e}, (2,1) gap {g21.gap:.4f}, oracle diff {abs(g21.sup_h_s_mu - oracle21):.1e}, {elapsed:.1f}s")


def test_criterion_5_intrinsic_ergodicity(ex31):
    probe = intrinsic_ergodicity_probe(ex31, starts=20, seed=7)
    ok = probe.unique and probe.argmax_cluster_diameter < 1e-4 and probe.distance_to_uniform < 1e-4
    record(5, ok, f"diameter {probe.argmax_cluster_diameter:.1e}, distance to uniform {probe.distance_to_uniform:.1e}")


def test_criterion_6_mixing(ex31_mu):
    rng = np.random.default_rng(2024)
    checked = nonzero = 0
    for _ in range(50):
        a, b = random_cylinder(ex31_mu.pair, rng, 3), random_cylinder(ex31_mu.pair, rng, 3)
        start = max(index_span(a, b) + 1, 0)
        for n in range(start, start + 4):
            gap = mixing_correlation(a, b, n, ex31_mu).gap
            assert isinstance(gap, Fraction)
            checked += 1
            nonzero += gap != 0
    record(6, nonzero == 0, f"{checked} exact gaps beyond the index span, {nonzero} nonzero")


def test_criterion_7_baker(ex31):
    spec = BakerSpec(ex31)
    t0 = time.perf_counter()
    conj = conjugacy_check(spec, samples=10_000, depth=12, seed=7)
    rects = measure_preservation_mc(spec, samples=10**6, seed=7)
    elapsed = time.perf_counter() - t0
    worst = max(abs(r.z) for r in rects)
    ok = conj.mismatches == 0 and conj.checked > 9_900 and len(rects) == 10 and worst <= 3 and elapsed < 30
    record(7, ok, f"{conj.checked} coded samples, {conj.mismatches} mismatches, max |z| {worst:.2f}, {elapsed:.1f}s")


def test_criterion_8_classification():
    statuses = [
        classify_uniform(2, 4, 3, 6).status,
        classify_uniform(3, 6, 4, 8).status,
        classify_uniform(2, 4, 4, 8).status,
    ]
    same = classify_uniform(2, 4, 2, 4)
    mins = [float(square_entropy_increments(n, range(2, 65)).min()) for n in (2, 3, 4)]
    ok = statuses == ["not_isomorphic"] * 3 and same.isomorphic and min(mins) > 0
    record(8, ok, f"distinct pairs {statuses}, smallest increment {min(mins):.3e}")


def _random_point(rng, pair, window=10):
    z, s = pair.z_symbols, pair.s_symbols
    pick = lambda alphabet, k: tuple(alphabet[i] for i in rng.integers(len(alphabet), size=k))
    return WindowPoint(pick(z, int(rng.integers(1, 3))), pick(z, window), pick(s, window), pick(s, int(rng.integers(1, 3))))


def test_criterion_9_properties(ex31, ex31_mu):
    rng = np.random.default_rng(99)
    failures = []

    for _ in range(10_000):
        x, y, z = (_random_point(rng, ex31, 4) for _ in range(3))
        dxy, dyz, dxz = distance(x, y), distance(y, z), distance(x, z)
        if dxy != distance(y, x) or (dxy == 0) != (x == y) or dxz > max(dxy, dyz):
            failures.append("metric")
            break

    found = 0
    for _ in range(1000):
        x = _random_point(rng, ex31)
        y = _random_point(rng, ex31)
        while y == x:
            y = _random_point(rng, ex31)
        w = expansivity_witness(x, y, 24, ex31)
        found += w is not None and w[1] >= Fraction(1, 2)
    if found != 1000:
        failures.append(f"expansivity {found}/1000")

    for name in ("ex31", "ex2", "golden_mean", "fibers21", "identity2"):
        sub = load_spec(name).sub
        for side in ("S", "Z"):
            try:
                fekete_estimate([math.log(c) for c in word_counts(sub, side, 16)])
            except Exception as exc:
                failures.append(f"fekete {name}/{side}: {exc}")

    power = power_entropy_check(ex31_mu, 2, depth=8)
    if power.gap > 1e-9:
        failures.append(f"power gap {power.gap:.1e}")

    for a, b in (("ex31", "fibers21"), ("ex31", "identity2"), ("fibers21", "identity2")):
        if not product_entropy_check(load_spec(a).measure, load_spec(b).measure, depth=6).superadditive:
            failures.append(f"product {a}x{b}")

    record(9, not failures, f"expansivity {found}/1000, power gap {power.gap:.1e}" + (f", failures {failures}" if failures else ""))
