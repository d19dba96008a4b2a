"""Exact cylinder measures, pullbacks under the zip shift, invariance, mixing and image partitions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .alphabets import (
    AlphabetPair,
    ProbabilityVector,
    check_invariance_condition,
    format_fraction,
    induce_z_distribution,
)
from .errors import CapExceededError, NotInvariantError
from .space import CylinderSpec, all_cylinders, count_cylinders, cylinder_intersect, image_cylinder

DEFAULT_INVARIANCE_DEPTH = 4
CYLINDER_CAP = 10**6


@dataclass(frozen=True)
class MeasureSpec:
    """Product measure with weights P_S on indices >= 0 and P_Z on indices < 0."""

    pair: AlphabetPair
    p_s: ProbabilityVector
    p_z: ProbabilityVector
    _nd: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # integer (numerator, denominator) weights for the hot measure loop
        z = {a: (w.numerator, w.denominator) for a, w in zip(self.p_z.symbols, self.p_z.weights)}
        s = {a: (w.numerator, w.denominator) for a, w in zip(self.p_s.symbols, self.p_s.weights)}
        object.__setattr__(self, "_nd", (z, s))

    @classmethod
    def from_p_s(cls, pair: AlphabetPair, p_s: ProbabilityVector | None = None) -> "MeasureSpec":
        if p_s is None:
            p_s = ProbabilityVector.uniform(pair.s_symbols)
        return cls(pair, p_s, induce_z_distribution(p_s, pair))

    @classmethod
    def uniform(cls, pair: AlphabetPair) -> "MeasureSpec":
        return cls.from_p_s(pair)

    @property
    def invariant(self) -> bool:
        return check_invariance_condition(self.p_s, self.p_z, self.pair)[0]

    def weight(self, index: int, symbol) -> Fraction:
        return self.p_z[symbol] if index < 0 else self.p_s[symbol]


@dataclass(frozen=True)
class CylinderAlgebraElement:
    """A finite disjoint union of cylinders."""

    cells: tuple

    def measure(self, mu: MeasureSpec) -> Fraction:
        return sum((cylinder_measure(c, mu) for c in self.cells), Fraction(0))

    def __iter__(self):
        return iter(self.cells)

    def __len__(self):
        return len(self.cells)


def measure_ratio(c: CylinderSpec, mu: MeasureSpec) -> tuple:
    """Unreduced ``(numerator, denominator)`` of mu(C)."""
    z, s = mu._nd
    num = den = 1
    for i, sym in c.constraints:
        a, b = z[sym] if i < 0 else s[sym]
        num *= a
        den *= b
    return num, den


def cylinder_measure(c: CylinderSpec, mu: MeasureSpec) -> Fraction:
    return Fraction(*measure_ratio(c, mu))


def pullback_cylinder(c: CylinderSpec, pair: AlphabetPair) -> CylinderAlgebraElement:
    """sigma_tau^{-1}(C) as a disjoint union: indices move right by one, and a
    Z-constraint at -1 splits over its fiber at index 0."""
    fixed = []
    fiber = None
    for i, s in c.constraints:
        if i == -1:
            fiber = pair.fiber(s)
        else:
            fixed.append((i + 1, s))
    if fiber is None:
        return CylinderAlgebraElement((CylinderSpec._trusted(fixed),))
    return CylinderAlgebraElement(tuple(CylinderSpec._trusted(fixed + [(0, s)]) for s in fiber))


def pullback_element(element, pair: AlphabetPair, n: int = 1) -> CylinderAlgebraElement:
    cells = tuple(element.cells if isinstance(element, CylinderAlgebraElement) else (element,))
    for _ in range(n):
        cells = tuple(d for c in cells for d in pullback_cylinder(c, pair).cells)
    return CylinderAlgebraElement(cells)


@dataclass(frozen=True)
class InvarianceReport:
    checked: int
    max_discrepancy: Fraction
    counterexample: CylinderSpec | None
    counterexample_values: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def to_dict(self) -> dict:
        out = {
            "checked": self.checked,
            "max_discrepancy": format_fraction(self.max_discrepancy),
            "counterexample": None if self.counterexample is None else self.counterexample.to_json(),
        }
        if self.counterexample_values is not None:
            pre, direct = self.counterexample_values
            out["counterexample_measures"] = {
                "pullback": format_fraction(pre),
                "cylinder": format_fraction(direct),
            }
        return out


def verify_invariance(mu: MeasureSpec, depth: int = DEFAULT_INVARIANCE_DEPTH, cap: int = CYLINDER_CAP) -> InvarianceReport:
    """Check mu(sigma^-1 C) == mu(C) for every cylinder on indices [-depth, depth).

    Cylinders are visited by number of constraints, then index order; the first
    failing cylinder is reported as the counterexample.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    total = count_cylinders(mu.pair, -depth, depth)
    if total > cap:
        raise CapExceededError("cylinder enumeration", total, cap)
    checked = 0
    worst = Fraction(0)
    counterexample = None
    values = None
    for c in all_cylinders(mu.pair, -depth, depth):
        direct = cylinder_measure(c, mu)
        pulled = pullback_cylinder(c, mu.pair).measure(mu)
        gap = abs(pulled - direct)
        checked += 1
        if gap > worst:
            worst = gap
        if gap and counterexample is None:
            counterexample, values = c, (pulled, direct)
    return InvarianceReport(checked, worst, counterexample, values)


@dataclass(frozen=True)
class MixingResult:
    joint: Fraction
    product: Fraction
    gap: Fraction

    def to_dict(self) -> dict:
        return {k: format_fraction(getattr(self, k)) for k in ("joint", "product", "gap")}


def mixing_correlation(a: CylinderSpec, b: CylinderSpec, n: int, mu: MeasureSpec) -> MixingResult:
    """mu(A & sigma^-n B) against mu(A) mu(B), exactly."""
    if n < 0:
        raise ValueError("n must be non-negative")
    joint = Fraction(0)
    for cell in pullback_element(b, mu.pair, n):
        meet = cylinder_intersect(a, cell)
        if meet is not None:
            joint += cylinder_measure(meet, mu)
    product = cylinder_measure(a, mu) * cylinder_measure(b, mu)
    return MixingResult(joint, product, abs(joint - product))


def index_span(a: CylinderSpec, b: CylinderSpec) -> int:
    """Past this n the constraints of A and sigma^-n B sit on disjoint indices."""
    if not a.constraints or not b.constraints:
        return -1
    return max(a.indices) - min(b.indices)


@dataclass(frozen=True)
class GoodImagePartition:
    cells: tuple
    measures: dict
    certificate: dict

    def to_dict(self) -> dict:
        return {
            "cells": [c.to_json() for c in self.cells],
            "measures": {a: format_fraction(v) for a, v in self.measures.items()},
            "certificate": {
                a: {k: format_fraction(v) for k, v in row.items()} for a, row in self.certificate.items()
            },
        }


def good_image_partition(mu: MeasureSpec) -> GoodImagePartition:
    """The partition {C_{-1}^a} with a per-cell forward-invariance certificate."""
    ok, bad = check_invariance_condition(mu.p_s, mu.p_z, mu.pair)
    if not ok:
        raise NotInvariantError(f"P_Z violates the fiber-sum condition at {bad}")
    cells, measures, certificate = [], {}, {}
    for a in mu.pair.z_symbols:
        cell = CylinderSpec(((-1, a),))
        image = image_cylinder(cell, mu.pair)
        row = {
            "image": cylinder_measure(image, mu),
            "shifted_cylinder": cylinder_measure(CylinderSpec(((-2, a),)), mu),
            "fiber_sum": sum((mu.p_s[s] for s in mu.pair.fiber(a)), Fraction(0)),
            "cell": cylinder_measure(cell, mu),
        }
        if len(set(row.values())) != 1:
            raise NotInvariantError(f"C_-1^{a} is not forward invariant: {row}")
        cells.append(cell)
        measures[a] = row["cell"]
        certificate[a] = row
    return GoodImagePartition(tuple(cells), measures, certificate)


def random_cylinder(pair: AlphabetPair, rng, depth: int = 3, max_constraints: int | None = None) -> CylinderSpec:
    """A random cylinder with 1..max_constraints coordinates fixed inside [-depth, depth)."""
    max_constraints = depth if max_constraints is None else max_constraints
    k = int(rng.integers(1, max_constraints + 1))
    idx = sorted(int(i) for i in rng.choice(np.arange(-depth, depth), size=k, replace=False))
    cons = []
    for i in idx:
        alphabet = pair.z_symbols if i < 0 else pair.s_symbols
        cons.append((i, alphabet[int(rng.integers(len(alphabet)))]))
    return CylinderSpec(tuple(cons))
