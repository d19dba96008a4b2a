"""Partition entropy, backward and forward refinements, and measure / topological entropies.

All entropies are in nats. The backward (preimage) refinement of the generator
{C_0^s} gives ``h_minus``; the forward (image) refinement of the image partition
{C_-1^a} gives ``h_plus``. Their geometric mean is the square entropy.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .alphabets import AlphabetPair, _xlogx
from .errors import (
    CapExceededError,
    NotAPartitionError,
    NotGIPError,
    NotSubadditiveError,
    UnsupportedForbiddenLengthError,
)
from .measure import MeasureSpec, cylinder_measure, measure_ratio, pullback_element
from .space import CylinderSpec, SubZipShift, count_words_dp, cylinder_intersect, image_cylinder

DEFAULT_DEPTH = 8
DEFAULT_N_MAX = 16
POWER_TOL = 1e-10
POWER_MAX_ITER = 100_000
REFINE_CAP = 2_000_000


@dataclass(frozen=True)
class CylinderPartition:
    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))

    def __iter__(self):
        return iter(self.cells)

    def __len__(self):
        return len(self.cells)

    def check(self, mu: MeasureSpec) -> "CylinderPartition":
        total = sum((cylinder_measure(c, mu) for c in self.cells), Fraction(0))
        if total != 1:
            raise NotAPartitionError(f"cells carry total measure {total}, not 1")
        index_sets = {c.indices for c in self.cells}
        if len(index_sets) == 1:
            if len(set(self.cells)) != len(self.cells):
                raise NotAPartitionError("repeated cell")
        else:
            for i, c in enumerate(self.cells):
                for d in self.cells[i + 1:]:
                    if cylinder_intersect(c, d) is not None:
                        raise NotAPartitionError(f"cells {c} and {d} overlap")
        return self


def generator_partition(pair: AlphabetPair) -> CylinderPartition:
    """{C_0^s : s in S}."""
    return CylinderPartition(tuple(CylinderSpec(((0, s),)) for s in pair.s_symbols))


def image_partition(pair: AlphabetPair) -> CylinderPartition:
    """{C_-1^a : a in Z}."""
    return CylinderPartition(tuple(CylinderSpec(((-1, a),)) for a in pair.z_symbols))


def partition_entropy(partition: CylinderPartition, mu: MeasureSpec, check: bool = True) -> float:
    """-sum mu(X) ln mu(X) over the cells."""
    if not isinstance(partition, CylinderPartition):
        partition = CylinderPartition(tuple(partition))
    if check:
        partition.check(mu)
    # equal-measure cells are summed once each, which keeps 10^5-cell sums at full precision
    by_measure = Counter(measure_ratio(c, mu) for c in partition.cells)
    return -math.fsum(k * _xlogx(Fraction(num, den)) for (num, den), k in by_measure.items()) + 0.0


def join(p1: Iterable, p2: Iterable, cap: int = REFINE_CAP) -> CylinderPartition:
    p1, p2 = tuple(p1), tuple(p2)
    if len(p1) * len(p2) > cap:
        raise CapExceededError("partition join", len(p1) * len(p2), cap)
    cells = []
    for c in p1:
        for d in p2:
            meet = cylinder_intersect(c, d)
            if meet is not None:
                cells.append(meet)
    return CylinderPartition(tuple(cells))


def backward_refinements(partition, depth: int, pair: AlphabetPair, step: int = 1, cap: int = REFINE_CAP):
    """Yield eta^n = join_{i<n} sigma^{-step*i}(eta) for n = 1..depth."""
    base = tuple(partition)
    current = CylinderPartition(base)
    yield current
    for i in range(1, depth):
        pulled = [d for c in base for d in pullback_element(c, pair, step * i).cells]
        current = join(current, pulled, cap)
        yield current


def refine_backward(partition, n: int, pair: AlphabetPair, step: int = 1, cap: int = REFINE_CAP) -> CylinderPartition:
    if n < 1:
        raise ValueError("n must be at least 1")
    for current in backward_refinements(partition, n, pair, step, cap):
        pass
    return current


def _check_gip(cells: tuple, mu: MeasureSpec, step: int):
    images = []
    for c in cells:
        image = c
        for _ in range(step):
            image = image_cylinder(image, mu.pair)
        if cylinder_measure(image, mu) != cylinder_measure(c, mu):
            raise NotGIPError(f"cell {c} is not forward measure invariant")
        images.append(image)
    try:
        CylinderPartition(tuple(images)).check(mu)
    except NotAPartitionError as exc:
        raise NotGIPError(f"forward images do not form a partition: {exc}") from None


def forward_refinements(partition, depth: int, mu: MeasureSpec, step: int = 1, cap: int = REFINE_CAP):
    """Yield Q^{+n} = join_{i<n} sigma^{step*i}(Q) for n = 1..depth."""
    base = tuple(partition)
    _check_gip(base, mu, step)
    current = CylinderPartition(base)
    yield current
    images = base
    for _ in range(1, depth):
        for _ in range(step):
            images = tuple(image_cylinder(c, mu.pair) for c in images)
        current = join(current, images, cap)
        yield current


def refine_forward(partition, n: int, mu: MeasureSpec, step: int = 1, cap: int = REFINE_CAP) -> CylinderPartition:
    if n < 1:
        raise ValueError("n must be at least 1")
    for current in forward_refinements(partition, n, mu, step, cap):
        pass
    return current


# ---------------------------------------------------------------------------
# Fekete


@dataclass(frozen=True)
class FeketeEstimate:
    limit_estimate: float  # a_N / N
    inf_bound: float  # min_n a_n / n, an upper bound for the limit
    increment: float  # a_N - a_{N-1}; first-order extrapolation of a_N / N
    depth: int

    def to_dict(self) -> dict:
        return {
            "limit_estimate": self.limit_estimate,
            "inf_bound": self.inf_bound,
            "increment": self.increment,
            "depth": self.depth,
        }


def fekete_estimate(a: Sequence[float], tol: float = 1e-9) -> FeketeEstimate:
    """Limit of a_n / n for a subadditive sequence; ``a[0]`` is a_1.

    Raises :class:`NotSubadditiveError` with the first witness (m, n) where
    a_{m+n} > a_m + a_n + tol.
    """
    a = [float(x) for x in a]
    N = len(a)
    if N == 0:
        raise ValueError("empty sequence")
    for total in range(2, N + 1):
        for m in range(1, total // 2 + 1):
            n = total - m
            excess = a[total - 1] - a[m - 1] - a[n - 1]
            if excess > tol:
                raise NotSubadditiveError(m, n, excess)
    ratios = [x / (i + 1) for i, x in enumerate(a)]
    increment = a[-1] - a[-2] if N >= 2 else a[-1]
    return FeketeEstimate(ratios[-1], min(ratios), increment, N)


# ---------------------------------------------------------------------------
# measure entropies


@dataclass(frozen=True)
class SideEntropy:
    value: float
    per_depth: tuple
    fekete: FeketeEstimate

    def to_dict(self) -> dict:
        return {"value": self.value, "per_depth": list(self.per_depth), "fekete": self.fekete.to_dict()}


def _side_entropy(refinements, mu: MeasureSpec, depth: int) -> SideEntropy:
    per_depth = tuple(partition_entropy(p, mu, check=False) for p in refinements)
    return SideEntropy(per_depth[-1] / depth, per_depth, fekete_estimate(per_depth))


def ks_minus(mu: MeasureSpec, depth: int = DEFAULT_DEPTH, cap: int = REFINE_CAP) -> SideEntropy:
    """Backward entropy from preimage refinements of {C_0^s}."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    refinements = backward_refinements(generator_partition(mu.pair), depth, mu.pair, cap=cap)
    return _side_entropy(refinements, mu, depth)


def ks_plus(mu: MeasureSpec, depth: int = DEFAULT_DEPTH, cap: int = REFINE_CAP) -> SideEntropy:
    """Forward entropy from image refinements of {C_-1^a}."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    refinements = forward_refinements(image_partition(mu.pair), depth, mu, cap=cap)
    return _side_entropy(refinements, mu, depth)


@dataclass(frozen=True)
class EntropyReport:
    h_plus: float
    h_minus: float
    h_square: float
    per_depth_plus: tuple
    per_depth_minus: tuple
    depth: int
    fekete_plus: FeketeEstimate | None = None
    fekete_minus: FeketeEstimate | None = None
    method: str = "refinement"

    def to_dict(self) -> dict:
        out = {
            "h_plus": self.h_plus,
            "h_minus": self.h_minus,
            "h_square": self.h_square,
            "per_depth": {"plus": list(self.per_depth_plus), "minus": list(self.per_depth_minus)},
            "depth": self.depth,
            "method": self.method,
        }
        if self.fekete_plus is not None:
            out["fekete"] = {"plus": self.fekete_plus.to_dict(), "minus": self.fekete_minus.to_dict()}
        return out


def square_measure_entropy(mu: MeasureSpec, depth: int = DEFAULT_DEPTH, cap: int = REFINE_CAP) -> EntropyReport:
    plus = ks_plus(mu, depth, cap)
    minus = ks_minus(mu, depth, cap)
    return EntropyReport(
        plus.value,
        minus.value,
        math.sqrt(plus.value * minus.value),
        plus.per_depth,
        minus.per_depth,
        depth,
        plus.fekete,
        minus.fekete,
    )


@dataclass(frozen=True)
class PowerCheck:
    lhs: float
    rhs: float
    gap: float
    k: int
    h_plus_k: float
    h_minus_k: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def power_entropy_check(mu: MeasureSpec, k: int, depth: int = DEFAULT_DEPTH, cap: int = REFINE_CAP) -> PowerCheck:
    """Square entropy of sigma_tau^k from k-stepped refinements, against k times that of sigma_tau.

    The generators for sigma^k are the k-fold joins of the one-step generators;
    they are then refined with k-fold pullbacks / images.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = max(1, depth // k)
    pair = mu.pair
    gen_k = refine_backward(generator_partition(pair), k, pair, cap=cap)
    img_k = refine_forward(image_partition(pair), k, mu, cap=cap)
    h_minus_k = partition_entropy(refine_backward(gen_k, n, pair, step=k, cap=cap), mu, check=False) / n
    h_plus_k = partition_entropy(refine_forward(img_k, n, mu, step=k, cap=cap), mu, check=False) / n
    lhs = math.sqrt(h_plus_k * h_minus_k)
    rhs = k * square_measure_entropy(mu, depth, cap).h_square
    return PowerCheck(lhs, rhs, abs(lhs - rhs), k, h_plus_k, h_minus_k)


@dataclass(frozen=True)
class ProductCheck:
    h_product: float
    h_sum: float
    superadditive: bool
    equality: bool
    both_invertible: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def product_entropy_check(mu1: MeasureSpec, mu2: MeasureSpec, depth: int = DEFAULT_DEPTH, tol: float = 1e-12) -> ProductCheck:
    """Compare sqrt((a+b)(c+d)) for the product system with sqrt(ac) + sqrt(bd).

    Forward and backward entropies of a product are the sums of the factors'.
    """
    r1 = square_measure_entropy(mu1, depth)
    r2 = square_measure_entropy(mu2, depth)
    h_product = math.sqrt((r1.h_plus + r2.h_plus) * (r1.h_minus + r2.h_minus))
    h_sum = r1.h_square + r2.h_square
    invertible = mu1.pair.m == mu1.pair.l and mu2.pair.m == mu2.pair.l
    return ProductCheck(h_product, h_sum, h_product >= h_sum - tol, abs(h_product - h_sum) <= tol, invertible)


# ---------------------------------------------------------------------------
# topological entropy


@dataclass(frozen=True)
class TopologicalEntropy:
    value: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method, "diagnostics": dict(self.diagnostics)}


def word_counts(sub: SubZipShift, side: str, n_max: int) -> list:
    alphabet = sub.pair.alphabet(side)
    forbidden = sub.words_for(side)
    return [count_words_dp(alphabet, forbidden, n) for n in range(1, n_max + 1)]


def transfer_matrix(sub: SubZipShift, side: str) -> np.ndarray:
    """0/1 adjacency of the one-step shift; forbidden letters lose their rows and columns."""
    alphabet = sub.pair.alphabet(side)
    forbidden = sub.words_for(side)
    if any(len(w) > 2 for w in forbidden):
        raise UnsupportedForbiddenLengthError("transfer matrix needs forbidden words of length <= 2")
    k = len(alphabet)
    a = np.ones((k, k))
    for w in forbidden:
        if len(w) == 1:
            j = alphabet.index(w[0])
            a[j, :] = 0
            a[:, j] = 0
        else:
            a[alphabet.index(w[0]), alphabet.index(w[1])] = 0
    return a


def spectral_radius(a: np.ndarray, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> tuple:
    """Perron root of a non-negative matrix by power iteration on A + I.

    The unit shift removes periodicity without moving the Perron root off the
    dominant position. Returns ``(rho, iterations, converged)``.
    """
    b = a + np.eye(a.shape[0])
    v = np.ones(a.shape[0])
    lam_prev = None
    for it in range(1, max_iter + 1):
        w = b @ v
        lam = w.max() / v.max()
        v = w / w.max()
        if lam_prev is not None and abs(lam - lam_prev) <= tol:
            return lam - 1.0, it, True
        lam_prev = lam
    return lam - 1.0, max_iter, False


def topological_entropy_side(sub: SubZipShift, side: str, n_max: int = DEFAULT_N_MAX, method: str = "word-count") -> TopologicalEntropy:
    """Topological entropy of the one-sided shift on S or Z words.

    ``word-count`` and ``spanning`` report ln|B_N| - ln|B_{N-1}|, the first-order
    extrapolation of ln|B_N| / N; the plain Fekete ratio and bound are kept in the
    diagnostics. ``spanning`` reaches the counts through r_n(2^-k) = |B_{n+2k}|.
    """
    side = side.upper()
    if method in ("word-count", "spanning"):
        if n_max < 2:
            raise ValueError("n_max must be at least 2")
        counts = word_counts(sub, side, n_max)
        if counts[-1] == 0:
            raise ValueError(f"no admissible words of length {n_max} on side {side}")
        logs = [math.log(c) for c in counts]
        fk = fekete_estimate(logs)
        diagnostics = {"counts": counts, "fekete": fk.to_dict()}
        if method == "spanning":
            k = 1
            n = n_max - 2 * k
            if n < 2:
                raise ValueError("n_max too small for the spanning method")
            r = [counts[j + 2 * k - 1] for j in range(1, n + 1)]
            diagnostics.update(epsilon=f"1/{2**k}", spanning_counts=r)
            value = math.log(r[-1]) - math.log(r[-2])
        else:
            value = fk.increment
        return TopologicalEntropy(value + 0.0, method, diagnostics)
    if method == "transfer-matrix":
        rho, iters, converged = spectral_radius(transfer_matrix(sub, side))
        if rho <= 0:
            raise ValueError(f"side {side} admits no bi-infinite sequences")
        return TopologicalEntropy(
            math.log(rho) + 0.0, method, {"spectral_radius": rho, "iterations": iters, "converged": converged}
        )
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class SquareTopological:
    h_s: float
    h_z: float
    h_square: float
    method: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def square_topological_entropy(sub: SubZipShift, n_max: int = DEFAULT_N_MAX, method: str | None = None) -> SquareTopological:
    """sqrt(h_top(S side) * h_top(Z side))."""
    if method is None:
        method = "transfer-matrix" if all(len(f.word) <= 2 for f in sub.forbidden) else "word-count"
    h_s = topological_entropy_side(sub, "S", n_max, method).value
    h_z = topological_entropy_side(sub, "Z", n_max, method).value
    return SquareTopological(h_s, h_z, math.sqrt(max(h_s, 0.0) * max(h_z, 0.0)), method)
