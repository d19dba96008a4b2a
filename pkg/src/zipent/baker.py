"""A uniform n-to-1 baker's map on the unit square and its symbolic coding.

Vertical strip V_i = [i/l, (i+1)/l) x [0, 1) is stretched affinely onto the
horizontal strip H_a = [0, 1) x [r/m, (r+1)/m), where a = tau(i) has rank r.
Arithmetic is generic: floats for sampling, Fractions for exact checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .alphabets import AlphabetPair, validate_transition
from .errors import BoundaryOrbitError, HypothesisViolatedError
from .space import WindowPoint, apply_zip_shift, coordinate

MAX_FLOAT_DEPTH = 20
DEFAULT_BATCH = 100_000
EXACT_DENOMINATOR = 2**61 - 1

# fixed axis rectangles (x0, x1, y0, y1) used by the measure check
DEFAULT_RECTANGLES = (
    (0.0, 1.0, 0.0, 1.0),
    (0.0, 1.0, 0.0, 0.5),
    (0.0, 0.25, 0.0, 0.25),
    (0.25, 0.75, 0.25, 0.75),
    (0.1, 0.3, 0.6, 0.9),
    (0.5, 1.0, 0.5, 1.0),
    (0.0, 0.5, 0.0, 1.0),
    (0.3, 0.35, 0.1, 0.8),
    (0.6, 0.95, 0.05, 0.45),
    (0.125, 0.875, 0.4, 0.6),
)


@dataclass(frozen=True)
class SquarePoint:
    x: object
    y: object

    def __post_init__(self):
        if not (0 <= self.x < 1 and 0 <= self.y < 1):
            raise ValueError(f"({self.x}, {self.y}) is outside [0,1)^2")

    def __iter__(self):
        return iter((self.x, self.y))


@dataclass(frozen=True)
class BakerSpec:
    pair: AlphabetPair

    def __post_init__(self):
        report = validate_transition(self.pair)
        if not report.uniform:
            raise HypothesisViolatedError(f"baker map needs uniform fibers, got sizes {report.fiber_sizes}")

    @property
    def l(self) -> int:
        return self.pair.l

    @property
    def m(self) -> int:
        return self.pair.m

    @property
    def n(self) -> int:
        return self.pair.l // self.pair.m

    def branch_rank(self, i: int) -> int:
        """Rank of the horizontal strip that vertical strip i lands in."""
        return self.pair.z_rank(self.pair.tau[self.pair.s_symbols[i]])

    def rank_table(self) -> np.ndarray:
        return np.array([self.branch_rank(i) for i in range(self.l)], dtype=np.int64)


def baker_apply(p: SquarePoint, spec: BakerSpec) -> SquarePoint:
    x, y = p
    i = math.floor(spec.l * x)
    return SquarePoint(spec.l * x - i, (y + spec.branch_rank(i)) / spec.m)


def baker_preimages(p: SquarePoint, spec: BakerSpec) -> list:
    """The n points mapped onto p, one per vertical strip over p's horizontal strip."""
    x, y = p
    r = math.floor(spec.m * y)
    a = spec.pair.z_symbols[r]
    out = []
    for s in spec.pair.fiber(a):
        i = spec.pair.s_rank(s)
        out.append(SquarePoint((x + i) / spec.l, spec.m * y - r))
    return out


def baker_apply_array(xy: np.ndarray, spec: BakerSpec) -> np.ndarray:
    """Vectorised map on an (N, 2) float array."""
    x, y = xy[:, 0], xy[:, 1]
    i = np.minimum(np.floor(spec.l * x).astype(np.int64), spec.l - 1)
    ranks = spec.rank_table()[i]
    return np.column_stack((spec.l * x - i, (y + ranks) / spec.m))


def _digits(t, base: int, count: int, coord: str):
    """First ``count`` base-``base`` digits of t, refusing interior strip edges."""
    out = []
    for k in range(count):
        u = base * t
        d = math.floor(u)
        if 0 < u < base and u == d:
            raise BoundaryOrbitError(f"{coord}-iterate {k} sits on a strip edge ({t})")
        out.append(d)
        t = u - d
    return out


def code_point(p: SquarePoint, spec: BakerSpec, L: int, R: int) -> WindowPoint:
    """Symbolic window of p on indices [-L, R).

    The right window is the base-l itinerary of x, the left window the base-m digits
    of y read outward from index -1. Tails are placeholders and carry no information.
    """
    if isinstance(p.x, float) and max(L, R) > MAX_FLOAT_DEPTH:
        raise ValueError(f"float coding is limited to depth {MAX_FLOAT_DEPTH}; use Fractions")
    x, y = p
    pair = spec.pair
    right = tuple(pair.s_symbols[d] for d in _digits(x, spec.l, R, "x"))
    left = tuple(pair.z_symbols[d] for d in _digits(y, spec.m, L, "y"))
    return WindowPoint((pair.z_symbols[0],), left[::-1], right, (pair.s_symbols[0],))


@dataclass(frozen=True)
class ConjugacyReport:
    samples: int
    checked: int
    boundary: int
    mismatches: int
    depth: int

    @property
    def max_mismatch_fraction(self) -> float:
        return self.mismatches / self.checked if self.checked else 0.0

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "checked": self.checked,
            "boundary": self.boundary,
            "mismatches": self.mismatches,
            "depth": self.depth,
            "max_mismatch_fraction": self.max_mismatch_fraction,
        }


def coding_mismatch(p: SquarePoint, spec: BakerSpec, depth: int) -> bool:
    """True when code(f(p)) and sigma(code(p)) disagree on their common indices."""
    if depth == 0:
        return False
    before = apply_zip_shift(code_point(p, spec, depth, depth), 1, spec.pair)
    after = code_point(baker_apply(p, spec), spec, depth, depth)
    return any(coordinate(before, i) != coordinate(after, i) for i in range(-depth, depth - 1))


def _sample_points(rng, samples: int, exact: bool) -> list:
    if not exact:
        return [SquarePoint(float(x), float(y)) for x, y in rng.random((samples, 2))]
    # a prime denominator keeps every expansion non-terminating
    ints = rng.integers(0, EXACT_DENOMINATOR, size=(samples, 2))
    return [SquarePoint(Fraction(int(a), EXACT_DENOMINATOR), Fraction(int(b), EXACT_DENOMINATOR)) for a, b in ints]


def conjugacy_check(spec: BakerSpec, samples: int = 10_000, depth: int = 12, seed: int = 0, exact: bool = False):
    """Compare code(f(p)) with the zip shift of code(p) for random p; boundary orbits are skipped."""
    if depth < 0 or (depth > MAX_FLOAT_DEPTH and not exact):
        raise ValueError(f"depth must lie in [0, {MAX_FLOAT_DEPTH}] in float mode")
    rng = np.random.default_rng(seed)
    checked = boundary = bad = 0
    for p in _sample_points(rng, samples, exact):
        try:
            bad += coding_mismatch(p, spec, depth)
        except BoundaryOrbitError:
            boundary += 1
            continue
        checked += 1
    return ConjugacyReport(samples, checked, boundary, bad, depth)


@dataclass(frozen=True)
class RectangleCheck:
    rect: tuple
    vol: float
    preimage_vol_estimate: float
    z: float

    def to_dict(self) -> dict:
        return {
            "rect": list(self.rect),
            "vol": self.vol,
            "preimage_vol_estimate": self.preimage_vol_estimate,
            "z": self.z,
        }


def _in_rect(xy: np.ndarray, rect) -> np.ndarray:
    x0, x1, y0, y1 = rect
    return (xy[:, 0] >= x0) & (xy[:, 0] < x1) & (xy[:, 1] >= y0) & (xy[:, 1] < y1)


def measure_preservation_mc(spec: BakerSpec, rects=DEFAULT_RECTANGLES, samples: int = 10**6, seed: int = 0, batch: int = DEFAULT_BATCH) -> list:
    """Monte Carlo volume of f^-1(rect) against vol(rect), with a binomial z-score.

    Each batch draws from its own child seed, so results do not depend on batch order.
    """
    rects = [tuple(float(v) for v in r) for r in rects]
    for r in rects:
        x0, x1, y0, y1 = r
        if not (0 <= x0 <= x1 <= 1 and 0 <= y0 <= y1 <= 1):
            raise ValueError(f"rectangle {r} is not inside the unit square")
    hits = np.zeros(len(rects), dtype=np.int64)
    sizes = [batch] * (samples // batch) + ([samples % batch] if samples % batch else [])
    for size, child in zip(sizes, np.random.SeedSequence(seed).spawn(len(sizes))):
        pts = np.random.default_rng(child).random((size, 2))
        img = baker_apply_array(pts, spec)
        for j, r in enumerate(rects):
            hits[j] += int(_in_rect(img, r).sum())
    out = []
    for r, h in zip(rects, hits):
        vol = (r[1] - r[0]) * (r[3] - r[2])
        est = h / samples
        sd = math.sqrt(vol * (1 - vol) / samples)
        if sd > 0:
            z = (est - vol) / sd
        else:
            z = 0.0 if est == vol else math.inf
        out.append(RectangleCheck(r, vol, float(est), float(z)))
    return out


# ---------------------------------------------------------------------------
# entropy of the geometric system, computed on exact rectangles


def _branch_image(rect, i: int, spec: BakerSpec):
    """Image of rect under branch i, after clipping to V_i; None if the clip is empty."""
    x0, x1, y0, y1 = rect
    lo, hi = Fraction(i, spec.l), Fraction(i + 1, spec.l)
    x0, x1 = max(x0, lo), min(x1, hi)
    if x0 >= x1:
        return None
    r = spec.branch_rank(i)
    return (spec.l * x0 - i, spec.l * x1 - i, (y0 + r) / spec.m, (y1 + r) / spec.m)


def _image(rects, spec: BakerSpec) -> frozenset:
    out = set()
    for rect in rects:
        for i in range(spec.l):
            img = _branch_image(rect, i, spec)
            if img is not None:
                out.add(img)
    return frozenset(out)


def _meet(a: tuple, b: tuple):
    x0, x1 = max(a[0], b[0]), min(a[1], b[1])
    y0, y1 = max(a[2], b[2]), min(a[3], b[3])
    if x0 >= x1 or y0 >= y1:
        return None
    return (x0, x1, y0, y1)


def _area(rects) -> Fraction:
    return sum(((r[1] - r[0]) * (r[3] - r[2]) for r in rects), Fraction(0))


def _entropy_of(atoms) -> float:
    total = 0.0
    for rects in atoms:
        w = _area(rects)
        if w:
            total -= float(w) * (math.log(w.numerator) - math.log(w.denominator))
    return total


def _backward_atoms(spec: BakerSpec, n: int) -> list:
    """Atoms of V v f^-1 V v ... v f^-(n-1) V as rectangle lists, V the vertical strips."""
    one, zero = Fraction(1), Fraction(0)
    atoms = [[(Fraction(i, spec.l), Fraction(i + 1, spec.l), zero, one)] for i in range(spec.l)]
    for _ in range(n - 1):
        nxt = []
        for i in range(spec.l):
            r = spec.branch_rank(i)
            band = (zero, one, Fraction(r, spec.m), Fraction(r + 1, spec.m))
            for rects in atoms:
                # points of V_i whose image lies in the atom
                pieces = []
                for rect in rects:
                    c = _meet(rect, band)
                    if c is not None:
                        x0, x1, y0, y1 = c
                        pieces.append(((x0 + i) / spec.l, (x1 + i) / spec.l, spec.m * y0 - r, spec.m * y1 - r))
                if pieces:
                    nxt.append(pieces)
        atoms = nxt
    return atoms


def _forward_atoms(spec: BakerSpec, n: int) -> list:
    """Atoms of H v f H v ... v f^(n-1) H, H the horizontal strips, by direct images."""
    one, zero = Fraction(1), Fraction(0)
    strips = [frozenset({(zero, one, Fraction(r, spec.m), Fraction(r + 1, spec.m))}) for r in range(spec.m)]
    atoms = [list(s) for s in strips]
    images = strips
    for _ in range(n - 1):
        images = [_image(s, spec) for s in images]
        nxt = []
        for rects in atoms:
            for img in images:
                pieces = [c for a in rects for b in img if (c := _meet(a, b)) is not None]
                if pieces:
                    nxt.append(pieces)
        atoms = nxt
    return atoms


@dataclass(frozen=True)
class CodedEntropy:
    h_plus: float
    h_minus: float
    h_square: float
    block_plus: tuple
    block_minus: tuple

    def to_dict(self) -> dict:
        return {
            "h_plus": self.h_plus,
            "h_minus": self.h_minus,
            "h_square": self.h_square,
            "block_entropies": {"plus": list(self.block_plus), "minus": list(self.block_minus)},
        }


def coded_square_entropy(spec: BakerSpec, depth: int = 5) -> CodedEntropy:
    """Square entropy of the baker map under Lebesgue measure.

    Block entropies come from exact areas of refined strip partitions; the rate is the
    last increment H_n - H_{n-1}, which is exact for a Bernoulli system.
    """
    if depth < 2:
        raise ValueError("depth must be at least 2")
    minus = tuple(_entropy_of(_backward_atoms(spec, k)) for k in (depth - 1, depth))
    plus = tuple(_entropy_of(_forward_atoms(spec, k)) for k in (depth - 1, depth))
    hm, hp = minus[1] - minus[0], plus[1] - plus[0]
    return CodedEntropy(hp, hm, math.sqrt(max(hp, 0.0) * max(hm, 0.0)), plus, minus)
