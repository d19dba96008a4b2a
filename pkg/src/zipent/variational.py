"""Maximizing square measure entropy over invariant product measures.

Invariant product measures are parameterized by P_S alone; P_Z is always the
tau-pushforward, so the invariance condition holds by construction. The search
runs mirror ascent (multiplicative updates) from several random starts and is
checked against an independent grid search over the simplex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .alphabets import AlphabetPair, validate_transition
from .entropy import DEFAULT_N_MAX, square_topological_entropy
from .errors import HypothesisViolatedError, OracleDisagreementError
from .space import SubZipShift

LOG_FLOOR = 1e-15
BOUNDARY_MIX = 1e-6
FEASIBILITY_TOL = 1e-12


def fiber_matrix(pair: AlphabetPair) -> np.ndarray:
    """l x m 0/1 matrix with a one in row s, column tau(s)."""
    m = np.zeros((pair.l, pair.m))
    for i, s in enumerate(pair.s_symbols):
        m[i, pair.z_rank(pair.tau[s])] = 1.0
    return m


def _entropy_rows(p: np.ndarray) -> np.ndarray:
    safe = np.where(p > 0, p, 1.0)
    return -(p * np.log(safe)).sum(axis=-1) + 0.0


@dataclass(frozen=True)
class SimplexPoint:
    coords: np.ndarray
    induced: np.ndarray = field(repr=False)

    @classmethod
    def from_coords(cls, coords, pair: AlphabetPair) -> "SimplexPoint":
        p = np.asarray(coords, dtype=float)
        if p.shape != (pair.l,):
            raise ValueError(f"expected {pair.l} coordinates, got shape {p.shape}")
        if (p < -FEASIBILITY_TOL).any() or abs(p.sum() - 1.0) > FEASIBILITY_TOL:
            raise ValueError("point is not on the probability simplex")
        p = np.clip(p, 0.0, None)
        return cls(p, p @ fiber_matrix(pair))


def square_objective(p, pair: AlphabetPair) -> float:
    """sqrt(H(P_S) * H(tau_* P_S)); zero when either factor vanishes."""
    point = p if isinstance(p, SimplexPoint) else SimplexPoint.from_coords(p, pair)
    u = _entropy_rows(point.coords)
    v = _entropy_rows(point.induced)
    return math.sqrt(max(u * v, 0.0))


def _objective_rows(p: np.ndarray, fibers: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(_entropy_rows(p) * _entropy_rows(p @ fibers), 0.0, None))


def _gradient(p: np.ndarray, fibers: np.ndarray) -> tuple:
    q = p @ fibers
    lp = np.log(np.maximum(p, LOG_FLOOR))
    lq = np.log(np.maximum(q, LOG_FLOOR))
    u = -(p * lp).sum()
    v = -(q * lq).sum()
    f = math.sqrt(max(u * v, 0.0))
    if f == 0.0:
        return f, np.zeros_like(p)
    du = -lp - 1.0
    dv = fibers @ (-lq - 1.0)
    return f, (v * du + u * dv) / (2.0 * f)


def mirror_ascent(p0, fibers: np.ndarray, step: float = 0.1, iters: int = 5000, tol: float = 1e-14, scale: float = 1.0):
    """Exponentiated-gradient ascent on the simplex.

    Returns ``(p, value, trace, n_iter)`` where ``trace`` holds the objective
    before every update.
    """
    p = np.asarray(p0, dtype=float)
    p = p / p.sum()
    trace = []
    n_iter = 0
    for n_iter in range(1, iters + 1):
        f, g = _gradient(p, fibers)
        trace.append(scale * f)
        z = step * scale * g
        w = p * np.exp(z - z.max())
        w /= w.sum()
        moved = np.abs(w - p).max()
        p = w
        if moved < tol:
            break
    value = scale * float(_objective_rows(p[None, :], fibers)[0])
    return p, value, trace, n_iter


@lru_cache(maxsize=512)
def simplex_compositions(total: int, parts: int) -> np.ndarray:
    """All non-negative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        out = np.array([[total]], dtype=np.int16)
    else:
        rests = [simplex_compositions(total - k, parts - 1) for k in range(total + 1)]
        out = np.empty((sum(r.shape[0] for r in rests), parts), dtype=np.int16)
        row = 0
        for k, rest in enumerate(rests):
            out[row:row + rest.shape[0], 0] = k
            out[row:row + rest.shape[0], 1:] = rest
            row += rest.shape[0]
    out.flags.writeable = False
    return out


def grid_oracle(pair: AlphabetPair, coarse: float = 1e-2, fine: float = 1e-3, radius: int = 15, chunk: int = 500_000):
    """Grid-search maximum of the square objective: a coarse simplex grid, then a
    fine grid within ``radius`` fine steps of the coarse incumbent.

    Returns ``(value, argmax)``.
    """
    fibers = fiber_matrix(pair)
    l = pair.l
    K = int(round(1 / coarse))
    grid = simplex_compositions(K, l)
    best_val, best = -1.0, None
    for start in range(0, grid.shape[0], chunk):
        pts = grid[start:start + chunk] / K
        vals = _objective_rows(pts, fibers)
        j = int(vals.argmax())
        if vals[j] > best_val:
            best_val, best = float(vals[j]), pts[j]
    if l == 1:
        return best_val, best
    Kf = int(round(1 / fine))
    center = np.rint(best * Kf).astype(np.int64)
    center[-1] = Kf - center[:-1].sum()
    offsets = np.arange(-radius, radius + 1)
    mesh = np.stack(np.meshgrid(*([offsets] * (l - 1)), indexing="ij"), axis=-1).reshape(-1, l - 1)
    head = center[:-1] + mesh
    last = Kf - head.sum(axis=1, keepdims=True)
    pts = np.hstack([head, last])
    pts = pts[(pts >= 0).all(axis=1)] / Kf
    for start in range(0, pts.shape[0], chunk):
        block = pts[start:start + chunk]
        vals = _objective_rows(block, fibers)
        j = int(vals.argmax())
        if vals[j] > best_val:
            best_val, best = float(vals[j]), block[j]
    return best_val, best


@dataclass
class OptimizationReport:
    value: float
    argmax: np.ndarray
    trajectory: list
    per_start: list
    oracle_value: float | None
    oracle_argmax: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax": [float(x) for x in self.argmax],
            "trajectory": [float(x) for x in self.trajectory],
            "per_start": [
                {"value": r["value"], "argmax": [float(x) for x in r["argmax"]], "iterations": r["iterations"]}
                for r in self.per_start
            ],
            "oracle_value": self.oracle_value,
            "oracle_argmax": None if self.oracle_argmax is None else [float(x) for x in self.oracle_argmax],
        }


def _starts(l: int, n: int, seed) -> list:
    children = np.random.SeedSequence(seed).spawn(n)
    uniform = np.full(l, 1.0 / l)
    out = []
    for child in children:
        x = np.random.default_rng(child).dirichlet(np.ones(l))
        out.append((1 - BOUNDARY_MIX) * x + BOUNDARY_MIX * uniform)
    return out


def maximize_square_entropy(
    pair: AlphabetPair,
    starts: int = 20,
    step: float = 0.1,
    iters: int = 5000,
    tol: float = 1e-6,
    seed=0,
    oracle: bool = True,
    scale: float = 1.0,
    trajectory_every: int = 50,
) -> OptimizationReport:
    """Multi-start mirror ascent for sup over P_S of sqrt(H(P_S) H(tau_* P_S)).

    Starts are seeded deterministically from ``seed``. With ``oracle`` set the
    best value is compared with :func:`grid_oracle` and an
    :class:`OracleDisagreementError` is raised beyond ``10 * tol``.
    """
    validate_transition(pair)
    if starts < 1:
        raise ValueError("need at least one start")
    fibers = fiber_matrix(pair)
    per_start = []
    best = None
    for p0 in _starts(pair.l, starts, seed):
        p, value, trace, n_iter = mirror_ascent(p0, fibers, step, iters, scale=scale)
        record = {"value": value, "argmax": p, "iterations": n_iter, "trace": trace}
        per_start.append(record)
        if best is None or value > best["value"]:
            best = record
    oracle_value = oracle_argmax = None
    if oracle:
        oracle_value, oracle_argmax = grid_oracle(pair)
        oracle_value *= scale
        if abs(best["value"] - oracle_value) > 10 * tol:
            raise OracleDisagreementError(
                f"ascent value {best['value']:.12g} vs grid oracle {oracle_value:.12g}"
            )
    trajectory = best["trace"][::trajectory_every] + [best["value"]]
    for r in per_start:
        del r["trace"]
    return OptimizationReport(best["value"], best["argmax"], trajectory, per_start, oracle_value, oracle_argmax)


@dataclass(frozen=True)
class VariationalGap:
    h_s_top: float
    sup_h_s_mu: float
    gap: float
    uniform_fibers: bool
    argmax: tuple

    @property
    def equality_expected(self) -> bool:
        return self.uniform_fibers

    def to_dict(self) -> dict:
        return {
            "h_S_top": self.h_s_top,
            "sup_h_S_mu": self.sup_h_s_mu,
            "gap": self.gap,
            "uniform_fibers": self.uniform_fibers,
            "argmax": list(self.argmax),
        }


def variational_gap(sub: SubZipShift, n_max: int = DEFAULT_N_MAX, **ascent) -> VariationalGap:
    """h_S,top minus the supremum of square measure entropy over invariant product measures."""
    if not sub.is_full:
        raise ValueError("the variational gap is computed for full zip shifts only")
    top = square_topological_entropy(sub, n_max)
    report = maximize_square_entropy(sub.pair, **ascent)
    uniform = validate_transition(sub.pair).uniform
    return VariationalGap(
        top.h_square, report.value, top.h_square - report.value, uniform, tuple(float(x) for x in report.argmax)
    )


@dataclass(frozen=True)
class ErgodicityProbe:
    argmax_cluster_diameter: float
    distance_to_uniform: float
    unique: bool
    uniform_fibers: bool
    argmaxes: tuple

    def to_dict(self) -> dict:
        return {
            "argmax_cluster_diameter": self.argmax_cluster_diameter,
            "distance_to_uniform": self.distance_to_uniform,
            "unique": self.unique,
            "uniform_fibers": self.uniform_fibers,
        }


def intrinsic_ergodicity_probe(pair: AlphabetPair, starts: int = 20, seed=0, threshold: float = 1e-4, **ascent) -> ErgodicityProbe:
    """Whether multi-start maximizers collapse to one point (the uniform vector for uniform fibers)."""
    if starts < 20:
        raise ValueError("the probe needs at least 20 starts")
    report = maximize_square_entropy(pair, starts=starts, seed=seed, oracle=False, **ascent)
    points = np.array([r["argmax"] for r in report.per_start])
    diameter = float(np.abs(points[:, None, :] - points[None, :, :]).max())
    to_uniform = float(np.abs(points - 1.0 / pair.l).max())
    uniform = validate_transition(pair).uniform
    unique = diameter < threshold and (not uniform or to_uniform < threshold)
    return ErgodicityProbe(diameter, to_uniform, unique, uniform, tuple(map(tuple, points)))


@dataclass(frozen=True)
class SemicontinuityProbe:
    values: tuple
    limsup_values: float
    value_at_target: float
    ok: bool

    def to_dict(self) -> dict:
        return {
            "values": list(self.values),
            "limsup_values": self.limsup_values,
            "value_at_target": self.value_at_target,
            "ok": self.ok,
        }


def semicontinuity_probe(pair: AlphabetPair, target, sequence, tol: float = 1e-9) -> SemicontinuityProbe:
    """Upper semicontinuity of the square objective along ``sequence`` -> ``target``.

    The limsup of a finite sequence is estimated by the maximum over its second half.
    """
    seq = [np.asarray(x, dtype=float) for x in sequence]
    if not seq:
        raise ValueError("empty sequence")
    target = np.asarray(target, dtype=float)
    values = tuple(square_objective(x, pair) for x in seq)
    tail = values[len(values) // 2:]
    limsup = max(tail)
    at_target = square_objective(target, pair)
    return SemicontinuityProbe(values, limsup, at_target, limsup <= at_target + tol)


@dataclass(frozen=True)
class Classification:
    h1: float
    h2: float
    status: str  # "isomorphic", "not_isomorphic" or "undetermined"

    @property
    def isomorphic(self) -> bool:
        return self.status == "isomorphic"

    def to_dict(self) -> dict:
        return {"h1": self.h1, "h2": self.h2, "isomorphic": self.isomorphic, "status": self.status}


def uniform_square_entropy(m: int, l: int) -> float:
    """sqrt(ln m ln l) for a uniform n-to-1 full zip shift on (m, l) symbols."""
    if m < 1 or l < m or l % m:
        raise HypothesisViolatedError(f"(m, l) = ({m}, {l}) is not a uniform n-to-1 pair")
    if m == 1 and l > 1:
        raise HypothesisViolatedError("#Z = 1 with n > 1 is the one-sided Bernoulli case, outside this classification")
    return math.sqrt(math.log(m) * math.log(l))


def classify_uniform(m1: int, l1: int, m2: int, l2: int, tol: float = 1e-12) -> Classification:
    """Compare two uniform n-to-1 Bernoulli-type maps by square entropy.

    Equal values from different (m, l) are reported as ``undetermined``: the
    square entropy is injective in m only along a fixed fiber size n.
    """
    h1 = uniform_square_entropy(m1, l1)
    h2 = uniform_square_entropy(m2, l2)
    if abs(h1 - h2) > tol:
        status = "not_isomorphic"
    elif (m1, l1) == (m2, l2):
        status = "isomorphic"
    else:
        status = "undetermined"
    return Classification(h1, h2, status)


def square_entropy_increments(n: int, m_values) -> np.ndarray:
    """Forward differences of m -> sqrt(ln m ln(nm)) over consecutive ``m_values``."""
    h = np.array([math.sqrt(math.log(m) * math.log(n * m)) for m in m_values])
    return np.diff(h)
