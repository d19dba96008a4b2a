"""Argument checks shared by the functional API, the estimators and the CLI."""

from __future__ import annotations

import numbers

from .alphabets import AlphabetPair, ProbabilityVector, validate_transition
from .errors import DomainMismatchError
from .measure import MeasureSpec
from .space import SubZipShift


def check_int(value, name: str, lo: int | None = None, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if lo is not None and value < lo:
        raise ValueError(f"{name} must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ValueError(f"{name} must be <= {hi}, got {value}")
    return value


def check_positive(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not value > 0:
        raise ValueError(f"{name} must be a positive number, got {value!r}")
    return float(value)


def check_side(side) -> str:
    side = str(side).upper()
    if side not in ("S", "Z"):
        raise ValueError(f"side must be 'S' or 'Z', got {side!r}")
    return side


def check_seed(seed) -> int:
    """Seeds are explicit non-negative integers; ``None`` is refused on purpose."""
    if seed is None:
        raise ValueError("a seed is required for randomized procedures")
    return check_int(seed, "seed", lo=0)


def check_pair(pair, surjective: bool = True) -> AlphabetPair:
    if not isinstance(pair, AlphabetPair):
        raise TypeError(f"expected an AlphabetPair, got {type(pair).__name__}")
    if surjective:
        validate_transition(pair)
    return pair


def check_measure(mu) -> MeasureSpec:
    """Accept a MeasureSpec, or an AlphabetPair meaning its uniform measure."""
    if isinstance(mu, AlphabetPair):
        return MeasureSpec.uniform(check_pair(mu))
    if not isinstance(mu, MeasureSpec):
        raise TypeError(f"expected a MeasureSpec or AlphabetPair, got {type(mu).__name__}")
    check_pair(mu.pair)
    return mu


def check_sub(sub) -> SubZipShift:
    if isinstance(sub, AlphabetPair):
        return SubZipShift.full(check_pair(sub))
    if not isinstance(sub, SubZipShift):
        raise TypeError(f"expected a SubZipShift or AlphabetPair, got {type(sub).__name__}")
    check_pair(sub.pair)
    return sub


def check_probability(p, symbols) -> ProbabilityVector:
    if isinstance(p, ProbabilityVector):
        if tuple(p.symbols) != tuple(symbols):
            raise DomainMismatchError(f"vector is on {list(p.symbols)}, expected {list(symbols)}")
        return p
    return ProbabilityVector(tuple(symbols), tuple(p))
