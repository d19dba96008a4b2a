"""Alphabet pairs, the transition map tau: S -> Z, and exact probability vectors."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Sequence

from .errors import DomainMismatchError, NonSurjectiveError

Word = tuple  # tuple of symbol strings


def as_fraction(value) -> Fraction:
    """Parse ``"p/q"`` strings, ints, Fractions; floats are taken exactly only if given as strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    raise TypeError(f"cannot read {value!r} as a rational")


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class AlphabetPair:
    """The symbol sets S (non-negative coordinates), Z (negative coordinates) and tau."""

    s_symbols: tuple
    z_symbols: tuple
    tau: Mapping = field(repr=False)

    def __post_init__(self):
        s = tuple(str(x) for x in self.s_symbols)
        z = tuple(str(x) for x in self.z_symbols)
        if len(set(s)) != len(s) or len(set(z)) != len(z):
            raise ValueError("symbols within an alphabet must be distinct")
        if not s or not z:
            raise ValueError("alphabets must be nonempty")
        tau = {str(k): str(v) for k, v in dict(self.tau).items()}
        if set(tau) != set(s):
            raise DomainMismatchError(f"tau must be defined exactly on S={list(s)}, got keys {sorted(tau)}")
        bad = sorted({v for v in tau.values() if v not in z})
        if bad:
            raise DomainMismatchError(f"tau takes values {bad} outside Z={list(z)}")
        object.__setattr__(self, "s_symbols", s)
        object.__setattr__(self, "z_symbols", z)
        object.__setattr__(self, "tau", MappingProxyType(tau))

    def __hash__(self):
        return hash((self.s_symbols, self.z_symbols, tuple(self.tau[s] for s in self.s_symbols)))

    def __eq__(self, other):
        if not isinstance(other, AlphabetPair):
            return NotImplemented
        return (
            self.s_symbols == other.s_symbols
            and self.z_symbols == other.z_symbols
            and dict(self.tau) == dict(other.tau)
        )

    @classmethod
    def identity(cls, symbols: Iterable) -> "AlphabetPair":
        symbols = tuple(str(x) for x in symbols)
        return cls(symbols, symbols, {s: s for s in symbols})

    @classmethod
    def uniform(cls, m: int, n: int) -> "AlphabetPair":
        """Full (m, n*m) pair with S = 0..l-1, Z = a0..a{m-1} and tau(s) = s mod m."""
        l = n * m
        s = tuple(str(i) for i in range(l))
        z = tuple(f"a{j}" for j in range(m))
        return cls(s, z, {str(i): z[i % m] for i in range(l)})

    @property
    def l(self) -> int:
        return len(self.s_symbols)

    @property
    def m(self) -> int:
        return len(self.z_symbols)

    def fiber(self, a) -> tuple:
        return tuple(s for s in self.s_symbols if self.tau[s] == a)

    def fibers(self) -> dict:
        return {a: self.fiber(a) for a in self.z_symbols}

    def z_rank(self, a) -> int:
        return self.z_symbols.index(a)

    def s_rank(self, s) -> int:
        return self.s_symbols.index(s)

    def alphabet(self, side: str) -> tuple:
        side = side.upper()
        if side == "S":
            return self.s_symbols
        if side == "Z":
            return self.z_symbols
        raise ValueError(f"side must be 'S' or 'Z', got {side!r}")

    def single_char(self) -> bool:
        return all(len(x) == 1 for x in self.s_symbols + self.z_symbols)


def parse_word(text, alphabet: Sequence) -> Word:
    """Split a word given as a string (one char per symbol, or whitespace separated) or a list."""
    if isinstance(text, (list, tuple)):
        word = tuple(str(x) for x in text)
    elif all(len(a) == 1 for a in alphabet) and not any(c.isspace() for c in text):
        word = tuple(text)
    else:
        word = tuple(text.split())
    bad = [x for x in word if x not in alphabet]
    if bad:
        raise DomainMismatchError(f"symbols {bad} not in alphabet {list(alphabet)}")
    return word


def format_word(word: Iterable) -> str:
    word = tuple(word)
    if all(len(x) == 1 for x in word):
        return "".join(word)
    return " ".join(word)


@dataclass(frozen=True)
class ProbabilityVector(Mapping):
    """Exact rational weights over an ordered symbol set."""

    symbols: tuple
    weights: tuple
    _lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        weights = tuple(as_fraction(w) for w in self.weights)
        if len(symbols) != len(weights):
            raise ValueError("symbols and weights differ in length")
        if len(set(symbols)) != len(symbols):
            raise ValueError("duplicate symbols")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be non-negative")
        if sum(weights) != 1:
            raise ValueError(f"weights sum to {sum(weights)}, not 1")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_lookup", dict(zip(symbols, weights)))

    @classmethod
    def from_mapping(cls, entries: Mapping, order: Sequence | None = None) -> "ProbabilityVector":
        order = tuple(order) if order is not None else tuple(entries)
        if set(map(str, entries)) != set(map(str, order)):
            raise DomainMismatchError("mapping keys do not match the declared symbols")
        lookup = {str(k): v for k, v in entries.items()}
        return cls(order, tuple(lookup[str(s)] for s in order))

    @classmethod
    def uniform(cls, symbols: Sequence) -> "ProbabilityVector":
        k = len(symbols)
        return cls(tuple(symbols), (Fraction(1, k),) * k)

    def __getitem__(self, symbol) -> Fraction:
        return self._lookup[symbol]

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __hash__(self):
        return hash((self.symbols, self.weights))

    def __eq__(self, other):
        if isinstance(other, ProbabilityVector):
            return self.symbols == other.symbols and self.weights == other.weights
        return NotImplemented

    def as_floats(self) -> list:
        return [float(w) for w in self.weights]

    def to_json(self) -> list:
        return [format_fraction(w) for w in self.weights]


@dataclass(frozen=True)
class ValidationReport:
    surjective: bool
    fiber_sizes: dict
    uniform: bool
    n: int | None

    def to_dict(self) -> dict:
        return {
            "surjective": self.surjective,
            "fiber_sizes": dict(self.fiber_sizes),
            "uniform": self.uniform,
            "n": self.n,
        }


def validate_transition(pair: AlphabetPair) -> ValidationReport:
    """Fiber sizes of tau; raises :class:`NonSurjectiveError` when some fiber is empty."""
    sizes = {a: len(pair.fiber(a)) for a in pair.z_symbols}
    missing = [a for a, k in sizes.items() if k == 0]
    if missing:
        raise NonSurjectiveError(missing)
    distinct = set(sizes.values())
    uniform = len(distinct) == 1
    return ValidationReport(True, sizes, uniform, distinct.pop() if uniform else None)


def _check_domain(p: ProbabilityVector, symbols: tuple, name: str):
    if set(p.symbols) != set(symbols) or len(p.symbols) != len(symbols):
        raise DomainMismatchError(f"{name} is defined on {list(p.symbols)}, expected {list(symbols)}")


def induce_z_distribution(p_s: ProbabilityVector, pair: AlphabetPair) -> ProbabilityVector:
    """Push P_S forward along tau: p'_a is the total weight of the fiber over a."""
    _check_domain(p_s, pair.s_symbols, "P_S")
    return ProbabilityVector(
        pair.z_symbols, tuple(sum((p_s[s] for s in pair.fiber(a)), Fraction(0)) for a in pair.z_symbols)
    )


def check_invariance_condition(p_s: ProbabilityVector, p_z: ProbabilityVector, pair: AlphabetPair):
    """Return ``(ok, violations)``: the Z-symbols whose weight differs from their fiber sum."""
    _check_domain(p_z, pair.z_symbols, "P_Z")
    induced = induce_z_distribution(p_s, pair)
    violations = [a for a in pair.z_symbols if p_z[a] != induced[a]]
    return not violations, violations


def _xlogx(p: Fraction) -> float:
    if p == 0:
        return 0.0
    # ln p = ln num - ln den keeps full precision for tiny rationals
    return float(p) * (math.log(p.numerator) - math.log(p.denominator))


def shannon_entropy(p) -> float:
    """Entropy in nats, with 0 ln 0 = 0.

    Accepts a :class:`ProbabilityVector` or any iterable of weights; rational
    weights stay exact until the logarithm.
    """
    weights = p.weights if isinstance(p, ProbabilityVector) else p
    total = 0.0
    for w in weights:
        if isinstance(w, (Fraction, int)):
            total -= _xlogx(Fraction(w))
        elif w > 0:
            total -= w * math.log(w)
    return total + 0.0
