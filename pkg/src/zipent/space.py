"""Zip shift points, cylinders, the shift map and its preimages, the metric, and word counts."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .alphabets import AlphabetPair, DomainMismatchError, format_word, parse_word
from .errors import EmptySetError, ZipEntError


# ---------------------------------------------------------------------------
# cylinders


@dataclass(frozen=True)
class CylinderSpec:
    """Finitely many prescribed coordinates, stored as sorted ``(index, symbol)`` pairs."""

    constraints: tuple = ()

    def __post_init__(self):
        items = self.constraints.items() if isinstance(self.constraints, Mapping) else self.constraints
        norm = {}
        for i, s in items:
            i, s = int(i), str(s)
            if norm.get(i, s) != s:
                raise ValueError(f"conflicting symbols at index {i}")
            norm[i] = s
        object.__setattr__(self, "constraints", tuple(sorted(norm.items())))

    @classmethod
    def of(cls, mapping: Mapping | None = None) -> "CylinderSpec":
        return cls(tuple((mapping or {}).items()))

    @classmethod
    def _trusted(cls, constraints: Iterable) -> "CylinderSpec":
        # caller guarantees well-formed (int, str) pairs with distinct indices
        obj = object.__new__(cls)
        object.__setattr__(obj, "constraints", tuple(sorted(constraints)))
        return obj

    def as_dict(self) -> dict:
        return dict(self.constraints)

    @property
    def indices(self) -> tuple:
        return tuple(i for i, _ in self.constraints)

    def __len__(self):
        return len(self.constraints)

    def shifted(self, k: int) -> "CylinderSpec":
        return CylinderSpec(tuple((i + k, s) for i, s in self.constraints))

    def check(self, pair: AlphabetPair) -> "CylinderSpec":
        for i, s in self.constraints:
            alphabet = pair.z_symbols if i < 0 else pair.s_symbols
            if s not in alphabet:
                side = "Z" if i < 0 else "S"
                raise DomainMismatchError(f"index {i} needs a symbol of {side}, got {s!r}")
        return self

    def to_json(self) -> dict:
        return {str(i): s for i, s in self.constraints}

    def __str__(self):
        if not self.constraints:
            return "C{}"
        idx = ",".join(str(i) for i in self.indices)
        sym = ",".join(s for _, s in self.constraints)
        return f"C_{{{idx}}}^{{{sym}}}"


def cylinder_intersect(c1: CylinderSpec, c2: CylinderSpec) -> CylinderSpec | None:
    """Merged constraints, or ``None`` when both fix different symbols at one index."""
    a, b = c1.constraints, c2.constraints
    if not a or not b:
        return c2 if not a else c1
    # refinements mostly meet cells on disjoint, ordered index ranges
    if a[-1][0] < b[0][0]:
        merged = a + b
    elif b[-1][0] < a[0][0]:
        merged = b + a
    else:
        d = dict(a)
        for i, s in b:
            if d.setdefault(i, s) != s:
                return None
        merged = tuple(sorted(d.items()))
    obj = object.__new__(CylinderSpec)
    object.__setattr__(obj, "constraints", merged)
    return obj


# ---------------------------------------------------------------------------
# points


def _primitive_root(word: tuple) -> tuple:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


@dataclass(frozen=True, eq=False)
class WindowPoint:
    """A bi-infinite sequence: finite windows around the origin plus periodic tails.

    Reading left to right the point is
    ``... left_tail left_tail left_window . right_window right_tail right_tail ...``
    with ``left_window[-1]`` at index -1 and ``right_window[0]`` at index 0.
    """

    left_tail: tuple
    left_window: tuple
    right_window: tuple
    right_tail: tuple
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("left_tail", "left_window", "right_window", "right_tail"):
            object.__setattr__(self, name, tuple(str(x) for x in getattr(self, name)))
        if not self.left_tail or not self.right_tail:
            raise ValueError("tails must be nonempty")
        object.__setattr__(self, "_key", self._normal_form())

    @classmethod
    def parse(cls, data: Mapping, pair: AlphabetPair) -> "WindowPoint":
        z, s = pair.z_symbols, pair.s_symbols
        return cls(
            parse_word(data["left_tail"], z),
            parse_word(data.get("left_window", ""), z),
            parse_word(data.get("right_window", ""), s),
            parse_word(data["right_tail"], s),
        )

    def to_json(self) -> dict:
        return {
            "left_tail": format_word(self.left_tail),
            "left_window": format_word(self.left_window),
            "right_window": format_word(self.right_window),
            "right_tail": format_word(self.right_tail),
        }

    @property
    def L(self) -> int:
        return len(self.left_window)

    @property
    def R(self) -> int:
        return len(self.right_window)

    def _normal_form(self) -> tuple:
        lt, lw = _primitive_root(self.left_tail), self.left_window
        while lw and lw[0] == lt[0]:
            lw, lt = lw[1:], lt[1:] + lt[:1]
        rt, rw = _primitive_root(self.right_tail), self.right_window
        while rw and rw[-1] == rt[-1]:
            rw, rt = rw[:-1], rt[-1:] + rt[:-1]
        return (lt, lw, rw, rt)

    def normalized(self) -> "WindowPoint":
        return WindowPoint(*self._key)

    def __eq__(self, other):
        if not isinstance(other, WindowPoint):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __getitem__(self, i: int):
        return coordinate(self, i)

    def widened(self, L: int, R: int) -> "WindowPoint":
        """Same point with windows covering at least [-L, R)."""
        lt, lw, rw, rt = self.left_tail, self.left_window, self.right_window, self.right_tail
        while len(lw) < L:
            lw, lt = lt[-1:] + lw, lt[-1:] + lt[:-1]
        while len(rw) < R:
            rw, rt = rw + rt[:1], rt[1:] + rt[:1]
        return WindowPoint(lt, lw, rw, rt)

    def span(self) -> tuple:
        """Coordinates in ``[-B, B)`` determine the point, with B covering windows plus one joint period."""
        return (self.L + len(self.left_tail), self.R + len(self.right_tail))

    def __str__(self):
        left = format_word(self.left_tail * 2 + self.left_window)
        right = format_word(self.right_window + self.right_tail * 2)
        return f"(...{left}.{right}...)"


def coordinate(x: WindowPoint, i: int):
    """Symbol of ``x`` at index ``i`` (a Z-symbol for i < 0, an S-symbol otherwise)."""
    if i >= 0:
        if i < x.R:
            return x.right_window[i]
        return x.right_tail[(i - x.R) % len(x.right_tail)]
    if -i <= x.L:
        return x.left_window[x.L + i]
    k = -x.L - 1 - i
    return x.left_tail[-(k % len(x.left_tail)) - 1]


def apply_zip_shift(x: WindowPoint, k: int, pair: AlphabetPair) -> WindowPoint:
    """k-fold zip shift: coordinates move left and the symbol leaving index 0 is recoded by tau."""
    if k < 0:
        raise ValueError("k must be non-negative; use preimages() for the backward direction")
    if k == 0:
        return x
    y = x.widened(0, k)
    moved = tuple(pair.tau[s] for s in y.right_window[:k])
    return WindowPoint(y.left_tail, y.left_window + moved, y.right_window[k:], y.right_tail)


def preimages(x: WindowPoint, pair: AlphabetPair) -> list:
    """All y with sigma_tau(y) = x; one per S-symbol in the fiber over x_{-1}."""
    y = x.widened(1, 0)
    a = y.left_window[-1]
    return [
        WindowPoint(y.left_tail, y.left_window[:-1], (s,) + y.right_window, y.right_tail)
        for s in pair.fiber(a)
    ]


def iterated_preimages(x: WindowPoint, k: int, pair: AlphabetPair) -> list:
    layer = [x]
    for _ in range(k):
        layer = [y for p in layer for y in preimages(p, pair)]
    return layer


# ---------------------------------------------------------------------------
# metric


def _first_difference(x: WindowPoint, y: WindowPoint, shift: int = 0):
    """Smallest |i| with x_{i-shift} != y_{i-shift}, or None when the sequences agree everywhere."""
    lx, rx = x.span()
    ly, ry = y.span()
    per_l = math.lcm(len(x.left_tail), len(y.left_tail))
    per_r = math.lcm(len(x.right_tail), len(y.right_tail))
    bound = max(lx, ly) + per_l + max(rx, ry) + per_r + abs(shift)
    for r in range(bound + 1):
        for i in ((0,) if r == 0 else (-r, r)):
            if coordinate(x, i - shift) != coordinate(y, i - shift):
                return r
    return None


def distance(x: WindowPoint, y: WindowPoint) -> Fraction:
    """d(x, y) = 2^-M with M the smallest |i| where the points differ; 0 when equal."""
    m = _first_difference(x, y)
    return Fraction(0) if m is None else Fraction(1, 2**m)


def set_distance(a: Iterable, b: Iterable) -> Fraction:
    a, b = list(a), list(b)
    if not a or not b:
        raise EmptySetError("set distance needs two nonempty sets")
    return min(distance(p, q) for p in a for q in b)


def preimage_set_distance(x: WindowPoint, y: WindowPoint, k: int) -> Fraction:
    """Distance between the k-fold preimage sets of x and y without enumerating them.

    Every k-fold preimage of x reads x_{j-k} at index j, except that indices 0..k-1
    carry free choices from the fibers over x_{j-k}. Fibers over distinct Z-symbols are
    disjoint and equal symbols allow equal choices, so the closest pair differs exactly
    where the shifted sequences differ.
    """
    m = _first_difference(x, y, shift=k)
    return Fraction(0) if m is None else Fraction(1, 2**m)


def expansivity_witness(x: WindowPoint, y: WindowPoint, K: int, pair: AlphabetPair):
    """Smallest |k| <= K whose iterates are more than 1/2 apart, as ``(k, separation)``.

    Forward iterates are compared pointwise; for k < 0 the |k|-fold preimage sets
    are compared with the set distance. Returns ``None`` when no k within K separates.
    """
    half = Fraction(1, 2)
    for r in range(K + 1):
        for k in ((0,) if r == 0 else (r, -r)):
            if k >= 0:
                d = distance(apply_zip_shift(x, k, pair), apply_zip_shift(y, k, pair))
            else:
                d = preimage_set_distance(x, y, -k)
            if d > half:
                return k, d
    return None


# ---------------------------------------------------------------------------
# sub-zip shifts and words


@dataclass(frozen=True)
class ForbiddenWord:
    side: str
    word: tuple

    def __post_init__(self):
        side = self.side.upper()
        if side not in ("S", "Z"):
            raise ValueError(f"side must be S or Z, got {self.side!r}")
        if not self.word:
            raise ValueError("forbidden words must be nonempty")
        object.__setattr__(self, "side", side)
        object.__setattr__(self, "word", tuple(self.word))


@dataclass(frozen=True)
class SubZipShift:
    """A zip shift restricted by single-side forbidden words."""

    pair: AlphabetPair
    forbidden: tuple = ()

    def __post_init__(self):
        words = tuple(self.forbidden)
        for f in words:
            if not isinstance(f, ForbiddenWord):
                raise TypeError("forbidden entries must be ForbiddenWord")
            alphabet = self.pair.alphabet(f.side)
            if any(s not in alphabet for s in f.word):
                raise ZipEntError(
                    f"forbidden word {format_word(f.word)!r} mixes alphabets; cross-boundary words are unsupported"
                )
        object.__setattr__(self, "forbidden", words)

    @classmethod
    def full(cls, pair: AlphabetPair) -> "SubZipShift":
        return cls(pair, ())

    @classmethod
    def with_words(cls, pair: AlphabetPair, side: str, words: Iterable) -> "SubZipShift":
        alphabet = pair.alphabet(side)
        return cls(pair, tuple(ForbiddenWord(side, parse_word(w, alphabet)) for w in words))

    def words_for(self, side: str) -> tuple:
        side = side.upper()
        return tuple(f.word for f in self.forbidden if f.side == side)

    @property
    def is_full(self) -> bool:
        return not self.forbidden


DP_MAX_FORBIDDEN_LENGTH = 12


def _automaton(alphabet: tuple, forbidden: tuple):
    """Aho-Corasick style automaton over prefixes of forbidden words.

    States are the proper prefixes that are not themselves forbidden-ended;
    ``delta[state][symbol]`` is ``None`` when the step completes a forbidden factor.
    """
    forb = set(forbidden)
    prefixes = {()}
    for w in forbidden:
        for j in range(1, len(w)):
            prefixes.add(w[:j])

    def longest_suffix_state(word):
        for j in range(len(word) + 1):
            suffix = word[j:]
            if suffix in prefixes:
                return suffix
        return ()

    def hits(word):
        return any(word[j:] in forb for j in range(len(word)))

    live = sorted(p for p in prefixes if not any(p[i:j] in forb for i in range(len(p)) for j in range(i + 1, len(p) + 1)))
    delta = {}
    for state in live:
        row = {}
        for a in alphabet:
            nxt = state + (a,)
            row[a] = None if hits(nxt) else longest_suffix_state(nxt)
        delta[state] = row
    return delta


def count_words_dp(alphabet: tuple, forbidden: tuple, n: int) -> int:
    if n == 0:
        return 1
    delta = _automaton(alphabet, forbidden)
    counts = {(): 1}
    for _ in range(n):
        nxt = {}
        for state, c in counts.items():
            for a in alphabet:
                t = delta[state][a]
                if t is not None:
                    nxt[t] = nxt.get(t, 0) + c
        counts = nxt
    return sum(counts.values())


def _admissible_words(alphabet: tuple, forbidden: tuple, n: int):
    """Depth-first generation, pruning as soon as a suffix is forbidden."""
    forb = set(forbidden)
    longest = max((len(w) for w in forbidden), default=0)

    def extend(prefix):
        if len(prefix) == n:
            yield prefix
            return
        for a in alphabet:
            word = prefix + (a,)
            tail = word[-longest:] if longest else ()
            if any(tail[j:] in forb for j in range(len(tail))):
                continue
            yield from extend(word)

    yield from extend(())


def count_words_bruteforce(alphabet: tuple, forbidden: tuple, n: int) -> int:
    return sum(1 for _ in _admissible_words(alphabet, forbidden, n))


@dataclass(frozen=True)
class WordCount:
    count: int
    words: list | None = None

    def to_dict(self) -> dict:
        out = {"count": self.count}
        if self.words is not None:
            out["words"] = [format_word(w) for w in self.words]
        return out


def enumerate_words(sub: SubZipShift, side: str, n: int, return_words: bool = False) -> WordCount:
    """Number of length-n words over one side's alphabet with no forbidden factor."""
    if n < 0:
        raise ValueError("n must be non-negative")
    alphabet = sub.pair.alphabet(side)
    forbidden = sub.words_for(side)
    if return_words:
        words = list(_admissible_words(alphabet, forbidden, n))
        return WordCount(len(words), words)
    if max((len(w) for w in forbidden), default=0) <= DP_MAX_FORBIDDEN_LENGTH:
        return WordCount(count_words_dp(alphabet, forbidden, n))
    return WordCount(count_words_bruteforce(alphabet, forbidden, n))


def image_cylinder(c: CylinderSpec, pair: AlphabetPair) -> CylinderSpec:
    """sigma_tau(C) for a cylinder C; always a cylinder on the full zip shift.

    Index i moves to i-1, and an S-constraint at 0 becomes tau of it at -1.
    """
    return CylinderSpec._trusted((i - 1, pair.tau[s] if i == 0 else s) for i, s in c.constraints)


def all_cylinders(pair: AlphabetPair, lo: int, hi: int):
    """Every cylinder whose constraint indices lie in [lo, hi), ordered by size then index."""
    indices = list(range(lo, hi))
    for size in range(len(indices) + 1):
        for chosen in itertools.combinations(indices, size):
            alphabets = [pair.z_symbols if i < 0 else pair.s_symbols for i in chosen]
            for symbols in itertools.product(*alphabets):
                yield CylinderSpec(tuple(zip(chosen, symbols)))


def count_cylinders(pair: AlphabetPair, lo: int, hi: int) -> int:
    total = 1
    for i in range(lo, hi):
        total *= 1 + (pair.m if i < 0 else pair.l)
    return total
