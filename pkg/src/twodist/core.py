"""Binary words, codes, packings and the packing/code correspondence.

Words are packed into Python integers: coordinate ``i`` (0-based) is bit ``i``.
The printed form lists coordinates left to right, so ``"1100"`` has ones in
coordinates 0 and 1.  Packing points are 1-based; point ``p`` corresponds to
coordinate ``p - 1``.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

MAX_LENGTH = 4096


class CodeError(ValueError):
    """Base class for malformed words, codes and packings."""


class LengthMismatch(CodeError):
    pass


class NotConstantWeight(CodeError):
    pass


class PairCoveredTwice(CodeError):
    def __init__(self, pair: tuple[int, int], blocks: tuple[tuple[int, ...], tuple[int, ...]]):
        self.pair = pair
        self.blocks = blocks
        super().__init__(f"pair {pair} covered by blocks {blocks[0]} and {blocks[1]}")


def _check_length(n: int) -> None:
    if not 1 <= n <= MAX_LENGTH:
        raise CodeError(f"length {n} outside supported range 1..{MAX_LENGTH}")


@dataclass(frozen=True)
class Codeword:
    n: int
    bits: int

    def __post_init__(self) -> None:
        _check_length(self.n)
        if self.bits < 0 or self.bits >> self.n:
            raise CodeError(f"bits do not fit in length {self.n}")

    @classmethod
    def from_str(cls, s: str) -> Codeword:
        s = s.strip()
        if not s or set(s) - {"0", "1"}:
            raise CodeError(f"not a binary word: {s!r}")
        bits = 0
        for i, ch in enumerate(s):
            if ch == "1":
                bits |= 1 << i
        return cls(len(s), bits)

    @classmethod
    def from_support(cls, n: int, support: Iterable[int]) -> Codeword:
        """Word of length ``n`` with ones on the given 0-based coordinates."""
        bits = 0
        for i in support:
            if not 0 <= i < n:
                raise CodeError(f"coordinate {i} outside 0..{n - 1}")
            bits |= 1 << i
        return cls(n, bits)

    @classmethod
    def zero(cls, n: int) -> Codeword:
        return cls(n, 0)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.bits >> i & 1)

    def __xor__(self, other: Codeword) -> Codeword:
        _same_length(self, other)
        return Codeword(self.n, self.bits ^ other.bits)

    def __str__(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.n))

    def sort_key(self) -> str:
        return str(self)


def _same_length(u: Codeword, v: Codeword) -> None:
    if u.n != v.n:
        raise LengthMismatch(f"lengths differ: {u.n} != {v.n}")


def distance(u: Codeword, v: Codeword) -> int:
    _same_length(u, v)
    return (u.bits ^ v.bits).bit_count()


def intersection_weight(u: Codeword, v: Codeword) -> int:
    """Size of the common support, i.e. the weight of the coordinatewise product."""
    _same_length(u, v)
    return (u.bits & v.bits).bit_count()


@dataclass(frozen=True)
class Code:
    """A set of distinct words of common length, kept in lexicographic order."""

    n: int
    words: tuple[Codeword, ...]

    def __init__(self, n: int, words: Iterable[Codeword]):
        _check_length(n)
        words = list(words)
        for w in words:
            if w.n != n:
                raise LengthMismatch(f"word {w} has length {w.n}, code length is {n}")
        ordered = sorted(words, key=Codeword.sort_key)
        for a, b in zip(ordered, ordered[1:]):
            if a.bits == b.bits:
                raise CodeError(f"duplicate word {a}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "words", tuple(ordered))

    @classmethod
    def from_strings(cls, strings: Sequence[str]) -> Code:
        words = [Codeword.from_str(s) for s in strings]
        if not words:
            raise CodeError("cannot infer length of an empty code")
        return cls(words[0].n, words)

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self) -> Iterator[Codeword]:
        return iter(self.words)

    def __contains__(self, w: object) -> bool:
        return w in self.words

    @property
    def distance_set(self) -> frozenset[int]:
        return distance_set(self)


def distance_set(c: Code) -> frozenset[int]:
    ints = [w.bits for w in c.words]
    return frozenset((a ^ b).bit_count() for a, b in combinations(ints, 2))


@dataclass(frozen=True)
class TwoDistanceParams:
    n: int
    d1: int
    d2: int

    def __post_init__(self) -> None:
        if not 1 <= self.d1 < self.d2 <= self.n:
            raise CodeError(f"need 1 <= d1 < d2 <= n, got n={self.n} d1={self.d1} d2={self.d2}")

    @property
    def delta(self) -> int:
        return self.d2 - self.d1


class Classification(enum.Enum):
    EXACT = "exact"
    SUBSET_ONLY = "subset_only"
    NO = "no"


def classify_two_distance(c: Code, p: TwoDistanceParams) -> Classification:
    if c.n != p.n:
        raise LengthMismatch(f"code length {c.n} != n={p.n}")
    ds = distance_set(c)
    target = {p.d1, p.d2}
    if ds == target:
        return Classification.EXACT
    if ds and ds <= target:
        return Classification.SUBSET_ONLY
    return Classification.NO


def translate(c: Code, y: Codeword) -> Code:
    if y.n != c.n:
        raise LengthMismatch(f"translator length {y.n} != code length {c.n}")
    return Code(c.n, (w ^ y for w in c.words))


def weight_distribution(c: Code) -> dict[int, int]:
    return dict(sorted(Counter(w.weight for w in c.words).items()))


@dataclass(frozen=True)
class Packing:
    """Blocks of size ``k`` on points ``1..v``.

    Construction checks block shape only.  Whether every pair is covered at
    most once is reported by :func:`twodist.packings.verify_packing`, so that
    defective packings read from files can still be inspected.
    """

    v: int
    k: int
    blocks: tuple[tuple[int, ...], ...] = field(default=())

    def __init__(self, v: int, k: int, blocks: Iterable[Iterable[int]] = ()):
        if v < 1 or k < 1 or k > v:
            raise CodeError(f"need 1 <= k <= v, got v={v} k={k}")
        normalized = []
        for b in blocks:
            t = tuple(sorted(b))
            if len(t) != k or len(set(t)) != k:
                raise CodeError(f"block {t} does not have {k} distinct points")
            if t[0] < 1 or t[-1] > v:
                raise CodeError(f"block {t} has points outside 1..{v}")
            normalized.append(t)
        if len(set(normalized)) != len(normalized):
            raise CodeError("duplicate block")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "blocks", tuple(normalized))

    def __len__(self) -> int:
        return len(self.blocks)

    def pairs(self) -> Iterator[tuple[int, int]]:
        for b in self.blocks:
            yield from combinations(b, 2)


def code_from_packing(p: Packing) -> Code:
    return Code(p.v, (Codeword.from_support(p.v, (x - 1 for x in b)) for b in p.blocks))


def packing_from_code(c: Code) -> Packing:
    """Inverse of :func:`code_from_packing`.  Blocks are listed in code order."""
    weights = {w.weight for w in c.words}
    if len(weights) > 1:
        raise NotConstantWeight(f"code has weights {sorted(weights)}")
    k = weights.pop() if weights else 1
    owner: dict[tuple[int, int], tuple[int, ...]] = {}
    blocks = []
    for w in c.words:
        block = tuple(i + 1 for i in w.support)
        for pair in combinations(block, 2):
            if pair in owner:
                raise PairCoveredTwice(pair, (owner[pair], block))
            owner[pair] = block
        blocks.append(block)
    return Packing(c.n, k, blocks)


def constant_weight_translator(c: Code, max_n: int = 24) -> Codeword | None:
    """Find ``y`` with ``distance(y, x)`` the same for every ``x`` in ``c``.

    Coordinates of ``y`` are fixed one at a time (0 before 1) while tracking
    the partial distance to every codeword.  The gap between the partial
    distances to word ``j`` and to the first word can only move on coordinates
    where the two words differ, so a branch dies once some gap exceeds the
    number of such coordinates left.  The all-zero word is returned first
    whenever ``c`` is already constant-weight.  Returns None if no translator
    exists.
    """
    if c.n > max_n:
        raise CodeError(f"length {c.n} exceeds translator search limit {max_n}")
    if len(c) == 0:
        return Codeword.zero(c.n)
    n = c.n
    columns = [[w.bits >> i & 1 for w in c.words] for i in range(n)]
    partial = [0] * len(c)
    # remaining[i][j]: coordinates >= i where word j differs from word 0
    remaining = [[0] * len(c) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        col = columns[i]
        remaining[i] = [r + (b ^ col[0]) for r, b in zip(remaining[i + 1], col)]

    def assign(i: int, y: int) -> int | None:
        base = partial[0]
        for p, r in zip(partial, remaining[i]):
            if abs(p - base) > r:
                return None
        if i == n:
            return y
        col = columns[i]
        for bit in (0, 1):
            for j, b in enumerate(col):
                partial[j] += b ^ bit
            found = assign(i + 1, y | bit << i)
            for j, b in enumerate(col):
                partial[j] -= b ^ bit
            if found is not None:
                return found
        return None

    y = assign(0, 0)
    if y is None:
        return None
    result = Codeword(n, y)
    if len({distance(result, x) for x in c.words}) != 1:
        raise AssertionError("translator failed re-verification")
    return result
