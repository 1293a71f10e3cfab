"""Packing numbers, packing constructions and the two-block extension procedure."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .core import CodeError, Packing

# D(v,4,2) has no closed form at these v
QUADRUPLE_EXCEPTIONS = frozenset({8, 9, 10, 11, 17, 19})


def d_formula_triples(v: int) -> int:
    """Maximum number of triples on ``v`` points with no pair covered twice."""
    if v < 3:
        raise ValueError(f"v must be >= 3, got {v}")
    r = v % 6
    if r in (1, 3):
        num = v * v - v
    elif r in (0, 2):
        num = v * v - 2 * v
    elif r == 4:
        num = v * v - 2 * v - 2
    else:
        num = v * v - v - 8
    q, rem = divmod(num, 6)
    assert rem == 0, v
    return q


def d_formula_quadruples(v: int) -> int | None:
    """Maximum number of 4-sets on ``v`` points with no pair covered twice.

    None for the six small ``v`` the residue formula does not cover.
    """
    if v < 4:
        raise ValueError(f"v must be >= 4, got {v}")
    if v in QUADRUPLE_EXCEPTIONS:
        return None
    r = v % 12
    if r in (1, 4):
        num = v * v - v
    elif r in (0, 3):
        num = v * v - 3 * v
    elif r in (2, 8):
        num = v * v - 2 * v
    elif r in (5, 11):
        num = v * v - 2 * v - 3
    elif r in (7, 10):
        num = v * v - v - 18
    else:
        num = v * v - 3 * v - 6
    q, rem = divmod(num, 12)
    assert rem == 0, v
    return q


def d_polynomial_lower(d: int, n: int) -> Fraction:
    """Residue-free quadratic lower envelope of D(n, d/2+1, 2) for d in {4, 6}."""
    if d == 4:
        return Fraction(n * n - 2 * n - 2, 6)
    if d == 6:
        return Fraction(n * n - 3 * n - 6, 12)
    raise ValueError(f"no closed-form packing number for d={d}")


def packing_formula(v: int, k: int) -> int | None:
    if k == 3:
        return d_formula_triples(v) if v >= 3 else 0
    if k == 4:
        return d_formula_quadruples(v) if v >= 4 else 0
    return None


@dataclass(frozen=True)
class PackingReport:
    valid: bool
    violation: tuple[tuple[int, int], tuple[tuple[int, ...], tuple[int, ...]]] | None = None
    pair_counts: dict[tuple[int, int], int] = field(default_factory=dict, repr=False, compare=False)

    @property
    def exact_cover(self) -> bool:
        """True when every pair of points is covered exactly once."""
        return self.valid and bool(self.pair_counts) and all(c == 1 for c in self.pair_counts.values())


def verify_packing(p: Packing) -> PackingReport:
    owner: dict[tuple[int, int], tuple[int, ...]] = {}
    violation = None
    for b in p.blocks:
        for pair in combinations(b, 2):
            if pair in owner:
                if violation is None:
                    violation = (pair, (owner[pair], b))
            else:
                owner[pair] = b
    counts = {}
    if violation is None:
        counts = {pair: 0 for pair in combinations(range(1, p.v + 1), 2)}
        for pair in owner:
            counts[pair] = 1
    return PackingReport(violation is None, violation, counts)


def greedy_packing(v: int, k: int, seed: int = 0) -> Packing:
    """First-fit packing over k-subsets in lexicographic order of shuffled labels."""
    if not 2 <= k <= v:
        raise ValueError(f"need 2 <= k <= v, got v={v} k={k}")
    labels = list(range(1, v + 1))
    random.Random(seed).shuffle(labels)
    covered: set[tuple[int, int]] = set()
    blocks = []
    for cand in combinations(labels, k):
        block = tuple(sorted(cand))
        pairs = list(combinations(block, 2))
        if any(pr in covered for pr in pairs):
            continue
        covered.update(pairs)
        blocks.append(block)
    return Packing(v, k, blocks)


def bose_sts(v: int) -> Packing:
    """Steiner triple system on ``v = 6t + 3`` points.

    Points are pairs (x, i) with x in Z_{2t+1} and i in Z_3, labelled
    ``1 + x + (2t+1) i``.  The quasigroup is x o y = (x + y)(t + 1) mod 2t+1,
    which is idempotent and commutative.
    """
    if v % 6 != 3 or v < 9:
        raise ValueError(f"Bose construction needs v = 3 (mod 6) and v >= 9, got {v}")
    m = v // 3
    half = (m + 1) // 2

    def label(x: int, i: int) -> int:
        return 1 + x + m * (i % 3)

    blocks = [(label(x, 0), label(x, 1), label(x, 2)) for x in range(m)]
    for i in range(3):
        for x, y in combinations(range(m), 2):
            blocks.append((label(x, i), label(y, i), label((x + y) * half % m, i + 1)))
    return Packing(v, 3, blocks)


def select_transversal_set(
    p: Packing,
    k: int,
    forbidden: Iterable[int] = (),
    seed: int | random.Random = 0,
    prefer_clear: bool = False,
) -> list[int] | None:
    """Pick ``k`` points so that no block of ``p`` contains three of them.

    Points are drawn at random from outside a prohibited set.  When a new
    point forms a covered pair with an earlier pick, the whole covering block
    becomes prohibited, so no third point of that block can follow.  Returns
    the points in selection order, or None when the pool runs dry.

    With ``prefer_clear``, candidates whose covering blocks (paired with
    earlier picks) avoid the forbidden points are drawn first; any remaining
    candidate is used only when no such point exists.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    block_of = _pair_index(p.blocks)
    prohibited = set(forbidden)
    avoid = set(prohibited) if prefer_clear else set()
    chosen: list[int] = []

    def clear(x: int) -> bool:
        for c in chosen:
            block = block_of.get(_pair(x, c))
            if block is not None and avoid.intersection(block):
                return False
        return True

    while len(chosen) < k:
        pool = [x for x in range(1, p.v + 1) if x not in prohibited and x not in chosen]
        if not pool:
            return None
        if avoid:
            pool = [x for x in pool if clear(x)] or pool
        b = rng.choice(pool)
        chosen.append(b)
        for c in chosen[:-1]:
            block = block_of.get(_pair(b, c))
            if block is not None:
                prohibited.update(block)
            else:
                prohibited.add(b)
    return chosen


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _pair_index(blocks: Iterable[Sequence[int]]) -> dict[tuple[int, int], tuple[int, ...]]:
    index = {}
    for b in blocks:
        t = tuple(b)
        for pair in combinations(sorted(t), 2):
            index[pair] = t
    return index


@dataclass(frozen=True)
class Rewiring:
    old: tuple[int, ...]
    new: tuple[int, ...]


@dataclass(frozen=True)
class ExtensionResult:
    input_blocks: int
    output: Packing
    added_sets: tuple[tuple[int, ...], tuple[int, ...]]
    attempts_used: int
    rewired: tuple[Rewiring, ...] = ()

    def provenance(self) -> list[str]:
        lines = [
            f"extended {self.input_blocks} blocks on {self.output.v - self.output.k + 2} points"
            f" to {len(self.output)} blocks on {self.output.v} points"
            f" (attempts used: {self.attempts_used})",
            "S  = " + " ".join(map(str, self.added_sets[0])),
            "S' = " + " ".join(map(str, self.added_sets[1])),
        ]
        for r in self.rewired:
            lines.append("rewired " + " ".join(map(str, r.old)) + " -> " + " ".join(map(str, r.new)))
        return lines


def _rewire_round(
    blocks: list[tuple[int, ...]],
    s: Sequence[int],
    v: int,
    log: list[Rewiring],
) -> list[tuple[int, ...]] | None:
    """Move every pair of ``s`` off the blocks using new points v+1..v+k-2.

    For i <= k-3, a block holding {a_i, a_j} (j > i) swaps a_i for v+i.  The
    last three pairs share point v+k-2: {a_{k-2}, a_{k-1}} drops a_{k-2},
    {a_{k-2}, a_k} drops a_k and {a_{k-1}, a_k} drops a_{k-1}.  Returns the
    new family with ``s`` appended, or None if some pair ends up covered twice.
    """
    k = len(s)
    a = [None, *s]  # 1-based like the points themselves
    current = list(blocks)

    def swap(x: int, y: int, drop: int, new_point: int) -> None:
        for idx, b in enumerate(current):
            if x in b and y in b:
                nb = tuple(sorted([q for q in b if q != drop] + [new_point]))
                log.append(Rewiring(b, nb))
                current[idx] = nb
                return

    for i in range(1, k - 2):
        for j in range(i + 1, k + 1):
            swap(a[i], a[j], a[i], v + i)
    last = v + k - 2
    swap(a[k - 2], a[k - 1], a[k - 2], last)
    swap(a[k - 2], a[k], a[k], last)
    swap(a[k - 1], a[k], a[k - 1], last)
    current.append(tuple(sorted(s)))
    if not _is_packing(current):
        return None
    return current


def _is_packing(blocks: Iterable[Sequence[int]]) -> bool:
    seen = set()
    for b in blocks:
        for pair in combinations(sorted(b), 2):
            if pair in seen:
                return False
            seen.add(pair)
    return True


def extend_packing(
    p: Packing,
    d: int,
    max_attempts: int = 100,
    seed: int = 0,
) -> ExtensionResult | None:
    """Grow a packing by two blocks at the cost of d/2 - 1 new points.

    Round one picks a transversal set S, rewires the blocks covering its
    pairs onto the new points, and adds S.  Round two repeats this with the
    blocks touching the new points prohibited from the second set S'.  Every
    intermediate family is checked; a failed attempt is retried with fresh
    random choices.  Returns None when all attempts fail.
    """
    if d % 2 or p.k != d // 2 + 1:
        raise CodeError(f"block size {p.k} does not match d={d} (need k = d/2 + 1)")
    if p.k < 3:
        raise CodeError("extension needs block size at least 3")
    if not verify_packing(p).valid:
        raise CodeError("input is not a 2-packing")
    k = p.k
    v_new = p.v + k - 2
    new_points = set(range(p.v + 1, v_new + 1))
    rng = random.Random(seed)
    for attempt in range(1, max_attempts + 1):
        log: list[Rewiring] = []
        s1 = select_transversal_set(p, k, (), rng)
        if s1 is None:
            continue
        family = _rewire_round(list(p.blocks), s1, p.v, log)
        if family is None:
            continue
        touched = set()
        for b in family:
            if new_points.intersection(b):
                touched.update(b)
        s2 = select_transversal_set(Packing(v_new, k, family), k, touched, rng, prefer_clear=True)
        if s2 is None:
            continue
        family = _rewire_round(family, s2, p.v, log)
        if family is None:
            continue
        out = Packing(v_new, k, family)
        if not verify_packing(out).valid or len(out) != len(p) + 2:
            continue
        return ExtensionResult(len(p), out, (tuple(sorted(s1)), tuple(sorted(s2))), attempt, tuple(log))
    return None


@dataclass(frozen=True)
class StepCheckReport:
    k: int
    v: int
    lhs: int
    rhs: int
    holds: bool

    @property
    def step(self) -> int:
        return 1 if self.k == 3 else 3


def step_lemma_check(k: int, v: int) -> StepCheckReport:
    """Compare D(v+1,3,2) with D(v,3,2)+2, or D(v+3,4,2) with D(v,4,2)+2."""
    if k == 3:
        lhs, base = d_formula_triples(v + 1), d_formula_triples(v)
    elif k == 4:
        lhs, base = d_formula_quadruples(v + 3), d_formula_quadruples(v)
        if lhs is None or base is None:
            raise ValueError(f"D(v,4,2) formula undefined at v={v} or v+3={v + 3}")
    else:
        raise ValueError(f"step inequality only stated for k in (3, 4), got {k}")
    return StepCheckReport(k, v, lhs, base + 2, lhs >= base + 2)
