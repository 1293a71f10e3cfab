"""Exact maximum-clique search for A_2(n, {d1, d2}) and packing numbers.

Graphs keep adjacency as one Python ``int`` bitset per vertex.  The solver is
a colouring-bounded branch and bound: candidates are greedily coloured, the
colour count bounds the clique that can still be added, and only vertices
whose colour could beat the incumbent are branched on.
"""
from __future__ import annotations

import multiprocessing as mp
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Any, Callable, Sequence

import numpy as np

from . import _kernel
from .bounds import Sandwich, barg_upper, sandwich
from .core import (
    Classification,
    Code,
    Codeword,
    TwoDistanceParams,
    classify_two_distance,
    constant_weight_translator,
    distance,
)

VERTEX_LIMIT = 50_000
DEFAULT_TIME_BUDGET = 60.0
ENGINES = ("compiled", "python")


class SearchLimitExceeded(RuntimeError):
    pass


@dataclass
class CompatGraph:
    labels: list[Any]
    adj: list[int]

    @classmethod
    def from_relation(cls, labels: Sequence[Any], related: Callable[[Any, Any], bool]) -> CompatGraph:
        labels = list(labels)
        adj = [0] * len(labels)
        for i, j in combinations(range(len(labels)), 2):
            if related(labels[i], labels[j]):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
        return cls(labels, adj)

    def __len__(self) -> int:
        return len(self.labels)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def is_clique(self, vertices: Sequence[int]) -> bool:
        return all(self.adj[u] >> v & 1 for u, v in combinations(vertices, 2))


@dataclass
class SearchResult:
    value: int
    certificate: tuple[Any, ...]
    both_distances_realized: bool | None = None
    nodes_explored: int = 0
    exact: bool = True
    code: Code | None = None
    unconstrained_value: int | None = None

    def as_dict(self) -> dict:
        out: dict[str, Any] = {
            "value": self.value,
            "exact": self.exact,
            "nodes_explored": self.nodes_explored,
            "both_distances_realized": self.both_distances_realized,
        }
        if self.code is not None:
            out["code"] = [str(w) for w in self.code.words]
        else:
            out["certificate"] = [list(c) if isinstance(c, tuple) else str(c) for c in self.certificate]
        if self.unconstrained_value is not None:
            out["unconstrained_value"] = self.unconstrained_value
        return out


class _Timeout(Exception):
    pass


def _degeneracy_order(adj: list[int]) -> list[int]:
    """Vertices ordered so that each has the most neighbours among those before it."""
    n = len(adj)
    deg = [a.bit_count() for a in adj]
    alive = (1 << n) - 1
    removed = []
    for _ in range(n):
        v = min((u for u in range(n) if alive >> u & 1), key=lambda u: (deg[u], u))
        removed.append(v)
        alive &= ~(1 << v)
        rest = adj[v] & alive
        while rest:
            low = rest & -rest
            deg[low.bit_length() - 1] -= 1
            rest ^= low
    return removed[::-1]


class _Solver:
    def __init__(self, adj: list[int], deadline: float | None, shared_best=None):
        self.adj = adj
        self.deadline = deadline
        self.best = 0
        self.best_clique: list[int] = []
        self.nodes = 0
        self.shared = shared_best

    def offer(self, clique: list[int]) -> None:
        if len(clique) > self.best:
            self.best = len(clique)
            self.best_clique = list(clique)
            if self.shared is not None and self.shared[0] < self.best:
                self.shared[0] = self.best

    def colour_sort(self, p: int, kmin: int) -> tuple[list[int], list[int]]:
        adj = self.adj
        order: list[int] = []
        colours: list[int] = []
        colour = 0
        u = p
        while u:
            colour += 1
            q = u
            while q:
                low = q & -q
                v = low.bit_length() - 1
                q &= ~adj[v]
                q ^= low
                u ^= low
                if colour > kmin:
                    order.append(v)
                    colours.append(colour)
        return order, colours

    def expand(self, p: int, clique: list[int]) -> None:
        self.nodes += 1
        if self.deadline is not None and self.nodes & 1023 == 0:
            if time.perf_counter() > self.deadline:
                raise _Timeout
        if self.shared is not None and self.shared[0] > self.best:
            self.best = self.shared[0]
        size = len(clique)
        order, colours = self.colour_sort(p, self.best - size)
        adj = self.adj
        for i in range(len(order) - 1, -1, -1):
            if size + colours[i] <= self.best:
                return
            v = order[i]
            clique.append(v)
            np_ = p & adj[v]
            if np_:
                self.expand(np_, clique)
            else:
                self.offer(clique)
            clique.pop()
            p &= ~(1 << v)


def _greedy_clique(adj: list[int], candidates: int) -> list[int]:
    clique: list[int] = []
    p = candidates
    while p:
        best_v, best_deg = -1, -1
        q = p
        while q:
            low = q & -q
            v = low.bit_length() - 1
            d = (adj[v] & p).bit_count()
            if d > best_deg:
                best_v, best_deg = v, d
            q ^= low
        clique.append(best_v)
        p &= adj[best_v]
    return clique


def _relabel(g: CompatGraph) -> tuple[list[int], list[int]]:
    order = _degeneracy_order(g.adj)
    pos = {v: i for i, v in enumerate(order)}
    adj = [0] * len(order)
    for i, v in enumerate(order):
        a = g.adj[v]
        row = 0
        while a:
            low = a & -a
            row |= 1 << pos[low.bit_length() - 1]
            a ^= low
        adj[i] = row
    return order, adj


# worker-process state for parallel top-level branching
_W: dict[str, Any] = {}


def _worker_init(adj, packed, shared, deadline, engine):
    _W.update(adj=adj, packed=packed, shared=shared, deadline=deadline, engine=engine)


def _worker_branch(task: tuple[int, int]) -> tuple[list[int], int, bool]:
    v, p = task
    shared = _W["shared"]
    if not p:
        if shared[0] < 1:
            shared[0] = 1
        return [v], 1, True
    if _W["engine"] == "python":
        solver = _Solver(_W["adj"], _W["deadline"], shared)
        solver.best = shared[0]
        try:
            solver.expand(p, [v])
        except _Timeout:
            return solver.best_clique, solver.nodes, False
        return solver.best_clique, solver.nodes, True
    view = np.frombuffer(shared, dtype=np.int64)
    n = len(_W["adj"])
    clique, nodes, done = _kernel.run(
        _W["packed"], _kernel.pack_set(p, n), 1, int(view[0]), _W["deadline"], view
    )
    return ([v, *clique] if clique else []), nodes, done


def _clique_search(
    adj: list[int],
    candidates: int,
    lower: int,
    deadline: float | None,
    workers: int = 1,
    engine: str = "compiled",
    packed: np.ndarray | None = None,
) -> tuple[list[int], int, bool]:
    """Largest clique inside ``candidates`` strictly bigger than ``lower``.

    Returns (clique, or [] when nothing beats ``lower``; nodes; completed).
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")
    greedy = _greedy_clique(adj, candidates)
    best_clique = greedy if len(greedy) > lower else []
    bound = max(lower, len(best_clique))
    if engine == "compiled" and packed is None:
        packed = _kernel.pack_rows(adj, len(adj))
    if workers <= 1:
        if engine == "python":
            solver = _Solver(adj, deadline)
            solver.best = bound
            try:
                if candidates:
                    solver.expand(candidates, [])
            except _Timeout:
                return solver.best_clique or best_clique, solver.nodes, False
            return solver.best_clique or best_clique, solver.nodes, True
        clique, nodes, done = _kernel.run(packed, _kernel.pack_set(candidates, len(adj)), 0, bound, deadline)
        return clique or best_clique, nodes, done

    shared = mp.RawArray("q", 1)
    shared[0] = bound
    order, colours = _Solver(adj, None).colour_sort(candidates, 0)
    tasks = []
    p = candidates
    for i in range(len(order) - 1, -1, -1):
        v = order[i]
        tasks.append((v, p & adj[v]))
        p &= ~(1 << v)
    nodes, completed = 1, True
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    with ProcessPoolExecutor(workers, mp_context=ctx, initializer=_worker_init,
                             initargs=(adj, packed, shared, deadline, engine)) as pool:
        for fut in [pool.submit(_worker_branch, t) for t in tasks]:
            clique, n, done = fut.result()
            nodes += n
            completed &= done
            if len(clique) > len(best_clique):
                best_clique = clique
    if len(best_clique) <= lower:
        best_clique = []
    return best_clique, nodes, completed


def max_clique(
    g: CompatGraph,
    time_budget: float | None = DEFAULT_TIME_BUDGET,
    workers: int = 1,
    engine: str = "compiled",
) -> SearchResult:
    """Maximum clique of ``g``; ``exact`` is False if the budget ran out first.

    ``engine`` picks the compiled kernel or the pure-Python solver; both run
    the same algorithm and serve as cross-checks for each other.
    """
    if len(g) == 0:
        return SearchResult(0, ())
    order, adj = _relabel(g)
    deadline = None if time_budget is None else time.perf_counter() + time_budget
    clique, nodes, done = _clique_search(adj, (1 << len(adj)) - 1, 0, deadline, workers, engine)
    vertices = sorted(order[v] for v in clique)
    if not g.is_clique(vertices):
        raise AssertionError("solver returned a non-clique")
    return SearchResult(len(vertices), tuple(g.labels[v] for v in vertices), None, nodes, done)


def build_a2_graph(p: TwoDistanceParams, limit: int = VERTEX_LIMIT) -> CompatGraph:
    """Words of weight d1 or d2, adjacent when their distance is d1 or d2.

    The zero word is left out: every code can be translated to contain it,
    and then all other words sit at distance d1 or d2 from it.
    """
    size = comb(p.n, p.d1) + comb(p.n, p.d2)
    if size > limit:
        raise SearchLimitExceeded(f"{size} vertices exceeds limit {limit}")
    words = [
        Codeword.from_support(p.n, s)
        for w in (p.d1, p.d2)
        for s in combinations(range(p.n), w)
    ]
    allowed = {p.d1, p.d2}
    return CompatGraph.from_relation(words, lambda a, b: (a.bits ^ b.bits).bit_count() in allowed)


def _realizes_both(words: Sequence[Codeword]) -> bool:
    # with the zero word present, words of two weights or one off-weight pair suffice
    weights = {w.weight for w in words}
    if len(weights) > 1:
        return True
    return any(distance(a, b) != a.weight for a, b in combinations(words, 2))


def exact_a2(
    p: TwoDistanceParams,
    require_both: bool = True,
    time_budget: float | None = DEFAULT_TIME_BUDGET,
    workers: int = 1,
    limit: int = VERTEX_LIMIT,
    engine: str = "compiled",
) -> SearchResult:
    """Largest code of length n with distances in {d1, d2}, counting the zero word.

    With ``require_both``, the code must realise both distances.  If the
    unconstrained optimum is equidistant, every clique through a pair of
    words that forces the second distance is searched in turn, keeping the
    incumbent across searches.
    """
    g = build_a2_graph(p, limit)
    deadline = None if time_budget is None else time.perf_counter() + time_budget
    order, adj = _relabel(g)
    words = [g.labels[v] for v in order]
    packed = _kernel.pack_rows(adj, len(adj)) if engine == "compiled" else None
    clique, nodes, done = _clique_search(adj, (1 << len(adj)) - 1, 0, deadline, workers, engine, packed)
    unconstrained = len(clique) + 1
    cert = [words[v] for v in clique]
    if require_both and not _realizes_both(cert):
        best: list[Codeword] = []
        for u, v in combinations(range(len(words)), 2):
            if not adj[u] >> v & 1 or not _realizes_both([words[u], words[v]]):
                continue
            if len(best) == len(clique):
                break
            if deadline is not None and time.perf_counter() > deadline:
                done = False
                break
            sub, n_sub, d_sub = _clique_search(adj, adj[u] & adj[v], len(best) - 2, deadline, 1, engine, packed)
            nodes += n_sub
            done &= d_sub
            found = [words[u], words[v]] + [words[x] for x in sub]
            if len(found) > len(best):
                best = found
            if not d_sub:
                break
        cert = best
    code = Code(p.n, [Codeword.zero(p.n), *cert])
    both = classify_two_distance(code, p) is Classification.EXACT
    value = len(code) if (both or not require_both) else 0
    if not g.is_clique([g.labels.index(w) for w in cert]):
        raise AssertionError("certificate is not a clique")
    return SearchResult(value, tuple(cert), both, nodes, done, code, unconstrained)


def packing_graph(v: int, k: int, limit: int = VERTEX_LIMIT) -> CompatGraph:
    size = comb(v, k)
    if size > limit:
        raise SearchLimitExceeded(f"{size} vertices exceeds limit {limit}")
    blocks = list(combinations(range(1, v + 1), k))
    masks = {b: sum(1 << x for x in b) for b in blocks}
    return CompatGraph.from_relation(blocks, lambda a, b: (masks[a] & masks[b]).bit_count() <= 1)


def packing_number_oracle(
    v: int,
    k: int,
    time_budget: float | None = DEFAULT_TIME_BUDGET,
    workers: int = 1,
    limit: int = VERTEX_LIMIT,
    engine: str = "compiled",
) -> SearchResult:
    """D(v, k, 2) as the clique number of the k-subsets sharing at most one point."""
    return max_clique(packing_graph(v, k, limit), time_budget, workers, engine)


@dataclass(frozen=True)
class ClassCoefficient:
    name: str
    size: int
    observed: tuple[int, ...]
    expected: int

    @property
    def constant(self) -> bool:
        return len(self.observed) == 1

    @property
    def matches(self) -> bool:
        return self.observed == (self.expected,)


@dataclass(frozen=True)
class MidpointReport:
    d: int
    n: int
    midpoints: int
    classes: tuple[ClassCoefficient, ...] = field(default=())

    @property
    def all_constant(self) -> bool:
        return all(c.constant for c in self.classes)

    @property
    def coefficients(self) -> list[int | None]:
        return [c.observed[0] if c.constant else None for c in self.classes]

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "midpoints": self.midpoints,
            "classes": [
                {"class": c.name, "size": c.size, "observed": list(c.observed),
                 "expected": c.expected, "constant": c.constant}
                for c in self.classes
            ],
        }


def _midpoint_frame(d: int, n: int) -> tuple[Codeword, Codeword, list[Codeword]]:
    if d < 2 or d % 2:
        raise ValueError(f"d must be a positive even integer, got {d}")
    if 2 * n < 3 * d + 6:
        raise ValueError(f"n={n} too small for d={d}: need n >= 3d/2 + 3")
    h = d // 2
    x0 = Codeword.zero(n)
    x1 = Codeword.from_support(n, range(d + 2))
    # words at distance d/2+1 from both ends lie inside supp(x1)
    mids = [Codeword.from_support(n, s) for s in combinations(range(d + 2), h + 1)]
    return x0, x1, mids


def midpoint_class(z: Codeword, d: int, x0: Codeword, x1: Codeword) -> str | None:
    if z == x0:
        return "A5"
    if z == x1:
        return "A6"
    w, dx = z.weight, distance(z, x1)
    table = {(d + 2, d + 2): "A1", (d + 2, d): "A2", (d, d + 2): "A3", (d, d): "A4"}
    return table.get((w, dx))


def midpoint_analysis(d: int, n: int) -> MidpointReport:
    """Count, for every word of each class, the midpoints at distance d/2+1 from it."""
    x0, x1, mids = _midpoint_frame(d, n)
    h = d // 2
    big = comb(d + 2, h + 1)
    expected = {"A1": 1, "A2": h + 2, "A3": h + 2, "A4": (h + 1) ** 2, "A5": big, "A6": big}
    observed: dict[str, set[int]] = {name: set() for name in expected}
    sizes = dict.fromkeys(expected, 0)
    candidates = [x0, x1] + [
        Codeword.from_support(n, s) for w in (d, d + 2) for s in combinations(range(n), w)
    ]
    mid_bits = [y.bits for y in mids]
    for z in candidates:
        name = midpoint_class(z, d, x0, x1)
        if name is None or (name in ("A5", "A6") and sizes[name]):
            continue
        sizes[name] += 1
        observed[name].add(sum((y ^ z.bits).bit_count() == h + 1 for y in mid_bits))
    classes = tuple(
        ClassCoefficient(name, sizes[name], tuple(sorted(observed[name])), expected[name])
        for name in expected
    )
    return MidpointReport(d, n, len(mids), classes)


def counting_identity(d: int, code: Code) -> tuple[int, int]:
    """Both sides of the double count of (midpoint, codeword) pairs at distance d/2+1.

    ``code`` must consist of words from the classes A1..A6 relative to
    x0 = 0 and x1 = 1^(d+2) 0^(n-d-2).  Returns (direct count, class formula).
    """
    x0, x1, mids = _midpoint_frame(d, code.n)
    h = d // 2
    big = comb(d + 2, h + 1)
    weight_of = {"A1": 1, "A2": h + 2, "A3": h + 2, "A4": (h + 1) ** 2, "A5": big, "A6": big}
    direct = sum(distance(y, z) == h + 1 for y in mids for z in code.words)
    formula = 0
    for z in code.words:
        name = midpoint_class(z, d, x0, x1)
        if name is None:
            raise ValueError(f"word {z} is in none of the classes")
        formula += weight_of[name]
    return direct, formula


@dataclass
class OptimalityReport:
    params: TwoDistanceParams
    search: SearchResult
    bounds: Sandwich
    barg: int | None
    translator: Codeword | None
    constant_weight_translate: bool

    def as_dict(self) -> dict:
        return {
            "n": self.params.n,
            "d1": self.params.d1,
            "d2": self.params.d2,
            "exact_value": self.search.value,
            "exact": self.search.exact,
            "lower": self.bounds.lower,
            "lower_source": self.bounds.lower_source,
            "upper": self.bounds.upper,
            "upper_source": self.bounds.upper_source,
            "barg": self.barg,
            "constant_weight_translate": self.constant_weight_translate,
            "translator": None if self.translator is None else str(self.translator),
            "search": self.search.as_dict(),
        }


def optimality_report(
    p: TwoDistanceParams,
    time_budget: float | None = DEFAULT_TIME_BUDGET,
    workers: int = 1,
    engine: str = "compiled",
) -> OptimalityReport:
    res = exact_a2(p, True, time_budget, workers, engine=engine)
    translator = None
    if res.code is not None and res.value:
        translator = constant_weight_translator(res.code, max_n=max(24, p.n))
    return OptimalityReport(
        p,
        res,
        sandwich(p),
        barg_upper(p.n) if p.n >= 6 else None,
        translator,
        translator is not None,
    )
