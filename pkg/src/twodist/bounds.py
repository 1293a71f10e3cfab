"""Upper and lower bounds on A_2(n, {d1, d2}) and the N(d) threshold estimates.

All arithmetic is exact (``int`` / ``Fraction``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, floor, isqrt

from .core import TwoDistanceParams
from .packings import d_polynomial_lower, greedy_packing, packing_formula


def barg_upper(n: int) -> int:
    if n < 6:
        raise ValueError(f"quadratic bound 1 + C(n,2) needs n >= 6, got {n}")
    return 1 + comb(n, 2)


def lrv_upper(n: int) -> int:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return comb(n + 2, 2)


def linear_upper(p: TwoDistanceParams) -> int | None:
    if p.d2 > 2 * p.d1:
        return p.n + 1
    if p.delta % 2:
        return p.n + 1 if p.d1 % 2 == 0 else p.n + 2
    return None


def parity_feasible(p: TwoDistanceParams) -> bool:
    """False when d1 is odd and d2 - d1 even: all distances would be odd."""
    return not (p.d1 % 2 == 1 and p.delta % 2 == 0)


@dataclass(frozen=True)
class CaseBound:
    """Upper bound ``slope * n + intercept`` on the code size in one weight case.

    ``weight`` is the maximal codeword weight after translation that the case
    assumes; ``index`` is i for the intermediate cases and None otherwise.
    """

    case_id: str
    weight: int
    index: int | None
    slope: Fraction
    intercept: Fraction

    def value(self, n: int) -> Fraction:
        return self.slope * n + self.intercept

    @property
    def expression(self) -> str:
        return _affine_str(self.slope, self.intercept)


def _affine_str(slope: Fraction, intercept: Fraction) -> str:
    if slope == 0:
        return str(intercept)
    # factor the slope out when it divides the intercept, e.g. 50(n-1)
    if intercept and (intercept / slope).denominator == 1 and intercept < 0:
        shift = -intercept / slope
        return f"{slope}(n-{shift})"
    if intercept == 0:
        return f"{slope}n"
    sign = "+" if intercept > 0 else "-"
    return f"{slope}n {sign} {abs(intercept)}"


def _check_d(d: int) -> None:
    if d not in (4, 6):
        raise ValueError(f"only d in (4, 6) have closed-form packing numbers, got {d}")


def case_bound_list(d: int) -> list[CaseBound]:
    """Case bounds for even ``d >= 4`` as affine functions of n.

    Each cap on the number of weight-(d/2+1) words after translation is
    multiplied by C(d+2, d/2+1), the averaging factor over the midpoint set.
    """
    if d < 4 or d % 2:
        raise ValueError(f"d must be even and >= 4, got {d}")
    h = d // 2
    factor = comb(d + 2, h + 1)
    top = 3 * h + 3
    cases = [
        CaseBound("max_weight_top", top, None, Fraction(0), Fraction(factor * top * (top - 1), (h + 1) * h)),
    ]
    for i in range(1, h):
        w = top - 2 * i
        cases.append(
            CaseBound(f"intermediate_{i}", w, i, Fraction(0),
                      Fraction(factor * w * (w - 1), (h + 1 - i) * (h - i)))
        )
    w = h + 3
    # pairs inside the support plus words meeting it once: C(w,2) + (n - w) w / h
    slope = Fraction(factor * w, h)
    intercept = factor * (Fraction(w * (w - 1), 2) - Fraction(w * w, h))
    cases.append(CaseBound("near_minimum", w, None, slope, intercept))
    return cases


def case_bounds(d: int, n: int) -> list[tuple[CaseBound, Fraction]]:
    _check_d(d)
    return [(c, c.value(n)) for c in case_bound_list(d)]


def _last_nonpositive(a: Fraction, b: Fraction, c: Fraction) -> int | None:
    """Largest integer n with a n^2 + b n + c <= 0 (a > 0), or None if none."""
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    # integer scaling keeps the root estimate exact enough to start the scan
    scale = disc.denominator
    root_est = Fraction(isqrt(disc.numerator * scale), scale)
    n = floor((-b + root_est) / (2 * a)) + 2

    def f(x: int) -> Fraction:
        return a * x * x + b * x + c

    while f(n) > 0:
        n -= 1
        if (2 * a * n + b) < 0:
            return None
    while f(n + 1) <= 0:
        n += 1
    return n


@dataclass(frozen=True)
class CaseCrossover:
    case: CaseBound
    crossover: int  # first n from which the packing lower bound exceeds the case bound for good


@dataclass(frozen=True)
class ThresholdReport:
    d: int
    lower_expression: str
    cases: tuple[CaseCrossover, ...]
    threshold: int
    binding_case: str
    kind: str = "upper_estimate"

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "kind": self.kind,
            "threshold": self.threshold,
            "binding_case": self.binding_case,
            "lower_bound": self.lower_expression,
            "cases": [
                {
                    "case": c.case.case_id,
                    "weight": c.case.weight,
                    "bound": c.case.expression,
                    "crossover": c.crossover,
                }
                for c in self.cases
            ],
        }


def threshold_estimate(d: int) -> ThresholdReport:
    """Smallest n0 with the packing lower bound above every case bound for all n >= n0.

    The lower bound is quadratic with positive leading coefficient and every
    case bound is affine, so each difference is an upward parabola and the
    crossover is one past its larger integer root.
    """
    _check_d(d)
    q0, q1, q2 = (d_polynomial_lower(d, x) for x in (0, 1, 2))
    # recover a n^2 + b n + c from three samples
    a = (q2 - 2 * q1 + q0) / 2
    b = q1 - q0 - a
    c = q0
    lower_expr = "(n^2 - 2n - 2)/6" if d == 4 else "(n^2 - 3n - 6)/12"
    crossings = []
    for case in case_bound_list(d):
        last = _last_nonpositive(a, b - case.slope, c - case.intercept)
        crossings.append(CaseCrossover(case, 1 if last is None else max(1, last + 1)))
    binding = max(crossings, key=lambda x: x.crossover)
    return ThresholdReport(d, lower_expr, tuple(crossings), binding.crossover, binding.case.case_id)


@dataclass(frozen=True)
class Sandwich:
    lower: int | None
    lower_source: str
    upper: int
    upper_source: str
    feasible: bool
    candidates: dict[str, int]


def sandwich(p: TwoDistanceParams, seed: int = 0) -> Sandwich:
    """Packing lower bound and the best available upper bound for A_2(n, {d1, d2})."""
    uppers: dict[str, int] = {"lrv": lrv_upper(p.n)}
    if p.n >= 6:
        uppers["barg"] = barg_upper(p.n)
    lin = linear_upper(p)
    if lin is not None:
        uppers["linear"] = lin
    source = min(uppers, key=lambda s: (uppers[s], s))
    lower, lower_source = None, "none"
    if p.d1 % 2 == 0 and p.delta == 2:
        k = p.d1 // 2 + 1
        formula = packing_formula(p.n, k)
        if formula is not None:
            lower, lower_source = formula, f"formula D({p.n},{k},2)"
        elif k <= p.n:
            lower, lower_source = len(greedy_packing(p.n, k, seed)), f"greedy packing (seed {seed})"
    return Sandwich(lower, lower_source, uppers[source], source, parity_feasible(p), uppers)
