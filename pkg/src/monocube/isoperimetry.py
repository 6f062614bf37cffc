"""Violation profiles and isoperimetric objectives.

Everything here is computed exactly from the full function table: the
violated edge set, per-vertex influence counts (directed, colored,
undirected), the square-root objectives, distance to constant, the
good-graph degree check, and tau-step persistence.  Sampling-based
estimation lives in `testers` and `dist_approx`.

Counting conventions:

* ``I_minus(x)`` counts violated edges going out of x.
* A red violated edge is counted at its lower endpoint, a blue one at
  its upper endpoint.
* ``U_minus(x)`` counts violated edges incident on x in either direction.
* The undirected count ``I_undirected(x)`` assigns each influential edge
  (endpoint values differ) to the endpoint with the larger value.

Floating-point objectives use ``math.fsum`` (exactly rounded), so sums
are independent of accumulation order and bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Literal, Mapping

from .funcs import ValuedFunction, image_values, threshold
from .poset import DomainSizeError

RED = "red"
BLUE = "blue"

PERSISTENCE_THRESHOLD = Fraction(9, 10)
DEFAULT_ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class ViolationProfile:
    violated_edges: tuple[tuple[int, int], ...]
    out_counts: tuple[int, ...]        # I_minus per vertex
    total_degree: tuple[int, ...]      # U_minus per vertex
    undirected_counts: tuple[int, ...]  # I_undirected per vertex
    influential_edge_count: int

    @property
    def num_violated(self) -> int:
        return len(self.violated_edges)


def violation_profile(f: ValuedFunction) -> ViolationProfile:
    n = f.domain.n
    values = f.values
    out = [0] * n
    total = [0] * n
    undirected = [0] * n
    violated = []
    influential = 0
    for (x, y) in f.domain.cover_edges():
        vx, vy = values[x], values[y]
        if vx > vy:
            violated.append((x, y))
            out[x] += 1
            total[x] += 1
            total[y] += 1
            undirected[x] += 1
            influential += 1
        elif vx < vy:
            undirected[y] += 1
            influential += 1
    return ViolationProfile(tuple(violated), tuple(out), tuple(total),
                            tuple(undirected), influential)


class EdgeColoring:
    """A total red/blue assignment on the violated edges of one function."""

    def __init__(self, assignment: Mapping[tuple[int, int], str]):
        for e, c in assignment.items():
            if c not in (RED, BLUE):
                raise ValueError(f"bad color {c!r} for edge {e}")
        self.assignment = dict(assignment)

    def __getitem__(self, edge: tuple[int, int]) -> str:
        return self.assignment[edge]

    def __len__(self) -> int:
        return len(self.assignment)

    def edges(self) -> Iterable[tuple[int, int]]:
        return self.assignment.keys()

    def validate_for(self, profile: ViolationProfile) -> None:
        violated = set(profile.violated_edges)
        colored = set(self.assignment)
        if colored != violated:
            missing = violated - colored
            extra = colored - violated
            raise ValueError(
                f"coloring is not total on the violated edges "
                f"(missing {len(missing)}, extra {len(extra)})")

    @classmethod
    def all_red(cls, profile: ViolationProfile) -> "EdgeColoring":
        return cls({e: RED for e in profile.violated_edges})

    @classmethod
    def all_blue(cls, profile: ViolationProfile) -> "EdgeColoring":
        return cls({e: BLUE for e in profile.violated_edges})

    @classmethod
    def random(cls, profile: ViolationProfile, rng) -> "EdgeColoring":
        return cls({e: (RED if rng.random() < 0.5 else BLUE)
                    for e in profile.violated_edges})


def colored_counts(f: ValuedFunction, col: EdgeColoring,
                   edges: Iterable[tuple[int, int]] | None = None
                   ) -> tuple[list[int], list[int]]:
    """(red counts at lower endpoints, blue counts at upper endpoints),
    optionally restricted to a subset of the colored edges."""
    n = f.domain.n
    red = [0] * n
    blue = [0] * n
    for e in (col.edges() if edges is None else edges):
        if col[e] == RED:
            red[e[0]] += 1
        else:
            blue[e[1]] += 1
    return red, blue


def _mean_sqrt(counts: Iterable[int], n: int) -> float:
    return math.fsum(math.sqrt(c) for c in counts) / n


def directed_objective(f: ValuedFunction) -> float:
    """E_x[sqrt(I_minus(x))] over a uniform vertex."""
    profile = violation_profile(f)
    return _mean_sqrt(profile.out_counts, f.domain.n)


def robust_objective(f: ValuedFunction, col: EdgeColoring,
                     profile: ViolationProfile | None = None) -> float:
    """E_x[sqrt(red count at x)] + E_y[sqrt(blue count at y)] for a total
    2-coloring of the violated edges."""
    if profile is None:
        profile = violation_profile(f)
    col.validate_for(profile)
    red, blue = colored_counts(f, col)
    n = f.domain.n
    return _mean_sqrt(red, n) + _mean_sqrt(blue, n)


def undirected_objective(f: ValuedFunction) -> float:
    """E_x[sqrt(I_undirected(x))]; each influential edge is counted at
    exactly one endpoint."""
    profile = violation_profile(f)
    return _mean_sqrt(profile.undirected_counts, f.domain.n)


def dist_to_const_fraction(f: ValuedFunction) -> Fraction:
    counts: dict = {}
    for v in f.values:
        counts[v] = counts.get(v, 0) + 1
    return 1 - Fraction(max(counts.values()), f.domain.n)


def dist_to_const(f: ValuedFunction) -> float:
    """1 - (largest value frequency): the distance to the nearest constant."""
    return float(dist_to_const_fraction(f))


# -- (K, Delta)-good graphs ----------------------------------------------------

GoodGraphStatus = Literal["left-good", "right-good", "both", "neither"]


def check_good_graph(A: Iterable[int], B: Iterable[int],
                     edges: Iterable[tuple[int, int]], K: int, delta: int
                     ) -> GoodGraphStatus:
    """Degree check for a directed bipartite graph with edges from A to B.

    For a side X (with Y the other side) the graph is good when |X| = K,
    every X-vertex has degree exactly delta, and every Y-vertex has degree
    at most 2*delta.  Returns which of the two orientations qualify.
    """
    A = set(A)
    B = set(B)
    deg_a: dict[int, int] = {a: 0 for a in A}
    deg_b: dict[int, int] = {b: 0 for b in B}
    for (a, b) in edges:
        if a not in A or b not in B:
            raise ValueError(f"edge ({a},{b}) has an endpoint outside A x B")
        deg_a[a] += 1
        deg_b[b] += 1

    def good(x_deg: dict[int, int], y_deg: dict[int, int]) -> bool:
        return (len(x_deg) == K
                and all(v == delta for v in x_deg.values())
                and all(v <= 2 * delta for v in y_deg.values()))

    left = good(deg_a, deg_b)
    right = good(deg_b, deg_a)
    if left and right:
        return "both"
    if left:
        return "left-good"
    if right:
        return "right-good"
    return "neither"


# -- persistence ----------------------------------------------------------------


def free_coordinates(x: int, d: int, direction: str) -> list[int]:
    """Coordinates available to a tau-step walk from x: the 0-coordinates
    for a rightward (upward) walk, the 1-coordinates for a leftward one."""
    if direction == "right":
        return [i for i in range(d) if not x >> i & 1]
    if direction == "left":
        return [i for i in range(d) if x >> i & 1]
    raise ValueError(f"direction must be 'right' or 'left', not {direction!r}")


def persistence_probability(f: ValuedFunction, x: int, tau: int,
                            direction: str = "right",
                            enumeration_cap: int = DEFAULT_ENUMERATION_CAP
                            ) -> Fraction:
    """Exact probability that a uniformly random tau-subset flip keeps the
    value on the persistent side (<= f(x) going right, >= f(x) going left).

    When tau exceeds the number of free coordinates the walk degenerates
    to y = x and the probability is 1.  Enumeration is guarded by a cap
    on the number of subsets.
    """
    domain = f.domain
    if domain.kind != "hypercube":
        raise ValueError("persistence is defined on hypercube domains")
    domain.check_vertex(x)
    if tau < 1:
        raise ValueError("tau must be >= 1")
    free = free_coordinates(x, domain.d, direction)
    if tau > len(free):
        return Fraction(1)
    total = math.comb(len(free), tau)
    if total > enumeration_cap:
        raise DomainSizeError(
            f"exact persistence needs {total} subsets, cap is {enumeration_cap}")
    fx = f.values[x]
    good = 0
    if direction == "right":
        for T in combinations(free, tau):
            y = x
            for i in T:
                y |= 1 << i
            if f.values[y] <= fx:
                good += 1
    else:
        for T in combinations(free, tau):
            y = x
            for i in T:
                y &= ~(1 << i)
            if f.values[y] >= fx:
                good += 1
    return Fraction(good, total)


@dataclass(frozen=True)
class PersistenceEstimate:
    probability: float
    std_error: float
    samples: int


def persistence_probability_mc(f: ValuedFunction, x: int, tau: int,
                               direction: str, samples: int, seed: int
                               ) -> PersistenceEstimate:
    """Monte Carlo persistence probability with its binomial standard error."""
    import random

    domain = f.domain
    free = free_coordinates(x, domain.d, direction)
    if tau > len(free):
        return PersistenceEstimate(1.0, 0.0, samples)
    rng = random.Random(seed)
    fx = f.values[x]
    good = 0
    for _ in range(samples):
        y = x
        for i in rng.sample(free, tau):
            y = y | 1 << i if direction == "right" else y & ~(1 << i)
        ok = f.values[y] <= fx if direction == "right" else f.values[y] >= fx
        good += ok
    p = good / samples
    return PersistenceEstimate(p, math.sqrt(p * (1 - p) / samples), samples)


def is_persistent(f: ValuedFunction, x: int, tau: int,
                  direction: str = "right",
                  enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> bool:
    """Persistent means the exact walk probability exceeds 9/10."""
    return persistence_probability(f, x, tau, direction, enumeration_cap) \
        > PERSISTENCE_THRESHOLD


def weight_band(d: int, band_constant: float = 2.0) -> tuple[float, float]:
    """The middle-weight band d/2 +- band_constant * sqrt(d log d) inside
    which persistence statements are meant to be applied.  The constant is
    a free parameter; 2 is the default used by the reports."""
    half_width = band_constant * math.sqrt(d * max(math.log2(d), 1.0))
    return (d / 2 - half_width, d / 2 + half_width)


@dataclass(frozen=True)
class PersistenceDecompositionReport:
    tau: int
    direction: str
    pointwise_match: bool
    mismatches: tuple[int, ...]
    nonpersistent_f: int
    nonpersistent_thresholds: tuple[int, ...]
    union_bound_holds: bool


def persistence_decomposition_check(f: ValuedFunction, tau: int,
                                    direction: str = "right",
                                    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
                                    ) -> PersistenceDecompositionReport:
    """Check the threshold-function structure of persistence, exactly.

    Pointwise: x is right-persistent for f iff it is right-persistent for
    the Boolean indicator of {f > f(x)} (which is 0 at x, and 0 at y
    exactly when f(y) <= f(x)).  Mirrored for left-persistence, the
    matching indicator thresholds just below f(x): it is 1 at x and 1 at
    y exactly when f(y) >= f(x).  Globally: the number of non-persistent
    vertices for f is at most the sum over the r-1 proper thresholds of
    the non-persistent counts of the thresholded functions.
    """
    values = image_values(f)
    n = f.domain.n
    thresholds = [threshold(f, t) for t in values[:-1]]
    if direction == "right":
        # value v pairs with the cut {f > v}; the top value has no cut
        # above it and pairs with the all-zero function
        by_value = {v: h for v, h in zip(values[:-1], thresholds)}
        fallback = ValuedFunction(f.domain, tuple(0 for _ in range(n)))
    else:
        # value v pairs with the cut just below it, {f > predecessor(v)};
        # the bottom value pairs with the all-one function
        by_value = {v: h for v, h in zip(values[1:], thresholds)}
        fallback = ValuedFunction(f.domain, tuple(1 for _ in range(n)))

    mismatches = []
    nonpersistent_f = 0
    for x in range(n):
        pf = persistence_probability(f, x, tau, direction, enumeration_cap)
        h = by_value.get(f.values[x], fallback)
        ph = persistence_probability(h, x, tau, direction, enumeration_cap)
        if pf != ph:
            mismatches.append(x)
        if pf <= PERSISTENCE_THRESHOLD:
            nonpersistent_f += 1
    per_threshold = []
    for h in thresholds:
        count = sum(
            persistence_probability(h, x, tau, direction, enumeration_cap)
            <= PERSISTENCE_THRESHOLD
            for x in range(n))
        per_threshold.append(count)
    return PersistenceDecompositionReport(
        tau=tau, direction=direction,
        pointwise_match=not mismatches, mismatches=tuple(mismatches),
        nonpersistent_f=nonpersistent_f,
        nonpersistent_thresholds=tuple(per_threshold),
        union_bound_holds=nonpersistent_f <= sum(per_threshold))


def profile_dump(f: ValuedFunction) -> dict:
    """JSON-ready per-vertex counts plus the scalar objectives."""
    profile = violation_profile(f)
    colall = EdgeColoring.all_red(profile)
    return {
        "I_minus": list(profile.out_counts),
        "U_minus": list(profile.total_degree),
        "I_undirected": list(profile.undirected_counts),
        "violated_edges": [list(e) for e in profile.violated_edges],
        "objective_directed": directed_objective(f),
        "objective_robust": robust_objective(f, colall, profile),
        "objective_undirected": undirected_objective(f),
        "dist_const": dist_to_const(f),
    }
