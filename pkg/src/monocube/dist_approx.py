"""Tolerant testing and distance approximation for monotonicity.

The capture event at a vertex x with coordinate set S: some i in S flips
x across a violated edge to y = x^(i), and y has no other violated edge
along the remaining coordinates of S (either orientation).  Its
probability over a uniform vertex, mu(S), lower-bounds twice the
distance to monotonicity, and for functions with few violated edges some
dyadic coordinate-sampling rate makes it large; ApproxMono turns these
two facts into a close/far verdict.

Estimates are two-sided Hoeffding: n = ceil(ln(2/delta) / (2 err^2))
samples give additive error err with failure probability delta, and the
run's failure budget is split evenly across the edge estimate and the
per-rate mu estimates.  Every estimator issues its full query pattern
regardless of observed values, so runs with equal seeds and
configurations query identical multisets on any two functions.

The log factor inside sqrt(d log d) is base 2 and clamped below at 1 so
the d = 1 corner stays defined.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .funcs import CountingOracle, ValuedFunction
from .isoperimetry import BLUE, RED, EdgeColoring, violation_profile
from .seeds import derive_seed


@dataclass(frozen=True)
class CaptureConfig:
    epsilon: float
    c_prime: float = 1.0
    c_edge: float = 1.0
    failure_budget: float = 1.0 / 3.0
    seed: int = 0

    def __post_init__(self):
        # 1/2 itself is admitted: the distance-approximation wrapper's top
        # search level runs the tolerant tester at epsilon = 1/2.
        if not 0 < self.epsilon <= 0.5:
            raise ValueError("epsilon must lie in (0, 1/2]")
        if self.c_prime <= 0 or self.c_edge <= 0:
            raise ValueError("constants must be positive")
        if not 0 < self.failure_budget <= 1.0 / 3.0:
            raise ValueError("failure_budget must lie in (0, 1/3]")


def _edge_between(values, x: int, y: int, x_bit_zero: bool) -> bool:
    """Violation status of the edge between neighbours x and y where
    x_bit_zero says the edge is oriented x -> y."""
    if x_bit_zero:
        return values[x] > values[y]
    return values[y] > values[x]


def capture(f: ValuedFunction, x: int, S) -> bool:
    """The capture event for vertex x and coordinate set S (1-based)."""
    d = f.domain.d
    if f.domain.kind != "hypercube":
        raise ValueError("capture is defined on hypercube domains")
    S = sorted(set(S))
    for i in S:
        if not 1 <= i <= d:
            raise ValueError(f"coordinate {i} out of range 1..{d}")
    values = f.values
    for i in S:
        bit = 1 << (i - 1)
        y = x ^ bit
        if not _edge_between(values, x, y, not x & bit):
            continue
        clean = True
        for j in S:
            if j == i:
                continue
            jbit = 1 << (j - 1)
            z = y ^ jbit
            if _edge_or_reverse_violated(values, y, z, jbit):
                clean = False
                break
        if clean:
            return True
    return False


def _edge_or_reverse_violated(values, y: int, z: int, jbit: int) -> bool:
    lo, hi = (y, z) if not y & jbit else (z, y)
    return values[lo] > values[hi]


def mu_exact(f: ValuedFunction, S) -> Fraction:
    """Exact capture probability over a uniform vertex (full sweep)."""
    n = f.domain.n
    hits = sum(capture(f, x, S) for x in range(n))
    return Fraction(hits, n)


def hoeffding_samples(additive_error: float, failure_prob: float) -> int:
    """Two-sided Hoeffding sample count for a [0,1] mean estimate."""
    if not 0 < additive_error < 1 or not 0 < failure_prob < 1:
        raise ValueError("additive_error and failure_prob must lie in (0,1)")
    return math.ceil(math.log(2.0 / failure_prob) / (2.0 * additive_error**2))


@dataclass(frozen=True)
class Estimate:
    value: float
    samples: int
    additive_error: float
    failure_prob: float


def _capture_pattern(x: int, S: list[int]) -> list[int]:
    """The nonadaptive query pattern for one capture evaluation: x, its
    S-neighbours, and the distinct two-flip points."""
    points = [x]
    bits = [1 << (i - 1) for i in S]
    points.extend(x ^ b for b in bits)
    for a in range(len(bits)):
        for b in range(a + 1, len(bits)):
            points.append(x ^ bits[a] ^ bits[b])
    return points


def _capture_from_table(values: dict[int, float], x: int, S: list[int]) -> bool:
    for i in S:
        bit = 1 << (i - 1)
        y = x ^ bit
        lo, hi = (x, y) if not x & bit else (y, x)
        if not values[lo] > values[hi]:
            continue
        clean = True
        for j in S:
            if j == i:
                continue
            jbit = 1 << (j - 1)
            z = y ^ jbit
            zlo, zhi = (y, z) if not y & jbit else (z, y)
            if values[zlo] > values[zhi]:
                clean = False
                break
        if clean:
            return True
    return False


def mu_estimate(oracle: CountingOracle, S, additive_error: float,
                failure_prob: float, seed: int) -> Estimate:
    """Monte Carlo capture probability via oracle queries only."""
    d = oracle.domain.d
    if d is None:
        raise ValueError("capture estimation runs on hypercube domains")
    S = sorted(set(S))
    samples = hoeffding_samples(additive_error, failure_prob)
    rng = random.Random(seed)
    hits = 0
    for _ in range(samples):
        x = rng.getrandbits(d)
        pattern = _capture_pattern(x, S)
        looked = oracle.lookup_many(pattern)
        table = dict(zip(pattern, looked))
        hits += _capture_from_table(table, x, S)
    return Estimate(hits / samples, samples, additive_error, failure_prob)


def violated_fraction_estimate(oracle: CountingOracle, additive_error: float,
                               failure_prob: float, seed: int) -> Estimate:
    """Monte Carlo estimate of |S_f^-| / (d 2^(d-1)) by uniform edges."""
    d = oracle.domain.d
    if d is None:
        raise ValueError("edge sampling runs on hypercube domains")
    samples = hoeffding_samples(additive_error, failure_prob)
    rng = random.Random(seed)
    hits = 0
    for _ in range(samples):
        i = rng.randrange(d)
        x = rng.getrandbits(d) & ~(1 << i)
        fx, fy = oracle.lookup_many((x, x | 1 << i))
        hits += fx > fy
    return Estimate(hits / samples, samples, additive_error, failure_prob)


def sqrt_d_log_d(d: int) -> float:
    """sqrt(d * log2 d), clamped so d = 1 gives 1 instead of 0."""
    return math.sqrt(d * max(math.log2(d), 1.0))


def rate_schedule(d: int) -> list[int]:
    """Coordinate-sampling rates 1, 2, 4, ..., 2^floor(log2 d)."""
    rates = [1]
    while rates[-1] * 2 <= d:
        rates.append(rates[-1] * 2)
    return rates


@dataclass(frozen=True)
class ApproxMonoReport:
    verdict: str  # "close" | "far"
    queries: int
    edge_estimate: Estimate
    edge_threshold: float
    mu_estimates: tuple = ()
    mu_threshold: float = 0.0
    triggered_by: str = ""
    seed: int = 0


def approx_mono(oracle: CountingOracle, config: CaptureConfig) -> ApproxMonoReport:
    """The tolerant tester: far when the violated-edge fraction estimate
    or any capture-probability estimate crosses its threshold.

    The edge estimate targets additive error c_edge*eps/(4 sqrt(d log d))
    with threshold at three times that; each mu estimate uses c_prime in
    place of c_edge.  All sampling happens in a fixed order first, so the
    queried multiset depends only on (seed, config, d); the verdict is
    then read off in algorithm order (edge test, then increasing rates).
    """
    d = oracle.domain.d
    if d is None:
        raise ValueError("approx_mono runs on hypercube domains")
    start = oracle.query_count
    L = sqrt_d_log_d(d)
    eps = config.epsilon
    rates = rate_schedule(d)
    n_estimates = 1 + len(rates)
    delta_each = config.failure_budget / n_estimates

    edge_err = config.c_edge * eps / (4.0 * L)
    edge_thr = 3.0 * config.c_edge * eps / (4.0 * L)
    mu_err = config.c_prime * eps / (4.0 * L)
    mu_thr = 3.0 * config.c_prime * eps / (4.0 * L)

    edge_est = violated_fraction_estimate(
        oracle, edge_err, delta_each, derive_seed(config.seed, 0))

    mu_results = []
    for idx, t in enumerate(rates, start=1):
        rng = random.Random(derive_seed(config.seed, idx, 0))
        S = [i for i in range(1, d + 1) if rng.random() < 1.0 / t]
        est = mu_estimate(oracle, S, mu_err, delta_each,
                          derive_seed(config.seed, idx, 1))
        mu_results.append({"t": t, "S": S, "estimate": est})

    verdict = "close"
    triggered = ""
    if edge_est.value >= edge_thr:
        verdict, triggered = "far", "edge-fraction"
    else:
        for entry in mu_results:
            if entry["estimate"].value >= mu_thr:
                verdict, triggered = "far", f"mu at t={entry['t']}"
                break
    return ApproxMonoReport(
        verdict=verdict, queries=oracle.query_count - start,
        edge_estimate=edge_est, edge_threshold=edge_thr,
        mu_estimates=tuple((e["t"], tuple(e["S"]), e["estimate"]) for e in mu_results),
        mu_threshold=mu_thr, triggered_by=triggered, seed=config.seed)


@dataclass(frozen=True)
class LevelResult:
    epsilon: float
    far_votes: int
    verdict: str
    reports: tuple  # the three ApproxMonoReports behind the vote


@dataclass(frozen=True)
class DistanceApproxReport:
    epsilon_hat: float
    promise_violation: bool
    queries: int
    levels: tuple[LevelResult, ...]
    seed: int = 0


def approx_distance(oracle: CountingOracle, alpha: float,
                    config: CaptureConfig) -> DistanceApproxReport:
    """Geometric search over epsilon in {1/2, 1/4, ...} down to alpha,
    with a majority of three tolerant-tester calls per level; returns the
    first level declared far.

    The caller promises distance >= alpha; if no level fires, the promise
    was violated (e.g. a monotone input) and alpha is returned flagged.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0,1)")
    start = oracle.query_count
    levels = []
    eps = 0.5
    while eps >= alpha:
        levels.append(eps)
        eps /= 2
    if not levels:
        # alpha above the tolerant tester's ceiling: one level at 1/2
        levels.append(0.5)
    results = []
    chosen = None
    for li, eps in enumerate(levels):
        votes = 0
        reports = []
        for rep in range(3):
            sub = CaptureConfig(epsilon=eps, c_prime=config.c_prime,
                                c_edge=config.c_edge,
                                failure_budget=config.failure_budget,
                                seed=derive_seed(config.seed, li, rep))
            report = approx_mono(oracle, sub)
            reports.append(report)
            votes += report.verdict == "far"
        verdict = "far" if votes >= 2 else "close"
        results.append(LevelResult(eps, votes, verdict, tuple(reports)))
        if verdict == "far":
            chosen = eps
            break
    return DistanceApproxReport(
        epsilon_hat=chosen if chosen is not None else alpha,
        promise_violation=chosen is None,
        queries=oracle.query_count - start,
        levels=tuple(results), seed=config.seed)


# -- diagnostics from the generalized bucketing argument ------------------------


def u_degree_coloring(f: ValuedFunction) -> EdgeColoring:
    """Color each violated edge toward the endpoint incident on more
    violated edges: red (lower endpoint) when U(x) >= U(y), blue otherwise."""
    profile = violation_profile(f)
    U = profile.total_degree
    return EdgeColoring({
        (x, y): (RED if U[x] >= U[y] else BLUE)
        for (x, y) in profile.violated_edges})


@dataclass(frozen=True)
class BucketProfile:
    side: tuple[str, str]             # (parity, color) chosen
    blocks: dict                      # (t, s) -> vertex count
    side_sums: dict                   # (parity, color) -> objective sum
    bucketed_vertices: int

    @property
    def selected_sum(self) -> float:
        return self.side_sums[self.side]


def bucket_profile(f: ValuedFunction) -> BucketProfile:
    """Dyadic (t, s) bucketing of the parity class and color maximizing
    the colored square-root mass under the U-degree coloring.

    Every bucketed vertex x satisfies t <= U(x) < 2t and s <= I_b(x) < 2s
    with t, s powers of two (t >= s always, since U dominates any colored
    count)."""
    profile = violation_profile(f)
    col = u_degree_coloring(f)
    U = profile.total_degree
    n = f.domain.n
    red = [0] * n
    blue = [0] * n
    for e in col.edges():
        if col[e] == RED:
            red[e[0]] += 1
        else:
            blue[e[1]] += 1

    def parity_ok(x: int, parity: str) -> bool:
        even = x.bit_count() % 2 == 0
        return even if parity == "even" else not even

    side_sums = {}
    for parity in ("even", "odd"):
        for color, counts in ((RED, red), (BLUE, blue)):
            side_sums[(parity, color)] = math.fsum(
                math.sqrt(counts[x]) for x in range(n) if parity_ok(x, parity))
    side = max(side_sums, key=lambda k: (side_sums[k], k))
    counts = red if side[1] == RED else blue
    blocks: dict[tuple[int, int], int] = {}
    bucketed = 0
    for x in range(n):
        if not parity_ok(x, side[0]) or counts[x] < 1:
            continue
        t = 1 << (U[x].bit_length() - 1)
        s = 1 << (counts[x].bit_length() - 1)
        blocks[(t, s)] = blocks.get((t, s), 0) + 1
        bucketed += 1
    return BucketProfile(side=side, blocks=blocks, side_sums=side_sums,
                         bucketed_vertices=bucketed)
