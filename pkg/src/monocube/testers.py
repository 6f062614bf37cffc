"""Nonadaptive 1-sided monotonicity testers with exact query accounting.

The pair tester walks the pair-test distribution: sample a uniform
vertex x, pick the coordinates equal to b, and flip a uniformly random
tau-subset of them (degenerating to y = x when fewer than tau are
available).  It sweeps b in {0, 1} and tau over powers of two up to
roughly sqrt(d / log d), spending a budget-controlled number of draws
per setting, and rejects exactly when some drawn pair violates
monotonicity.  For tau = 1 the draw is a random edge, so the edge tester
is also provided directly.

The full query schedule is generated from the seed and the configuration
before any value is read, so the queried multiset never depends on the
function: two runs with equal seeds on different functions touch
identical points (the replay property).  The verdict and the reported
witness are derived afterwards, taking the first violating pair in
schedule order.  Draws with y = x cost one lookup; all others cost two.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .funcs import CountingOracle, ValuedFunction
from .seeds import derive_seed

DEFAULT_BUDGET_CONSTANT = 4.0


@dataclass(frozen=True)
class TesterConfig:
    epsilon: float
    d: int
    r: int
    budget_constant: float = DEFAULT_BUDGET_CONSTANT
    seed: int = 0

    __test__ = False  # keep pytest from collecting this as a test class

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0,1)")
        if self.r < 1:
            raise ValueError("image size r must be >= 1")
        if self.budget_constant <= 0:
            raise ValueError("budget_constant must be positive")


@dataclass(frozen=True)
class TesterReport:
    verdict: str  # "accept" | "reject"
    queries: int
    witness: tuple[int, int, float, float] | None
    per_setting: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def rejected(self) -> bool:
        return self.verdict == "reject"


def tau_schedule(d: int) -> list[int]:
    """Walk lengths: powers of two up to sqrt(d / log2 d).  For d <= 2 the
    expression degenerates and the schedule is pinned to {1}, recovering
    the edge tester."""
    if d <= 2:
        return [1]
    limit = math.sqrt(d / math.log2(d))
    taus = [1]
    while taus[-1] * 2 <= limit:
        taus.append(taus[-1] * 2)
    return taus


def repetitions(config: TesterConfig) -> int:
    """Draws per (b, tau) setting: budget * min(r sqrt(d)/eps^2, d/eps)
    times an explicit (log2 d + 1) factor."""
    d, r, eps = config.d, config.r, config.epsilon
    base = min(r * math.sqrt(d) / eps**2, d / eps)
    return max(1, math.ceil(config.budget_constant * base * (math.log2(d) + 1 if d > 1 else 1)))


def sample_pair(b: int, tau: int, d: int, rng: random.Random) -> tuple[int, int]:
    """One draw from the pair-test distribution D_pair(b, tau)."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    x = rng.getrandbits(d)
    S = [i for i in range(d) if (x >> i & 1) == b]
    if tau > len(S):
        return x, x
    y = x
    for i in rng.sample(S, tau):
        y ^= 1 << i
    return x, y


def _evaluate_schedule(oracle: CountingOracle, schedule, seed: int) -> TesterReport:
    """Query every scheduled pair, then derive verdict and per-setting stats."""
    start = oracle.query_count
    witness = None
    per_setting: dict = {}
    for (b, tau, x, y) in schedule:
        stats = per_setting.setdefault((b, tau), {"draws": 0, "violations": 0})
        stats["draws"] += 1
        fx = oracle(x)
        if y == x:
            continue
        fy = oracle(y)
        violating = fx > fy if b == 0 else fx < fy
        if violating:
            stats["violations"] += 1
            if witness is None:
                witness = (x, y, fx, fy)
    return TesterReport(
        verdict="reject" if witness is not None else "accept",
        queries=oracle.query_count - start,
        witness=witness, per_setting=per_setting, seed=seed)


def pair_tester(oracle: CountingOracle, config: TesterConfig) -> TesterReport:
    """The pair tester.  Accepts every monotone function with certainty:
    each drawn pair is comparable in the direction checked, so a
    violation is a genuine witness of non-monotonicity."""
    if oracle.domain.d != config.d:
        raise ValueError(f"config.d={config.d} but the oracle's domain is "
                         f"{oracle.domain!r}")
    rng = random.Random(config.seed)
    reps = repetitions(config)
    schedule = []
    for b in (0, 1):
        for tau in tau_schedule(config.d):
            for _ in range(reps):
                x, y = sample_pair(b, tau, config.d, rng)
                schedule.append((b, tau, x, y))
    return _evaluate_schedule(oracle, schedule, config.seed)


def edge_tester(oracle: CountingOracle, epsilon: float, d: int,
                budget_constant: float = DEFAULT_BUDGET_CONSTANT,
                seed: int = 0) -> TesterReport:
    """Uniformly random directed edges; rejects on a violated edge.  The
    per-draw rejection probability is exactly |S_f^-| / (d 2^(d-1))."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0,1)")
    if oracle.domain.d != d:
        raise ValueError(f"d={d} but the oracle's domain is {oracle.domain!r}")
    rng = random.Random(seed)
    reps = max(1, math.ceil(budget_constant * d / epsilon))
    schedule = []
    for _ in range(reps):
        i = rng.randrange(d)
        x = rng.getrandbits(d) & ~(1 << i)
        schedule.append((0, 1, x, x | 1 << i))
    return _evaluate_schedule(oracle, schedule, seed)


@dataclass(frozen=True)
class RejectionMeasurement:
    trials: int
    rejections: int
    rate: float
    wilson_low: float
    wilson_high: float
    mean_queries: float


def wilson_interval(successes: int, trials: int, z: float = 1.959964) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def measure_rejection(f: ValuedFunction, run, trials: int, seed: int,
                      jobs: int = 1) -> RejectionMeasurement:
    """Run a tester `trials` times with independently derived seeds.

    ``run(oracle, seed) -> TesterReport`` must be a pure function of its
    arguments; with jobs > 1 it must also be picklable.  Results are
    identical for any job count since trial seeds are derived from the
    master seed and the trial index alone.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seeds = [derive_seed(seed, t) for t in range(trials)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(partial(_one_trial, f, run), seeds,
                                    chunksize=max(1, trials // (4 * jobs))))
    else:
        reports = [_one_trial(f, run, s) for s in seeds]
    rejections = sum(r.rejected for r in reports)
    low, high = wilson_interval(rejections, trials)
    return RejectionMeasurement(
        trials=trials, rejections=rejections, rate=rejections / trials,
        wilson_low=low, wilson_high=high,
        mean_queries=math.fsum(r.queries for r in reports) / trials)


def _one_trial(f: ValuedFunction, run, trial_seed: int) -> TesterReport:
    return run(CountingOracle(f), trial_seed)


def run_pair_tester(oracle: CountingOracle, seed: int, *, epsilon: float,
                    d: int, r: int,
                    budget_constant: float = DEFAULT_BUDGET_CONSTANT) -> TesterReport:
    """Picklable adapter for measure_rejection / CLI."""
    return pair_tester(oracle, TesterConfig(epsilon=epsilon, d=d, r=r,
                                            budget_constant=budget_constant,
                                            seed=seed))


def run_edge_tester(oracle: CountingOracle, seed: int, *, epsilon: float, d: int,
                    budget_constant: float = DEFAULT_BUDGET_CONSTANT) -> TesterReport:
    return edge_tester(oracle, epsilon, d, budget_constant, seed)
