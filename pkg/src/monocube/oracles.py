"""Exact ground truth at desk scale.

The violation graph of f puts an edge on every comparable pair (x, y)
with x < y and f(x) > f(y).  The distance to monotonicity times the
vertex count equals its minimum vertex cover.  Because the violation
relation is itself a strict partial order (it inherits transitivity from
the domain order and the value order), independent sets of the violation
graph are exactly its antichains, and the minimum vertex cover can be
read off a maximum matching in the split bipartite graph (Dilworth /
Koenig).  That gives an exact polynomial-time `exact_distance` for
arbitrary real values; for Boolean inputs the split graph degenerates to
the ordinary bipartite violation graph, which is the classical Koenig
fast path.

Two independent routes are kept for cross-checks: a branch-and-bound
minimum vertex cover on the general violation graph, and a brute-force
sweep over all vertex subsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .funcs import ValuedFunction, canonical_rank, image_size
from .isoperimetry import EdgeColoring, RED, BLUE, robust_objective, violation_profile
from .poset import DomainSizeError

DEFAULT_DISTANCE_CAP = 64
BOOLEAN_DISTANCE_CAP = 1024
MATCHING_ENUM_CAP = 16
COLORING_ENUM_CAP = 20


def is_monotone(f: ValuedFunction) -> bool:
    """True iff no cover edge is violated (enough, by transitivity)."""
    values = f.values
    return all(values[x] <= values[y] for (x, y) in f.domain.cover_edges())


def violated_pairs(f: ValuedFunction) -> list[tuple[int, int]]:
    """All violated comparable pairs, i.e. the violation graph's edges."""
    values = f.values
    domain = f.domain
    n = domain.n
    if domain.kind == "hypercube":
        up = domain._up_masks()  # noqa: SLF001 - bulk access beats reaches()
        pairs = []
        for x in range(n):
            vx = values[x]
            m = up[x] & ~(1 << x)
            while m:
                low = m & -m
                y = low.bit_length() - 1
                if vx > values[y]:
                    pairs.append((x, y))
                m ^= low
        return pairs
    return [(x, y) for x in range(n) for y in range(n)
            if x != y and values[x] > values[y] and domain.reaches(x, y)]


@dataclass(frozen=True)
class DistanceCertificate:
    epsilon: Fraction
    vertex_cover: frozenset[int]
    repaired: ValuedFunction

    @property
    def cover_size(self) -> int:
        return len(self.vertex_cover)


def _hopcroft_karp(adj: dict[int, list[int]], rights: set[int]) -> dict[int, int]:
    """Maximum bipartite matching; returns the right->left match map."""
    import sys
    needed = 4 * (len(adj) + len(rights)) + 100
    if sys.getrecursionlimit() < needed:
        sys.setrecursionlimit(needed)
    INF = float("inf")
    match_l: dict[int, int | None] = {u: None for u in adj}
    match_r: dict[int, int | None] = {v: None for v in rights}
    while True:
        dist = {}
        queue = [u for u in adj if match_l[u] is None]
        for u in queue:
            dist[u] = 0
        found = False
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in adj[u]:
                w = match_r[v]
                if w is None:
                    found = True
                elif w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            break

        def try_augment(u: int) -> bool:
            for v in adj[u]:
                w = match_r[v]
                if w is None or (dist.get(w) == dist[u] + 1 and try_augment(w)):
                    match_l[u] = v
                    match_r[v] = u
                    return True
            dist[u] = INF
            return False

        for u in adj:
            if match_l[u] is None:
                try_augment(u)
    return {v: u for v, u in match_r.items() if u is not None}


def _koenig_cover(adj: dict[int, list[int]], rights: set[int],
                  match_r: dict[int, int]) -> tuple[set[int], set[int]]:
    """Koenig construction: a minimum vertex cover (left part, right part)
    of the bipartite graph from a maximum matching."""
    match_l = {u: v for v, u in match_r.items()}
    visited_l = set()
    visited_r = set()
    queue = [u for u in adj if u not in match_l]
    visited_l.update(queue)
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for v in adj[u]:
            if v in visited_r:
                continue
            visited_r.add(v)
            w = match_r.get(v)
            if w is not None and w not in visited_l:
                visited_l.add(w)
                queue.append(w)
    cover_left = set(adj) - visited_l
    cover_right = visited_r
    return cover_left, cover_right


def exact_distance(f: ValuedFunction, cap: int | None = None) -> DistanceCertificate:
    """Exact distance to monotonicity with a certificate.

    The cover comes from the Dilworth/Koenig reduction on the violation
    order's split graph: a vertex is kept iff neither of its two copies
    lies in the Koenig cover; kept vertices form a maximum antichain of
    the violation order, i.e. a maximum violation-free set.  The repaired
    function extends f from the kept set by downward maxima, so it is
    monotone and differs from f exactly on the cover.
    """
    n = f.domain.n
    if cap is None:
        cap = BOOLEAN_DISTANCE_CAP if image_size(f) <= 2 else DEFAULT_DISTANCE_CAP
    if n > cap:
        raise DomainSizeError(f"exact_distance: {n} vertices exceeds cap {cap}")
    pairs = violated_pairs(f)
    if not pairs:
        return DistanceCertificate(Fraction(0), frozenset(), f)
    adj: dict[int, list[int]] = {}
    rights = set()
    for (x, y) in pairs:
        adj.setdefault(x, []).append(y)
        rights.add(y)
    match_r = _hopcroft_karp(adj, rights)
    cover_left, cover_right = _koenig_cover(adj, rights, match_r)
    cover = frozenset(cover_left | cover_right)
    assert len(cover_left) + len(cover_right) == len(match_r), \
        "Koenig cover size must equal the matching size"
    assert all(x in cover_left or y in cover_right for (x, y) in pairs), \
        "Koenig construction left a violated pair uncovered"

    repaired = _repair(f, cover)
    changed = sum(repaired.values[x] != f.values[x] for x in range(n))
    assert changed == len(cover), \
        f"repair changed {changed} points, cover has {len(cover)}"
    return DistanceCertificate(Fraction(len(cover), n), cover, repaired)


def _repair(f: ValuedFunction, cover: frozenset[int]) -> ValuedFunction:
    """Monotone extension keeping f on the complement of the cover:
    g(z) = max f over kept x <= z, falling back to the minimum kept value."""
    domain = f.domain
    kept = [x for x in range(domain.n) if x not in cover]
    fallback = min(f.values[x] for x in kept)
    down = domain._down_masks()  # noqa: SLF001
    out = []
    for z in range(domain.n):
        dz = down[z]
        best = None
        for x in kept:
            if dz >> x & 1:
                v = f.values[x]
                if best is None or v > best:
                    best = v
        out.append(fallback if best is None else best)
    g = ValuedFunction(domain, tuple(out))
    assert is_monotone(g), "repair produced a non-monotone function"
    return g


def exact_distance_bruteforce(f: ValuedFunction, cap: int = 20) -> int:
    """Minimum vertex cover size of the violation graph by sweeping all
    2^n vertex subsets (kept sets).  Independent of `exact_distance`."""
    n = f.domain.n
    if n > cap:
        raise DomainSizeError(f"brute force over 2^{n} subsets exceeds cap 2^{cap}")
    bad = [0] * n
    for (x, y) in violated_pairs(f):
        bad[x] |= 1 << y
        bad[y] |= 1 << x
    best = 0
    valid = bytearray(1 << n)
    valid[0] = 1
    for mask in range(1, 1 << n):
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        if valid[rest] and not bad[v] & rest:
            valid[mask] = 1
            size = mask.bit_count()
            if size > best:
                best = size
    return n - best


def mvc_branch_bound(f: ValuedFunction) -> int:
    """Minimum vertex cover size of the violation graph by branch and
    bound on the general graph (include a max-degree vertex or all of its
    neighbours; greedy-matching lower bound for pruning).  Cross-check
    route for `exact_distance`."""
    pairs = violated_pairs(f)
    adj: dict[int, set[int]] = {}
    for (x, y) in pairs:
        adj.setdefault(x, set()).add(y)
        adj.setdefault(y, set()).add(x)

    best = [len(adj)]  # all touched vertices always cover

    def matching_lb(graph: dict[int, set[int]]) -> int:
        used = set()
        size = 0
        for u in sorted(graph):
            if u in used:
                continue
            for v in sorted(graph[u]):
                if v not in used:
                    used.add(u)
                    used.add(v)
                    size += 1
                    break
        return size

    def strip(graph: dict[int, set[int]], removed: set[int]) -> dict[int, set[int]]:
        out = {}
        for u, nbrs in graph.items():
            if u in removed:
                continue
            rest = nbrs - removed
            if rest:
                out[u] = rest
        return out

    def solve(graph: dict[int, set[int]], taken: int) -> None:
        # peel degree-1 vertices: take the neighbour
        while True:
            if taken + matching_lb(graph) >= best[0]:
                return
            if not graph:
                best[0] = min(best[0], taken)
                return
            deg1 = next((u for u in sorted(graph) if len(graph[u]) == 1), None)
            if deg1 is None:
                break
            v = next(iter(graph[deg1]))
            graph = strip(graph, {deg1, v})
            taken += 1
        u = max(sorted(graph), key=lambda w: len(graph[w]))
        solve(strip(graph, {u}), taken + 1)
        nbrs = set(graph[u])
        solve(strip(graph, nbrs | {u}), taken + len(nbrs))

    solve(adj, 0)
    return best[0]


def enumerate_matchings_check(f: ValuedFunction, cap: int = MATCHING_ENUM_CAP
                              ) -> tuple[int, int]:
    """Brute-force (max total rank gap, min cardinality among maximizers)
    over all matchings of violated comparable pairs.  Validates the
    decomposition's matching solver; weights use canonical ranks, exactly
    as the solver does."""
    n = f.domain.n
    if n > cap:
        raise DomainSizeError(f"matching enumeration needs n <= {cap}, got {n}")
    ranked = canonical_rank(f)
    pairs = violated_pairs(ranked)
    gaps = [ranked.values[x] - ranked.values[y] for (x, y) in pairs]
    best = (0, 0)  # (weight, -cardinality) maximized lexicographically

    def rec(idx: int, used: int, weight: int, card: int) -> None:
        nonlocal best
        if (weight, -card) > best:
            best = (weight, -card)
        for k in range(idx, len(pairs)):
            x, y = pairs[k]
            m = 1 << x | 1 << y
            if not used & m:
                rec(k + 1, used | m, weight + gaps[k], card + 1)

    rec(0, 0, 0, 0)
    return best[0], -best[1]


def worst_coloring(f: ValuedFunction, mode: str = "exhaustive",
                   restarts: int = 5, seed: int = 0,
                   cap: int = COLORING_ENUM_CAP) -> tuple[EdgeColoring, float]:
    """Coloring of the violated edges minimizing the robust objective.

    'exhaustive' sweeps all 2^m colorings (m <= cap); 'greedy' runs
    seeded local search flipping one edge color at a time.
    """
    profile = violation_profile(f)
    edges = list(profile.violated_edges)
    m = len(edges)
    if m == 0:
        col = EdgeColoring({})
        return col, robust_objective(f, col, profile)
    if mode == "exhaustive":
        if m > cap:
            raise DomainSizeError(f"2^{m} colorings exceeds cap 2^{cap}")
        best_val = None
        best_bits = 0
        for bits in range(1 << m):
            col = EdgeColoring({e: (RED if bits >> k & 1 else BLUE)
                                for k, e in enumerate(edges)})
            val = robust_objective(f, col, profile)
            if best_val is None or val < best_val:
                best_val, best_bits = val, bits
        best = EdgeColoring({e: (RED if best_bits >> k & 1 else BLUE)
                             for k, e in enumerate(edges)})
        return best, best_val
    if mode != "greedy":
        raise ValueError(f"mode must be 'exhaustive' or 'greedy', not {mode!r}")

    import random
    rng = random.Random(seed)
    best_val = None
    best_col = None
    for restart in range(restarts):
        colors = ([RED] * m if restart == 0
                  else [RED if rng.random() < 0.5 else BLUE for _ in range(m)])
        col = EdgeColoring(dict(zip(edges, colors)))
        val = robust_objective(f, col, profile)
        improved = True
        while improved:
            improved = False
            for k in range(m):
                colors[k] = BLUE if colors[k] == RED else RED
                cand = EdgeColoring(dict(zip(edges, colors)))
                cand_val = robust_objective(f, cand, profile)
                if cand_val < val - 1e-15:
                    val, col = cand_val, cand
                    improved = True
                else:
                    colors[k] = BLUE if colors[k] == RED else RED
        if best_val is None or val < best_val:
            best_val, best_col = val, col
    return best_col, best_val


@dataclass(frozen=True)
class MedianThresholdResult:
    median: float
    case: int
    h: ValuedFunction


def median_threshold(f: ValuedFunction) -> MedianThresholdResult:
    """Boolean reduction for the undirected inequality.

    m is the smallest value with cumulative mass >= 1/2.  Case 1 takes
    h = [f > m] when the mass strictly below m is under (1 - p_m)/2,
    otherwise case 2 takes h = [f >= m].  Either way h keeps at least
    half of f's distance to constant and never adds influential edges.
    """
    n = f.domain.n
    counts: dict = {}
    for v in f.values:
        counts[v] = counts.get(v, 0) + 1
    total = 0
    median = None
    for v in sorted(counts):
        total += counts[v]
        if Fraction(total, n) >= Fraction(1, 2):
            median = v
            break
    below = sum(c for v, c in counts.items() if v < median)
    pm = counts[median]
    if Fraction(below, n) < Fraction(n - pm, 2 * n):
        case = 1
        h = ValuedFunction(f.domain, tuple(1 if v > median else 0 for v in f.values))
    else:
        case = 2
        h = ValuedFunction(f.domain, tuple(1 if v >= median else 0 for v in f.values))
    return MedianThresholdResult(median=median, case=case, h=h)


def boolean_variance(h: ValuedFunction) -> Fraction:
    """p0 * (1 - p0) for a Boolean function."""
    if not h.is_boolean():
        raise ValueError("variance is defined here for Boolean functions only")
    n = h.domain.n
    p0 = Fraction(sum(1 for v in h.values if v == 0), n)
    return p0 * (1 - p0)
