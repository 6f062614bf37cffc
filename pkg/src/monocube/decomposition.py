"""Boolean decomposition of a real-valued function on a DAG poset.

Pipeline: canonicalize values to integer ranks, find a max-weight
min-cardinality matching of violated comparable pairs, merge conflicting
singleton pairs into conflict-free blocks, take each block's sweeping
graph, and threshold the function inside each graph against the sinks it
can still reach.  The output is a family (f_i, H_i) of Boolean functions
on pairwise disjoint induced subgraphs that jointly keep at least half
the distance to monotonicity and only violate edges the input violates.

The matching objective (maximize total value gap, then minimize the pair
count) is encoded in a single integer weight (n+1)*gap - 1 per pair; the
value gaps are >= 1 after ranking and a matching has at most n/2 pairs,
so the exact maximum-weight matching under these weights is exactly the
max-weight min-cardinality matching.  The general-graph maximum-weight
matching itself is delegated to networkx (blossom algorithm, exact for
integer weights); brute-force enumeration in `oracles` cross-checks it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .funcs import ValuedFunction, canonical_rank
from .isoperimetry import EdgeColoring, colored_counts, violation_profile
from .oracles import exact_distance, is_monotone
from .poset import DomainSizeError, PosetDomain, SweepingGraph

DEFAULT_SOLVER_CAP = 256


@dataclass(frozen=True)
class Matching:
    """Vertex-disjoint ordered pairs (s, t) with s strictly below t."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for (s, t) in self.pairs:
            if s in seen or t in seen or s == t:
                raise ValueError(f"pair ({s},{t}) reuses a matched vertex")
            seen.add(s)
            seen.add(t)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def lower(self) -> frozenset[int]:
        return frozenset(s for (s, _) in self.pairs)

    @property
    def upper(self) -> frozenset[int]:
        return frozenset(t for (_, t) in self.pairs)

    def validate_order(self, domain: PosetDomain) -> None:
        for (s, t) in self.pairs:
            if not (domain.reaches(s, t) and s != t):
                raise ValueError(f"pair ({s},{t}) is not strictly ordered")


@dataclass(frozen=True)
class PairPartition:
    """Blocks (S_i, T_i) with matched sets aligned blockwise and pairwise
    non-conflicting sweeping graphs."""

    blocks: tuple[tuple[frozenset[int], frozenset[int]], ...]

    def __len__(self) -> int:
        return len(self.blocks)


def max_weight_min_card_matching(f: ValuedFunction,
                                 solver_cap: int = DEFAULT_SOLVER_CAP) -> Matching:
    """Matching of violated comparable pairs maximizing the total value
    gap, tie-broken by fewest pairs.  Empty for monotone input."""
    n = f.domain.n
    if n > solver_cap:
        raise DomainSizeError(
            f"matching solver: {n} vertices exceeds cap {solver_cap}")
    ranked = canonical_rank(f)
    from .oracles import violated_pairs
    candidates = violated_pairs(ranked)
    if not candidates:
        return Matching(())
    graph = nx.Graph()
    for (x, y) in candidates:
        gap = ranked.values[x] - ranked.values[y]
        graph.add_edge(x, y, weight=(n + 1) * gap - 1)
    matched = nx.max_weight_matching(graph, maxcardinality=False)
    oriented = []
    cand = set(candidates)
    for (a, b) in matched:
        oriented.append((a, b) if (a, b) in cand else (b, a))
    return Matching(tuple(sorted(oriented)))


def conflict(domain: PosetDomain, pair_a: tuple[frozenset[int], frozenset[int]],
             pair_b: tuple[frozenset[int], frozenset[int]]) -> bool:
    """True iff the sweeping graphs of the two pairs share a vertex."""
    X, Y = frozenset(pair_a[0]), frozenset(pair_a[1])
    Xp, Yp = frozenset(pair_b[0]), frozenset(pair_b[1])
    sets = [X, Y, Xp, Yp]
    for i in range(4):
        for j in range(i + 1, 4):
            if sets[i] & sets[j]:
                raise ValueError("conflict test requires four disjoint sets")
    ha = domain.sweeping_graph(X, Y).vertex_mask
    hb = domain.sweeping_graph(Xp, Yp).vertex_mask
    return bool(ha & hb)


def merge_pairs(domain: PosetDomain, matching: Matching) -> PairPartition:
    """Merge conflicting pairs until none conflict.

    Starts from the singleton pairs of the matching.  Pair selection is
    deterministic: scan blocks in index order, merge the first
    conflicting pair found into the earlier slot, and rescan.  Any merge
    order yields a valid conflict-free partition; this one is fixed for
    reproducibility.
    """
    matching.validate_order(domain)
    blocks: list[tuple[frozenset[int], frozenset[int], int]] = []
    for (s, t) in matching.pairs:
        S, T = frozenset([s]), frozenset([t])
        blocks.append((S, T, domain.sweeping_graph(S, T).vertex_mask))
    merged = True
    while merged:
        merged = False
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                if blocks[i][2] & blocks[j][2]:
                    S = blocks[i][0] | blocks[j][0]
                    T = blocks[i][1] | blocks[j][1]
                    mask = domain.sweeping_graph(S, T).vertex_mask
                    blocks[i] = (S, T, mask)
                    del blocks[j]
                    merged = True
                    break
            if merged:
                break
    return PairPartition(tuple((S, T) for (S, T, _) in blocks))


def build_components(f: ValuedFunction, partition: PairPartition
                     ) -> list[tuple[ValuedFunction, SweepingGraph]]:
    """The Boolean functions and sweeping graphs for each block.

    Inside H_i a vertex is 1 iff its value beats every block sink it can
    still reach; outside, it is 1 iff it sits strictly above some vertex
    of H_i.
    """
    domain = f.domain
    components = []
    down = domain._down_masks()  # noqa: SLF001
    up = domain._up_masks()  # noqa: SLF001
    for (S, T) in partition.blocks:
        graph = domain.sweeping_graph(S, T)
        mask = graph.vertex_mask
        values = []
        for z in range(domain.n):
            if mask >> z & 1:
                best = max(f.values[t] for t in T if up[z] >> t & 1)
                values.append(1 if f.values[z] > best else 0)
            else:
                above = bool(mask & down[z] & ~(1 << z))
                values.append(1 if above else 0)
        components.append((ValuedFunction(domain, tuple(values)), graph))
    return components


@dataclass(frozen=True)
class DecompositionCertificate:
    epsilon_f: Fraction
    epsilon_parts: tuple[Fraction, ...]
    violated_f: int
    violated_parts: tuple[int, ...]
    checks: tuple[tuple[str, bool, str], ...]  # (name, ok, witness-or-empty)

    @property
    def all_ok(self) -> bool:
        return all(ok for (_, ok, _) in self.checks)

    @property
    def epsilon_sum(self) -> Fraction:
        return sum(self.epsilon_parts, Fraction(0))

    def failures(self) -> list[tuple[str, str]]:
        return [(name, witness) for (name, ok, witness) in self.checks if not ok]


@dataclass(frozen=True)
class Decomposition:
    matching: Matching
    partition: PairPartition
    components: tuple[tuple[ValuedFunction, SweepingGraph], ...]
    certificate: DecompositionCertificate | None
    monotone: bool

    @property
    def k(self) -> int:
        return len(self.components)


def decompose(f: ValuedFunction, solver_cap: int = DEFAULT_SOLVER_CAP,
              verify: bool = True) -> Decomposition:
    """Run the full pipeline; monotone input yields an explicitly empty
    decomposition with the monotone flag set."""
    if is_monotone(f):
        return Decomposition(Matching(()), PairPartition(()), (), None, True)
    matching = max_weight_min_card_matching(f, solver_cap)
    partition = merge_pairs(f.domain, matching)
    components = tuple(build_components(f, partition))
    dec = Decomposition(matching, partition, components, None, False)
    if verify:
        cert = verify_decomposition(f, dec)
        dec = Decomposition(matching, partition, components, cert, False)
    return dec


def verify_decomposition(f: ValuedFunction, dec: Decomposition
                         ) -> DecompositionCertificate:
    """Re-derive and check every promised property of a decomposition.

    Checks: (i) twice the summed part distances covers the distance of f;
    (ii) each part only violates edges of f inside its own graph;
    (iii) the graphs are pairwise vertex-disjoint; (iv) each block's
    matched pairs form a violation matching of its Boolean function;
    (v) every ordered (source, sink) pair inside a block is violated by f.
    Failures carry a concrete witness.
    """
    checks: list[tuple[str, bool, str]] = []
    eps_f = exact_distance(f).epsilon
    profile_f = violation_profile(f)
    violated_f = set(profile_f.violated_edges)

    eps_parts = []
    violated_parts = []
    for idx, (fi, graph) in enumerate(dec.components):
        eps_parts.append(exact_distance(fi).epsilon)
        violated_parts.append(len(violation_profile(fi).violated_edges))

    ok = 2 * sum(eps_parts, Fraction(0)) >= eps_f
    checks.append(("distance_preserved", ok,
                   "" if ok else f"2*sum eps_i = {2 * sum(eps_parts, Fraction(0))} "
                                 f"< eps(f) = {eps_f}"))

    witness = ""
    ok = True
    for idx, (fi, graph) in enumerate(dec.components):
        edges_i = set(graph.edges())
        for e in violation_profile(fi).violated_edges:
            if e not in violated_f or e not in edges_i:
                ok = False
                witness = f"component {idx}: edge {e} escapes S_f^- cap E(H_{idx})"
                break
        if not ok:
            break
    checks.append(("violations_contained", ok, witness))

    witness = ""
    ok = True
    for i in range(len(dec.components)):
        for j in range(i + 1, len(dec.components)):
            shared = dec.components[i][1].vertex_mask & dec.components[j][1].vertex_mask
            if shared:
                ok = False
                witness = (f"H_{i} and H_{j} share vertex "
                           f"{(shared & -shared).bit_length() - 1}")
                break
        if not ok:
            break
    checks.append(("graphs_disjoint", ok, witness))

    witness = ""
    ok = True
    pair_of = dict(dec.matching.pairs)
    for idx, (fi, graph) in enumerate(dec.components):
        S = graph.source_set
        if not all(s in pair_of for s in S):
            ok, witness = False, f"component {idx}: block sources unmatched"
            break
        block_pairs = [(s, pair_of[s]) for s in S]
        if {t for (_, t) in block_pairs} != set(graph.sink_set):
            ok, witness = False, f"component {idx}: M(S_i) != T_i"
            break
        for (s, t) in block_pairs:
            if not (fi.values[s] == 1 and fi.values[t] == 0):
                ok, witness = False, (f"component {idx}: pair ({s},{t}) is not "
                                      f"violated by f_{idx}")
                break
        if not ok:
            break
        if len(block_pairs) != len(S):
            ok, witness = False, f"component {idx}: |M_i| != |S_i|"
            break
    checks.append(("block_matchings_violating", ok, witness))

    witness = ""
    ok = True
    for idx, (fi, graph) in enumerate(dec.components):
        for s in graph.source_set:
            for t in graph.sink_set:
                if f.domain.reaches(s, t) and not f.values[s] > f.values[t]:
                    ok = False
                    witness = (f"component {idx}: ordered pair ({s},{t}) has "
                               f"f({s}) = {f.values[s]} <= f({t}) = {f.values[t]}")
                    break
            if not ok:
                break
        if not ok:
            break
    checks.append(("block_pairs_violated", ok, witness))

    return DecompositionCertificate(
        epsilon_f=eps_f, epsilon_parts=tuple(eps_parts),
        violated_f=len(violated_f), violated_parts=tuple(violated_parts),
        checks=tuple(checks))


@dataclass(frozen=True)
class ChainReport:
    values: tuple[float, float, float, float]
    epsilon_f: Fraction
    epsilon_sum: Fraction
    ordering_ok: bool
    distance_ok: bool
    detail: str


def robust_chain_check(f: ValuedFunction, col: EdgeColoring,
                       dec: Decomposition | None = None,
                       tol: float = 1e-12) -> ChainReport:
    """Evaluate the four-step chain relating the robust objective of f to
    the robust objectives of its Boolean parts, as concrete numbers.

    value(1): the robust objective of f under col;
    value(2): the same, counting only violated edges inside the union of
    the part graphs; value(3): the per-part restricted objectives summed;
    value(4): the parts' own robust objectives under the inherited
    coloring.  Requires value(1) >= value(2) = value(3) >= value(4), and,
    exactly in rationals, sum eps(f_i) >= eps(f)/2.
    """
    if dec is None:
        dec = decompose(f)
    n = f.domain.n
    profile = violation_profile(f)
    col.validate_for(profile)

    if dec.monotone:
        zero = (0.0, 0.0, 0.0, 0.0)
        return ChainReport(zero, Fraction(0), Fraction(0), True, True, "monotone input")

    red_all, blue_all = colored_counts(f, col)
    v1 = _objective_from_counts(red_all, blue_all, n)

    union_edges = set()
    per_part_edges = []
    for (_, graph) in dec.components:
        edges_i = [e for e in profile.violated_edges
                   if graph.vertex_mask >> e[0] & 1 and graph.vertex_mask >> e[1] & 1]
        per_part_edges.append(edges_i)
        union_edges.update(edges_i)
    red_u, blue_u = colored_counts(f, col, union_edges)
    v2 = _objective_from_counts(red_u, blue_u, n)

    v3 = math.fsum(
        _objective_from_counts(*colored_counts(f, col, edges_i), n)
        for edges_i in per_part_edges)

    v4_terms = []
    for (fi, _graph) in dec.components:
        edges_fi = violation_profile(fi).violated_edges
        red_i, blue_i = colored_counts(f, col, edges_fi)
        v4_terms.append(_objective_from_counts(red_i, blue_i, n))
    v4 = math.fsum(v4_terms)

    eps_f = dec.certificate.epsilon_f if dec.certificate else exact_distance(f).epsilon
    eps_sum = (dec.certificate.epsilon_sum if dec.certificate
               else sum((exact_distance(fi).epsilon for (fi, _) in dec.components),
                        Fraction(0)))
    ordering_ok = (v1 >= v2 - tol and abs(v2 - v3) <= tol and v3 >= v4 - tol)
    distance_ok = eps_sum >= eps_f / 2
    detail = "" if ordering_ok and distance_ok else \
        f"chain=({v1}, {v2}, {v3}, {v4}) eps_sum={eps_sum} eps_f={eps_f}"
    return ChainReport((v1, v2, v3, v4), eps_f, eps_sum, ordering_ok,
                       distance_ok, detail)


def _objective_from_counts(red: list[int], blue: list[int], n: int) -> float:
    return (math.fsum(math.sqrt(c) for c in red)
            + math.fsum(math.sqrt(c) for c in blue)) / n


@dataclass(frozen=True)
class EdgeBoundReport:
    violated: int
    cover_size: int
    n: int
    holds: bool            # |S_f^-| >= eps(f) * 2^(d-1), i.e. 2*violated >= cover
    stronger_holds: bool   # |S_f^-| >= eps(f) * 2^d,      i.e.   violated >= cover


def edge_bound_check(f: ValuedFunction) -> EdgeBoundReport:
    """Violated-edge count versus distance for hypercube functions, as
    exact integers: the halved bound is certified by the decomposition,
    the full-strength bound is checked alongside."""
    if f.domain.kind != "hypercube":
        raise ValueError("edge bound is stated for hypercube domains")
    violated = len(violation_profile(f).violated_edges)
    cover = exact_distance(f).cover_size
    return EdgeBoundReport(
        violated=violated, cover_size=cover, n=f.domain.n,
        holds=2 * violated >= cover,
        stronger_holds=violated >= cover)


def decomposition_dump(f: ValuedFunction, dec: Decomposition) -> dict:
    """JSON-ready dump: matching, blocks, part graphs, part functions,
    certificate flags and measured scalars."""
    doc: dict = {
        "monotone": dec.monotone,
        "k": dec.k,
        "matching": [list(p) for p in dec.matching.pairs],
        "blocks": [{"S": sorted(S), "T": sorted(T)} for (S, T) in dec.partition.blocks],
        "components": [
            {"vertices": sorted(graph.vertices), "values": list(fi.values)}
            for (fi, graph) in dec.components
        ],
    }
    if dec.certificate is not None:
        cert = dec.certificate
        doc["certificate"] = {
            "epsilon_f": str(cert.epsilon_f),
            "epsilon_parts": [str(e) for e in cert.epsilon_parts],
            "violated_f": cert.violated_f,
            "violated_parts": list(cert.violated_parts),
            "checks": [{"name": name, "ok": ok, "witness": witness}
                       for (name, ok, witness) in cert.checks],
            "all_ok": cert.all_ok,
        }
    return doc
