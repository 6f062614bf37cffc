import random

import pytest

from monocube.poset import (CycleError, DomainSizeError, PosetDomain,
                            build_domain, hypercube, position_relative_to)


def brute_paths(domain, s, t):
    """All directed paths s -> t by DFS; returns (vertices, edges) of the
    union.  Independent oracle for sweeping graphs."""
    out = {}
    for (u, v) in domain.cover_edges():
        out.setdefault(u, []).append(v)
    vertices, edges = set(), set()

    def dfs(u, path):
        if u == t:
            vertices.update(path)
            edges.update(zip(path, path[1:]))
            return
        for v in out.get(u, []):
            dfs(v, path + [v])

    dfs(s, [s])
    return vertices, edges


def test_hypercube_edges_small():
    assert hypercube(1).cover_edges() == [(0, 1)]
    assert set(hypercube(2).cover_edges()) == {(0, 1), (0, 2), (1, 3), (2, 3)}


@pytest.mark.parametrize("d", range(1, 9))
def test_hypercube_edge_count(d):
    assert hypercube(d).num_edges == d * 2 ** (d - 1)
    assert len(hypercube(d).cover_edges()) == d * 2 ** (d - 1)


def test_dag_cycle_detected():
    with pytest.raises(CycleError):
        PosetDomain("dag", n=2, edges=[(0, 1), (1, 0)])
    with pytest.raises(CycleError):
        PosetDomain("dag", n=1, edges=[(0, 0)])


def test_dag_vertex_range_checked():
    with pytest.raises(ValueError):
        PosetDomain("dag", n=2, edges=[(0, 2)])


def test_reaches_trivia(chain3):
    dom = hypercube(2)
    assert dom.reaches(0, 3)
    assert not dom.reaches(1, 2)
    assert dom.reaches(1, 1)
    assert chain3.reaches(0, 2)
    assert not chain3.reaches(2, 0)


@pytest.mark.parametrize("d", range(1, 8))
def test_reaches_agrees_with_edge_built_dag(d):
    """Bitmask containment vs reachability derived purely from the edge
    list, compared exhaustively via the up-set masks."""
    hc = hypercube(d)
    dag = PosetDomain("dag", n=hc.n, edges=hc.cover_edges())
    assert hc._up_masks() == dag._up_masks()


def test_reaches_agrees_at_d10():
    hc = hypercube(10)
    dag = PosetDomain("dag", n=hc.n, edges=hc.cover_edges())
    assert hc._up_masks() == dag._up_masks()


def test_transitive_closure_examples(chain3):
    assert sorted(chain3.transitive_closure()) == [(0, 1), (0, 2), (1, 2)]
    assert sorted(hypercube(1).transitive_closure()) == [(0, 1)]
    assert len(hypercube(2).transitive_closure()) == 5


@pytest.mark.parametrize("d", range(1, 7))
def test_transitive_closure_count(d):
    # strict subset pairs: 3^d - 2^d, counted independently
    pairs = hypercube(d).transitive_closure()
    expected = {(x, y) for x in range(2 ** d) for y in range(2 ** d)
                if x != y and (x & y) == x}
    assert set(pairs) == expected
    assert len(pairs) == 3 ** d - 2 ** d


def test_transitive_closure_cap():
    with pytest.raises(DomainSizeError):
        hypercube(13).transitive_closure()


def test_sweeping_graph_examples(chain3):
    dom = hypercube(2)
    H = dom.sweeping_graph({0}, {3})
    assert H.vertices == {0, 1, 2, 3}
    assert set(H.edges()) == set(dom.cover_edges())

    empty = dom.sweeping_graph({1}, {2})
    assert empty.vertices == frozenset()
    assert empty.edges() == []

    Hc = chain3.sweeping_graph({0}, {1})
    assert Hc.vertices == {0, 1}
    assert Hc.edges() == [(0, 1)]


def test_sweeping_graph_overlap_rejected():
    with pytest.raises(ValueError):
        hypercube(2).sweeping_graph({0, 1}, {1, 3})


@pytest.mark.parametrize("d,seed", [(2, 0), (3, 1), (4, 2), (5, 3), (6, 4)])
def test_sweeping_graph_matches_path_union(d, seed):
    """Vertex and edge sets equal the brute-force union of directed paths
    over all (s, t) source-sink pairs."""
    dom = hypercube(d)
    rng = random.Random(seed)
    verts = list(range(dom.n))
    S = set(rng.sample(verts, 2))
    T = set(rng.sample([v for v in verts if v not in S], 2))
    H = dom.sweeping_graph(S, T)
    vertices, edges = set(), set()
    for s in S:
        for t in T:
            vs, es = brute_paths(dom, s, t)
            vertices |= vs
            edges |= es
    assert H.vertices == vertices
    assert set(H.edges()) == edges


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_sweeping_graph_properties(d):
    """Every inside vertex sees a source below and a sink above; no
    outside vertex is both above and below; induced edges are present."""
    dom = hypercube(d)
    rng = random.Random(d)
    for _ in range(10):
        S = set(rng.sample(range(dom.n), rng.randint(1, min(3, dom.n - 1))))
        pool = [v for v in range(dom.n) if v not in S]
        T = set(rng.sample(pool, rng.randint(1, min(3, len(pool)))))
        H = dom.sweeping_graph(S, T)
        for z in H.vertices:
            assert H.sources_below(z)
            assert H.sinks_above(z)
        for z in range(dom.n):
            # raises if both above and below
            position_relative_to(dom, z, H)
        edge_set = set(H.edges())
        for (x, y) in dom.cover_edges():
            if x in H.vertices and y in H.vertices:
                assert (x, y) in edge_set


def test_position_relative_to():
    dom = hypercube(2)
    H = dom.sweeping_graph({0}, {1})
    assert H.vertices == {0, 1}
    assert position_relative_to(dom, 3, H) == "above"
    # 0 < 2, so 2 sits above H({0},{1}) as well
    assert position_relative_to(dom, 2, H) == "above"
    full = dom.sweeping_graph({0}, {3})
    for z in range(4):
        assert position_relative_to(dom, z, full) == "inside"


def test_position_neither(chain3):
    H = chain3.sweeping_graph({0}, {1})
    dom = PosetDomain("dag", n=4, edges=[(0, 1), (1, 2)])
    H = dom.sweeping_graph({0}, {1})
    assert position_relative_to(dom, 3, H) == "neither"
    assert position_relative_to(dom, 2, H) == "above"


def test_build_domain_forms():
    assert build_domain(3).kind == "hypercube"
    assert build_domain({"d": 2}).n == 4
    dag = build_domain({"n": 3, "edges": [[0, 1], [1, 2]]})
    assert dag.kind == "dag" and dag.reaches(0, 2)
    with pytest.raises(ValueError):
        build_domain({"x": 1})
