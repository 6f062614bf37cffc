"""Real-valued functions on a poset domain.

A `ValuedFunction` is a dense, immutable assignment of finite reals to
the domain's vertices.  Comparison-based machinery (decomposition,
testers) never needs the raw values, only their order, so
`canonical_rank` relabels any function to integer ranks ``1..r`` while
preserving every violated pair, the distance to monotonicity, and the
image size.

`CountingOracle` wraps a function behind a query counter (optionally a
query log) so testers can account for every lookup they make.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .poset import PosetDomain, build_domain, hypercube


class FunctionFormatError(ValueError):
    """Raised for malformed function files."""


@dataclass(frozen=True)
class ValuedFunction:
    domain: PosetDomain
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.domain.n:
            raise ValueError(
                f"value array has length {len(self.values)}, "
                f"domain has {self.domain.n} vertices")
        for v in self.values:
            if not math.isfinite(v):
                raise ValueError(f"non-finite value {v!r}")

    @property
    def n(self) -> int:
        return self.domain.n

    def __call__(self, x: int) -> float:
        return self.values[x]

    def is_boolean(self) -> bool:
        return set(self.values) <= {0, 1}


class CountingOracle:
    """Oracle access to a function with exact query accounting.

    ``query_count`` equals the number of value lookups since construction
    or the last `reset`.  With ``record=True`` every queried vertex is
    appended to ``log`` in issue order, which is what the nonadaptivity
    replay checks compare.  For parallel trials, run one oracle per
    worker and sum the counters.
    """

    def __init__(self, fn: ValuedFunction, record: bool = False):
        self.fn = fn
        self.query_count = 0
        self.log: list[int] | None = [] if record else None

    def __call__(self, x: int) -> float:
        self.query_count += 1
        if self.log is not None:
            self.log.append(x)
        return self.fn.values[x]

    def lookup_many(self, xs: Sequence[int]) -> list[float]:
        self.query_count += len(xs)
        if self.log is not None:
            self.log.extend(xs)
        values = self.fn.values
        return [values[x] for x in xs]

    def reset(self) -> None:
        self.query_count = 0
        if self.log is not None:
            self.log = []

    @property
    def domain(self) -> PosetDomain:
        return self.fn.domain


def image_size(f: ValuedFunction) -> int:
    """Number of distinct values the function takes."""
    return len(set(f.values))


def image_values(f: ValuedFunction) -> list:
    """Sorted distinct values."""
    return sorted(set(f.values))


def canonical_rank(f: ValuedFunction) -> ValuedFunction:
    """Relabel values to their ranks 1..r among the distinct values.

    Order-isomorphic: sign(f(x) - f(y)) is preserved for every pair, so
    violated edges, distance to monotonicity, and image size all survive.
    """
    ranks = {v: i + 1 for i, v in enumerate(image_values(f))}
    return ValuedFunction(f.domain, tuple(ranks[v] for v in f.values))


def threshold(f: ValuedFunction, t: float) -> ValuedFunction:
    """Boolean indicator of f(x) > t.  Its violated edges are a subset of
    the violated edges of f."""
    return ValuedFunction(f.domain, tuple(1 if v > t else 0 for v in f.values))


def random_function(domain: PosetDomain, r: int, seed: int) -> ValuedFunction:
    """i.i.d. uniform values in 1..r, deterministic given the seed."""
    if r < 1:
        raise ValueError("image bound r must be >= 1")
    rng = np.random.default_rng(seed)
    values = rng.integers(1, r + 1, size=domain.n)
    return ValuedFunction(domain, tuple(int(v) for v in values))


def random_monotone(domain: PosetDomain, r: int, seed: int) -> ValuedFunction:
    """A random monotone function: i.i.d. uniform base values in 1..r,
    then the monotone closure g(x) = max over y <= x of base(y)."""
    if r < 1:
        raise ValueError("image bound r must be >= 1")
    rng = np.random.default_rng(seed)
    base = rng.integers(1, r + 1, size=domain.n)
    if domain.kind == "hypercube":
        idx = np.arange(domain.n)
        for i in range(domain.d):
            bit = 1 << i
            has = (idx & bit) != 0
            upper = idx[has]
            base[upper] = np.maximum(base[upper], base[upper ^ bit])
        values = base
    else:
        values = base.tolist()
        preds: list[list[int]] = [[] for _ in range(domain.n)]
        for (u, v) in domain.cover_edges():
            preds[v].append(u)
        for x in domain._topo:  # noqa: SLF001 - closure needs the topo order
            for u in preds[x]:
                if values[u] > values[x]:
                    values[x] = values[u]
    return ValuedFunction(domain, tuple(int(v) for v in values))


def anti_dictator(d: int) -> ValuedFunction:
    """f(x) = 1 - x_1 on hypercube(d): the canonical hard instance for the
    edge tester."""
    dom = hypercube(d)
    return ValuedFunction(dom, tuple(1 - (x & 1) for x in range(dom.n)))


def weight_function(d: int) -> ValuedFunction:
    """f(x) = |x| (Hamming weight), a monotone function with image size d+1."""
    dom = hypercube(d)
    return ValuedFunction(dom, tuple(x.bit_count() for x in range(dom.n)))


# -- file I/O -----------------------------------------------------------------
#
# Hypercube file:   {"d": <int>, "values": [v_0, ..., v_{2^d - 1}]}
# DAG-domain file:  {"domain": "<dag-file>", "values": [...]} where the dag
# file holds {"n": <int>, "edges": [[u, v], ...]} and the path is resolved
# relative to the function file.


def write_function(f: ValuedFunction, path: str, domain_path: str | None = None) -> None:
    if f.domain.kind == "hypercube":
        doc = {"d": f.domain.d, "values": list(f.values)}
    else:
        if domain_path is None:
            domain_path = os.path.splitext(path)[0] + ".domain.json"
        with open(domain_path, "w") as fh:
            json.dump({"n": f.domain.n, "edges": [list(e) for e in f.domain.cover_edges()]},
                      fh)
        doc = {"domain": os.path.relpath(domain_path, os.path.dirname(path) or "."),
               "values": list(f.values)}
    with open(path, "w") as fh:
        json.dump(doc, fh)


def read_function(path: str) -> ValuedFunction:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FunctionFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "values" not in doc:
        raise FunctionFormatError(f"{path}: missing 'values'")
    raw = doc["values"]
    values = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise FunctionFormatError(f"{path}: non-numeric value {v!r}")
        values.append(v)
    if "d" in doc:
        domain = build_domain({"d": doc["d"]})
    elif "domain" in doc:
        ref = os.path.join(os.path.dirname(path) or ".", doc["domain"])
        with open(ref) as fh:
            domain = build_domain(json.load(fh))
    else:
        raise FunctionFormatError(f"{path}: needs a 'd' or 'domain' key")
    if len(values) != domain.n:
        raise FunctionFormatError(
            f"{path}: {len(values)} values for a domain with {domain.n} vertices")
    try:
        return ValuedFunction(domain, tuple(values))
    except ValueError as exc:
        raise FunctionFormatError(f"{path}: {exc}") from exc
