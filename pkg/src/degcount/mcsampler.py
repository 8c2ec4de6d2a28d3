"""Near-uniform sampling of graphs with a given degree sequence via the
double-edge-switch chain, for empirical validation of the probability
formulas beyond exact-count reach.

A switch picks two edges uniformly, proposes rewiring them across, and
rejects proposals that would create a loop or multi-edge; degrees are
invariant along the chain.  Estimates pool thinned samples and report a
batch-means standard error so autocorrelation is priced in honestly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .graphcore import DegreeSequence, ForbiddenGraph

DEFAULT_SEED = 1729


class NonGraphicalError(ValueError):
    """The degree sequence admits no simple graph."""


def is_graphical(degrees) -> bool:
    """Erdos-Gallai test, including the even-sum requirement."""
    ds = sorted((int(v) for v in degrees), reverse=True)
    n = len(ds)
    if any(v < 0 or v > n - 1 for v in ds):
        return False
    if sum(ds) % 2:
        return False
    prefix = 0
    for k in range(1, n + 1):
        prefix += ds[k - 1]
        tail = sum(min(v, k) for v in ds[k:])
        if prefix > k * (k - 1) + tail:
            return False
    return True


class LabeledGraph:
    """Simple labeled graph on vertices 1..n with set-based adjacency."""

    def __init__(self, n: int):
        self.n = n
        self.adj: list[set[int]] = [set() for _ in range(n + 1)]

    def has_edge(self, j: int, k: int) -> bool:
        return k in self.adj[j]

    def add_edge(self, j: int, k: int) -> None:
        if j == k:
            raise ValueError("no self-loops")
        if k in self.adj[j]:
            raise ValueError(f"duplicate edge ({j},{k})")
        self.adj[j].add(k)
        self.adj[k].add(j)

    def remove_edge(self, j: int, k: int) -> None:
        self.adj[j].discard(k)
        self.adj[k].discard(j)

    def neighbors(self, j: int) -> tuple[int, ...]:
        return tuple(sorted(self.adj[j]))

    def degrees(self) -> tuple[int, ...]:
        return tuple(len(self.adj[v]) for v in range(1, self.n + 1))

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted((v, u) for v in range(1, self.n + 1) for u in self.adj[v] if v < u)

    def copy(self) -> "LabeledGraph":
        g = LabeledGraph(self.n)
        g.adj = [set(s) for s in self.adj]
        return g


def realize(d: DegreeSequence) -> LabeledGraph:
    """One simple graph with degrees exactly d (largest-first greedy build).

    Raises NonGraphicalError when no simple graph exists; any later
    structural failure would be an internal error and raises RuntimeError.
    """
    if not is_graphical(d.degrees):
        raise NonGraphicalError(f"sequence {d.degrees} is not graphical")
    g = LabeledGraph(d.n)
    residual = [(dj, v) for v, dj in enumerate(d.degrees, start=1)]
    while True:
        residual.sort(reverse=True)
        r, v = residual[0]
        if r == 0:
            break
        if r > len(residual) - 1:
            raise RuntimeError("internal realization failure")
        targets = residual[1:r + 1]
        if any(rv == 0 for rv, _ in targets):
            raise RuntimeError("internal realization failure")
        residual[0] = (0, v)
        for idx, (ru, u) in enumerate(targets, start=1):
            g.add_edge(v, u)
            residual[idx] = (ru - 1, u)
    if g.degrees() != d.degrees:
        raise RuntimeError("internal realization failure")
    return g


def switch_step(g: LabeledGraph, rng: random.Random,
                edges: list[tuple[int, int]] | None = None) -> LabeledGraph:
    """One double-edge-switch proposal, applied in place when accepted.

    Picks an ordered pair of distinct edges uniformly, flips the pairing with
    probability 1/2, and rejects (a chain self-loop) whenever the rewiring
    would create a loop or multi-edge.  Passing the current edge list keeps
    the step O(1); it is updated in place on acceptance.
    """
    if edges is None:
        edges = g.edge_list()
    m = len(edges)
    if m < 2:
        return g
    i = rng.randrange(m)
    j = rng.randrange(m - 1)
    if j >= i:
        j += 1
    a, b = edges[i]
    c, d_ = edges[j]
    if rng.random() < 0.5:
        c, d_ = d_, c
    if a == c or a == d_ or b == c or b == d_:
        return g
    if c in g.adj[a] or d_ in g.adj[b]:
        return g
    g.remove_edge(a, b)
    g.remove_edge(c, d_)
    g.add_edge(a, c)
    g.add_edge(b, d_)
    edges[i] = (a, c) if a < c else (c, a)
    edges[j] = (b, d_) if b < d_ else (d_, b)
    return g


@dataclass(frozen=True)
class SampleConfig:
    samples: int = 10_000
    burn_in: int | None = None     # default 10 * E * ln(E) switch steps
    thinning: int | None = None    # default E steps between samples
    seed: int = DEFAULT_SEED
    batches: int = 20
    check_invariants: bool = False


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int
    burn_in: int
    thinning: int
    seed: int


def _event_checker(X: ForbiddenGraph, mode: str, m: int | None):
    edges = X.sorted_edges()
    if mode == "miss":
        def check(g: LabeledGraph) -> bool:
            return all(k not in g.adj[j] for j, k in edges)
    elif mode == "hit":
        def check(g: LabeledGraph) -> bool:
            return all(k in g.adj[j] for j, k in edges)
    elif mode == "induced":
        if m is None:
            raise ValueError("induced mode requires m")
        x = X.row_sums
        for j in range(m, X.n):
            if x[j] != 0:
                raise ValueError(f"support violation: x_{j + 1} != 0 with m={m}")
        wanted = set(edges)

        def check(g: LabeledGraph) -> bool:
            for j in range(1, m + 1):
                for k in range(j + 1, m + 1):
                    if ((j, k) in wanted) != (k in g.adj[j]):
                        return False
            return True
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return check


def estimate_probability(d: DegreeSequence, X: ForbiddenGraph, mode: str,
                         cfg: SampleConfig = SampleConfig(),
                         m: int | None = None) -> MCEstimate:
    """Empirical frequency of the miss/hit/induced event over the switch chain.

    Deterministic for a fixed config (including seed).  The standard error
    comes from batch means over the thinned sample stream.
    """
    if d.n != X.n:
        raise ValueError("dimension mismatch")
    if cfg.samples < 1:
        raise ValueError("need samples >= 1")
    check = _event_checker(X, mode, m)
    g = realize(d)
    edges = g.edge_list()
    E = len(edges)
    burn_in = cfg.burn_in if cfg.burn_in is not None else (
        int(10 * E * math.log(E)) if E > 1 else 0)
    thinning = cfg.thinning if cfg.thinning is not None else max(E, 1)
    rng = random.Random(cfg.seed)

    adj = g.adj
    mixed = [0.0] * cfg.samples
    uniform = rng.random
    randrange = rng.randrange
    me = len(edges)
    reference = d.degrees if cfg.check_invariants else None

    def run_steps(count: int) -> None:
        for _ in range(count):
            if me < 2:
                return
            i = randrange(me)
            j = randrange(me - 1)
            if j >= i:
                j += 1
            a, b = edges[i]
            c, d_ = edges[j]
            if uniform() < 0.5:
                c, d_ = d_, c
            if a == c or a == d_ or b == c or b == d_:
                continue
            adj_a = adj[a]
            adj_b = adj[b]
            if c in adj_a or d_ in adj_b:
                continue
            adj_a.remove(b)
            adj[b].remove(a)
            adj[c].remove(d_)
            adj[d_].remove(c)
            adj_a.add(c)
            adj[c].add(a)
            adj_b.add(d_)
            adj[d_].add(b)
            edges[i] = (a, c) if a < c else (c, a)
            edges[j] = (b, d_) if b < d_ else (d_, b)
            if reference is not None and g.degrees() != reference:
                raise RuntimeError("switch step broke the degree sequence")

    run_steps(burn_in)
    for s in range(cfg.samples):
        run_steps(thinning)
        mixed[s] = 1.0 if check(g) else 0.0

    values = np.asarray(mixed)
    mean = float(values.mean())
    nb = max(1, min(cfg.batches, cfg.samples))
    batch_means = np.array([chunk.mean() for chunk in np.array_split(values, nb)])
    if nb > 1:
        stderr = float(batch_means.std(ddof=1) / math.sqrt(nb))
    else:
        stderr = float("nan")
    return MCEstimate(mean=mean, stderr=stderr, samples=cfg.samples,
                      burn_in=burn_in, thinning=thinning, seed=cfg.seed)
