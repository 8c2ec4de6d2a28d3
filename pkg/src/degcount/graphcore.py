"""Domain types for degree-constrained graph counting.

Holds the target degree sequence, the forbidden graph, and every derived
scalar parameter the estimate evaluators consume.  Averages, densities and
the moment-style parameters are kept as exact rationals so that algebraic
identities between them (for example sum(delta) = 2*lambda*X) survive into
the test suite bit-for-bit; evaluators convert to float at the point of use.

Vertices are 1-indexed throughout the public API, including edge lists and
the file formats parsed here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class InputFormatError(ValueError):
    """Malformed input; carries the source path and 1-based line number."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}: " if line is None else f"{path}:{line}: "
        super().__init__(f"{loc}{message}")
        self.path = path
        self.line = line


@dataclass(frozen=True)
class DegreeSequence:
    """Target degrees d = (d_1, ..., d_n) with even sum, 0 <= d_j <= n-1."""

    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(v) for v in self.degrees))
        n = len(self.degrees)
        if n < 1:
            raise ValueError("degree sequence must be non-empty")
        for j, dj in enumerate(self.degrees, start=1):
            if dj < 0 or dj > n - 1:
                raise ValueError(f"degree d_{j}={dj} outside [0, {n - 1}]")
        if sum(self.degrees) % 2 != 0:
            raise ValueError("degree sum must be even")

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def edge_count(self) -> int:
        """Number of edges E of any realization."""
        return sum(self.degrees) // 2

    def is_regular(self) -> bool:
        return len(set(self.degrees)) == 1


@dataclass(frozen=True)
class ForbiddenGraph:
    """Simple graph X whose edges the counted graphs must avoid.

    Edges are stored once each as (j, k) pairs with 1 <= j < k <= n; no
    self-loops.  row_sums gives x_j, the X-degree of each vertex.
    """

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        norm = set()
        for e in self.edges:
            j, k = e
            if j == k:
                raise ValueError(f"self-loop ({j},{k}) not allowed")
            if not (1 <= j <= self.n and 1 <= k <= self.n):
                raise ValueError(f"edge ({j},{k}) outside vertex range 1..{self.n}")
            norm.add((j, k) if j < k else (k, j))
        object.__setattr__(self, "edges", frozenset(norm))
        rs = [0] * self.n
        nbrs: dict[int, set[int]] = {v: set() for v in range(1, self.n + 1)}
        for j, k in self.edges:
            rs[j - 1] += 1
            rs[k - 1] += 1
            nbrs[j].add(k)
            nbrs[k].add(j)
        object.__setattr__(self, "_row_sums", tuple(rs))
        object.__setattr__(self, "_neighbors", {v: frozenset(s) for v, s in nbrs.items()})

    @classmethod
    def empty(cls, n: int) -> "ForbiddenGraph":
        return cls(n, frozenset())

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "ForbiddenGraph":
        return cls(n, frozenset((int(j), int(k)) for j, k in pairs))

    @classmethod
    def clique(cls, n: int, m: int) -> "ForbiddenGraph":
        """Complete graph on vertices 1..m, isolated vertices m+1..n."""
        if not 0 <= m <= n:
            raise ValueError("clique order must be within 0..n")
        return cls(n, frozenset((j, k) for j in range(1, m + 1) for k in range(j + 1, m + 1)))

    @property
    def row_sums(self) -> tuple[int, ...]:
        return self._row_sums  # type: ignore[attr-defined]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, j: int) -> frozenset[int]:
        return self._neighbors[j]  # type: ignore[attr-defined]

    def has_edge(self, j: int, k: int) -> bool:
        return ((j, k) if j < k else (k, j)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class Parameters:
    """Every scalar/sequence parameter derived from (d, X).

    All rational quantities are exact Fractions (ints where integral); the
    sparse-regime fields d_max/x_max/Delta_sparse ride along so the sparse
    and dense evaluators share one record.
    """

    n: int
    E: int
    d_avg: Fraction
    lam: Fraction
    A: Fraction
    A3: Fraction
    A4: Fraction
    delta: tuple[Fraction, ...]
    dev: tuple[Fraction, ...]
    B_seq: tuple[Fraction, ...]
    R: Fraction
    R1: Fraction
    R2: Fraction
    R3: Fraction
    R4: Fraction
    X2: int
    X3: int
    D: Fraction
    H: int
    L: Fraction
    K: Fraction
    C11: Fraction
    C12: Fraction
    C21: Fraction
    d_max: int
    x_max: int
    Delta_sparse: int


def compute_parameters(d: DegreeSequence, X: ForbiddenGraph) -> Parameters:
    """Populate a Parameters record from a degree sequence and forbidden graph.

    Pure and deterministic; raises on dimension mismatch or n < 2.
    """
    if d.n != X.n:
        raise ValueError(f"dimension mismatch: degrees n={d.n}, forbidden n={X.n}")
    n = d.n
    if n < 2:
        raise ValueError("need n >= 2")
    E = d.edge_count
    d_avg = Fraction(2 * E, n)
    lam = d_avg / (n - 1)
    A = lam * (1 - lam) / 2
    A3 = lam * (1 - lam) * (1 - 2 * lam) / 6
    A4 = lam * (1 - lam) * (1 - 6 * lam + 6 * lam * lam) / 24

    x = X.row_sums
    delta = tuple(dj - d_avg + lam * xj for dj, xj in zip(d.degrees, x))
    B_seq = tuple(
        sum((delta[k - 1] for k in X.neighbors(j)), start=Fraction(0))
        for j in range(1, n + 1)
    )
    dev = tuple(dj - d_avg for dj in d.degrees)

    R = sum((t * t for t in dev), start=Fraction(0))
    R1 = sum(delta, start=Fraction(0))
    R2 = sum((t * t for t in delta), start=Fraction(0))
    R3 = sum((t ** 3 for t in delta), start=Fraction(0))
    R4 = sum((t ** 4 for t in delta), start=Fraction(0))
    X2 = sum(xj * xj for xj in x)
    X3 = sum(xj ** 3 for xj in x)

    D = Fraction(0)
    H = 0
    L = Fraction(0)
    K = Fraction(0)
    for j, k in X.edges:
        dj, dk = delta[j - 1], delta[k - 1]
        D += dj * dk
        H += x[j - 1] * x[k - 1]
        L += (dj - x[j - 1]) * (dk - x[k - 1])
        K += dev[j - 1] * dev[k - 1]

    C11 = sum((delta[j] * x[j] for j in range(n)), start=Fraction(0))
    C12 = sum((delta[j] * x[j] ** 2 for j in range(n)), start=Fraction(0))
    C21 = sum((delta[j] ** 2 * x[j] for j in range(n)), start=Fraction(0))

    d_max = max(d.degrees)
    x_max = max(x) if x else 0
    return Parameters(
        n=n, E=E, d_avg=d_avg, lam=lam, A=A, A3=A3, A4=A4,
        delta=delta, dev=dev, B_seq=B_seq,
        R=R, R1=R1, R2=R2, R3=R3, R4=R4, X2=X2, X3=X3,
        D=D, H=H, L=L, K=K, C11=C11, C12=C12, C21=C21,
        d_max=d_max, x_max=x_max, Delta_sparse=d_max * (d_max + x_max),
    )


@dataclass(frozen=True)
class InducedSpec:
    """Mixed moments over the support vertices 1..m of the forbidden graph.

    omega[(k, l)] = sum_{j<=m} (d_j - d_avg)^k (x_j - lambda*(m-1))^l,
    tabulated for all 0 <= k + l <= 3.
    """

    m: int
    omega: Mapping[tuple[int, int], Fraction]


def induced_spec(d: DegreeSequence, X: ForbiddenGraph, m: int) -> InducedSpec:
    """Build the omega-moment table for a forbidden graph supported on 1..m.

    Raises if some x_j != 0 for j > m (the support condition).
    """
    if d.n != X.n:
        raise ValueError("dimension mismatch")
    if not 0 <= m <= d.n:
        raise ValueError(f"m={m} outside 0..{d.n}")
    x = X.row_sums
    for j in range(m, d.n):
        if x[j] != 0:
            raise ValueError(f"support violation: x_{j + 1}={x[j]} but m={m}")
    p = compute_parameters(d, X)
    shift = p.lam * (m - 1) if m >= 1 else Fraction(0)
    omega: dict[tuple[int, int], Fraction] = {}
    for k in range(0, 4):
        for l in range(0, 4 - k):
            omega[(k, l)] = sum(
                ((d.degrees[j] - p.d_avg) ** k * (x[j] - shift) ** l for j in range(m)),
                start=Fraction(0),
            )
    return InducedSpec(m=m, omega=omega)


def relabel(d: DegreeSequence, X: ForbiddenGraph, perm: Sequence[int]) -> tuple[DegreeSequence, ForbiddenGraph]:
    """Apply a vertex permutation to both d and X.

    perm[j-1] is the new label of vertex j (1-indexed bijection).
    """
    n = d.n
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError("perm must be a bijection of 1..n")
    deg2 = [0] * n
    for j in range(1, n + 1):
        deg2[perm[j - 1] - 1] = d.degrees[j - 1]
    edges2 = [(perm[j - 1], perm[k - 1]) for j, k in X.edges]
    return DegreeSequence(tuple(deg2)), ForbiddenGraph.from_pairs(n, edges2)


# ---------------------------------------------------------------------------
# File formats.
#
# Degree sequence: one integer per line, or a JSON array.  Forbidden graph:
# one "j k" pair per line, 1-indexed.  Blank lines are ignored.  Both formats
# round-trip through the writers below.


def parse_degrees(text: str, path: str | None = None) -> DegreeSequence:
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            values = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"invalid JSON degree array: {exc}", path) from exc
        if not isinstance(values, list) or not all(isinstance(v, int) for v in values):
            raise InputFormatError("JSON degree input must be an array of integers", path)
        degrees = values
    else:
        degrees = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            token = line.strip()
            if not token:
                continue
            try:
                degrees.append(int(token))
            except ValueError as exc:
                raise InputFormatError(f"expected one integer, got {token!r}", path, lineno) from exc
        if not degrees:
            raise InputFormatError("no degrees found", path)
    try:
        return DegreeSequence(tuple(degrees))
    except ValueError as exc:
        raise InputFormatError(str(exc), path) from exc


def read_degrees(path: str) -> DegreeSequence:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_degrees(fh.read(), path)


def write_degrees(path: str, d: DegreeSequence) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for dj in d.degrees:
            fh.write(f"{dj}\n")


def parse_edges(text: str, n: int, path: str | None = None) -> ForbiddenGraph:
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        token = line.strip()
        if not token:
            continue
        parts = token.split()
        if len(parts) != 2:
            raise InputFormatError(f"expected 'j k', got {token!r}", path, lineno)
        try:
            j, k = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise InputFormatError(f"non-integer endpoint in {token!r}", path, lineno) from exc
        if j == k:
            raise InputFormatError(f"self-loop {j} {k}", path, lineno)
        if not (1 <= j <= n and 1 <= k <= n):
            raise InputFormatError(f"endpoint outside 1..{n} in {token!r}", path, lineno)
        key = (j, k) if j < k else (k, j)
        if key in seen:
            raise InputFormatError(f"duplicate edge {j} {k}", path, lineno)
        seen.add(key)
        pairs.append(key)
    return ForbiddenGraph.from_pairs(n, pairs)


def read_edges(path: str, n: int) -> ForbiddenGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edges(fh.read(), n, path)


def write_edges(path: str, X: ForbiddenGraph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for j, k in X.sorted_edges():
            fh.write(f"{j} {k}\n")
