"""Closed-form dense-regime estimates: counts, subgraph probabilities,
induced-subgraph probabilities, overlap distribution, sparse-regime counts
and regular-graph expectations.

Every estimate is returned in log space as a LogEstimate carrying the factor
outside the exponential (base_log), the exponent (correction) broken into
named terms, and an error-order annotation.  Exponentiation is caller-side:
the linear values overflow doubles around n = 40.  Hypothesis checking is
advisory only; desk-scale instances always violate asymptotic hypotheses, so
validity is reported, never enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lgamma, log, log1p

from .graphcore import (
    DegreeSequence,
    ForbiddenGraph,
    Parameters,
    compute_parameters,
    induced_spec,
)

NEG_INF = float("-inf")


@dataclass(frozen=True)
class LogEstimate:
    """A log-scale value split as base factor plus exponential correction."""

    log_value: float
    base_log: float
    correction: float
    error_order: str
    terms: tuple[tuple[str, float], ...] = ()

    @classmethod
    def build(cls, base_log: float, terms: tuple[tuple[str, float], ...],
              error_order: str) -> "LogEstimate":
        correction = math.fsum(v for _, v in terms)
        return cls(log_value=base_log + correction, base_log=base_log,
                   correction=correction, error_order=error_order, terms=terms)

    def term(self, name: str) -> float:
        for key, value in self.terms:
            if key == name:
                return value
        raise KeyError(name)


@dataclass(frozen=True)
class HypothesisFlag:
    hypothesis: str
    measured: float
    bound: float


@dataclass(frozen=True)
class ValidityReport:
    """Violated dense-regime hypotheses with their measured magnitudes."""

    flags: tuple[HypothesisFlag, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.flags


def _xlogx(t: float) -> float:
    # continuous extension 0*log(0) = 0 at the lambda in {0,1} boundary
    return 0.0 if t == 0.0 else t * log(t)


def _log_binom(n: int, k: int) -> float:
    if k < 0 or k > n or n < 0:
        return NEG_INF
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


def _f(v) -> float:
    return float(v)


def check_hypotheses(d: DegreeSequence, X: ForbiddenGraph, p: Parameters | None = None,
                     a: float = 0.3, b: float = 0.1) -> ValidityReport:
    """Advisory check of the dense-regime hypotheses with constants a, b.

    No explicit epsilon(a, b) accompanies the hypotheses, so degree
    deviations and forbidden-degree budgets are measured against n^(1/2)
    and the forbidden edge total against n (the epsilon -> 0 reading).
    """
    if p is None:
        p = compute_parameters(d, X)
    n = d.n
    flags: list[HypothesisFlag] = []
    dev = max(abs(dj - _f(p.d_avg)) for dj in d.degrees)
    if dev > math.sqrt(n):
        flags.append(HypothesisFlag("max|d_j - d| <= n^(1/2)", dev, math.sqrt(n)))
    if p.x_max > math.sqrt(n):
        flags.append(HypothesisFlag("max x_j <= n^(1/2)", float(p.x_max), math.sqrt(n)))
    if X.edge_count > n:
        flags.append(HypothesisFlag("X <= n", float(X.edge_count), float(n)))
    if n > 2:
        window = n / (3.0 * a * math.log(n))
        measured = min(_f(p.d_avg), n - _f(p.d_avg) - 1.0)
        if measured < window:
            flags.append(HypothesisFlag("min{d, n-d-1} >= n/(3a log n)", measured, window))
    return ValidityReport(flags=tuple(flags))


def naive_estimate(p: Parameters, d: DegreeSequence, X: ForbiddenGraph) -> LogEstimate:
    """Independence-heuristic count guess, in log space.

    ln of (1-lambda)^(-X) (lambda^lambda (1-lambda)^(1-lambda))^C(n,2)
    prod_j C(n-1-x_j, d_j).  Infeasible degrees signal a zero count with a
    log value of -inf.
    """
    n = d.n
    x = X.row_sums
    if any(dj > n - 1 - xj for dj, xj in zip(d.degrees, x)):
        return LogEstimate(NEG_INF, NEG_INF, 0.0, "count is zero", ())
    lam = _f(p.lam)
    Xc = X.edge_count
    t_forbidden = 0.0 if Xc == 0 else -Xc * log1p(-lam)
    t_entropy = comb(n, 2) * (_xlogx(lam) + _xlogx(1.0 - lam))
    t_binom = math.fsum(_log_binom(n - 1 - xj, dj) for dj, xj in zip(d.degrees, x))
    total = t_forbidden + t_entropy + t_binom
    return LogEstimate(log_value=total, base_log=total, correction=0.0,
                       error_order="heuristic (independent-degree guess)",
                       terms=(("forbidden", t_forbidden), ("entropy", t_entropy),
                              ("binomials", t_binom)))


def dense_count_estimate(d: DegreeSequence, X: ForbiddenGraph | None = None, *,
                         a: float = 0.3, b: float = 0.1) -> tuple[LogEstimate, ValidityReport]:
    """Dense-regime count estimate sqrt(2) * guess * exp(correction).

    correction = 1/4 - R^2/(16 A^2 n^4) + lambda X^2/((1-lambda) n^2)
    - D/(2 A n^2).  The validity report flags violated hypotheses without
    refusing to evaluate.
    """
    if X is None:
        X = ForbiddenGraph.empty(d.n)
    p = compute_parameters(d, X)
    report = check_hypotheses(d, X, p, a=a, b=b)
    lam = _f(p.lam)
    if lam <= 0.0 or lam >= 1.0:
        raise ValueError(f"degenerate density lambda={lam}")
    ghat = naive_estimate(p, d, X)
    if ghat.log_value == NEG_INF:
        return LogEstimate(NEG_INF, NEG_INF, 0.0, "count is zero", ()), report
    n = d.n
    A = _f(p.A)
    Xc = X.edge_count
    terms = (
        ("quarter", 0.25),
        ("degree_spread", -_f(p.R) ** 2 / (16.0 * A * A * n ** 4)),
        ("forbidden_sq", lam * Xc * Xc / ((1.0 - lam) * n * n)),
        ("forbidden_dd", -_f(p.D) / (2.0 * A * n * n)),
    )
    base = 0.5 * log(2.0) + ghat.log_value
    return LogEstimate.build(base, terms, f"O(n^-{b:g})"), report


def miss_hit_estimate(d: DegreeSequence, X: ForbiddenGraph, *, b: float = 0.1) -> dict[str, LogEstimate]:
    """Normalized avoidance/containment probabilities and the count exponential.

    miss and hit carry the full term-by-term expansions (base_log = 0); num is
    the exponential factor of the dense count estimate.
    """
    p = compute_parameters(d, X)
    lam = _f(p.lam)
    if lam <= 0.0 or lam >= 1.0:
        raise ValueError(f"degenerate density lambda={lam}")
    n = d.n
    A = _f(p.A)
    Xc = X.edge_count
    X2, X3 = float(p.X2), float(p.X3)
    D, L = _f(p.D), _f(p.L)
    C11, C12, C21 = _f(p.C11), _f(p.C12), _f(p.C21)
    om = 1.0 - lam
    order = f"O(n^-{b:g})"

    miss_terms = (
        ("X", lam * Xc / (om * n)),
        ("X2", lam * X2 / (2.0 * om * n)),
        ("X3", lam * (1.0 - 2.0 * lam) * X3 / (6.0 * om * om * n * n)),
        ("Xsq", lam * Xc * Xc / (om * n * n)),
        ("D", -D / (lam * om * n * n)),
        ("C11", -C11 / (om * n)),
        ("C12", -(1.0 - 2.0 * lam) * C12 / (2.0 * om * om * n * n)),
        ("C21", -C21 / (2.0 * om * om * n * n)),
    )
    hit_terms = (
        ("X", om * Xc / (lam * n)),
        ("X2", -(1.0 + lam) * X2 / (2.0 * lam * n)),
        ("X3", -(1.0 + lam) * (1.0 + 2.0 * lam) * X3 / (6.0 * lam * lam * n * n)),
        ("Xsq", om * Xc * Xc / (lam * n * n)),
        ("L", -L / (lam * om * n * n)),
        ("C11", C11 / (lam * n)),
        ("C12", (1.0 + 2.0 * lam) * C12 / (2.0 * lam * lam * n * n)),
        ("C21", -C21 / (2.0 * lam * lam * n * n)),
    )
    num_terms = (
        ("quarter", 0.25),
        ("degree_spread", -_f(p.R) ** 2 / (16.0 * A * A * n ** 4)),
        ("forbidden_sq", lam * Xc * Xc / (om * n * n)),
        ("forbidden_dd", -D / (2.0 * A * n * n)),
    )
    return {
        "miss": LogEstimate.build(0.0, miss_terms, order),
        "hit": LogEstimate.build(0.0, hit_terms, order),
        "num": LogEstimate.build(0.0, num_terms, order),
    }


def specialized_estimates(d: DegreeSequence, X: ForbiddenGraph, case: str, *,
                          b: float = 0.1) -> dict[str, LogEstimate]:
    """Specialized displays: case "flat" for constant degrees, "reg" for
    constant forbidden degrees x_j."""
    p = compute_parameters(d, X)
    lam = _f(p.lam)
    if lam <= 0.0 or lam >= 1.0:
        raise ValueError(f"degenerate density lambda={lam}")
    n = d.n
    A = _f(p.A)
    Xc = X.edge_count
    om = 1.0 - lam
    order = f"O(n^-{b:g})"

    if case == "flat":
        if not d.is_regular():
            raise ValueError("flat case requires constant degrees")
        X2, X3, H = float(p.X2), float(p.X3), float(p.H)
        num_terms = (
            ("quarter", 0.25),
            ("Xsq_H", lam * (Xc * Xc - H) / (om * n * n)),
        )
        miss_terms = (
            ("X", lam * Xc / (om * n)),
            ("X2", -lam * X2 / (2.0 * om * n)),
            ("X3", -lam * (2.0 - lam) * X3 / (6.0 * om * om * n * n)),
            ("Xsq", lam * Xc * Xc / (om * n * n)),
            ("H", -lam * H / (om * n * n)),
        )
        hit_terms = (
            ("X", om * Xc / (lam * n)),
            ("X2", -om * X2 / (2.0 * lam * n)),
            ("X3", -(1.0 - lam * lam) * X3 / (6.0 * lam * lam * n * n)),
            ("Xsq", om * Xc * Xc / (lam * n * n)),
            ("H", -om * H / (lam * n * n)),
        )
    elif case == "reg":
        xs = set(X.row_sums)
        if len(xs) != 1:
            raise ValueError("reg case requires constant x_j")
        xv = float(xs.pop())
        R = _f(p.R)
        K = _f(p.K)
        num_terms = (
            ("quarter", 0.25),
            ("xsq", lam * xv * xv / (4.0 * om)),
            ("K", -K / (2.0 * A * n * n)),
            ("degree_spread", -R * R / (16.0 * A * A * n ** 4)),
        )
        miss_terms = (
            ("x(x-2)", -lam * xv * (xv - 2.0) / (4.0 * om)),
            ("xR", -xv * R / (2.0 * om * om * n * n)),
            ("K", -K / (2.0 * A * n * n)),
        )
        hit_terms = (
            ("x(x-2)", -om * xv * (xv - 2.0) / (4.0 * lam)),
            ("xR", -xv * R / (2.0 * lam * lam * n * n)),
            ("K", -K / (2.0 * A * n * n)),
        )
    else:
        raise ValueError(f"unknown case {case!r}")
    return {
        "num": LogEstimate.build(0.0, num_terms, order),
        "miss": LogEstimate.build(0.0, miss_terms, order),
        "hit": LogEstimate.build(0.0, hit_terms, order),
    }


def lambda_jk_expansion(p: Parameters, j: int, k: int) -> float:
    """Pairwise edge weight of the independent-edge model matching d.

    lambda + (d_j-d)/n + (d_k-d)/n + (1-2 lambda)(d_j-d)(d_k-d)/(2 A n^2),
    vertices 1-indexed.
    """
    if j == k:
        raise ValueError("need j != k")
    n = p.n
    lam = _f(p.lam)
    A = _f(p.A)
    dj = _f(p.dev[j - 1])
    dk = _f(p.dev[k - 1])
    # grouped so the value is bit-for-bit symmetric in (j, k)
    return lam + (dj + dk) / n + (1.0 - 2.0 * lam) * (dj * dk) / (2.0 * A * n * n)


def induced_estimate(d: DegreeSequence, X: ForbiddenGraph, m: int,
                     model: str = "full", *, b: float = 0.1) -> LogEstimate:
    """Probability that the restriction to vertices 1..m equals X exactly.

    model "full" evaluates the complete omega expansion, "leading" the
    two-term form, and "lambdaModel" the reduced expansion over the pairwise
    edge-weight base product.
    """
    spec = induced_spec(d, X, m)
    if m == 0:
        return LogEstimate.build(0.0, (), "exact")
    p = compute_parameters(d, X)
    lam = _f(p.lam)
    if lam <= 0.0 or lam >= 1.0:
        raise ValueError(f"degenerate density lambda={lam}")
    n = d.n
    A = _f(p.A)
    Xc = X.edge_count
    w = {key: _f(val) for key, val in spec.omega.items()}
    order = f"O(n^-{b:g})"

    if model in ("full", "leading"):
        base = 0.0
        if Xc:
            base += Xc * log(lam)
        free_pairs = comb(m, 2) - Xc
        if free_pairs:
            base += free_pairs * log1p(-lam)
    elif model in ("lambdaModel", "lambda-model"):
        base = 0.0
        for j in range(1, m + 1):
            for k in range(j + 1, m + 1):
                ljk = lambda_jk_expansion(p, j, k)
                base += log(ljk) if X.has_edge(j, k) else log1p(-ljk)
    else:
        raise ValueError(f"unknown model {model!r}")

    if model == "leading":
        terms = (
            ("w11", w[(1, 1)] / (2.0 * A * n)),
            ("w02", -w[(0, 2)] / (4.0 * A * n)),
        )
        return LogEstimate.build(base, terms, "o(1)")
    if model == "full":
        terms = (
            ("w11_w02", (2.0 * w[(1, 1)] - w[(0, 2)]) / (4.0 * A * n)),
            ("m2", m * m / (2.0 * n)),
            ("w01", (1.0 - 2.0 * lam) * w[(0, 1)] / (4.0 * A * n)),
            ("w10_w01", (4.0 * w[(1, 0)] * w[(0, 1)] - w[(0, 1)] ** 2 - 2.0 * w[(1, 0)] ** 2)
                / (8.0 * A * n * n)),
            ("mixed_m", (2.0 * w[(1, 1)] - w[(2, 0)] - w[(0, 2)]) * m / (4.0 * A * n * n)),
            ("third", -(1.0 - 2.0 * lam) * (w[(0, 3)] + 3.0 * w[(2, 1)] - 3.0 * w[(1, 2)])
                / (24.0 * A * A * n * n)),
        )
    else:
        terms = (
            ("w02", -w[(0, 2)] / (4.0 * A * n)),
            ("m2", m * m / (2.0 * n)),
            ("w01", (1.0 - 2.0 * lam) * w[(0, 1)] / (4.0 * A * n)),
            ("w10_w01", (4.0 * w[(1, 0)] * w[(0, 1)] - w[(0, 1)] ** 2) / (8.0 * A * n * n)),
            ("mixed_m", (2.0 * w[(1, 1)] - w[(0, 2)]) * m / (4.0 * A * n * n)),
            ("third", -(1.0 - 2.0 * lam) * (w[(0, 3)] - 3.0 * w[(1, 2)])
                / (24.0 * A * A * n * n)),
        )
    return LogEstimate.build(base, terms, order)


def overlap_distribution_estimate(d: DegreeSequence, Y: ForbiddenGraph, k: int) -> float:
    """Binomial reference law C(Y,k) lambda^k (1-lambda)^(Y-k) for the edge overlap.

    Normalization over k = 0..Y forces the exponent Y-k; no other exponent
    sums to one.
    """
    Yc = Y.edge_count
    if not 0 <= k <= Yc:
        raise ValueError(f"k={k} outside 0..{Yc}")
    p = compute_parameters(d, ForbiddenGraph.empty(d.n))
    lam = _f(p.lam)
    return comb(Yc, k) * lam ** k * (1.0 - lam) ** (Yc - k)


def sparse_estimates(d: DegreeSequence, X: ForbiddenGraph, which: str) -> LogEstimate:
    """Sparse-regime formulas: which = "perth" for the count of graphs with
    degrees d avoiding X, "mckay81" for the containment probability ratio."""
    n = d.n
    E = d.edge_count
    x = X.row_sums
    if which == "perth":
        if E < 1:
            raise ValueError("need E >= 1")
        base = (lgamma(2 * E + 1) - lgamma(E + 1) - E * log(2.0)
                - math.fsum(lgamma(dj + 1) for dj in d.degrees))
        s = sum(dj * (dj - 1) for dj in d.degrees)
        forb = sum(d.degrees[j - 1] * d.degrees[k - 1] for j, k in X.edges)
        terms = (
            ("degree_pairs", -s / (4.0 * E)),
            ("degree_pairs_sq", -(s * s) / (16.0 * E * E)),
            ("forbidden_dd", -forb / (2.0 * E)),
        )
        return LogEstimate.build(base, terms, "O(Delta^2/E)")
    if which == "mckay81":
        Xc = X.edge_count
        if Xc > E:
            raise ValueError("need X <= E")
        if any(dj < xj for dj, xj in zip(d.degrees, x)):
            return LogEstimate(NEG_INF, NEG_INF, 0.0, "ratio is zero", ())
        base = math.fsum(lgamma(dj + 1) - lgamma(dj - xj + 1)
                         for dj, xj in zip(d.degrees, x))
        base -= Xc * log(2.0)
        base -= lgamma(E + 1) - lgamma(E - Xc + 1)
        return LogEstimate(base, base, 0.0, "O(Delta*X/E)", ())
    raise ValueError(f"unknown sparse formula {which!r}")


def regular_graph_expectations(n: int, d_const: int, target: str,
                               q: int | None = None, *, b: float = 0.1) -> LogEstimate:
    """Expected substructure counts in a random regular graph, in log space.

    target "matchings" (n even), "cycles" (length q, 3 <= q <= n) or
    "spanningTrees".  The base factor is the expectation for an ordinary
    random graph at the same density.
    """
    if not 1 <= d_const <= n - 1:
        raise ValueError("need 1 <= d <= n-1")
    lam = Fraction(d_const, n - 1)
    lamf = float(lam)
    order = f"O(n^-{b:g})"
    if target == "matchings":
        if n % 2:
            raise ValueError("perfect matchings need even n")
        base = (n / 2.0) * log(lamf) + lgamma(n + 1) - (n / 2.0) * log(2.0) - lgamma(n / 2 + 1)
        terms = (("degree_ratio", (1.0 - lamf) / (4.0 * lamf)),)
        return LogEstimate.build(base, terms, order)
    if target == "cycles":
        if q is None or not 3 <= q <= n:
            raise ValueError("cycles need 3 <= q <= n")
        base = q * log(lamf) + lgamma(n + 1) - log(2.0 * q) - lgamma(n - q + 1)
        terms = (("length_split", -(1.0 - lamf) * q * (n - q) / (lamf * n * n)),)
        return LogEstimate.build(base, terms, order)
    if target in ("spanningTrees", "sptrees"):
        base = (n - 2) * log(float(n)) + (n - 1) * log(lamf)
        terms = (("degree_ratio", 7.0 * (1.0 - lamf) / (2.0 * lamf)),)
        return LogEstimate.build(base, terms, order)
    raise ValueError(f"unknown target {target!r}")
