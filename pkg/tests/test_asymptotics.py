import math
from fractions import Fraction

import pytest

from degcount.graphcore import DegreeSequence, ForbiddenGraph, compute_parameters
from degcount.exactcount import exact_count, exact_probability
from degcount.asymptotics import (
    NEG_INF,
    check_hypotheses,
    dense_count_estimate,
    induced_estimate,
    lambda_jk_expansion,
    miss_hit_estimate,
    naive_estimate,
    overlap_distribution_estimate,
    regular_graph_expectations,
    sparse_estimates,
    specialized_estimates,
)


def fg(n, pairs):
    return ForbiddenGraph.from_pairs(n, pairs)


def params(degrees, pairs=()):
    d = DegreeSequence(degrees)
    X = fg(len(degrees), pairs)
    return d, X, compute_parameters(d, X)


# ------------------------------------------------------------ naive estimate

def test_naive_empty_graph_limit_convention():
    d, X, p = params((0, 0))
    assert naive_estimate(p, d, X).log_value == 0.0


def test_naive_regular_value():
    d, X, p = params((2, 2, 2, 2))
    lam = 2 / 3
    want = 6 * (lam * math.log(lam) + (1 - lam) * math.log(1 - lam)) + 4 * math.log(3)
    assert naive_estimate(p, d, X).log_value == pytest.approx(want, abs=1e-13)


def test_naive_with_forbidden_edge():
    d, X, p = params((2, 2, 2, 2), [(1, 2)])
    lam = 2 / 3
    want = (-math.log(1 - lam)
            + 6 * (lam * math.log(lam) + (1 - lam) * math.log(1 - lam))
            + 2 * math.log(1) + 2 * math.log(3))
    assert naive_estimate(p, d, X).log_value == pytest.approx(want, abs=1e-13)


def test_naive_infeasible_signals_zero():
    d, X, p = params((3, 1, 1, 1), [(1, 2)])
    assert naive_estimate(p, d, X).log_value == NEG_INF


# ------------------------------------------------------- dense count estimate

def test_dense_regular_correction_is_quarter():
    d = DegreeSequence((2, 2, 2, 2))
    est, report = dense_count_estimate(d)
    assert est.correction == 0.25
    assert est.log_value == est.base_log + est.correction


def test_dense_finite_n_discrepancy_reported_not_asserted():
    d = DegreeSequence((2, 2, 2, 2))
    est, _ = dense_count_estimate(d)
    gap = abs(est.log_value - math.log(3))
    assert 0 < gap < 0.2   # reported magnitude, desk-scale n


def test_dense_trend_with_and_without_edge():
    for pairs in ([], [(1, 2)]):
        errs = []
        for n in (8, 10, 12):
            d = DegreeSequence((n // 2,) * n)
            X = fg(n, pairs)
            G = exact_count(d, X, limit=12)
            est, _ = dense_count_estimate(d, X)
            errs.append(abs(math.log(G) - est.log_value))
        assert errs[0] >= errs[1] >= errs[2]


def test_validity_flags_on_desk_scale():
    d = DegreeSequence((2, 2, 2, 2))
    report = check_hypotheses(d, ForbiddenGraph.empty(4))
    assert not report.ok   # density window fails at n=4
    names = [f.hypothesis for f in report.flags]
    assert any("3a log" in h for h in names)
    # a large balanced instance passes every hypothesis
    d2 = DegreeSequence((50,) * 101)
    assert check_hypotheses(d2, ForbiddenGraph.empty(101)).ok


# ------------------------------------------------------------------ miss/hit

def test_miss_hit_empty_forbidden_exactly_one():
    d = DegreeSequence((3, 2, 2, 2, 2, 1))
    mh = miss_hit_estimate(d, ForbiddenGraph.empty(6))
    assert mh["miss"].log_value == 0.0
    assert mh["hit"].log_value == 0.0


def test_miss_terms_against_independent_arithmetic():
    # regular d, one forbidden edge; every displayed term recomputed from
    # scratch with rational arithmetic
    n, dv = 100, 50
    d = DegreeSequence((dv,) * n)
    X = fg(n, [(1, 2)])
    mh = miss_hit_estimate(d, X)
    lam = Fraction(dv, n - 1)
    om = 1 - lam
    delta = lam  # delta_j = lam * x_j, x_j = 1 on the edge
    expected = {
        "X": lam / (om * n),
        "X2": lam * 2 / (2 * om * n),
        "X3": lam * (1 - 2 * lam) * 2 / (6 * om ** 2 * n ** 2),
        "Xsq": lam / (om * n ** 2),
        "D": -(delta * delta) / (lam * om * n ** 2),
        "C11": -(2 * delta) / (om * n),
        "C12": -(1 - 2 * lam) * (2 * delta) / (2 * om ** 2 * n ** 2),
        "C21": -(2 * delta ** 2) / (2 * om ** 2 * n ** 2),
    }
    for name, value in mh["miss"].terms:
        assert value == pytest.approx(float(expected[name]), abs=1e-15), name


def test_complement_duality_shrinks_with_n():
    # (1-lam)^X miss(d,X) and lam'^X hit(d',X) agree up to the error order;
    # the base factors cancel exactly, so compare the corrections on a sweep
    gaps = []
    for n in (50, 100, 200):
        dv = n // 2
        d = DegreeSequence((dv,) * n)
        dc = DegreeSequence((n - 1 - dv,) * n)
        X = fg(n, [(1, 2), (3, 4)])
        miss_corr = miss_hit_estimate(d, X)["miss"].correction
        hit_corr = miss_hit_estimate(dc, X)["hit"].correction
        gaps.append(abs(miss_corr - hit_corr))
    assert gaps[0] > gaps[1] > gaps[2]


def test_degenerate_density_rejected():
    d = DegreeSequence((2, 2, 2))
    with pytest.raises(ValueError):
        miss_hit_estimate(d, ForbiddenGraph.empty(3))


# ------------------------------------------------------ specialized evaluators

def test_flat_equals_general_for_constant_degrees():
    # the constant-degree display is an exact specialization: no discarded terms
    d = DegreeSequence((3,) * 8)
    X = fg(8, [(1, 2), (2, 3)])
    gen = miss_hit_estimate(d, X)
    flat = specialized_estimates(d, X, "flat")
    for key in ("miss", "hit", "num"):
        assert flat[key].correction == pytest.approx(gen[key].correction, abs=1e-14)


def test_flat_empty_num_is_quarter():
    d = DegreeSequence((3,) * 8)
    flat = specialized_estimates(d, ForbiddenGraph.empty(8), "flat")
    assert flat["num"].correction == 0.25


def test_reg_cycle_cover_miss_is_one():
    # x = 2 everywhere (disjoint cycles) on regular d: R = K = 0 and x(x-2) = 0
    d = DegreeSequence((3,) * 6)
    X = fg(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6)])
    reg = specialized_estimates(d, X, "reg")
    assert reg["miss"].correction == 0.0
    assert reg["hit"].correction == 0.0


def test_reg_discards_exactly_the_higher_order_terms():
    # difference general - reg equals the four discarded contributions,
    # reconstructed from the same parameter record
    degrees = (5, 4, 4, 4, 4, 4, 4, 4, 4, 5)
    pairs = [(1, 2), (3, 4), (5, 6), (7, 8), (9, 10)]   # x_j = 1 constant
    d = DegreeSequence(degrees)
    X = fg(10, pairs)
    p = compute_parameters(d, X)
    gen = miss_hit_estimate(d, X)
    reg = specialized_estimates(d, X, "reg")
    n = 10
    lam, om = float(p.lam), 1 - float(p.lam)
    x = 1.0
    discarded_miss = (
        lam * (1 - 2 * lam) * float(p.X3) / (6 * om * om * n * n)
        - (1 - 2 * lam) * float(p.C12) / (2 * om * om * n * n)
        - (float(p.C21) - x * float(p.R)) / (2 * om * om * n * n)
        - (float(p.D) - float(p.K)) / (lam * om * n * n)
    )
    got = gen["miss"].correction - reg["miss"].correction
    assert got == pytest.approx(discarded_miss, abs=1e-14)
    discarded_num = -(float(p.D) - float(p.K)) / (2 * float(p.A) * n * n)
    assert gen["num"].correction - reg["num"].correction == pytest.approx(
        discarded_num, abs=1e-14)
    discarded_hit = (
        -(1 + lam) * (1 + 2 * lam) * float(p.X3) / (6 * lam * lam * n * n)
        + (1 + 2 * lam) * float(p.C12) / (2 * lam * lam * n * n)
        - (float(p.C21) - x * float(p.R)) / (2 * lam * lam * n * n)
        - (float(p.L) - float(p.K)) / (lam * om * n * n)
    )
    assert gen["hit"].correction - reg["hit"].correction == pytest.approx(
        discarded_hit, abs=1e-14)


def test_case_preconditions():
    d = DegreeSequence((3, 2, 2, 2, 2, 1))
    with pytest.raises(ValueError):
        specialized_estimates(d, ForbiddenGraph.empty(6), "flat")
    dr = DegreeSequence((3,) * 6)
    with pytest.raises(ValueError):
        specialized_estimates(dr, fg(6, [(1, 2)]), "reg")


# ------------------------------------------------------------- induced forms

def test_induced_m_zero_is_exactly_one():
    d = DegreeSequence((3,) * 8)
    est = induced_estimate(d, ForbiddenGraph.empty(8), 0)
    assert est.log_value == 0.0
    # m = 0 needs no density at all, even for a complete graph
    assert induced_estimate(DegreeSequence((3, 3, 3, 3)),
                            ForbiddenGraph.empty(4), 0).log_value == 0.0


def test_induced_m_one_reports_order_correction():
    d = DegreeSequence((3,) * 8)
    est = induced_estimate(d, ForbiddenGraph.empty(8), 1)
    assert dict(est.terms)["m2"] == 1 / 16   # m^2/(2n)
    with pytest.raises(ValueError):
        induced_estimate(DegreeSequence((3, 3, 3, 3)),
                         ForbiddenGraph.empty(4), 1)   # lambda = 1


def test_induced_vs_exact_oracle():
    d = DegreeSequence((5,) * 10)
    X = fg(10, [(1, 2), (2, 3), (1, 3)])
    est = induced_estimate(d, X, 3, model="full")
    exact = float(exact_probability(d, X, "induced", m=3))
    assert abs(est.log_value - math.log(exact)) < 0.2   # measured 0.09 at n=10


def test_induced_full_vs_leading_sweep():
    diffs = []
    for n in (100, 200, 400):
        d = DegreeSequence((n // 2,) * n)
        X = fg(n, [(1, 2), (2, 3), (3, 4)])
        full = induced_estimate(d, X, 4, model="full")
        lead = induced_estimate(d, X, 4, model="leading")
        diffs.append(abs(full.log_value - lead.log_value))
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[2] < 0.75 * diffs[1] < 0.6 * diffs[0]


def test_induced_lambda_model_matches_full_for_regular():
    # regular degrees: the pairwise-weight base equals the flat base and all
    # deviation moments vanish, so the two displays coincide
    d = DegreeSequence((3,) * 8)
    X = fg(8, [(1, 2), (2, 3)])
    full = induced_estimate(d, X, 3, model="full")
    lm = induced_estimate(d, X, 3, model="lambdaModel")
    assert lm.log_value == pytest.approx(full.log_value, abs=1e-12)


def test_induced_support_violation():
    d = DegreeSequence((3,) * 8)
    with pytest.raises(ValueError):
        induced_estimate(d, fg(8, [(5, 6)]), 3)


# -------------------------------------------------------- pairwise expansion

def test_lambda_jk_regular_is_density():
    _, _, p = params((3,) * 8)
    assert lambda_jk_expansion(p, 1, 2) == float(p.lam)


def test_lambda_jk_example_value():
    _, _, p = params((3, 2, 2, 2, 1))
    # lam = 1/2 makes the quadratic term vanish: 1/2 + 1/5 - 1/5
    assert lambda_jk_expansion(p, 1, 5) == pytest.approx(0.5, abs=1e-14)


def test_lambda_jk_symmetry():
    _, _, p = params((4, 3, 3, 2, 2, 2, 2, 2))
    for j in range(1, 8):
        for k in range(j + 1, 9):
            assert lambda_jk_expansion(p, j, k) == lambda_jk_expansion(p, k, j)
    with pytest.raises(ValueError):
        lambda_jk_expansion(p, 2, 2)


# ------------------------------------------------------ overlap distribution

def test_overlap_single_edge_law():
    d = DegreeSequence((2, 2, 2, 2))
    Y = fg(4, [(1, 2)])
    assert overlap_distribution_estimate(d, Y, 0) == pytest.approx(1 / 3)
    assert overlap_distribution_estimate(d, Y, 1) == pytest.approx(2 / 3)


def test_overlap_matches_exact_at_density_two_thirds():
    from degcount.exactcount import exact_overlap_distribution
    d = DegreeSequence((2, 2, 2, 2))
    Y = fg(4, [(1, 2)])
    exact = exact_overlap_distribution(d, Y)
    for k in (0, 1):
        assert overlap_distribution_estimate(d, Y, k) == pytest.approx(float(exact[k]))


def test_overlap_normalization_exact():
    d = DegreeSequence((5,) * 12)
    Y = fg(12, [(1, 2), (2, 3), (4, 5), (6, 7)])
    total = math.fsum(overlap_distribution_estimate(d, Y, k) for k in range(5))
    assert total == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        overlap_distribution_estimate(d, Y, 5)


# ------------------------------------------------------------ sparse regime

def test_perth_matches_tiny_exact_counts():
    assert sparse_estimates(DegreeSequence((1, 1)), ForbiddenGraph.empty(2),
                            "perth").log_value == pytest.approx(0.0, abs=1e-12)
    est = sparse_estimates(DegreeSequence((1, 1, 1, 1)), ForbiddenGraph.empty(4), "perth")
    assert est.log_value == pytest.approx(math.log(3), abs=1e-12)


def test_mckay81_ratio_vs_exact_discrepancy_reported():
    d = DegreeSequence((2, 2, 2, 2))
    X = fg(4, [(1, 2)])
    est = sparse_estimates(d, X, "mckay81")
    assert math.exp(est.log_value) == pytest.approx(0.5, abs=1e-12)
    exact = float(exact_probability(d, X, "hit"))
    assert abs(math.exp(est.log_value) - exact) < 0.25   # reported, finite-n gap


def test_mckay81_zero_when_x_exceeds_d():
    d = DegreeSequence((1, 1, 1, 1))
    X = fg(4, [(1, 2), (1, 3)])   # x_1 = 2 > d_1, X = E = 2
    assert sparse_estimates(d, X, "mckay81").log_value == NEG_INF
    with pytest.raises(ValueError):
        sparse_estimates(DegreeSequence((1, 1, 0, 0)), fg(4, [(1, 2), (2, 3)]),
                         "mckay81")   # X > E violates the precondition


# ----------------------------------------------- regular-graph expectations

def test_hamilton_cycle_correction_vanishes():
    est = regular_graph_expectations(10, 5, "cycles", q=10)
    assert dict(est.terms)["length_split"] == 0.0


def test_matchings_against_exact_expectation():
    n, dv = 6, 3
    d = DegreeSequence((dv,) * n)
    M = fg(n, [(1, 2), (3, 4), (5, 6)])
    count = math.factorial(n) // (2 ** (n // 2) * math.factorial(n // 2))
    exact = count * float(exact_probability(d, M, "hit"))
    est = regular_graph_expectations(n, dv, "matchings")
    assert abs(est.log_value - math.log(exact)) < 0.15


def test_triangles_against_exact_expectation():
    n, dv = 10, 5
    d = DegreeSequence((dv,) * n)
    T = fg(n, [(1, 2), (2, 3), (1, 3)])
    exact = math.comb(n, 3) * float(exact_probability(d, T, "hit", limit=12))
    est = regular_graph_expectations(n, dv, "cycles", q=3)
    assert abs(est.log_value - math.log(exact)) < 0.25


def test_expectation_preconditions():
    with pytest.raises(ValueError):
        regular_graph_expectations(7, 3, "matchings")
    with pytest.raises(ValueError):
        regular_graph_expectations(10, 5, "cycles", q=2)
    with pytest.raises(ValueError):
        regular_graph_expectations(10, 5, "cycles", q=11)
