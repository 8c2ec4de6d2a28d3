import math

import numpy as np
import pytest

from degcount.mvintegral import (
    CoefficientSet,
    DegenerateProposalError,
    gaussian_reference,
    mc_box_integral,
    perturbation_exponent,
    theta1,
    theta1_terms,
    z_factor,
)


# ------------------------------------------------------------------- theta1

def test_theta1_zero_coefficients():
    assert theta1(CoefficientSet(N=6, A=1.0)) == 0


def test_theta1_a_only_matches_gaussian_closed_form():
    # exact 1-D Gaussian value: prod (1 - a_j/(A sqrt(N)))^(-1/2); the two
    # displayed a-terms are its expansion through second order
    N, A = 8, 1.0
    a = np.full(N, 0.02)
    c = CoefficientSet(N=N, A=A, a=a)
    t = complex(theta1(c))
    two_terms = a.sum() / (2 * A * math.sqrt(N)) + (a * a).sum() / (4 * A * A * N)
    assert t.real == pytest.approx(two_terms, abs=1e-16)
    exact = -0.5 * np.log(1 - a / (A * math.sqrt(N))).sum()
    assert t.real == pytest.approx(exact, abs=5e-6)   # truncation O(a^3/ (A sqrt N)^3)


def test_theta1_j_coefficient_quarter():
    c = CoefficientSet(N=4, A=1.0, J=np.ones(4))
    assert complex(theta1(c)).real == pytest.approx(0.25, abs=1e-15)


def test_theta1_term_scaling_structure():
    # linear terms double, quadratic terms quadruple
    N, A = 6, 1.0
    base = dict(
        a=np.full(N, 0.05), B=np.full(N, 0.04), E=np.full(N, 0.03),
        J=np.full(N, 0.02),
        C=np.full((N, N), 0.01), F=np.full((N, N), 0.02),
    )
    c1 = CoefficientSet(N=N, A=A, **{k: v.copy() for k, v in base.items()})
    c2 = CoefficientSet(N=N, A=A, **{k: 2 * v for k, v in base.items()})
    t1, t2 = theta1_terms(c1), theta1_terms(c2)
    for name in ("a_linear", "E_quartic", "F_cross"):
        assert t2[name] == pytest.approx(2 * t1[name], rel=1e-14)
    for name in ("a_square", "B_square", "C_C", "J_square", "B_C", "B_J", "C_J"):
        assert t2[name] == pytest.approx(4 * t1[name], rel=1e-14)


def test_theta1_strict_sums_exclude_coincident_indices():
    # C_C term: sum' over j,k,l distinct of C_jk C_jl
    N = 4
    rng = np.random.default_rng(3)
    C = rng.normal(size=(N, N))
    np.fill_diagonal(C, 0.0)
    c = CoefficientSet(N=N, A=1.0, C=C)
    brute = 0.0
    for j in range(N):
        for k in range(N):
            for l in range(N):
                if j != k and j != l and k != l:
                    brute += C[j, k] * C[j, l]
    assert theta1_terms(c)["C_C"].real == pytest.approx(brute / (16 * N ** 3), rel=1e-12)


# ------------------------------------------------------------------ z factor

def test_z_factor_all_real_is_one():
    rng = np.random.default_rng(1)
    c = CoefficientSet(N=5, A=0.8, a=rng.normal(size=5), B=rng.normal(size=5),
                       C=rng.normal(size=(5, 5)))
    assert z_factor(c) == 1.0


def test_z_factor_imaginary_b():
    t = 0.3
    c = CoefficientSet(N=5, A=1.0, B=np.full(5, t * 1j))
    assert z_factor(c) == pytest.approx(math.exp(15 * 5 * t * t / (16 * 5)), rel=1e-14)


def test_z_factor_mixed_b_c_against_term_arithmetic():
    # independent recomputation of every displayed quadratic in the
    # imaginary parts
    N, A = 4, 0.9
    rng = np.random.default_rng(9)
    B = rng.normal(size=N) + 1j * rng.normal(size=N)
    C = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    np.fill_diagonal(C, 0.0)
    J = rng.normal(size=N) + 1j * rng.normal(size=N)
    c = CoefficientSet(N=N, A=A, B=B, C=C, J=J)
    iB, iC, iJ = B.imag, C.imag, J.imag
    want = 0.0
    want += (iB ** 2).sum() * 15 / (16 * A ** 3 * N)
    want += sum(3 * iB[j] * iC[j, k] for j in range(N) for k in range(N)
                if j != k) / (8 * A ** 3 * N * N)
    want += sum(iC[j, k] * iC[j, l] for j in range(N) for k in range(N)
                for l in range(N) if j != k and j != l and k != l) / (16 * A ** 3 * N ** 3)
    want += (iJ ** 2).sum() / (4 * A * N)
    want += (3 * iB * iJ).sum() / (4 * A * A * N)
    want += sum(iC[j, k] * iJ[k] for j in range(N) for k in range(N)
                if j != k) / (4 * A * A * N * N)
    assert z_factor(c) == pytest.approx(math.exp(want), rel=1e-12)


# -------------------------------------------------------------- monte carlo

def test_mc_zero_coefficients_pure_gaussian():
    c = CoefficientSet(N=6, A=1.0)
    res = mc_box_integral(c, samples=50_000, seed=4)
    ref = gaussian_reference(c)
    assert res.stderr == 0.0
    assert abs(res.mean.real - ref) <= 1e-9 * ref   # box-mass deficit only


def test_mc_reproducible_for_fixed_seed():
    c = CoefficientSet(N=5, A=1.0, a=np.full(5, 0.1))
    r1 = mc_box_integral(c, samples=30_000, seed=42)
    r2 = mc_box_integral(c, samples=30_000, seed=42)
    assert r1 == r2
    r3 = mc_box_integral(c, samples=30_000, seed=43)
    assert r3.mean != r1.mean


def test_mc_a_only_matches_theta1():
    c = CoefficientSet(N=8, A=1.0, a=np.full(8, 0.05))
    res = mc_box_integral(c, samples=200_000, seed=11)
    ratio = res.mean.real / gaussian_reference(c)
    rel_se = res.stderr / res.mean.real
    assert abs(math.log(ratio) - complex(theta1(c)).real) <= 3 * rel_se + 0.02


def test_mc_decides_j_coefficient():
    c = CoefficientSet(N=4, A=1.0, J=np.ones(4))
    res = mc_box_integral(c, samples=400_000, seed=13)
    ratio = res.mean.real / gaussian_reference(c)
    se = res.stderr / gaussian_reference(c)
    assert abs(ratio - math.exp(0.25)) <= 5 * se
    assert abs(ratio - math.exp(4.0)) / se > 100


def test_mc_factorizing_case_matches_1d_quadrature_product():
    # diagonal-only coefficients factorize; compare with a per-axis
    # trapezoid integral over the box
    N, A = 5, 1.2
    c = CoefficientSet(N=N, A=A, a=np.full(N, 0.08), B=np.full(N, 0.05),
                       E=np.full(N, -0.04), J=np.full(N, 0.3))
    res = mc_box_integral(c, samples=400_000, seed=21)
    b = c.box_halfwidth
    z = np.linspace(-b, b, 20_001)
    total = 1.0
    for _ in range(N):
        f = np.exp(-A * N * z ** 2 + 0.3 * z + math.sqrt(N) * 0.08 * z ** 2
                   + N * 0.05 * z ** 3 - N * 0.04 * z ** 4)
        total *= np.trapezoid(f, z) if hasattr(np, "trapezoid") else np.trapz(f, z)
    assert abs(res.mean.real - total) <= 3 * res.stderr


def test_mc_degenerate_proposal_rejected():
    with pytest.raises(DegenerateProposalError):
        mc_box_integral(CoefficientSet(N=6, A=1.0, eps_hat=0.05),
                        samples=1000, seed=1)


def test_perturbation_strict_triples_against_brute_force():
    N = 4
    rng = np.random.default_rng(17)
    D = rng.normal(size=(N, N, N))
    H = rng.normal(size=(N, N, N))
    I = rng.normal(size=(N, N, N, N))
    c = CoefficientSet(N=N, A=1.0, D=D, H=H, I=I)
    z = rng.normal(scale=0.1, size=(3, N))
    got = perturbation_exponent(c, z)
    for s in range(3):
        want = 0.0
        for j in range(N):
            for k in range(N):
                for l in range(N):
                    if j != k and j != l and k != l:
                        want += D[j, k, l] * z[s, j] * z[s, k] * z[s, l] / N
                        want += H[j, k, l] * z[s, j] * z[s, k] * z[s, l] ** 2 / math.sqrt(N)
                        for m in range(N):
                            if m not in (j, k, l):
                                want += (I[j, k, l, m] * z[s, j] * z[s, k]
                                         * z[s, l] * z[s, m] / N ** 1.5)
        assert got[s].real == pytest.approx(want, rel=1e-10)


# -------------------------------------------------------------- serialization

def test_coefficient_set_dict_round_trip():
    N = 3
    c = CoefficientSet(N=N, A=2.0, eps_hat=0.8,
                       J=np.array([1 + 2j, 0, -1j]),
                       C=np.array([[0, 1, 2], [3, 0, 4], [5, 6, 0]], dtype=complex))
    doc = c.to_dict()
    back = CoefficientSet.from_dict(doc)
    assert back.N == c.N and back.A == c.A and back.eps_hat == c.eps_hat
    assert np.array_equal(back.J, c.J)
    assert np.array_equal(back.C, c.C)
    assert np.all(back.B == 0)


def test_coefficient_set_validation():
    with pytest.raises(ValueError):
        CoefficientSet(N=3, A=0.0)
    with pytest.raises(ValueError):
        CoefficientSet(N=3, A=1.0, J=np.zeros(4))
    # diagonals of two-index tables are zeroed on construction
    c = CoefficientSet(N=3, A=1.0, C=np.ones((3, 3)))
    assert np.all(np.diag(c.C) == 0)
