"""Fourier-Galerkin solver: assembly oracles, closed-form agreement,
comparison reports, and the counterexample scan."""

import json
import math

import numpy as np
import pytest

from steklov_annulus import galerkin
from steklov_annulus.errors import DomainError, NumericalError
from steklov_annulus.galerkin import (
    BoundaryWeight,
    FourierSeries,
    assemble,
    comparison_check_T_large,
    comparison_check_orthogonal,
    counterexample_scan,
    counterexample_weight,
    load_weight,
    matrix_A,
    save_weight,
    solve_spectrum,
    solve_with_auto_truncation,
    weight_from_dict,
)
from steklov_annulus.crossings import crossing_time
from steklov_annulus.spectral import enumerate_spectrum, eval_lambda, shape

FOURPI = 4.0 * math.pi


def _const_weight(alpha, T):
    return BoundaryWeight(FourierSeries(alpha), FourierSeries(1.0), T)


# ------------------------------------------------------------ FourierSeries

def test_series_eval_matches_manual():
    s = FourierSeries(2.0, (0.3, 0.0, 0.1), (0.2,))
    th = 0.7
    want = 2.0 + 0.3 * math.cos(th) + 0.1 * math.cos(3 * th) \
        + 0.2 * math.sin(th)
    assert s.eval(np.array([th]))[0] == pytest.approx(want, rel=1e-15)


def test_series_coeff_indexed_from_one():
    s = FourierSeries(1.0, (0.5, 0.125), ())
    assert s.coeff("cos", 1) == 0.5
    assert s.coeff("cos", 2) == 0.125
    assert s.coeff("cos", 3) == 0.0
    assert s.coeff("sin", 1) == 0.0


def test_series_constant_flag():
    assert FourierSeries(1.0).is_constant
    assert not FourierSeries(1.0, (0.1,)).is_constant


def test_series_dict_roundtrip():
    s = FourierSeries(1.5, (0.2,), (0.0, 0.3))
    assert FourierSeries.from_dict(s.to_dict()) == s


# ----------------------------------------------------------- BoundaryWeight

def test_weight_positivity_enforced():
    with pytest.raises(DomainError):
        BoundaryWeight(FourierSeries(0.5, (1.0,)), FourierSeries(1.0), 1.0)


def test_weight_orientation_swap():
    w = BoundaryWeight(FourierSeries(1.0), FourierSeries(3.0), 1.0)
    assert w.gamma0.a0 == 3.0
    assert w.alpha == 3.0


def test_weight_shape_and_length():
    w = _const_weight(2.0, 1.3)
    assert w.alpha == 2.0
    assert w.beta == pytest.approx(8.0 / 9.0, rel=1e-15)
    assert w.boundary_length == pytest.approx(2.0 * math.pi * 3.0, rel=1e-15)
    s = w.shape()
    assert (s.alpha, s.T) == (2.0, 1.3)


def test_weight_rejects_bad_T():
    with pytest.raises(DomainError):
        _const_weight(1.0, 0.0)
    with pytest.raises(DomainError):
        _const_weight(1.0, math.inf)


def test_weight_file_roundtrip(tmp_path):
    w = BoundaryWeight(FourierSeries(1.2, (0.3,), (0.1,)),
                       FourierSeries(1.0, (), (0.05,)), 2.5)
    p = tmp_path / "w.json"
    save_weight(w, p)
    assert load_weight(p) == w


def test_weight_missing_arrays_mean_zero():
    w = weight_from_dict({"T": 1.0, "gamma0": {"a0": 2.0},
                          "gamma1": {"a0": 1.0}})
    assert w.gamma0.is_constant and w.alpha == 2.0


def test_weight_malformed_json_is_domain_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(DomainError):
        load_weight(p)


def test_weight_missing_file_is_oserror(tmp_path):
    with pytest.raises(OSError):
        load_weight(tmp_path / "absent.json")


# ----------------------------------------------------------------- assembly

def _basis_functions(N):
    # circle-major ordering: [1/sqrt(2pi), cos(mθ)/sqrt(pi), sin(mθ)/sqrt(pi)]
    fns = [lambda th: np.full_like(th, 1.0 / math.sqrt(2.0 * math.pi))]
    for m in range(1, N + 1):
        fns.append(lambda th, m=m: np.cos(m * th) / math.sqrt(math.pi))
        fns.append(lambda th, m=m: np.sin(m * th) / math.sqrt(math.pi))
    return fns


def test_mass_matrix_matches_quadrature():
    # uniform trapezoid integrates trig polynomials exactly: independent
    # oracle for the product-to-sum assembly
    w = BoundaryWeight(FourierSeries(1.3, (0.25, 0.1), (0.07,)),
                       FourierSeries(1.0, (0.2,), ()), 0.9)
    N = 6
    sys_ = assemble(w, N)
    th = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
    dth = 2.0 * math.pi / 4096
    fns = _basis_functions(N)
    per = 2 * N + 1
    for ci, series in ((0, w.gamma0), (1, w.gamma1)):
        f = series.eval(th)
        base = ci * per
        for i in range(per):
            for j in range(i + 1):
                want = float(np.sum(fns[i](th) * fns[j](th) * f) * dth)
                got = sys_.M[base + i, base + j]
                assert got == pytest.approx(want, abs=1e-12), (ci, i, j)
    # off-diagonal circle coupling is zero
    assert np.all(sys_.M[:per, per:] == 0.0)


def test_stiffness_mode_blocks():
    w = _const_weight(1.0, 2.0)
    N = 4
    sys_ = assemble(w, N)
    per = 2 * N + 1
    K = sys_.K
    # constant block: (1/T) [[1,-1],[-1,1]]
    assert K[0, 0] == pytest.approx(0.5, rel=1e-15)
    assert K[0, per] == pytest.approx(-0.5, rel=1e-15)
    # mode n: n [[coth(nT), -csch(nT)], ...]
    for n in (1, 3):
        i = 1 + 2 * (n - 1)
        cth = 1.0 / math.tanh(n * 2.0)
        csh = 1.0 / math.sinh(n * 2.0)
        assert K[i, i] == pytest.approx(n * cth, rel=1e-14)
        assert K[i, i + per] == pytest.approx(-n * csh, rel=1e-14)


def test_stiffness_decoupled_at_large_nT():
    sys_ = assemble(_const_weight(1.0, 50.0), 3)
    per = 7
    # nT = 50 > 40: modes decouple to n * identity exactly
    assert sys_.K[1, 1] == 1.0
    assert sys_.K[1, 1 + per] == 0.0


def test_assemble_rejects_small_N():
    w = BoundaryWeight(FourierSeries(1.0, (0.0, 0.0, 0.2)),
                       FourierSeries(1.0), 1.0)
    with pytest.raises(DomainError):
        assemble(w, 4)  # needs N >= 2*3+2


# ------------------------------------------------------------------- solves

def test_constant_weights_match_closed_form():
    # sigma~_1 = 4 pi tanh(1) at T = 2
    entries = solve_spectrum(assemble(_const_weight(1.0, 2.0), 16), 1)
    assert entries[1][0] == pytest.approx(FOURPI * math.tanh(1.0), abs=1e-8)


def test_constant_weights_first_eight_entries():
    w = _const_weight(2.0, 1.0)
    entries = solve_spectrum(assemble(w, 32), 8)
    ref = enumerate_spectrum(w.shape(), 8)
    for k in range(9):
        assert entries[k][0] == pytest.approx(ref[k].value, abs=1e-8), k


def test_sigma0_is_zero_with_constant_vector():
    sys_ = assemble(_const_weight(1.5, 1.0), 12)
    val, vec = solve_spectrum(sys_, 1)[0]
    assert abs(val) < 1e-10
    # eigenvector is the constant function on both circles
    per = sys_.dim // 2
    consts = vec[[0, per]]
    rest = np.delete(vec, [0, per])
    assert np.max(np.abs(rest)) < 1e-10 * np.max(np.abs(consts))


def test_solve_count_validation():
    sys_ = assemble(_const_weight(1.0, 1.0), 4)
    with pytest.raises(DomainError):
        solve_spectrum(sys_, 0)
    with pytest.raises(DomainError):
        solve_spectrum(sys_, sys_.dim - 1)


def test_auto_truncation_converges():
    w = counterexample_weight(1.0)
    entries, N_used, delta = solve_with_auto_truncation(w, 2, start_N=16)
    assert delta < 1e-9
    assert N_used >= 32
    assert entries[1][0] > 0


# ------------------------------------------------------------- comparisons

def test_matrix_A_constant_weight():
    rep = matrix_A(_const_weight(2.0, 1.0))
    np.testing.assert_allclose(rep.A, np.diag([-6.0, 0.0, 0.0]), atol=0)
    assert rep.two_nonpositive
    assert rep.alpha == 2.0


def test_matrix_A_trace_and_symmetry(rng):
    for _ in range(20):
        alpha = float(rng.uniform(1.0, 3.0))
        coef = rng.uniform(-0.05, 0.05, size=8)
        g0 = FourierSeries(alpha, (coef[0], coef[1]), (coef[2], coef[3]))
        g1 = FourierSeries(1.0, (coef[4], coef[5]), (coef[6], coef[7]))
        T = float(rng.uniform(0.1, 0.8 * crossing_time(1, 0, 1.0)))
        w = BoundaryWeight(g0, g1, T)
        rep = matrix_A(w)
        A = np.asarray(rep.A)
        np.testing.assert_array_equal(A, A.T)
        assert np.trace(A) == pytest.approx(-2.0 * (w.alpha + 1.0), rel=1e-12)


def test_matrix_A_predicate_implies_comparison(rng):
    # strong positive cos(2θ) pushes the (2,2) entry negative, making the
    # predicate attainable; whenever it reports true the σ̃₁ comparison
    # must hold
    hits = 0
    for _ in range(30):
        big = float(rng.uniform(0.1, 0.3))
        small = rng.uniform(-0.2, 0.2, size=2) * big
        g0 = FourierSeries(1.0, (small[0], big), ())
        g1 = FourierSeries(1.0, (small[1], big), ())
        T = float(rng.uniform(0.2, 2.0))
        w = BoundaryWeight(g0, g1, T)
        rep = matrix_A(w)
        if not rep.two_nonpositive:
            continue
        hits += 1
        sigma1 = solve_spectrum(assemble(w, 32), 1)[1][0]
        lam1 = eval_lambda(w.shape(), 1).value
        assert sigma1 <= lam1 + 1e-8 * max(1.0, lam1)
    assert hits >= 5  # the generator must actually exercise the predicate


def test_matrix_A_wrong_regime_names_large_T_path():
    w = _const_weight(1.0, 3.0)  # T_10(1) = 2.399...
    with pytest.raises(DomainError, match="--theorem 4.1"):
        matrix_A(w)


def test_T_large_comparison_constant_equality():
    rep = comparison_check_T_large(_const_weight(1.0, 3.0), N=16)
    assert rep["holds"]
    assert rep["constant_weights"] and rep["equality_expected"]
    assert rep["gap"] == pytest.approx(0.0, abs=1e-9)
    assert rep["bound"] == pytest.approx(8.0 * math.pi / 3.0, rel=1e-12)


def test_T_large_comparison_randomized(rng):
    for _ in range(10):
        alpha = float(rng.uniform(1.0, 2.5))
        t10 = crossing_time(1, 0, 4.0 * alpha / (1.0 + alpha) ** 2)
        coef = rng.uniform(-0.08, 0.08, size=4)
        w = BoundaryWeight(
            FourierSeries(alpha, (coef[0],), (coef[1],)),
            FourierSeries(1.0, (coef[2],), (coef[3],)),
            float(rng.uniform(t10, t10 + 3.0)))
        rep = comparison_check_T_large(w, N=24)
        assert rep["holds"], rep


def test_T_large_comparison_wrong_regime():
    with pytest.raises(DomainError):
        comparison_check_T_large(_const_weight(1.0, 1.0))


def test_orthogonal_comparison_holds():
    w = BoundaryWeight(FourierSeries(1.0, (0.0, 0.0, 0.2)),
                       FourierSeries(1.0, (0.0, 0.0, 0.0, 0.1)), 1.5)
    rep = comparison_check_orthogonal(w, 1, N=24)
    assert rep["odd_holds"] and rep["even_holds"]


def test_orthogonal_comparison_lists_offenders():
    w = counterexample_weight(1.0)
    with pytest.raises(DomainError, match=r"gamma0 cos\(1θ\)"):
        comparison_check_orthogonal(w, 1)


def test_orthogonal_comparison_constant_equality():
    rep = comparison_check_orthogonal(_const_weight(1.3, 1.1), 1, N=16)
    assert rep["constant_weights"]
    gap_odd = rep["sigma_odd_symmetric"] - rep["sigma_odd"]
    gap_even = rep["sigma_even_symmetric"] - rep["sigma_even"]
    assert abs(gap_odd) < 1e-9 and abs(gap_even) < 1e-9


# ---------------------------------------------------------- counterexample

def test_counterexample_weight_coefficients():
    w = counterexample_weight(1.0)
    for series in (w.gamma0, w.gamma1):
        assert series.a0 == 1.0
        assert series.cos == (0.5, 0.125)
        assert series.sin == ()


def test_counterexample_weight_sqrt_variant():
    w = counterexample_weight(1.0, use_sqrt_factor=True)
    # sqrt series recomputed: mean shifts below 1, stays positive
    th = np.linspace(0.0, 2.0 * math.pi, 512, endpoint=False)
    f2 = w.gamma0.eval(th) ** 2
    want = 1.0 + 0.5 * np.cos(th) + 0.125 * np.cos(2 * th)
    np.testing.assert_allclose(f2, want, atol=1e-10)


def test_counterexample_scan_small_T_excess():
    rows = counterexample_scan(T_values=[0.2, 0.4, 1.0], N=24)["rows"]
    for row in rows:
        assert row["sigma1"] > row["flat_lambda1"] + 1e-6
        assert row["holds"]
        assert row["excess"] == pytest.approx(
            row["sigma1"] - row["flat_lambda1"], rel=1e-12)


def test_counterexample_scan_crossover_reproducible():
    a = counterexample_scan(T_values=[0.5], N=16)
    b = counterexample_scan(T_values=[0.5], N=16)
    assert a["T_star"] == b["T_star"]  # bit-for-bit
    assert a["T_star"] is not None and 1.5 < a["T_star"] < a["T_threshold"]


def test_counterexample_scan_rejects_bad_T():
    with pytest.raises(DomainError):
        counterexample_scan(T_values=[-0.5], N=16)


def test_counterexample_flat_reference_is_tanh():
    rows = counterexample_scan(T_values=[0.3], N=16)["rows"]
    assert rows[0]["flat_lambda1"] == pytest.approx(math.tanh(0.15),
                                                    rel=1e-14)
