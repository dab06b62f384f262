import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diter import catalyst as cat
from diter.errors import ComplexRootsError, DomainError, UnstableProfileError

from oracles import brute_force_catalyst, brute_force_free_origin, dense_row_solve


class TestRoots:
    def test_heat_k1(self):
        rp, rm = cat.compute_roots(1 / 3, 1 / 3)
        assert rp == rm == pytest.approx((3 - math.sqrt(5)) / 2, rel=1e-15)
        assert abs(rp * rp / 3 - rp + 1 / 3) < 1e-14

    def test_degenerate_a_plus_zero(self):
        assert cat.compute_roots(0.0, 0.5) == (0.0, 0.5)

    def test_degenerate_a_minus_zero(self):
        assert cat.compute_roots(0.3, 0.0) == (0.3, 0.0)

    def test_discriminant_zero(self):
        assert cat.compute_roots(0.5, 0.5) == (1.0, 1.0)

    def test_complex(self):
        with pytest.raises(ComplexRootsError):
            cat.compute_roots(0.6, 0.6)

    def test_matches_textbook_formula(self):
        for ap, am in [(0.1, 0.3), (0.45, 0.5), (0.2, 0.2), (-0.3, 0.4)]:
            d = math.sqrt(1 - 4 * ap * am)
            rp, rm = cat.compute_roots(ap, am)
            assert rp == pytest.approx((1 - d) / (2 * am), rel=1e-12)
            assert rm == pytest.approx((1 - d) / (2 * ap), rel=1e-12)


class TestPhi:
    def test_origin(self):
        assert cat.phi_unbounded(cat.make_profile(0.2, 0.3), 0) == 1.0

    def test_power(self):
        assert cat.phi_unbounded(cat.make_profile(0.4, 0.4), 3) == pytest.approx(0.125, rel=1e-15)

    def test_negative_side_uses_r_minus(self):
        p = cat.make_profile(0.2, 0.3)
        assert cat.phi_unbounded(p, -2) == p.r_minus ** 2

    def test_unbounded_vs_brute_force(self):
        p = cat.make_profile(0.2, 0.3)
        H, _, _ = brute_force_catalyst(0.2, 0.3, 200, tol=1e-15)
        for n in range(-30, 31):
            assert cat.phi_unbounded(p, n) == pytest.approx(H[200 + n], abs=1e-10)

    def test_bounded_at_bound(self):
        assert cat.phi_bounded(cat.make_profile(0.3, 0.2), 7, 7) == 0.0
        assert cat.phi_bounded(cat.make_profile(0.3, 0.2), 7, -7) == 0.0

    def test_bounded_symmetric_value(self):
        # oracle: brute force with black hole at 0 and zero sites at +-3
        p = cat.make_profile(0.4, 0.4)
        assert p.r_plus == pytest.approx(0.5, rel=1e-15)
        assert cat.phi_bounded(p, 3, 1) == pytest.approx(0.47619047619046223, abs=1e-12)
        assert cat.phi_bounded(p, 3, 1) == pytest.approx(0.5 * (1 - 0.5 ** 4) / (1 - 0.5 ** 6), rel=1e-14)

    def test_symmetric_formula_agrees(self):
        p = cat.make_profile(0.35, 0.35)
        r, N = p.r_plus, 9
        for n in range(-N, N + 1):
            m = abs(n)
            sym = r ** m * (1 - r ** (2 * (N - m))) / (1 - r ** (2 * N))
            assert cat.phi_bounded(p, N, n) == pytest.approx(sym, rel=1e-13, abs=1e-300)

    def test_bound_violation(self):
        with pytest.raises(DomainError):
            cat.phi_bounded(cat.make_profile(0.1, 0.1), 3, 4)

    def test_marginal_linear_limit(self):
        p = cat.make_profile(0.5, 0.5)
        assert p.marginal
        for n in range(-6, 7):
            assert cat.phi_bounded(p, 6, n) == pytest.approx((6 - abs(n)) / 6, rel=1e-15)


class TestNormalize:
    def test_heat_k1(self):
        p = cat.make_profile(1 / 3, 1 / 3)
        assert cat.normalize(p) == pytest.approx(math.sqrt(5) / 3, rel=1e-14)
        assert cat.phi_tilde(p, 0) == pytest.approx(1.341640786499872, rel=1e-12)
        # oracle: history accumulated at a free origin
        assert cat.phi_tilde(p, 0) == pytest.approx(brute_force_free_origin(1 / 3, 1 / 3, 200), rel=1e-12)

    def test_zero_stencil(self):
        p = cat.make_profile(0.0, 0.0)
        assert cat.normalize(p) == 1.0
        assert cat.phi_tilde(p, 0) == 1.0 and cat.phi_tilde(p, 2) == 0.0

    def test_remark_absorption(self):
        p = cat.make_profile(0.25, 0.4)
        _, from_plus, from_minus = brute_force_catalyst(0.25, 0.4, 250, tol=1e-15)
        assert p.a_minus * cat.phi_unbounded(p, 1) == pytest.approx(from_plus, abs=1e-12)
        assert p.a_plus * cat.phi_unbounded(p, -1) == pytest.approx(from_minus, abs=1e-12)

    def test_closed_form_sqrt(self):
        for ap, am in [(0.1, 0.4), (0.3, 0.2), (-0.4, 0.3)]:
            assert cat.normalize(cat.make_profile(ap, am)) == pytest.approx(math.sqrt(1 - 4 * ap * am), rel=1e-13)

    def test_bounded_normalisation_uses_phi_N(self):
        p = cat.make_profile(0.3, 0.25)
        den = cat.normalize(p, 5)
        assert den == pytest.approx(1 - 0.25 * cat.phi_bounded(p, 5, 1) - 0.3 * cat.phi_bounded(p, 5, -1))
        assert p.bound == 5 and p.norm == den

    def test_marginal_unbounded_fails(self):
        with pytest.raises(UnstableProfileError):
            cat.normalize(cat.make_profile(0.5, 0.5))


grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
stable_pairs = [(a, b) for a in grid for b in grid if 4 * a * b < 1 - 1e-12]


@pytest.mark.parametrize("ap,am", stable_pairs)
def test_fixed_point_unbounded(ap, am):
    p = cat.make_profile(ap, am)
    for n in range(-8, 9):
        if n == 0:
            continue
        lhs = cat.phi_unbounded(p, n)
        rhs = am * cat.phi_unbounded(p, n + 1) + ap * cat.phi_unbounded(p, n - 1)
        assert lhs == pytest.approx(rhs, abs=1e-15)


@pytest.mark.parametrize("ap,am", stable_pairs + [(0.5, 0.5)])
def test_fixed_point_bounded(ap, am):
    p = cat.make_profile(ap, am)
    N = 6
    for n in range(-N + 1, N):
        if n == 0:
            continue
        lhs = cat.phi_bounded(p, N, n)
        rhs = am * cat.phi_bounded(p, N, n + 1) + ap * cat.phi_bounded(p, N, n - 1)
        assert lhs == pytest.approx(rhs, abs=1e-14)


def test_normalisation_at_least_one():
    for ap, am in stable_pairs:
        p = cat.make_profile(ap, am)
        assert cat.phi_tilde(p, 0) >= 1.0
        assert cat.phi_tilde(p, 0, N=4) >= 1.0


def test_compensation_series_converges_geometrically():
    p = cat.make_profile(0.45, 0.4)
    N, n = 4, 1
    exact = cat.phi_bounded(p, N, n)
    errs = [abs(cat.compensation_series(p, N, n, k) - exact) for k in range(6)]
    ratio = p.rho ** N
    # deeper terms sink into rounding noise
    for k in range(3):
        assert errs[k + 1] / errs[k] == pytest.approx(ratio, rel=1e-6)
    assert abs(cat.compensation_series(p, N, n, 200) - exact) < 1e-15


class TestApplyProfileRow:
    @pytest.mark.parametrize("method", ["auto", "closed", "iterative", "bounded"])
    def test_centre_source_reproduces_phi_tilde_N(self, method):
        N = 7
        p = cat.make_profile(0.3, 0.35)
        f = np.zeros(2 * N + 1)
        f[N] = 1.0
        H = cat.apply_profile_row(f, p, tolerance=1e-15, method=method)
        expect = [cat.phi_tilde(p, n, N=N) for n in range(-N, N + 1)]
        np.testing.assert_allclose(H, expect, rtol=1e-12, atol=1e-15)

    def test_centre_source_vs_diffusion_engine(self):
        from diter import engine
        from diter.stencil import GridProblem, StencilWeights, assemble_system

        N, ap, am = 6, 0.3, 0.35
        src = np.zeros(2 * N + 1)
        src[N] = 1.0
        prob = GridProblem((2 * N + 1,), StencilWeights.one_d(ap, am), source=src)
        sys_ = assemble_system(prob)
        state = engine.init_fluid(sys_)
        assert engine.run(state, sys_, engine.Schedule("sweep", 1e-14)).converged
        H = cat.apply_profile_row(src, cat.make_profile(ap, am))
        np.testing.assert_allclose(H[1:-1], state.H, atol=1e-12)

    def test_zero_row(self):
        H = cat.apply_profile_row(np.zeros(10), cat.make_profile(0.2, 0.2))
        assert np.all(H == 0.0)

    @pytest.mark.parametrize("method", ["closed", "iterative", "bounded"])
    @pytest.mark.parametrize("ap,am", [(1 / 3, 1 / 3), (0.2, 0.5), (0.0, 0.5), (0.45, 0.0), (-0.3, 0.5), (0.49, 0.49)])
    def test_matches_dense_solve(self, method, ap, am):
        rng = np.random.default_rng(7)
        f = np.zeros(41)
        f[1:-1] = rng.normal(size=39)
        H = cat.apply_profile_row(f, cat.make_profile(ap, am), tolerance=1e-15, method=method)
        np.testing.assert_allclose(H, dense_row_solve(f, ap, am), atol=1e-12)

    def test_marginal_auto_uses_bounded(self):
        f = np.zeros(17)
        f[1:-1] = 1.0
        H = cat.apply_profile_row(f, cat.make_profile(0.5, 0.5))
        np.testing.assert_allclose(H, dense_row_solve(f, 0.5, 0.5), atol=1e-12)
        with pytest.raises(UnstableProfileError):
            cat.apply_profile_row(f, cat.make_profile(0.5, 0.5), method="closed")

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 60), st.floats(0, 0.5), st.floats(0, 0.5), st.integers(0, 2**31))
    def test_linearity(self, L, ap, am, seed):
        if 4 * ap * am > 1:
            return
        p = cat.make_profile(ap, am)
        rng = np.random.default_rng(seed)
        f1, f2 = np.zeros(L + 1), np.zeros(L + 1)
        f1[1:-1] = rng.normal(size=L - 1)
        f2[1:-1] = rng.normal(size=L - 1)
        lhs = cat.apply_profile_row(f1 + f2, p)
        rhs = cat.apply_profile_row(f1, p) + cat.apply_profile_row(f2, p)
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(lhs).max())

    def test_rejects_boundary_fluid(self):
        with pytest.raises(ValueError):
            cat.apply_profile_row([1.0, 0.0, 0.0], cat.make_profile(0.2, 0.2))

    def test_rejects_non_finite(self):
        from diter.errors import NumericalFailureError

        with pytest.raises(NumericalFailureError):
            cat.apply_profile_row([0.0, np.nan, 0.0], cat.make_profile(0.2, 0.2))


def test_dump_csv(tmp_path):
    p = cat.make_profile(0.3333, 0.3333)
    rows = cat.dump_profile_csv(tmp_path / "c.csv", p, 20)
    text = (tmp_path / "c.csv").read_text().splitlines()
    assert text[0] == "n,phi,phi_bounded,phi_tilde"
    assert len(text) == 42 and len(rows) == 41
    n, phi, phib, phit = rows[20]
    assert (n, phi) == (0, 1.0)
    assert phit == pytest.approx(1 / math.sqrt(1 - 4 * 0.3333 ** 2))
