import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thetafock import (
    BasisIndex,
    DomainError,
    QuadratureError,
    QuadratureSpec,
    SpaceConfig,
    build_grid,
    gaussian_integral,
    gram_matrix,
    inner_product,
    norm_squared,
)
from thetafock.basis import index_window, multi_indices
from thetafock.quadrature import Separable, basis_separable, default_window, hermite_rule


class TestGaussianIntegral:
    def test_unit(self):
        assert gaussian_integral(1.0, 0) == pytest.approx(1.7724539, abs=1e-7)

    @pytest.mark.parametrize("nu, alpha", [(1.0, 0.3), (0.5, -0.2), (2.0, 1.1)])
    def test_y_integral(self, nu, alpha):
        val = gaussian_integral(2 * nu, -4 * math.pi * alpha)
        assert val == pytest.approx(math.sqrt(math.pi / (2 * nu)) * math.exp(2 * math.pi**2 * alpha**2 / nu), rel=1e-14)

    def test_imaginary_linear(self):
        assert gaussian_integral(1.0, 2j) == pytest.approx(math.sqrt(math.pi) / math.e, rel=1e-15)

    @pytest.mark.parametrize("a", [0.0, -1.0])
    def test_domain(self, a):
        with pytest.raises(DomainError):
            gaussian_integral(a, 0)

    @given(st.floats(0.2, 5), st.floats(-3, 3), st.floats(-3, 3))
    def test_against_hermite(self, a, br, bi):
        b = complex(br, bi)
        t, w = hermite_rule(80)
        # int exp(-a y^2 + b y) dy with y = t / sqrt(a)
        approx = np.sum(w * np.exp(b * t / math.sqrt(a))) / math.sqrt(a)
        assert abs(approx - gaussian_integral(a, b)) <= 1e-12 * abs(gaussian_integral(a, abs(b)))


class TestHermiteRule:
    @pytest.mark.parametrize("order", [2, 5, 20, 40, 100, 200])
    def test_matches_numpy(self, order):
        t, w = hermite_rule(order)
        tn, wn = np.polynomial.hermite.hermgauss(order)
        assert np.allclose(t, tn, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(tn))))
        assert np.allclose(w, wn, rtol=1e-10, atol=1e-300)

    def test_fourth_moment(self):
        t, w = hermite_rule(5)
        assert np.sum(w * t**4) == pytest.approx(0.75 * math.sqrt(math.pi), rel=1e-14)

    @pytest.mark.parametrize("order", [3, 8, 41])
    def test_symmetric_positive(self, order):
        t, w = hermite_rule(order)
        assert np.all(w > 0)
        assert np.allclose(t, -t[::-1], atol=1e-14)
        assert np.sum(w) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            hermite_rule(0)


class TestGrid:
    def test_nyquist(self):
        grid = build_grid(SpaceConfig(n_max=3, quad=QuadratureSpec(x_points=4)))
        assert grid.x_points >= 8

    def test_orders(self):
        grid = build_grid(SpaceConfig(g=2, k_max=7, quad=QuadratureSpec(16, 10, 3)))
        assert grid.y_order >= 20
        assert grid.transverse_order >= 8

    @pytest.mark.parametrize("n", range(-7, 8))
    def test_trapezoid_delta(self, n):
        grid = build_grid(SpaceConfig(n_max=3, quad=QuadratureSpec(x_points=16)))
        val = np.sum(grid.wx * np.exp(2j * math.pi * n * grid.x))
        assert abs(val - (n == 0)) < 1e-15

    def test_spec_validation(self):
        for bad in ({"x_points": 2}, {"hermite_order": 1}, {"zprime_order": 1}):
            with pytest.raises(ValueError):
                QuadratureSpec(**bad)


class TestInnerProduct:
    def test_norm_oracle(self):
        cfg = SpaceConfig(g=2, nu=1.0, alpha=0.0)
        e = basis_separable(cfg, BasisIndex(0, (0,)))
        val = inner_product(build_grid(cfg), e, e)
        assert val.real == pytest.approx(math.pi**1.5 / math.sqrt(2), rel=1e-12)
        assert abs(val.imag) < 1e-14

    def test_orthogonal_n(self):
        cfg = SpaceConfig(g=2, nu=1.0, alpha=0.0)
        grid = build_grid(cfg)
        a = basis_separable(cfg, BasisIndex(0, (0,)))
        b = basis_separable(cfg, BasisIndex(1, (0,)))
        scale = math.sqrt(norm_squared(cfg, BasisIndex(0, (0,))) * norm_squared(cfg, BasisIndex(1, (0,))))
        assert abs(inner_product(grid, a, b)) < 1e-10 * scale

    def test_odd_monomial(self):
        cfg = SpaceConfig(g=2, nu=1.0, alpha=0.0)
        grid = build_grid(cfg)
        a = basis_separable(cfg, BasisIndex(0, (1,)))
        b = basis_separable(cfg, BasisIndex(0, (0,)))
        assert abs(inner_product(grid, a, b)) < 1e-12

    def test_tensor_path_agrees(self):
        # a plain callable forces sampling on the full tensor grid
        cfg = SpaceConfig(g=2, nu=1.0, alpha=0.3, n_max=1, k_max=1)
        grid = build_grid(cfg)
        e = basis_separable(cfg, BasisIndex(0, (1,)))
        f = lambda z, zp: e(z, zp)
        sep = inner_product(grid, e, e)
        raw = inner_product(grid, f, f)
        assert raw == pytest.approx(sep, rel=1e-10)

    def test_gaussian_polynomial_closed_form(self):
        # <z^0 e_0, e_0> on g = 1 reduces to a product of gaussian_integral values
        for nu, alpha in [(1.0, 0.3), (0.5, -0.4), (2.0, 0.9)]:
            cfg = SpaceConfig(g=1, nu=nu, alpha=alpha)
            e = basis_separable(cfg, BasisIndex(0, ()))
            q = inner_product(build_grid(cfg), e, e)
            closed = gaussian_integral(2 * nu, -4 * math.pi * alpha)
            assert q == pytest.approx(closed, rel=1e-12)

    def test_transverse_closed_form(self):
        # int |z2|^(2k) exp(-nu |z2|^2) over C = pi k! / nu^(k+1)
        cfg = SpaceConfig(g=2, nu=1.7, alpha=0.0, k_max=4)
        grid = build_grid(cfg)
        zeta, wp = grid.plane_nodes()
        for k in range(5):
            val = np.sum(wp * np.abs(zeta) ** (2 * k))
            assert val == pytest.approx(math.pi * math.factorial(k) / cfg.nu ** (k + 1), rel=1e-12)

    def test_nonfinite_names_node(self):
        cfg = SpaceConfig(g=1)
        bad = Separable(zfactor=lambda z: np.full(np.shape(z), np.nan, dtype=complex))
        with pytest.raises(QuadratureError, match="node"):
            inner_product(build_grid(cfg), bad, bad)

    def test_nonfinite_tensor(self):
        cfg = SpaceConfig(g=1)
        with pytest.raises(QuadratureError, match="node"):
            inner_product(build_grid(cfg), lambda z, zp: np.full(np.shape(z), np.inf), lambda z, zp: np.ones(np.shape(z)))


class TestGram:
    def test_g1(self):
        cfg = SpaceConfig(g=1, nu=1.0, alpha=0.3)
        G = gram_matrix(build_grid(cfg), index_window(cfg, 2, 0))
        assert np.max(np.abs(G - np.eye(len(G)))) < 1e-8

    def test_single(self):
        cfg = SpaceConfig(g=2)
        G = gram_matrix(build_grid(cfg), [BasisIndex(1, (2,))])
        assert G.shape == (1, 1) and abs(G[0, 0] - 1) < 1e-12

    def test_g3_monomials(self):
        cfg = SpaceConfig(g=3, nu=1.0, alpha=0.3)
        idx = [BasisIndex(0, k) for k in multi_indices(2, 2)]
        G = gram_matrix(build_grid(cfg), idx)
        assert np.max(np.abs(G - np.eye(len(G)))) < 1e-10

    def test_hermitian(self):
        cfg = SpaceConfig(g=2, nu=0.5)
        G = gram_matrix(build_grid(cfg), default_window(cfg))
        assert np.array_equal(G, G.conj().T)

    def test_unnormalized_diagonal(self):
        cfg = SpaceConfig(g=2, nu=2.0, alpha=0.3, n_max=2, k_max=2)
        idx = default_window(cfg)
        G = gram_matrix(build_grid(cfg), idx, normalized=False)
        norms = np.array([norm_squared(cfg, i) for i in idx])
        assert np.allclose(np.diag(G).real, norms, rtol=1e-12)

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            gram_matrix(build_grid(SpaceConfig()), [BasisIndex(0, (0,))] * 2)

    @pytest.mark.parametrize("g, nu", [(1, 0.5), (2, 1.0), (3, 2.0)])
    def test_doubling_stability(self, g, nu):
        cfg = SpaceConfig(g=g, nu=nu, alpha=0.3, n_max=2, k_max=2)
        fine = cfg.replace(quad=QuadratureSpec(2 * cfg.quad.x_points, 2 * cfg.quad.hermite_order, 2 * cfg.quad.zprime_order))
        idx = default_window(cfg)
        a = gram_matrix(build_grid(cfg), idx, normalized=False)
        b = gram_matrix(build_grid(fine), idx, normalized=False)
        scale = np.sqrt(np.outer(np.diag(a).real, np.diag(a).real))
        assert np.max(np.abs(a - b) / scale) < 1e-10
