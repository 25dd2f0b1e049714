import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetafock import BasisIndex, DegenerateInputError, DimensionError, Point, SpaceConfig, norm_squared
from thetafock.expansion import (
    Expansion,
    automorphy_residual,
    catalog_function,
    expand,
    fourier_slice,
    norm_growth,
    norm_growth_slices,
    pointwise_bound,
    random_expansion,
    reconstruct,
)
from thetafock.quadrature import build_grid, inner_product


def rand_point(rng, g, box=0.6):
    c = rng.uniform(-box, box, 2 * g)
    return Point(complex(c[0], c[1]), tuple(complex(a, b) for a, b in zip(c[2::2], c[3::2])))


def coeff_err(a: Expansion, b: Expansion) -> float:
    keys = set(a.coeffs) | set(b.coeffs)
    scale = max(abs(v) for v in a.coeffs.values())
    return max(abs(a.coeffs.get(k, 0) - b.coeffs.get(k, 0)) for k in keys) / scale


@pytest.fixture
def cfg2():
    return SpaceConfig(g=2, nu=1.0, alpha=0.3, n_max=3, k_max=3)


class TestExpansionType:
    def test_window(self, cfg2):
        with pytest.raises(ValueError, match="window"):
            Expansion(cfg2, {BasisIndex(4, (0,)): 1})
        with pytest.raises(ValueError):
            Expansion(cfg2, {BasisIndex(0, (4,)): 1})

    def test_dimension(self, cfg2):
        with pytest.raises(DimensionError):
            Expansion(cfg2, {BasisIndex(0, (0, 0)): 1})

    def test_tuple_keys(self, cfg2):
        e = Expansion(cfg2, {(1, (2,)): 1j})
        assert e.coeffs == {BasisIndex(1, (2,)): 1j}

    def test_json_roundtrip(self, cfg2, rng):
        e = random_expansion(cfg2, 8, rng)
        d = json.loads(e.to_json())
        assert set(d) == {"coeffs"}
        assert set(d["coeffs"][0]) == {"n", "k", "re", "im"}
        assert Expansion.from_json(cfg2, e.to_json()).coeffs == e.coeffs

    def test_load(self, cfg2, tmp_path):
        e = Expansion(cfg2, {BasisIndex(-1, (1,)): 2 - 1j})
        p = tmp_path / "e.json"
        p.write_text(e.to_json())
        assert Expansion.load(cfg2, p).coeffs == e.coeffs


class TestFourierSlice:
    @pytest.mark.parametrize("k", [0, 1, 3])
    def test_single_basis(self, cfg2, k, rng):
        f = Expansion(cfg2, {BasisIndex(3, (k,)): 1})
        for _ in range(5):
            zp = complex(*rng.uniform(-1, 1, 2))
            assert abs(fourier_slice(cfg2, f, 3, [zp]) - zp**k) < 1e-12 * max(1, abs(zp) ** k)
            for n in (-3, -1, 0, 2):
                assert abs(fourier_slice(cfg2, f, n, [zp])) < 1e-12

    def test_linearity(self, cfg2):
        f = Expansion(cfg2, {BasisIndex(0, (0,)): 2, BasisIndex(1, (0,)): 1j})
        for zp in (0, 0.3 - 0.2j, 1.5j):
            assert abs(fourier_slice(cfg2, f, 1, [zp]) - 1j) < 1e-13

    def test_random_slices(self, cfg2, rng):
        e = random_expansion(cfg2, 10, rng)
        zp = np.array([[0.2 + 0.1j], [-0.4j], [0.7]])
        for n in range(-3, 4):
            got = fourier_slice(cfg2, e, n, zp)
            want = np.array([sum(a * z[0] ** k[0] for k, a in e.slice_coefficients(n).items()) for z in zp])
            scale = max(1.0, np.max(np.abs(want)))
            assert np.max(np.abs(got - want)) <= 1e-11 * scale

    def test_below_nyquist(self, cfg2):
        with pytest.raises(ValueError, match="Nyquist"):
            fourier_slice(cfg2, catalog_function(cfg2, "zero"), 0, [0], M=7)


class TestExpand:
    @pytest.mark.parametrize("idx", [BasisIndex(0, (0,)), BasisIndex(-2, (3,)), BasisIndex(3, (1,))])
    def test_single(self, cfg2, idx):
        e = expand(cfg2, Expansion(cfg2, {idx: 1}))
        assert set(e.coeffs) == {idx}
        assert abs(e.coeffs[idx] - 1) < 1e-10

    def test_zero(self, cfg2):
        assert len(expand(cfg2, catalog_function(cfg2, "zero"))) == 0

    @pytest.mark.parametrize("g, nu", [(1, 0.5), (2, 1.0), (3, 2.0)])
    def test_random_roundtrip(self, g, nu):
        cfg = SpaceConfig(g=g, nu=nu, alpha=0.3, n_max=3, k_max=3)
        rng = np.random.default_rng(17)
        for _ in range(3):
            e = random_expansion(cfg, 15, rng)
            assert coeff_err(e, expand(cfg, e)) < 1e-9

    def test_catalog_basis(self, cfg2):
        e = expand(cfg2, catalog_function(cfg2, "basis:1:2"))
        assert list(e.coeffs) == [BasisIndex(1, (2,))]

    def test_catalog_unknown(self, cfg2):
        with pytest.raises(ValueError):
            catalog_function(cfg2, "bessel")


class TestReconstruct:
    def test_empty(self, cfg2):
        assert reconstruct(Expansion(cfg2), Point.of(0.3, 0.1j)) == 0

    def test_unit_at_origin(self, cfg2):
        assert reconstruct(Expansion(cfg2, {BasisIndex(0, (0,)): 1}), Point.of(0, 0)) == pytest.approx(1, abs=1e-15)

    def test_roundtrip_points(self, cfg2, rng):
        e = random_expansion(cfg2, 10, rng)
        e2 = expand(cfg2, e)
        for _ in range(20):
            u = rand_point(rng, 2)
            a, b = reconstruct(e, u), reconstruct(e2, u)
            assert abs(a - b) <= 1e-9 * max(abs(a), 1e-300) or abs(a - b) < 1e-12


class TestNorm:
    def test_single(self, cfg2):
        idx = BasisIndex(0, (0,))
        assert norm_growth(Expansion(cfg2, {idx: 1})) == pytest.approx(norm_squared(cfg2, idx), rel=1e-14)

    def test_pythagoras(self, cfg2):
        a, b = BasisIndex(0, (0,)), BasisIndex(1, (1,))
        e = Expansion(cfg2, {a: 3, b: 2 + 1j})
        assert norm_growth(e) == pytest.approx(9 * norm_squared(cfg2, a) + 5 * norm_squared(cfg2, b), rel=1e-14)

    def test_empty_is_zero(self, cfg2):
        assert norm_growth(Expansion(cfg2)) == 0.0

    def test_parseval_quadrature(self, cfg2):
        rng = np.random.default_rng(4)
        grid = build_grid(cfg2)
        for _ in range(5):
            e = random_expansion(cfg2, 10, rng)
            q = inner_product(grid, e.as_separable(), e.as_separable())
            assert abs(q - norm_growth(e)) <= 1e-8 * norm_growth(e)

    @pytest.mark.parametrize("g", [1, 2, 3])
    def test_slice_form(self, g):
        cfg = SpaceConfig(g=g, nu=0.7, alpha=-0.2, n_max=2, k_max=3)
        e = random_expansion(cfg, 10, np.random.default_rng(g))
        assert norm_growth_slices(e) == pytest.approx(norm_growth(e), rel=1e-12)


class TestAutomorphy:
    @settings(max_examples=40)
    @given(st.integers(-3, 3), st.integers(0, 2**32 - 1))
    def test_members(self, m, seed):
        cfg = SpaceConfig(g=2, nu=1.0, alpha=0.3, n_max=3, k_max=3)
        rng = np.random.default_rng(seed)
        e = random_expansion(cfg, 10, rng)
        assert automorphy_residual(cfg, e, m, rand_point(rng, 2)) < 1e-11

    def test_zero_shift(self, cfg2):
        assert automorphy_residual(cfg2, catalog_function(cfg2, "gaussian"), 0, Point.of(0.4, 1j)) == 0.0

    def test_gaussian_not_member(self, cfg2):
        assert automorphy_residual(cfg2, catalog_function(cfg2, "gaussian"), 1, Point.of(0.1, 0)) > 1e-3

    def test_gaussian_member_integer_alpha(self):
        cfg = SpaceConfig(g=2, nu=1.0, alpha=0.0)
        f = catalog_function(cfg, "gaussian")
        assert automorphy_residual(cfg, f, 2, Point.of(0.1 + 0.2j, 0)) < 1e-12


class TestPointwiseBound:
    def test_degenerate(self, cfg2):
        with pytest.raises(DegenerateInputError):
            pointwise_bound(Expansion(cfg2), Point.of(0, 0))
        with pytest.raises(DegenerateInputError):
            pointwise_bound(Expansion(cfg2, {BasisIndex(0, (0,)): 0}), Point.of(0, 0))

    def test_single_term_tight(self, cfg2, rng):
        for idx in (BasisIndex(0, (0,)), BasisIndex(2, (1,)), BasisIndex(-3, (3,))):
            e = Expansion(cfg2, {idx: 0.5 - 2j})
            for _ in range(50):
                u = rand_point(rng, 2)
                f, b = abs(reconstruct(e, u)), pointwise_bound(e, u)
                assert f <= b * (1 + 1e-12)
                assert b == pytest.approx(f, rel=1e-9)

    def test_random_sound(self, cfg2, rng):
        for _ in range(200):
            e = random_expansion(cfg2, int(rng.integers(1, 12)), rng)
            u = rand_point(rng, 2, box=1.0)
            assert abs(reconstruct(e, u)) <= pointwise_bound(e, u) * (1 + 1e-12)

    def test_real_slice_prefactor(self):
        # on y = 0 the bound of a single n = 0 term scales like exp(nu x^2 / 2)
        cfg = SpaceConfig(g=1, nu=1.3, alpha=0.0, n_max=1, k_max=0)
        e = Expansion(cfg, {BasisIndex(0, ()): 1})
        b0 = pointwise_bound(e, Point.of(0.0))
        for x in (0.2, 0.5, 0.9):
            assert pointwise_bound(e, Point.of(x)) / b0 == pytest.approx(math.exp(0.5 * cfg.nu * x * x), rel=1e-13)


def test_partial_sums_converge_uniformly_on_box():
    # sup over a compact box of |f - S_N|, S_N keeping |n| <= N, shrinks with N
    cfg = SpaceConfig(g=2, nu=1.0, alpha=0.3, n_max=3, k_max=1)
    full = {BasisIndex(n, (k,)): math.exp(-3 * n * n) for n in range(-3, 4) for k in (0, 1)}
    f = Expansion(cfg, full)
    xs = np.linspace(0, 1, 9)
    ys = np.linspace(-0.5, 0.5, 5)
    Z = (xs[:, None] + 1j * ys[None, :]).ravel()
    ZP = np.full((Z.size, 1), 0.3 - 0.2j)
    ref = f.values(Z, ZP)
    sups = []
    for N in range(4):
        part = Expansion(cfg, {i: a for i, a in full.items() if abs(i.n) <= N})
        sups.append(np.max(np.abs(ref - part.values(Z, ZP))))
    assert all(b < a for a, b in zip(sups, sups[1:-1]))
    assert sups[-1] == 0
