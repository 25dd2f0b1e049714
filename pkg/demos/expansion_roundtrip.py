"""
Members of the space and their expansions
=========================================

Any member is a finite or convergent sum of basis functions.  Starting
from a random member we recover its coefficients by Fourier slices along
the real z axis, check Parseval against quadrature, test the functional
equation on members and non-members, and probe the pointwise bound.
"""
import numpy as np

from thetafock import Point, SpaceConfig, automorphy_residual, expand, norm_growth, pointwise_bound, reconstruct
from thetafock.expansion import norm_growth_slices, random_expansion
from thetafock.quadrature import build_grid, inner_product
from thetafock.verify import planted_nonmembers

cfg = SpaceConfig(g=2, nu=1.0, alpha=0.3)
rng = np.random.default_rng(7)

f = random_expansion(cfg, 12, rng)
print(f"random member with {len(f)} terms")
for idx, a in list(f.coeffs.items())[:4]:
    print(f"  a(n={idx.n:+d}, k={tuple(idx.k)}) = {a:.6f}")

# recover the coefficients from point evaluations only
g = expand(cfg, lambda z, zp: f.values(z, zp))
err = max(abs(f.coeffs[i] - g.coeffs.get(i, 0)) for i in f.coeffs)
print(f"coefficient recovery error: {err:.1e}")

# three ways to the norm
grid = build_grid(cfg)
sep = f.as_separable()
print(f"\n||f||^2 basis sum  {norm_growth(f):.12e}")
print(f"||f||^2 slices     {norm_growth_slices(f):.12e}")
print(f"||f||^2 quadrature {inner_product(grid, sep, sep).real:.12e}")

# functional equation f(z+m, z') = chi(m) exp(nu (z + m/2) m) f(z, z')
u = Point.of(0.4 + 0.2j, -0.3 + 0.6j)
print("\nautomorphy residuals at m = 1")
print(f"  member          {automorphy_residual(cfg, f, 1, u):.1e}")
for name, h in planted_nonmembers(cfg).items():
    print(f"  {name:15s} {automorphy_residual(cfg, h, 1, u):.1e}")

# pointwise bound: tight for one term; for many terms the norm is
# dominated by the fastest-growing basis elements and the bound is loose
one = random_expansion(cfg, 1, rng)
for label, e in (("single term", one), ("12 terms", f)):
    pts = [Point.of(complex(*rng.uniform(-1, 1, 2)), complex(*rng.uniform(-1, 1, 2))) for _ in range(200)]
    ratios = [abs(reconstruct(e, p)) / pointwise_bound(e, p) for p in pts]
    print(f"|f| / bound, {label}: max {max(ratios):.3e}, median {np.median(ratios):.3e}")
