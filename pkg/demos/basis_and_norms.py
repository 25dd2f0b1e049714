"""
The orthogonal basis and its norms
==================================

Basis functions e_{n,k}(z, z') = z'^k exp(nu z^2/2 + 2 i pi (alpha+n) z)
are orthogonal for the Gaussian inner product over the fundamental domain
[0,1] x R x C^(g-1).  We confirm this by quadrature and compare the
quadrature norms with the closed form, and with the printed variants of
the norm constant.
"""
import numpy as np

from thetafock import BasisFunction, BasisIndex, Point, SpaceConfig, basis_eval, build_grid, gram_matrix
from thetafock import index_window, norm_squared, norm_squared_printed
from thetafock.basis import automorphy_factor
from thetafock.quadrature import basis_separable, inner_product

cfg = SpaceConfig(g=2, nu=1.0, alpha=0.3)
grid = build_grid(cfg)
print(cfg)

# one basis function, and its functional equation under z -> z + 2
e = BasisFunction(cfg, BasisIndex(1, (2,)))
u = Point.of(0.2 + 0.1j, 0.4 - 0.3j)
lhs = basis_eval(e, Point.of(u.z + 2, *u.zprime))
rhs = automorphy_factor(cfg, u.z, 2) * basis_eval(e, u)
print(f"\ne_(1,2)(u) = {basis_eval(e, u):.6f}, functional equation residual {abs(lhs - rhs) / abs(lhs):.1e}")

# squared norms: quadrature against the closed form
print("\n  n  k   quadrature       closed form      rel. diff")
for idx in [BasisIndex(0, (0,)), BasisIndex(1, (1,)), BasisIndex(-2, (3,))]:
    f = basis_separable(cfg, idx)
    q = inner_product(grid, f, f).real
    c = norm_squared(cfg, idx)
    print(f"{idx.n:3d} {idx.k[0]:2d}   {q:.10e}  {c:.10e}  {abs(q - c) / c:.1e}")

# the Gram matrix of the normalized window is the identity
indices = index_window(cfg, 3, 3)
G = gram_matrix(grid, indices)
off = np.max(np.abs(G - np.diag(np.diag(G))))
print(f"\nGram matrix {G.shape}: max off-diagonal {off:.1e}, max |diag - 1| {np.max(np.abs(np.diag(G) - 1)):.1e}")

# the printed constants differ from the canonical one by an index-independent factor
for variant in ("thm32", "intro"):
    ratios = [norm_squared(cfg, i) / norm_squared_printed(cfg, i, variant) for i in indices]
    print(f"canonical / {variant}: {ratios[0]:.12f} (2 pi = {2 * np.pi:.12f}), spread {np.ptp(ratios) / ratios[0]:.1e}")
