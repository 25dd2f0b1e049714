"""
Reproducing kernel: series against theta closed form
====================================================

K(u, v) = sum_{n,k} e_{n,k}(u) conj(e_{n,k}(v)) / ||e_{n,k}||^2 can be
summed in closed form with a theta function.  The constant and the theta
parameter are fitted against the series, then compared with the printed
values.
"""
import numpy as np

from thetafock import BasisIndex, Point, SpaceConfig, calibrate_kernel, kernel_closed, kernel_series
from thetafock.kernel import kernel_matrix, probe_pairs, reproduce
from thetafock.quadrature import basis_separable, build_grid
from thetafock.basis import BasisFunction, basis_eval

for nu in (0.5, 1.0, 4.0):
    spec = calibrate_kernel(SpaceConfig(g=2, nu=nu, alpha=0.3))
    print(f"nu = {nu}: fitted tau = {spec.tau_kernel:.6f} (2 pi i / nu = {2j * np.pi / nu:.6f}), "
          f"printed tau = {spec.printed_tau:.6f}")
    print(f"    fitted C = {spec.closed_form_constant:.10f}, printed C = {spec.printed_constant:.10f}")
    print(f"    series deviation: fitted {spec.max_rel_dev:.1e}, printed {spec.printed_max_rel_dev:.1e}")

cfg = SpaceConfig(g=2, nu=1.0, alpha=0.3)
spec = calibrate_kernel(cfg)

print("\nseries vs closed form at a few pairs")
for u, v in probe_pairs(cfg, 4, seed=1):
    s, c = kernel_series(cfg, u, v), kernel_closed(spec, u, v)
    print(f"  {s:.10f}   {c:.10f}   rel {abs(s - c) / abs(s):.1e}")

# positive semidefinite on any finite point set
rng = np.random.default_rng(0)
pts = [Point.of(complex(*rng.uniform(-1, 1, 2)), complex(*rng.uniform(-1, 1, 2))) for _ in range(8)]
K = kernel_matrix(spec, pts)
print(f"\nsmallest eigenvalue of an 8x8 kernel matrix: {np.linalg.eigvalsh(K).min():.3e}")

# reproducing property: <e, K(., u)> = e(u)
grid = build_grid(cfg)
u = Point.of(0.3 - 0.2j, 0.5j)
for idx in [BasisIndex(0, (0,)), BasisIndex(2, (1,)), BasisIndex(-1, (2,))]:
    got = reproduce(spec, basis_separable(cfg, idx), u, grid)
    want = basis_eval(BasisFunction(cfg, idx), u)
    print(f"reproduce e_({idx.n},{idx.k[0]}): rel. error {abs(got - want) / abs(want):.1e}")
