"""
Truncating the shifted theta series
===================================

The library sums theta_{alpha,beta}(z|tau) over |n| <= N and certifies the
omitted part with a geometric tail bound.  Here we watch the actual error
and the bound shrink together as N grows.
"""
import cmath
import math

from thetafock import ThetaArgs, theta_eval, theta_tail_bound
from thetafock.theta import theta_sum

# classical value: theta_3(0 | i) = pi^(1/4) / Gamma(3/4)
exact = math.pi**0.25 / math.gamma(0.75)
res = theta_eval(ThetaArgs(0.0, 0.0, 0.0, 1j), tol=1e-15, full_output=True)
print(f"theta(0|i) = {res.value.real:.16f}   (closed form {exact:.16f}, N = {res.n_used})")

# a shifted, twisted argument off the real axis
args = ThetaArgs(alpha=0.3, beta=-0.1, z=0.2 + 0.35j, tau=0.1 + 0.8j)
ref = theta_eval(args, tol=1e-16)
print("\n N    |error|        tail bound")
for N in range(1, 8):
    err = abs(theta_sum(args, N) - ref)
    print(f"{N:2d}   {err:.3e}      {theta_tail_bound(args, N):.3e}")

# the two quasi-periods: z -> z + 1 picks up exp(2 i pi alpha),
# z -> z + tau picks up exp(-i pi tau - 2 i pi (z + beta))
def theta_at(z):
    return theta_eval(ThetaArgs(args.alpha, args.beta, z, args.tau), tol=1e-15)


shift_one = theta_at(args.z + 1) - cmath.exp(2j * math.pi * args.alpha) * ref
shift_tau = theta_at(args.z + args.tau) - cmath.exp(-1j * math.pi * args.tau - 2j * math.pi * (args.z + args.beta)) * ref
print(f"\nz -> z + 1   residual {abs(shift_one) / abs(ref):.2e}")
print(f"z -> z + tau residual {abs(shift_tau) / abs(ref):.2e}")
