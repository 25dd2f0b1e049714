"""The shifted theta series

    theta_{alpha,beta}(z | tau) = sum_n exp(i pi (n+alpha)^2 tau + 2 i pi (n+alpha)(z+beta))

evaluated by symmetric truncation |n| <= N with a certified bound on the
omitted tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationError, UnreachableToleranceError

MAX_TERMS = 10**7
EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class ThetaArgs:
    alpha: float
    beta: float
    z: complex
    tau: complex

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "tau", complex(self.tau))
        if not self.tau.imag > 0:
            raise DomainError(f"tau must lie in the upper half-plane, got {self.tau}")


@dataclass(frozen=True)
class ThetaResult:
    value: complex
    n_used: int
    tail_bound: float

    def to_dict(self) -> dict:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "n_used": self.n_used,
            "tail_bound": self.tail_bound,
        }


def min_truncation(alpha: float) -> int:
    """Smallest N for which |n| > N implies |n| > |alpha|."""
    return max(0, math.ceil(abs(alpha)))


def _log_tail(t: float, c: float, a: float, N: int) -> tuple[float, float]:
    # T_m = exp(-pi t (m-a)^2 + c (m+a)); ratio T_{m+1}/T_m decreases in m
    m = N + 1
    log_T = -math.pi * t * (m - a) ** 2 + c * (m + a)
    log_r = -math.pi * t * (2 * (m - a) + 1) + c
    return log_T, log_r


def tail_bound(alpha: float, imag_z: float, t: float, N: int) -> float:
    """Bound on sum_{|n|>N} |term_n| for Im tau = t and |Im(z+beta)| <= imag_z."""
    if N < min_truncation(alpha):
        raise TruncationError(f"N={N} is below ceil(|alpha|)={min_truncation(alpha)}")
    a = abs(alpha)
    c = 2 * math.pi * abs(imag_z)
    log_T, log_r = _log_tail(t, c, a, N)
    if log_r >= 0:
        raise TruncationError(f"N={N} too small: term ratio exp({log_r:.3g}) >= 1")
    return 2.0 * math.exp(log_T) / -math.expm1(log_r)


def theta_tail_bound(args: ThetaArgs, N: int) -> float:
    """Certified upper bound for the modulus of the tail omitted at order N.

    Each side of the tail is dominated by the geometric series
    T_{N+1} / (1 - r) with T_m = exp(-pi t (m-|alpha|)^2 + c (m+|alpha|)),
    t = Im tau, c = 2 pi |Im z| and r = T_{N+2} / T_{N+1}, the largest
    successive ratio beyond N.  Raises TruncationError when r >= 1.
    """
    return tail_bound(args.alpha, args.z.imag, args.tau.imag, int(N))


def truncation_order(alpha: float, imag_z: float, t: float, tol: float) -> int:
    """Smallest admissible N whose tail bound is below ``tol``."""
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")

    def ok(N):
        try:
            return tail_bound(alpha, imag_z, t, N) < tol
        except TruncationError:
            return False

    lo = min_truncation(alpha)
    if ok(lo):
        return lo
    # the predicate is monotone in N, so bracket then bisect
    hi = max(lo, 1)
    while not ok(hi):
        if hi > MAX_TERMS:
            raise UnreachableToleranceError(
                f"tolerance {tol:g} needs more than {MAX_TERMS} terms (Im tau={t:g})"
            )
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    if hi > MAX_TERMS:
        raise UnreachableToleranceError(
            f"tolerance {tol:g} needs {hi} > {MAX_TERMS} terms (Im tau={t:g})"
        )
    return hi


def _term_order(N: int) -> list[int]:
    # symmetric pairs from the outside in, n = 0 added last
    order = []
    for m in range(N, 0, -1):
        order.extend((-m, m))
    order.append(0)
    return order


def theta_partial(alpha: float, beta: float, z, tau: complex, N: int):
    """Compensated partial sum over |n| <= N; ``z`` may be an array.

    Returns (sum, sum of term moduli).
    """
    z = np.asarray(z, dtype=complex)
    total = np.zeros(z.shape, dtype=complex)
    comp = np.zeros(z.shape, dtype=complex)
    scale = np.zeros(z.shape, dtype=float)
    w = z + beta
    for n in _term_order(int(N)):
        s = n + alpha
        term = np.exp(1j * math.pi * s * s * tau + 2j * math.pi * s * w)
        scale += np.abs(term)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total, scale


def theta_sum(args: ThetaArgs, N: int) -> complex:
    """Partial sum over |n| <= N, without any tolerance logic."""
    value, _ = theta_partial(args.alpha, args.beta, args.z, args.tau, N)
    return complex(value)


def theta_eval(args: ThetaArgs, tol: float, full_output: bool = False):
    """Evaluate theta_{alpha,beta}(z | tau) with omitted tail below ``tol``.

    Parameters
    ----------
    args : ThetaArgs
    tol : float
        Absolute bound on the modulus of the discarded tail.
    full_output : bool
        If true return a :class:`ThetaResult` carrying the truncation order
        and the certified tail bound.

    Raises
    ------
    UnreachableToleranceError
        If the truncation order would exceed ``MAX_TERMS``, or ``tol`` lies
        below eps**2 times the sum of term moduli, where not even
        compensated summation resolves the tail.
    """
    N = truncation_order(args.alpha, args.z.imag, args.tau.imag, tol)
    value, scale = theta_partial(args.alpha, args.beta, args.z, args.tau, N)
    floor = EPS * EPS * float(scale)
    if tol < floor:
        raise UnreachableToleranceError(
            f"tolerance {tol:g} is below the summation floor {floor:.3g}"
        )
    value = complex(value)
    if full_output:
        return ThetaResult(value, N, theta_tail_bound(args, N))
    return value


def theta_array(alpha: float, beta: float, z, tau: complex, tol: float) -> np.ndarray:
    """Vectorized theta over an array of ``z`` with a common truncation order."""
    z = np.asarray(z, dtype=complex)
    tau = complex(tau)
    if not tau.imag > 0:
        raise DomainError(f"tau must lie in the upper half-plane, got {tau}")
    imag_max = float(np.max(np.abs(z.imag))) if z.size else 0.0
    N = truncation_order(alpha, imag_max, tau.imag, tol)
    value, _ = theta_partial(alpha, beta, z, tau, N)
    return value
