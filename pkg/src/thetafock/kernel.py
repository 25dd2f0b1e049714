"""Reproducing kernel: basis series and theta closed form.

The series

    K(u, v) = sum_{n,k} e_{n,k}(u) conj(e_{n,k}(v)) / ||e_{n,k}||^2

is the reference.  Summing it in closed form gives

    K(u, v) = C exp(nu (z^2 + conj(w)^2) / 2) theta_{alpha,0}(z - conj(w) | tau)
              exp(nu sum_j z_j conj(w_j)),

and :func:`calibrate_kernel` recovers C and tau from the series instead of
trusting a printed constant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import log_norm_squared, log_zfactor, multi_indices
from .errors import CalibrationError, DomainError
from .geometry import BasisIndex, MultiIndex, Point, SpaceConfig
from .quadrature import Grid, Separable, build_grid, inner_product
from .theta import (
    ThetaArgs,
    theta_array,
    theta_eval,
    theta_partial,
    theta_tail_bound,
    truncation_order,
)

EPS = float(np.finfo(float).eps)
CALIBRATION_THRESHOLD = 1e-9
MAX_KDEG = 200


def printed_constant(cfg: SpaceConfig) -> float:
    return math.sqrt(1.0 / (2 * math.pi * cfg.nu)) * (2 * cfg.nu) ** (-cfg.g)


PRINTED_TAU = 2j * math.pi


@dataclass(frozen=True)
class KernelSpec:
    """A calibrated closed form together with the printed candidates."""

    cfg: SpaceConfig
    closed_form_constant: float
    tau_kernel: complex
    printed_constant: float = float("nan")
    printed_tau: complex = PRINTED_TAU
    max_rel_dev: float = float("nan")
    printed_max_rel_dev: float = float("nan")
    n_probes: int = 0

    def __post_init__(self):
        if not complex(self.tau_kernel).imag > 0:
            raise DomainError(f"tau_kernel must lie in the upper half-plane, got {self.tau_kernel}")
        if not self.closed_form_constant > 0:
            raise DomainError(f"closed_form_constant must be positive, got {self.closed_form_constant}")

    def to_dict(self) -> dict:
        return {
            "fitted_constant": self.closed_form_constant,
            "printed_constant": self.printed_constant,
            "fitted_tau": [self.tau_kernel.real, self.tau_kernel.imag],
            "printed_tau": [self.printed_tau.real, self.printed_tau.imag],
            "max_rel_dev": self.max_rel_dev,
            "printed_max_rel_dev": self.printed_max_rel_dev,
            "probes": self.n_probes,
        }


def _rho(cfg: SpaceConfig, u: Point, v: Point) -> float:
    return cfg.nu * sum(abs(a) * abs(b) for a, b in zip(u.zprime, v.zprime))


def exp_remainder(rho: float, K: int) -> float:
    """Bound rho^(K+1) e^rho / (K+1)! on the degree > K part of exp(sum_j rho_j)."""
    if rho == 0:
        return 0.0
    return math.exp((K + 1) * math.log(rho) + rho - math.lgamma(K + 2))


def kernel_truncation(cfg: SpaceConfig, u: Point, v: Point, tol: float | None = None) -> tuple[int, int]:
    """Default (N, Kdeg) for :func:`kernel_series`.

    N comes from the theta tail bound for argument z - conj(w) with
    tau = 2 pi i / nu; Kdeg is the first degree whose exponential remainder,
    relative to e^rho with rho = nu sum_j |z_j w_j|, drops below ``tol``.
    """
    tol = cfg.theta_tol if tol is None else tol
    imag = (u.z - v.z.conjugate()).imag
    N = truncation_order(cfg.alpha, imag, 2 * math.pi / cfg.nu, tol)
    rho = _rho(cfg, u, v)
    K = 0
    if cfg.g > 1:
        while rho > 0 and exp_remainder(rho, K) > tol * math.exp(rho):
            K += 1
            if K > MAX_KDEG:
                raise DomainError(f"transverse coordinates too large (rho={rho:g}) for the series")
    return N, K


def _series_terms(cfg: SpaceConfig, u: Point, v: Point, N: int, Kdeg: int) -> np.ndarray:
    ks = multi_indices(cfg.g - 1, Kdeg)
    ns = np.arange(-N, N + 1)
    zlog_u = np.array([log_zfactor(cfg, int(n), u.z) for n in ns])
    zlog_v = np.array([log_zfactor(cfg, int(n), v.z) for n in ns])
    mono_u = np.array([_log_monomial(u.zprime, k) for k in ks])
    mono_v = np.array([_log_monomial(v.zprime, k) for k in ks])
    log_norm = np.array([[log_norm_squared(cfg, BasisIndex(int(n), k)) for k in ks] for n in ns])
    return (
        (zlog_u + np.conj(zlog_v))[:, None]
        + (mono_u + np.conj(mono_v))[None, :]
        - log_norm
    )


def _log_monomial(zp, k) -> complex:
    out = 0j
    for zj, kj in zip(zp, k):
        if kj:
            if zj == 0:
                return complex(-np.inf, 0.0)
            out += kj * np.log(complex(zj))
    return out


def kernel_series(cfg: SpaceConfig, u: Point, v: Point, N: int | None = None, Kdeg: int | None = None) -> complex:
    """Partial sum of the basis expansion of K(u, v) over |n| <= N, |k| <= Kdeg.

    Every term is formed in log space as
    log e(u) + conj(log e(v)) - log ||e||^2 and exponentiated once.
    """
    u.check(cfg)
    v.check(cfg)
    if N is None or Kdeg is None:
        N0, K0 = kernel_truncation(cfg, u, v)
        N = N0 if N is None else N
        Kdeg = K0 if Kdeg is None else Kdeg
    if N < 0 or Kdeg < 0:
        raise ValueError("N and Kdeg must be nonnegative")
    logs = _series_terms(cfg, u, v, int(N), int(Kdeg))
    if np.any(logs.real > 700):
        raise OverflowError("kernel series term overflows; reduce |Im z| or |z'|")
    return complex(np.sum(np.exp(logs)))


def _closed_parts(cfg: SpaceConfig, tau: complex, u: Point, v: Point):
    gauss = np.exp(0.5 * cfg.nu * (u.z**2 + v.z.conjugate() ** 2))
    th = theta_eval(ThetaArgs(cfg.alpha, 0.0, u.z - v.z.conjugate(), tau), cfg.theta_tol)
    trans = np.exp(cfg.nu * sum((a * b.conjugate() for a, b in zip(u.zprime, v.zprime)), 0j))
    return complex(gauss * th * trans)


def kernel_closed(spec: KernelSpec, u: Point, v: Point) -> complex:
    """C exp(nu (z^2 + conj(w)^2)/2) theta_{alpha,0}(z - conj(w) | tau) exp(H~(u~, v~))."""
    cfg = spec.cfg
    u.check(cfg)
    v.check(cfg)
    return spec.closed_form_constant * _closed_parts(cfg, spec.tau_kernel, u, v)


def kernel_matrix(spec: KernelSpec, points) -> np.ndarray:
    """Closed-form Gram matrix [K(u_i, u_j)]."""
    pts = list(points)
    Kmat = np.empty((len(pts), len(pts)), dtype=complex)
    for i, a in enumerate(pts):
        for j, b in enumerate(pts):
            Kmat[i, j] = kernel_closed(spec, a, b)
    return Kmat


def probe_pairs(cfg: SpaceConfig, count: int, seed: int | None = None, z_box=(1.0, 0.5), zp_radius=0.5):
    """Seeded random point pairs in a compact box, used by calibration and checks."""
    rng = np.random.default_rng(cfg.seed if seed is None else seed)

    def point():
        z = complex(rng.uniform(-z_box[0], z_box[0]), rng.uniform(-z_box[1], z_box[1]))
        r = zp_radius * np.sqrt(rng.uniform(0, 1, cfg.g - 1))
        phi = rng.uniform(0, 2 * np.pi, cfg.g - 1)
        return Point(z, tuple(r * np.exp(1j * phi)))

    return [(point(), point()) for _ in range(count)]


def fit_tau(cfg: SpaceConfig, n_fit: int = 3) -> tuple[complex, float]:
    """Read tau off the n-dependence of the series weights 1 / ||e_{n,0}||^2.

    The weights are fitted to a + b (n + alpha)^2; matching exp(i pi s^2 tau)
    gives tau = b / (i pi).  Returns (tau, max relative fit residual).
    """
    k0 = MultiIndex((0,) * (cfg.g - 1))
    ns = np.arange(-n_fit, n_fit + 1)
    s2 = (ns + cfg.alpha) ** 2
    w = np.array([-log_norm_squared(cfg, BasisIndex(int(n), k0)) for n in ns])
    A = np.stack([np.ones_like(s2), s2], axis=1)
    coef, *_ = np.linalg.lstsq(A, w, rcond=None)
    resid = float(np.max(np.abs(A @ coef - w)) / max(1.0, float(np.max(np.abs(w)))))
    tau = complex(coef[1] / (1j * math.pi))
    return tau, resid


def calibrate_kernel(cfg: SpaceConfig, probes: int = 50, seed: int | None = None) -> KernelSpec:
    """Fit (C, tau) of the closed form against :func:`kernel_series`.

    tau is read from the series weights, C by least squares over ``probes``
    seeded point pairs.  Raises CalibrationError if the fitted closed form
    deviates from the series by more than 1e-9 relative on any probe.
    """
    tau, resid = fit_tau(cfg)
    if resid > 1e-12:
        raise CalibrationError(f"series weights are not Gaussian in n + alpha (residual {resid:.3g})")
    if not tau.imag > 0:
        raise CalibrationError(f"fitted tau {tau} is not in the upper half-plane")
    pairs = probe_pairs(cfg, probes, seed)
    S = np.array([kernel_series(cfg, u, v) for u, v in pairs])
    B = np.array([_closed_parts(cfg, tau, u, v) for u, v in pairs])
    C = float((np.vdot(B, S) / np.vdot(B, B)).real)
    if not C > 0:
        raise CalibrationError(f"fitted constant {C} is not positive")
    dev = float(np.max(np.abs(C * B - S) / np.abs(S)))
    if dev > CALIBRATION_THRESHOLD:
        raise CalibrationError(f"closed form deviates from the series by {dev:.3g} > {CALIBRATION_THRESHOLD}")
    pc = printed_constant(cfg)
    Bp = np.array([_closed_parts(cfg, PRINTED_TAU, u, v) for u, v in pairs])
    pdev = float(np.max(np.abs(pc * Bp - S) / np.abs(S)))
    return KernelSpec(cfg, C, tau, pc, PRINTED_TAU, dev, pdev, probes)


def analytic_constant(cfg: SpaceConfig) -> float:
    """sqrt(2 nu / pi) (nu / pi)^(g-1): the reciprocal n-sum and k-sum normalizers."""
    return math.sqrt(2 * cfg.nu / math.pi) * (cfg.nu / math.pi) ** (cfg.g - 1)


def kernel_tail_bound(spec: KernelSpec, u: Point, v: Point, N: int, Kdeg: int) -> float:
    """Bound on |kernel_series(u, v; N, Kdeg) - kernel_closed(u, v)|.

    Combines the theta tail at order N, the exponential remainder at degree
    Kdeg, the closed form's own theta truncation and a rounding allowance.
    """
    cfg = spec.cfg
    nu = cfg.nu
    arg = u.z - v.z.conjugate()
    args = ThetaArgs(cfg.alpha, 0.0, arg, 2j * math.pi / nu)
    zpref = math.sqrt(2 * nu / math.pi) * abs(np.exp(0.5 * nu * (u.z**2 + v.z.conjugate() ** 2)))
    tpref = (nu / math.pi) ** (cfg.g - 1)
    rho = _rho(cfg, u, v)
    _, zscale = theta_partial(cfg.alpha, 0.0, arg, args.tau, N)
    z_tail = zpref * theta_tail_bound(args, N)
    z_partial = zpref * float(zscale)
    e_full = math.exp(rho)
    e_tail = exp_remainder(rho, Kdeg) if cfg.g > 1 else 0.0
    closed_tail = spec.closed_form_constant * abs(
        np.exp(0.5 * nu * (u.z**2 + v.z.conjugate() ** 2))
    ) * cfg.theta_tol * e_full
    rounding = 64 * EPS * (z_partial + z_tail) * tpref * e_full
    return z_tail * tpref * e_full + z_partial * tpref * e_tail + closed_tail + rounding


def kernel_section(spec: KernelSpec, u: Point) -> Separable:
    """The function v -> K(v, u) as a separable integrand."""
    cfg = spec.cfg
    u.check(cfg)
    zc = u.z.conjugate()
    C, tau, nu = spec.closed_form_constant, spec.tau_kernel, cfg.nu

    def zfactor(w):
        w = np.asarray(w, dtype=complex)
        return C * np.exp(0.5 * nu * (w * w + zc * zc)) * theta_array(cfg.alpha, 0.0, w - zc, tau, cfg.theta_tol)

    trans = tuple((lambda w, c=zj.conjugate(): np.exp(nu * w * c)) for zj in u.zprime)
    return Separable(zfactor=zfactor, transverse=trans)


def reproduce(spec: KernelSpec, f, u: Point, grid: Grid | None = None) -> complex:
    """Quadrature value of int K(u, v) f(v) exp(-H(v, v)) dlambda(v) over the cell."""
    grid = build_grid(spec.cfg) if grid is None else grid
    return inner_product(grid, f, kernel_section(spec, u), contour_shift=True)
