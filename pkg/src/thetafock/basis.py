"""The orthogonal basis e_{n,k}(z, z') = exp(nu z^2/2 + 2 i pi (alpha+n) z) z'^k.

Squared norms
-------------
The canonical value follows from Fubini over [0,1] x R x C^(g-1):

    ||e_{n,k}||^2 = sqrt(pi/(2 nu)) (pi/nu)^(g-1) k!/nu^|k| exp(2 pi^2 (n+alpha)^2 / nu)

Two other constants circulate for the same quantity; ``norm_squared_printed``
exposes them (``"thm32"`` and ``"intro"`` differ from the canonical value by
the index-independent factor (2 pi)^(g-1); ``"lemma22"`` only covers k = 0).
The quadrature oracle in :mod:`thetafock.quadrature` decides between them.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .character import Character, chi_of
from .errors import BasisOverflowError, DimensionError
from .geometry import BasisIndex, MultiIndex, Point, SpaceConfig

LOG_MAX = math.log(np.finfo(float).max)
NORM_VARIANTS = ("lemma22", "thm32", "intro")


def multi_indices(dim: int, max_degree: int) -> list[MultiIndex]:
    """All multi-indices of length ``dim`` with |k| <= max_degree, graded order."""
    if dim == 0:
        return [MultiIndex(())]
    out = []
    for deg in range(max_degree + 1):
        for combo in itertools.product(range(deg + 1), repeat=dim):
            if sum(combo) == deg:
                out.append(MultiIndex(combo))
    return out


def index_window(cfg: SpaceConfig, n_window: int | None = None, k_window: int | None = None) -> list[BasisIndex]:
    """Indices with |n| <= n_window and |k| <= k_window (config defaults)."""
    nw = cfg.n_max if n_window is None else n_window
    kw = cfg.k_max if k_window is None else k_window
    ks = multi_indices(cfg.g - 1, kw)
    return [BasisIndex(n, k) for n in range(-nw, nw + 1) for k in ks]


@dataclass(frozen=True)
class BasisFunction:
    cfg: SpaceConfig
    index: BasisIndex

    def __post_init__(self):
        if not isinstance(self.index, BasisIndex):
            object.__setattr__(self, "index", BasisIndex(*self.index))
        if len(self.index.k) != self.cfg.g - 1:
            raise DimensionError(
                f"multi-index {tuple(self.index.k)} has length {len(self.index.k)}, "
                f"expected g - 1 = {self.cfg.g - 1}"
            )

    def __call__(self, u: Point) -> complex:
        return basis_eval(self, u)

    def values(self, z, zprime) -> np.ndarray:
        """Direct evaluation on arrays; ``zprime`` has shape z.shape + (g-1,)."""
        return np.exp(log_values(self.cfg, self.index, z, zprime))

    def zfactor_log(self, z) -> np.ndarray:
        return log_zfactor(self.cfg, self.index.n, z)


def log_zfactor(cfg: SpaceConfig, n: int, z) -> np.ndarray:
    """Complex logarithm of exp(nu z^2 / 2 + 2 i pi (alpha + n) z)."""
    z = np.asarray(z, dtype=complex)
    return 0.5 * cfg.nu * z * z + 2j * math.pi * (cfg.alpha + n) * z


def log_values(cfg: SpaceConfig, idx: BasisIndex, z, zprime) -> np.ndarray:
    """Complex log of e_{n,k} on arrays (real part -inf where a z_j with k_j > 0 vanishes)."""
    out = log_zfactor(cfg, idx.n, z)
    if cfg.g > 1:
        zp = np.asarray(zprime, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            for j, kj in enumerate(idx.k):
                if kj:
                    out = out + kj * np.log(zp[..., j])
    return out


def basis_eval(b: BasisFunction, u: Point) -> complex:
    """Direct evaluation exp(nu z^2/2 + 2 i pi (alpha+n) z) * prod z_j^k_j."""
    u.check(b.cfg)
    expo = 0.5 * b.cfg.nu * u.z * u.z + 2j * math.pi * (b.cfg.alpha + b.index.n) * u.z
    if expo.real > LOG_MAX:
        raise BasisOverflowError(
            f"exp({expo.real:.4g}) overflows; use basis_eval_log for this point"
        )
    mono = 1 + 0j
    for zj, kj in zip(u.zprime, b.index.k):
        mono *= zj**kj
    return cmath.exp(expo) * mono


def basis_eval_log(b: BasisFunction, u: Point) -> tuple[float, float]:
    """(log|e_{n,k}(u)|, arg e_{n,k}(u)) with the phase in (-pi, pi].

    A vanishing monomial gives log-modulus -inf and phase 0.
    """
    u.check(b.cfg)
    expo = 0.5 * b.cfg.nu * u.z * u.z + 2j * math.pi * (b.cfg.alpha + b.index.n) * u.z
    log_mod = expo.real
    phase = expo.imag
    for zj, kj in zip(u.zprime, b.index.k):
        if kj == 0:
            continue
        if zj == 0:
            return -math.inf, 0.0
        log_mod += kj * math.log(abs(zj))
        phase += kj * cmath.phase(zj)
    return log_mod, _wrap_phase(phase)


def _wrap_phase(phase: float) -> float:
    p = math.remainder(phase, 2 * math.pi)
    return math.pi if p == -math.pi else p


def log_norm_squared(cfg: SpaceConfig, idx: BasisIndex) -> float:
    """Natural log of the canonical squared norm; safe for large |n + alpha|."""
    k = idx.k
    if len(k) != cfg.g - 1:
        raise DimensionError(f"multi-index length {len(k)} does not match g - 1 = {cfg.g - 1}")
    nu = cfg.nu
    s = idx.n + cfg.alpha
    return (
        0.5 * math.log(math.pi / (2 * nu))
        + (cfg.g - 1) * math.log(math.pi / nu)
        + sum(math.lgamma(kj + 1) for kj in k)
        - k.degree * math.log(nu)
        + 2 * math.pi**2 * s * s / nu
    )


def norm_squared(cfg: SpaceConfig, idx: BasisIndex) -> float:
    """Canonical squared norm of e_{n,k}.

    Raises BasisOverflowError when the Gaussian factor exceeds double range;
    use :func:`log_norm_squared` for ratios.
    """
    log_val = log_norm_squared(cfg, idx)
    if log_val > LOG_MAX:
        raise BasisOverflowError(f"||e_{{n,k}}||^2 = exp({log_val:.4g}) overflows")
    return math.exp(log_val)


def log_norm_squared_printed(cfg: SpaceConfig, idx: BasisIndex, variant: str) -> float:
    """Natural log of :func:`norm_squared_printed`."""
    if variant not in NORM_VARIANTS:
        raise ValueError(f"unknown norm variant {variant!r}; expected one of {NORM_VARIANTS}")
    k = idx.k
    if len(k) != cfg.g - 1:
        raise DimensionError(f"multi-index length {len(k)} does not match g - 1 = {cfg.g - 1}")
    nu, g = cfg.nu, cfg.g
    s = idx.n + cfg.alpha
    gauss = 2 * math.pi**2 * s * s / nu
    kfact = sum(math.lgamma(kj + 1) for kj in k)
    if variant == "lemma22":
        if k.degree:
            raise ValueError("the lemma22 form only covers k = 0")
        return 0.5 * math.log(0.5) + 0.5 * (2 * g - 1) * math.log(math.pi / nu) + gauss
    if variant == "thm32":
        return (
            0.5 * math.log(2 * math.pi * nu)
            - g * math.log(2 * nu)
            - k.degree * math.log(nu)
            + kfact
            + gauss
        )
    return (
        0.5 * math.log(math.pi)
        + k.degree * math.log(2)
        + kfact
        - (0.5 * (2 * g - 1) + k.degree) * math.log(2 * nu)
        + gauss
    )


def norm_squared_printed(cfg: SpaceConfig, idx: BasisIndex, variant: str) -> float:
    """Squared norm as given by one of the alternative closed forms.

    ``variant`` is one of ``"lemma22"`` (k = 0 only; a ValueError otherwise),
    ``"thm32"`` or ``"intro"``.  Only used for discrepancy reporting.
    """
    log_val = log_norm_squared_printed(cfg, idx, variant)
    if log_val > LOG_MAX:
        raise BasisOverflowError(f"printed norm exp({log_val:.4g}) overflows")
    return math.exp(log_val)


def variant_ratio(cfg: SpaceConfig, idx: BasisIndex, variant: str) -> float:
    """canonical / printed squared norm, computed in log space."""
    return math.exp(log_norm_squared(cfg, idx) - log_norm_squared_printed(cfg, idx, variant))


def automorphy_factor(cfg: SpaceConfig, z: complex, m: int) -> complex:
    """chi(m) exp(nu (z + m/2) m), the multiplier in f(z+m, z') = factor * f(z, z')."""
    return chi_of(Character(cfg.alpha), m) * cmath.exp(cfg.nu * (z + m / 2) * m)


def iter_basis(cfg: SpaceConfig, indices) -> Iterator[BasisFunction]:
    for idx in indices:
        yield BasisFunction(cfg, idx)
