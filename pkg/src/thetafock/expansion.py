"""Fourier-slice description of members of the space.

Every member expands as

    f(z, z') = sum_n psi_n(z') exp(nu z^2/2 + 2 i pi (alpha+n) z),
    psi_n(z') = sum_k a_{n,k} z'^k,

with psi_n the n-th Fourier coefficient of the 1-periodic function
h(z, z') = exp(-nu z^2/2 - 2 i pi alpha z) f(z, z') along the real z axis.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .basis import LOG_MAX, log_norm_squared, log_values, multi_indices
from .character import Character, chi_of
from .errors import BasisOverflowError, DegenerateInputError, DimensionError
from .geometry import BasisIndex, MultiIndex, Point, SpaceConfig
from .quadrature import SeparableSum, basis_separable, hermite_rule

COEFF_THRESHOLD = 1e-13


def _key(idx) -> BasisIndex:
    if isinstance(idx, BasisIndex):
        return idx
    n, k = idx
    return BasisIndex(n, MultiIndex(k))


@dataclass(frozen=True)
class Expansion:
    """Finite coefficient map (n, k) -> a_{n,k}."""

    cfg: SpaceConfig
    coeffs: Mapping[BasisIndex, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, a in self.coeffs.items():
            key = _key(idx)
            if len(key.k) != self.cfg.g - 1:
                raise DimensionError(f"index {key} does not match g - 1 = {self.cfg.g - 1}")
            if abs(key.n) > self.cfg.n_max or key.k.degree > self.cfg.k_max:
                raise ValueError(
                    f"index (n={key.n}, k={tuple(key.k)}) lies outside the window "
                    f"|n| <= {self.cfg.n_max}, |k| <= {self.cfg.k_max}"
                )
            clean[key] = complex(a)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def __len__(self):
        return len(self.coeffs)

    def __call__(self, z, zprime=None):
        return self.values(z, zprime)

    def values(self, z, zprime=None) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for idx, a in self.coeffs.items():
            logs = log_values(self.cfg, idx, z, zprime)
            if np.any(logs.real > LOG_MAX):
                raise BasisOverflowError("reconstruction overflows at the requested point")
            out = out + a * np.exp(logs)
        return out

    def as_separable(self) -> SeparableSum:
        return SeparableSum(tuple(basis_separable(self.cfg, idx, a) for idx, a in self.coeffs.items()))

    def slice_coefficients(self, n: int) -> dict[MultiIndex, complex]:
        return {idx.k: a for idx, a in self.coeffs.items() if idx.n == n}

    def to_dict(self) -> dict:
        return {
            "coeffs": [
                {"n": idx.n, "k": list(idx.k), "re": a.real, "im": a.imag}
                for idx, a in self.coeffs.items()
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, cfg: SpaceConfig, d: dict) -> "Expansion":
        coeffs = {}
        for item in d.get("coeffs", []):
            idx = BasisIndex(int(item["n"]), MultiIndex(item.get("k", [])))
            coeffs[idx] = complex(float(item.get("re", 0.0)), float(item.get("im", 0.0)))
        return cls(cfg, coeffs)

    @classmethod
    def from_json(cls, cfg: SpaceConfig, text: str) -> "Expansion":
        return cls.from_dict(cfg, json.loads(text))

    @classmethod
    def load(cls, cfg: SpaceConfig, path) -> "Expansion":
        return cls.from_json(cfg, Path(path).read_text())


def random_expansion(cfg: SpaceConfig, terms: int, rng: np.random.Generator) -> Expansion:
    """``terms`` distinct window indices with standard complex normal coefficients."""
    ks = multi_indices(cfg.g - 1, cfg.k_max)
    window = [BasisIndex(n, k) for n in range(-cfg.n_max, cfg.n_max + 1) for k in ks]
    terms = min(terms, len(window))
    pick = rng.choice(len(window), size=terms, replace=False)
    coeffs = {window[i]: complex(rng.normal(), rng.normal()) for i in sorted(pick)}
    return Expansion(cfg, coeffs)


def _evaluate(f, z, zprime):
    values = getattr(f, "values", None)
    if values is not None:
        return np.asarray(values(z, zprime), dtype=complex)
    return np.asarray(f(z, zprime), dtype=complex)


def _h_samples(cfg: SpaceConfig, f, M: int, zprime: np.ndarray) -> np.ndarray:
    """h(x_j, z') = exp(-nu x^2/2 - 2 i pi alpha x) f(x_j, z') on x_j = j/M.

    ``zprime`` has shape (P, g-1); the result has shape (M, P).
    """
    x = np.arange(M) / M
    P = zprime.shape[0]
    X = np.broadcast_to(x[:, None], (M, P)).astype(complex)
    ZP = np.broadcast_to(zprime[None, :, :], (M, P, zprime.shape[1]))
    fx = _evaluate(f, X, ZP)
    return np.exp(-0.5 * cfg.nu * X * X - 2j * math.pi * cfg.alpha * X) * fx


def _check_sampling(cfg: SpaceConfig, M: int, n: int | None = None):
    if M < 2 * cfg.n_max + 2:
        raise ValueError(f"M={M} is below the Nyquist count 2*n_max+2={2 * cfg.n_max + 2}")
    if n is not None and 2 * abs(n) >= M:
        raise ValueError(f"frequency n={n} is not resolved by M={M} samples")


def fourier_slice(cfg: SpaceConfig, f, n: int, zprime, M: int | None = None):
    """psi_n(z') = int_0^1 h_{z'}(x) exp(-2 i pi n x) dx by the M-point rule.

    ``zprime`` is one transverse point (length g-1) or an array of shape
    (P, g-1); the result is a complex scalar or an array of length P.
    Exact for h band-limited below M/2.
    """
    M = 2 * cfg.n_max + 2 if M is None else int(M)
    _check_sampling(cfg, M, n)
    zp = np.asarray(zprime, dtype=complex)
    single = zp.ndim <= 1
    zp = zp.reshape(-1, cfg.g - 1) if cfg.g > 1 else np.zeros((1 if single else zp.shape[0], 0), complex)
    h = _h_samples(cfg, f, M, zp)
    x = np.arange(M) / M
    psi = np.exp(-2j * math.pi * n * x) @ h / M
    return complex(psi[0]) if single else psi


def _transverse_rule(cfg: SpaceConfig, order: int):
    """Tensor Gauss-Hermite nodes/weights on C^(g-1) for exp(-nu |z'|^2)."""
    d = cfg.g - 1
    if d == 0:
        return np.zeros((1, 0), dtype=complex), np.ones(1)
    t, w = hermite_rule(order)
    s = t / math.sqrt(cfg.nu)
    A, B = np.meshgrid(s, s, indexing="ij")
    zeta = (A + 1j * B).ravel()
    wz = (np.outer(w, w) / cfg.nu).ravel()
    grids = np.meshgrid(*([np.arange(zeta.size)] * d), indexing="ij")
    idx = np.stack([gr.ravel() for gr in grids], axis=-1)
    return zeta[idx], np.prod(wz[idx], axis=-1)


def _monomials(zp: np.ndarray, ks) -> np.ndarray:
    V = np.ones((len(ks), zp.shape[0]), dtype=complex)
    for a, k in enumerate(ks):
        for j, kj in enumerate(k):
            if kj:
                V[a] *= zp[:, j] ** kj
    return V


def expand(cfg: SpaceConfig, f, M: int | None = None, order: int | None = None) -> Expansion:
    """Coefficients a_{n,k} of ``f`` over the configured window.

    psi_n is sampled on a transverse Gauss-Hermite grid by an FFT along the
    real z axis, then projected onto each monomial with the Bargmann inner
    product: a_{n,k} = <psi_n, z'^k> / <z'^k, z'^k>.  Coefficients below
    1e-13 times the largest |h| sample are dropped.
    """
    M = 2 * cfg.n_max + 2 if M is None else int(M)
    _check_sampling(cfg, M)
    order = cfg.k_max + 2 if order is None else int(order)
    zp, wp = _transverse_rule(cfg, order)
    h = _h_samples(cfg, f, M, zp)
    spectrum = np.fft.fft(h, axis=0) / M
    ks = multi_indices(cfg.g - 1, cfg.k_max)
    V = _monomials(zp, ks)
    gram_diag = np.real(np.sum(wp * V * V.conj(), axis=1))
    cutoff = COEFF_THRESHOLD * float(np.max(np.abs(h))) if h.size else 0.0
    coeffs = {}
    for n in range(-cfg.n_max, cfg.n_max + 1):
        psi = spectrum[n % M]
        proj = (V.conj() * wp) @ psi / gram_diag
        for k, a in zip(ks, proj):
            if abs(a) > cutoff:
                coeffs[BasisIndex(n, k)] = complex(a)
    return Expansion(cfg, coeffs)


def reconstruct(e: Expansion, u: Point) -> complex:
    """sum a_{n,k} e_{n,k}(u), each term formed through its logarithm."""
    u.check(e.cfg)
    z = np.array([u.z])
    zp = np.array([u.zprime], dtype=complex).reshape(1, e.cfg.g - 1)
    return complex(e.values(z, zp)[0])


def log_norm_growth(e: Expansion) -> float:
    """log ||f||^2 with ||f||^2 = sum |a_{n,k}|^2 ||e_{n,k}||^2; -inf if empty."""
    logs = [2 * math.log(abs(a)) + log_norm_squared(e.cfg, idx) for idx, a in e.coeffs.items() if a != 0]
    if not logs:
        return -math.inf
    m = max(logs)
    return m + math.log(math.fsum(math.exp(v - m) for v in logs))


def norm_growth(e: Expansion) -> float:
    """Squared norm ||f||^2 via Parseval over the orthogonal basis."""
    val = log_norm_growth(e)
    if val > LOG_MAX:
        raise BasisOverflowError("growth norm overflows; use log_norm_growth")
    return math.exp(val)


def slice_norm_squared(e: Expansion, n: int, order: int | None = None) -> float:
    """||psi_n||^2 in L^2(C^(g-1), exp(-nu |z'|^2) dlambda), by quadrature."""
    cfg = e.cfg
    sl = e.slice_coefficients(n)
    if not sl:
        return 0.0
    if cfg.g == 1:
        return abs(sl[MultiIndex(())]) ** 2
    order = cfg.k_max + 1 if order is None else order
    zp, wp = _transverse_rule(cfg, order)
    ks = list(sl)
    psi = np.array([sl[k] for k in ks]) @ _monomials(zp, ks)
    return float(np.sum(wp * np.abs(psi) ** 2))


def norm_growth_slices(e: Expansion) -> float:
    """sqrt(pi/(2 nu)) sum_n exp(2 pi^2 (n+alpha)^2 / nu) ||psi_n||^2."""
    cfg = e.cfg
    ns = sorted({idx.n for idx in e.coeffs})
    pref = math.sqrt(math.pi / (2 * cfg.nu))
    return pref * math.fsum(
        math.exp(2 * math.pi**2 * (n + cfg.alpha) ** 2 / cfg.nu) * slice_norm_squared(e, n) for n in ns
    )


def automorphy_residual(cfg: SpaceConfig, f, m: int, u: Point) -> float:
    """Relative defect of f(z+m, z') = chi(m) exp(nu (z + m/2) m) f(z, z').

    Returns |f(z+m,z') - chi(m) e^{nu(z+m/2)m} f(z,z')| / (1 + |f(z,z') e^{nu(z+m/2)m}|).
    """
    u.check(cfg)
    m = int(m)
    if m == 0:
        return 0.0
    z = np.array([u.z, u.z + m])
    zp = np.array([u.zprime, u.zprime], dtype=complex).reshape(2, cfg.g - 1)
    f0, fm = _evaluate(f, z, zp)
    growth = np.exp(cfg.nu * (u.z + m / 2) * m)
    chi = chi_of(Character(cfg.alpha), m)
    return float(abs(fm - chi * growth * f0) / (1 + abs(f0 * growth)))


def pointwise_bound(e: Expansion, u: Point) -> float:
    """Cauchy-Schwarz bound on |f(u)| in terms of ||f|| and the slices.

    |f(z,z')| <= ||f|| (2 nu/pi)^(1/4) exp(nu (z^2 + conj(z)^2)/4)
                 * (sum_n exp(-2 pi^2 (n+alpha)^2/nu - 4 pi (n+alpha) Im z)
                    |psi_n(z')|^2 / ||psi_n||^2)^(1/2),

    the sum running over n with psi_n != 0.
    """
    cfg = e.cfg
    u.check(cfg)
    if not any(a != 0 for a in e.coeffs.values()):
        raise DegenerateInputError("pointwise bound needs at least one nonzero coefficient")
    nu, alpha = cfg.nu, cfg.alpha
    y = u.z.imag
    logs = []
    for n in sorted({idx.n for idx, a in e.coeffs.items() if a != 0}):
        sl = e.slice_coefficients(n)
        psi = 0j
        for k, a in sl.items():
            term = a
            for zj, kj in zip(u.zprime, k):
                term *= zj**kj
            psi += term
        if psi == 0:
            continue
        s = n + alpha
        logs.append(
            -2 * math.pi**2 * s * s / nu - 4 * math.pi * s * y
            + 2 * math.log(abs(psi)) - math.log(slice_norm_squared(e, n))
        )
    log_pref = 0.25 * math.log(2 * nu / math.pi) + 0.5 * nu * (u.z.real**2 - u.z.imag**2)
    log_norm = 0.5 * log_norm_growth(e)
    if not logs:
        return 0.0
    m = max(logs)
    log_sum = m + math.log(math.fsum(math.exp(v - m) for v in logs))
    return math.exp(log_norm + log_pref + 0.5 * log_sum)


def catalog_function(cfg: SpaceConfig, name: str) -> Callable:
    """Named test functions: ``gaussian`` (exp(nu z^2/2), a member only for
    integer alpha), ``zero``, ``basis:N:K1,K2,...`` and
    ``random:SEED:TERMS``."""
    parts = name.split(":")
    kind = parts[0]
    if kind == "gaussian":
        return lambda z, zp=None: np.exp(0.5 * cfg.nu * np.asarray(z, dtype=complex) ** 2)
    if kind == "zero":
        return lambda z, zp=None: np.zeros(np.shape(z), dtype=complex)
    if kind == "basis":
        n = int(parts[1])
        k = tuple(int(v) for v in parts[2].split(",")) if len(parts) > 2 and parts[2] else ()
        return Expansion(cfg, {BasisIndex(n, k): 1.0})
    if kind == "random":
        seed = int(parts[1], 0) if len(parts) > 1 else cfg.seed
        terms = int(parts[2]) if len(parts) > 2 else 10
        return random_expansion(cfg, terms, np.random.default_rng(seed))
    raise ValueError(f"unknown catalog function {name!r}")
