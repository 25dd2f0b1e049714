"""Product quadrature over the fundamental domain [0,1] x R x C^(g-1).

The compact x direction uses the periodic trapezoid rule, exact for
trigonometric polynomials below the Nyquist frequency.  The unbounded
directions use Gauss-Hermite rules with the Gaussian part of the density
absorbed into the rule:

* y (imaginary part of z): weight exp(-2 nu (y - c)^2), centred at c;
* each real direction of every transverse coordinate: weight exp(-nu t^2).

Integrands are passed as callables ``f(z, zprime)`` on numpy arrays, with
``zprime`` of shape ``z.shape + (g-1,)``.  Callables that factor as
f0(z) * prod_j f_j(z_j) can be wrapped in :class:`Separable`, in which case
the integral is computed one factor at a time (Fubini).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .basis import log_zfactor, multi_indices
from .errors import DomainError, QuadratureError
from .geometry import BasisIndex, QuadratureSpec, SpaceConfig

__all__ = [
    "QuadratureSpec",
    "Grid",
    "Separable",
    "SeparableSum",
    "gaussian_integral",
    "hermite_rule",
    "build_grid",
    "inner_product",
    "gram_matrix",
    "basis_separable",
]

MAX_HERMITE_ORDER = 400


def gaussian_integral(a: float, b: complex) -> complex:
    """Closed form of int_R exp(-a y^2 + b y) dy = sqrt(pi/a) exp(b^2 / (4a))."""
    if not a > 0:
        raise DomainError(f"gaussian_integral needs a > 0, got {a}")
    b = complex(b)
    return math.sqrt(math.pi / a) * np.exp(b * b / (4 * a))


@lru_cache(maxsize=64)
def _hermite_rule_cached(order: int) -> tuple[np.ndarray, np.ndarray]:
    n = order
    # Golub-Welsch start: eigenvalues of the Jacobi matrix
    off = np.sqrt(np.arange(1, n) / 2.0)
    t = eigh_tridiagonal(np.zeros(n), off, eigvals_only=True)
    for _ in range(3):
        p, dp, _ = _hermite_orthonormal(t, n)
        t = t - p / dp
    _, _, christoffel = _hermite_orthonormal(t, n)
    w = 1.0 / christoffel
    # enforce the exact symmetry of the rule
    t = 0.5 * (t - t[::-1])
    w = 0.5 * (w + w[::-1])
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def _hermite_orthonormal(t: np.ndarray, n: int):
    """p_n(t), p_n'(t) and sum_{j<n} p_j(t)^2 for orthonormal Hermite polynomials."""
    p_prev = np.zeros_like(t)
    p = np.full_like(t, math.pi**-0.25)
    acc = p * p
    for j in range(1, n):
        p_next = math.sqrt(2.0 / j) * t * p - math.sqrt((j - 1) / j) * p_prev
        p_prev, p = p, p_next
        acc = acc + p * p
    p_n = math.sqrt(2.0 / n) * t * p - math.sqrt((n - 1) / n) * p_prev
    return p_n, math.sqrt(2.0 * n) * p, acc


def hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes and weights for the weight exp(-t^2) on R.

    Nodes come from the Golub-Welsch eigenproblem, polished by Newton steps on
    the orthonormal three-term recurrence; weights are the reciprocal
    Christoffel sums.
    """
    order = int(order)
    if order < 1 or order > MAX_HERMITE_ORDER:
        raise ValueError(f"Hermite order must be in [1, {MAX_HERMITE_ORDER}], got {order}")
    return _hermite_rule_cached(order)


@dataclass(frozen=True)
class Grid:
    """Immutable product rule for one space configuration."""

    cfg: SpaceConfig
    x: np.ndarray
    wx: np.ndarray
    t_y: np.ndarray
    w_y: np.ndarray
    t_p: np.ndarray
    w_p: np.ndarray
    y_center: float = 0.0

    @property
    def nu(self) -> float:
        return self.cfg.nu

    @property
    def g(self) -> int:
        return self.cfg.g

    @property
    def x_points(self) -> int:
        return self.x.size

    @property
    def y_order(self) -> int:
        return self.t_y.size

    @property
    def transverse_order(self) -> int:
        return self.t_p.size

    @property
    def y(self) -> np.ndarray:
        return self.y_center + self.t_y / math.sqrt(2 * self.nu)

    @property
    def wy(self) -> np.ndarray:
        return self.w_y / math.sqrt(2 * self.nu)

    def recentered(self, y_center: float) -> "Grid":
        return replace(self, y_center=float(y_center))

    def z_nodes(self, y_center: float | None = None):
        """Mesh of z = x + i y nodes, their weights, and the log of the density
        ratio exp(-nu |z|^2) / exp(-2 nu (y - c)^2)."""
        c = self.y_center if y_center is None else float(y_center)
        y = c + self.t_y / math.sqrt(2 * self.nu)
        X, Y = np.meshgrid(self.x, y, indexing="ij")
        W = np.outer(self.wx, self.wy)
        log_ratio = -self.nu * (X * X + Y * Y) + 2 * self.nu * (Y - c) ** 2
        return X + 1j * Y, W, log_ratio

    def plane_nodes(self):
        """Nodes and weights on C for the weight exp(-nu |zeta|^2) (Lebesgue dx dy)."""
        s = self.t_p / math.sqrt(self.nu)
        A, B = np.meshgrid(s, s, indexing="ij")
        W = np.outer(self.w_p, self.w_p) / self.nu
        return (A + 1j * B).ravel(), W.ravel()

    def transverse_nodes(self):
        """Tensor nodes on C^(g-1), shape (P, g-1), and weights (P,)."""
        d = self.g - 1
        if d == 0:
            return np.zeros((1, 0), dtype=complex), np.ones(1)
        zeta, w = self.plane_nodes()
        grids = np.meshgrid(*([np.arange(zeta.size)] * d), indexing="ij")
        idx = np.stack([gr.ravel() for gr in grids], axis=-1)
        return zeta[idx], np.prod(w[idx], axis=-1)


def build_grid(cfg: SpaceConfig, y_center: float = 0.0) -> Grid:
    """Product rule whose exactness class covers the configured basis window.

    The trapezoid count is raised to at least 2 n_max + 2 and the transverse
    order to at least k_max + 1; the y order is at least 20.
    """
    q = cfg.quad
    M = max(q.x_points, 2 * cfg.n_max + 2)
    ny = max(q.hermite_order, 20)
    npz = max(q.transverse_order, cfg.k_max + 1)
    t_y, w_y = hermite_rule(ny)
    t_p, w_p = hermite_rule(npz)
    x = np.arange(M) / M
    wx = np.full(M, 1.0 / M)
    return Grid(cfg, x, wx, t_y, w_y, t_p, w_p, float(y_center))


def _float_or_none(v):
    return None if v is None else float(v)


@dataclass(frozen=True)
class Separable:
    """coef * f0(z) * prod_j f_j(z_j).

    ``zlog`` may replace ``zfactor`` by returning the complex logarithm of
    f0, which keeps large Gaussian factors representable.  ``y_center`` hints
    where |f0(x + iy)|^2 exp(-nu |z|^2) is concentrated in y.
    """

    zfactor: Callable | None = None
    transverse: tuple = ()
    coef: complex = 1.0
    zlog: Callable | None = None
    y_center: float | None = None

    def __post_init__(self):
        if (self.zfactor is None) == (self.zlog is None):
            raise ValueError("give exactly one of zfactor or zlog")
        object.__setattr__(self, "transverse", tuple(self.transverse))
        object.__setattr__(self, "y_center", _float_or_none(self.y_center))

    def with_center(self, c) -> "Separable":
        return replace(self, y_center=c)

    def scaled_z(self, Z, log_half_weight) -> np.ndarray:
        if self.zlog is not None:
            return np.exp(self.zlog(Z) + log_half_weight)
        return self.zfactor(Z) * np.exp(log_half_weight)

    def __call__(self, z, zprime=None):
        z = np.asarray(z, dtype=complex)
        if self.zlog is not None:
            out = np.exp(self.zlog(z))
        else:
            out = np.asarray(self.zfactor(z), dtype=complex)
        if self.transverse:
            zp = np.asarray(zprime, dtype=complex)
            for j, fj in enumerate(self.transverse):
                out = out * fj(zp[..., j])
        return self.coef * out


@dataclass(frozen=True)
class SeparableSum:
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def __call__(self, z, zprime=None):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for t in self.terms:
            out = out + t(z, zprime)
        return out


def basis_separable(cfg: SpaceConfig, idx: BasisIndex, coef: complex = 1.0) -> Separable:
    """e_{n,k} as a separable integrand, with its y-concentration hint."""
    n = idx.n
    trans = tuple(_monomial(kj) for kj in idx.k)
    return Separable(
        zlog=lambda z, n=n: log_zfactor(cfg, n, z),
        transverse=trans,
        coef=coef,
        y_center=-math.pi * (cfg.alpha + n) / cfg.nu,
    )


def _monomial(k: int):
    if k == 0:
        return lambda w: np.ones_like(w)
    return lambda w: w**k


def _as_separable_terms(f):
    if isinstance(f, Separable):
        return [f]
    if isinstance(f, SeparableSum):
        return list(f.terms)
    to_sep = getattr(f, "as_separable", None)
    if to_sep is not None:
        return _as_separable_terms(to_sep())
    return None


def _pair_center(grid: Grid, a: Separable, b: Separable) -> float:
    hints = [h for h in (a.y_center, b.y_center) if h is not None]
    return sum(hints) / len(hints) if hints else grid.y_center


def _check_finite(vals, nodes, what):
    bad = ~np.isfinite(vals)
    if bad.any():
        i = np.unravel_index(np.argmax(bad), vals.shape)
        raise QuadratureError(f"non-finite {what} sample {vals[i]} at node {nodes[i]}")


def _separable_pair(grid: Grid, a: Separable, b: Separable, shift: bool = False) -> complex:
    c = _pair_center(grid, a, b)
    Z, W, log_ratio = grid.z_nodes(c)
    if shift and a.y_center is not None:
        # f(x'+iy) conj(g)(x'-iy) exp(-nu (x'^2 + y^2)) is entire and 1-periodic
        # in x', so the x line may be moved to x' = x + i eta(y).  This eta
        # makes the frequency of ``a`` dominate a multi-frequency ``b``.
        Y = Z.imag
        Xs = Z.real + 1j * (Y - 2 * a.y_center)
        half = 0.5 * (-grid.nu * (Xs * Xs + Y * Y) + 2 * grid.nu * (Y - c) ** 2)
        va = a.scaled_z(Xs + 1j * Y, half)
        vb = b.scaled_z(np.conj(Xs) + 1j * Y, np.conj(half))
    else:
        half = 0.5 * log_ratio
        va = a.scaled_z(Z, half)
        vb = b.scaled_z(Z, half)
    prod = va * np.conj(vb)
    _check_finite(prod, Z, "z-factor")
    total = complex(np.sum(W * prod))
    if len(a.transverse) != len(b.transverse):
        raise ValueError("separable factors have different transverse dimension")
    if a.transverse:
        zeta, wp = grid.plane_nodes()
        for fa, fb in zip(a.transverse, b.transverse):
            pv = fa(zeta) * np.conj(fb(zeta))
            _check_finite(pv, zeta, "transverse")
            total *= complex(np.sum(wp * pv))
    return a.coef * np.conj(b.coef) * total


def inner_product(grid: Grid, f, g, chunk: int = 1 << 18, contour_shift: bool = False) -> complex:
    """<f, g> = int_cell f conj(g) exp(-H(u,u)) dlambda(u) by the product rule.

    ``f`` and ``g`` are callables on arrays, :class:`Separable` /
    :class:`SeparableSum` objects, or anything with ``as_separable()``.
    Separable pairs are integrated factor by factor, each pair with its own
    y centre; anything else is sampled on the full tensor grid.

    ``contour_shift`` moves the periodic x line of each separable pair into
    the complex plane, guided by the y hint of the ``f`` term.  The integral
    is unchanged; it matters when ``g`` is a sum over many frequencies (such
    as the theta kernel), whose other terms would otherwise cancel only in
    the last few digits.
    """
    fs = _as_separable_terms(f)
    gs = _as_separable_terms(g)
    if fs is not None and gs is not None:
        acc = 0j
        for a in fs:
            for b in gs:
                acc += _separable_pair(grid, a, b, contour_shift)
        return acc
    return _tensor_inner(grid, f, g, chunk)


def _call(f, Z, ZP):
    values = getattr(f, "values", None)
    if values is not None:
        return np.asarray(values(Z, ZP), dtype=complex)
    return np.asarray(f(Z, ZP), dtype=complex)


def _tensor_inner(grid: Grid, f, g, chunk: int) -> complex:
    Z, W, log_ratio = grid.z_nodes()
    zflat, wz, lr = Z.ravel(), W.ravel(), log_ratio.ravel()
    zp_nodes, wp = grid.transverse_nodes()
    per = max(1, chunk // zflat.size)
    acc = 0j
    for start in range(0, wp.size, per):
        zp = zp_nodes[start:start + per]
        wpp = wp[start:start + per]
        # shape (P, Nz)
        Zb = np.broadcast_to(zflat, (zp.shape[0], zflat.size))
        ZPb = np.broadcast_to(zp[:, None, :], (zp.shape[0], zflat.size, zp.shape[1]))
        with np.errstate(invalid="ignore", over="ignore"):
            vals = _call(f, Zb, ZPb) * np.conj(_call(g, Zb, ZPb)) * np.exp(lr)
        if not np.all(np.isfinite(vals)):
            bad = np.argwhere(~np.isfinite(vals))[0]
            raise QuadratureError(
                f"non-finite integrand at node z={Zb[tuple(bad)]}, zprime={tuple(ZPb[tuple(bad)])}"
            )
        acc += complex(np.sum(wpp[:, None] * wz[None, :] * vals))
    return acc


def _transverse_gram(grid: Grid, kmax: int, normalized: bool, nu: float) -> np.ndarray:
    """Gram matrix of 1-D monomials w^k, k <= kmax, on one transverse plane."""
    zeta, wp = grid.plane_nodes()
    ks = np.arange(kmax + 1)
    V = zeta[None, :] ** ks[:, None]
    if normalized:
        log_n = np.array([math.log(math.pi / nu) + math.lgamma(k + 1) - k * math.log(nu) for k in ks])
        V = V * np.exp(-0.5 * log_n)[:, None]
    return (V * wp[None, :]) @ V.conj().T


def gram_matrix(grid: Grid, indices: Sequence[BasisIndex], normalized: bool = True) -> np.ndarray:
    """Quadrature Gram matrix of basis functions.

    With ``normalized`` the entries are <e_i, e_j> / (||e_i|| ||e_j||) using
    the canonical norms, evaluated with the normalization folded into the
    exponent.  Only the upper triangle is integrated; the lower one is its
    mirror.  Each (n, n') block uses a y rule centred where the product of the
    two Gaussian envelopes peaks.
    """
    indices = [i if isinstance(i, BasisIndex) else BasisIndex(*i) for i in indices]
    if len(set(indices)) != len(indices):
        raise ValueError("gram_matrix needs distinct indices")
    cfg = grid.cfg
    nu, alpha = cfg.nu, cfg.alpha
    ns = sorted({i.n for i in indices})
    kmax = max((max(i.k) if i.k else 0) for i in indices)

    def log_z_norm(n):
        return 0.5 * math.log(math.pi / (2 * nu)) + 2 * math.pi**2 * (n + alpha) ** 2 / nu

    zblock: dict[tuple[int, int], complex] = {}
    for a_i, n in enumerate(ns):
        for n2 in ns[a_i:]:
            c = -math.pi * (2 * alpha + n + n2) / (2 * nu)
            Z, W, log_ratio = grid.z_nodes(c)
            la = log_zfactor(cfg, n, Z)
            lb = log_zfactor(cfg, n2, Z)
            expo = la + np.conj(lb) + log_ratio
            if normalized:
                expo = expo - 0.5 * (log_z_norm(n) + log_z_norm(n2))
            vals = np.exp(expo)
            _check_finite(vals, Z, "z-factor")
            zblock[(n, n2)] = complex(np.sum(W * vals))
            zblock[(n2, n)] = zblock[(n, n2)].conjugate()

    T = _transverse_gram(grid, kmax, normalized, nu) if cfg.g > 1 else None
    size = len(indices)
    G = np.zeros((size, size), dtype=complex)
    for i in range(size):
        for j in range(i, size):
            a, b = indices[i], indices[j]
            val = zblock[(a.n, b.n)]
            for ka, kb in zip(a.k, b.k):
                val *= T[ka, kb]
            if i == j:
                val = complex(val.real, 0.0)
            G[i, j] = val
            G[j, i] = np.conj(val)
    return G


def default_window(cfg: SpaceConfig) -> list[BasisIndex]:
    ks = multi_indices(cfg.g - 1, cfg.k_max)
    return [BasisIndex(n, k) for n in range(-cfg.n_max, cfg.n_max + 1) for k in ks]
