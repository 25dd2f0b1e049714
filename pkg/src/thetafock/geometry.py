"""Space parameters, adapted coordinates and the split Hermitian form.

Points of C^g are stored in the adapted coordinates u = (z; z') where z runs
along the lattice generator and z' = (z_2, ..., z_g) spans its H-orthogonal
complement.  The basis vectors are normalized so that H(w_i, w_j) = nu
delta_ij, hence

    H(u, v) = nu * (z conj(w) + sum_j z_j conj(w_j)).

Lebesgue measure on C^g is the product of planar measures dx dy per
coordinate.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import ConfigError, DimensionError

DEFAULT_SEED = 0x5EED


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolution of the fundamental-domain product rule.

    ``x_points`` is the periodic trapezoid count on [0, 1] and
    ``hermite_order`` the Gauss-Hermite order for the unbounded y direction.
    ``zprime_order`` (``None`` means ``hermite_order``) is the order used for
    each real direction of every transverse coordinate.
    """

    x_points: int = 32
    hermite_order: int = 40
    zprime_order: int | None = 20

    def __post_init__(self):
        if int(self.x_points) < 3:
            raise ConfigError(f"quad.x_points must be >= 3, got {self.x_points}")
        if int(self.hermite_order) < 2:
            raise ConfigError(f"quad.hermite_order must be >= 2, got {self.hermite_order}")
        if self.zprime_order is not None and int(self.zprime_order) < 2:
            raise ConfigError(f"quad.zprime_order must be >= 2, got {self.zprime_order}")

    @property
    def transverse_order(self) -> int:
        return self.hermite_order if self.zprime_order is None else self.zprime_order

    def to_dict(self) -> dict[str, Any]:
        d = {"x_points": self.x_points, "hermite_order": self.hermite_order}
        if self.zprime_order is not None:
            d["zprime_order"] = self.zprime_order
        return d


@dataclass(frozen=True)
class SpaceConfig:
    """Parameters of the space plus truncation and quadrature controls.

    ``alpha`` is kept exactly as supplied.  Shifting it by one while
    relabelling n -> n - 1 describes the same space; nothing here
    normalizes it into [0, 1).
    """

    g: int = 2
    nu: float = 1.0
    alpha: float = 0.3
    theta_tol: float = 1e-14
    n_max: int = 3
    k_max: int = 3
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if isinstance(self.g, bool) or int(self.g) != self.g or self.g < 1:
            raise ConfigError(f"g must be an integer >= 1, got {self.g!r}")
        if not (math.isfinite(self.nu) and self.nu > 0):
            raise ConfigError(f"nu must be positive, got {self.nu!r}")
        if not math.isfinite(self.alpha):
            raise ConfigError(f"alpha must be finite, got {self.alpha!r}")
        if not (self.theta_tol > 0):
            raise ConfigError(f"theta_tol must be positive, got {self.theta_tol!r}")
        if self.n_max < 0 or self.k_max < 0:
            raise ConfigError("n_max and k_max must be nonnegative")

    @property
    def transverse_dim(self) -> int:
        return self.g - 1

    def replace(self, **changes) -> "SpaceConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return SpaceConfig(**d)

    def to_dict(self) -> dict[str, Any]:
        return {
            "g": self.g,
            "nu": self.nu,
            "alpha": self.alpha,
            "theta_tol": self.theta_tol,
            "n_max": self.n_max,
            "k_max": self.k_max,
            "quad": self.quad.to_dict(),
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SpaceConfig":
        if not isinstance(d, dict):
            raise ConfigError("config: expected a JSON object at the top level")
        known = {"g", "nu", "alpha", "theta_tol", "n_max", "k_max", "quad", "seed"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"config: unknown keys {sorted(unknown)}")
        for key in ("g", "nu", "alpha"):
            if key not in d:
                raise ConfigError(f"config.{key}: required key is missing")
        kw: dict[str, Any] = {}
        try:
            kw["g"] = _as_int(d["g"], "g")
            kw["nu"] = float(d["nu"])
            kw["alpha"] = float(d["alpha"])
            if "theta_tol" in d:
                kw["theta_tol"] = float(d["theta_tol"])
            for key in ("n_max", "k_max"):
                if key in d:
                    kw[key] = _as_int(d[key], key)
            if "seed" in d:
                seed = d["seed"]
                kw["seed"] = int(seed, 0) if isinstance(seed, str) else _as_int(seed, "seed")
            if "quad" in d:
                q = d["quad"]
                if not isinstance(q, dict):
                    raise ConfigError("config.quad: expected an object")
                extra = set(q) - {"x_points", "hermite_order", "zprime_order"}
                if extra:
                    raise ConfigError(f"config.quad: unknown keys {sorted(extra)}")
                kw["quad"] = QuadratureSpec(
                    **{k: (None if v is None else _as_int(v, f"quad.{k}")) for k, v in q.items()}
                )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"config: {exc}") from exc
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "SpaceConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> "SpaceConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path} ({exc.strerror})") from exc
        return cls.from_json(text)


def _as_int(value, name):
    if isinstance(value, bool) or not float(value).is_integer():
        raise ConfigError(f"config.{name}: expected an integer, got {value!r}")
    return int(value)


class MultiIndex(tuple):
    """Exponents (k_2, ..., k_g) of a transverse monomial."""

    def __new__(cls, k: Iterable[int] = ()):
        values = tuple(int(v) for v in k)
        if any(v < 0 for v in values):
            raise ValueError(f"multi-index entries must be nonnegative, got {values}")
        return super().__new__(cls, values)

    @property
    def degree(self) -> int:
        return sum(self)

    @property
    def factorial(self) -> int:
        return math.prod(math.factorial(v) for v in self)

    def __repr__(self):
        return f"MultiIndex({tuple(self)})"


@dataclass(frozen=True, order=True)
class BasisIndex:
    """Label (n, k) of the basis function e_{n,k}."""

    n: int
    k: MultiIndex = MultiIndex()

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))
        if not isinstance(self.k, MultiIndex):
            object.__setattr__(self, "k", MultiIndex(self.k))

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "k": list(self.k)}


@dataclass(frozen=True)
class Point:
    """A point (z; z_2, ..., z_g) of C^g in adapted coordinates."""

    z: complex
    zprime: tuple[complex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "zprime", tuple(complex(c) for c in self.zprime))

    @classmethod
    def of(cls, z, *zprime) -> "Point":
        return cls(z, tuple(zprime))

    @property
    def dim(self) -> int:
        return 1 + len(self.zprime)

    def check(self, cfg: SpaceConfig) -> "Point":
        if len(self.zprime) != cfg.g - 1:
            raise DimensionError(
                f"point has {len(self.zprime)} transverse coordinates, config expects {cfg.g - 1}"
            )
        return self

    def zprime_array(self) -> np.ndarray:
        return np.asarray(self.zprime, dtype=complex)


def hermitian_form(cfg: SpaceConfig, u: Point, v: Point) -> complex:
    """H(u, v) = nu (z conj(w) + sum_j z_j conj(w_j))."""
    u.check(cfg)
    v.check(cfg)
    acc = u.z * v.z.conjugate()
    for a, b in zip(u.zprime, v.zprime):
        acc += a * b.conjugate()
    return cfg.nu * acc


def transverse_form(cfg: SpaceConfig, zp_u: Sequence[complex], zp_v: Sequence[complex]) -> complex:
    """Restriction of H to the complement: nu * sum_j z_j conj(w_j)."""
    if len(zp_u) != cfg.g - 1 or len(zp_v) != cfg.g - 1:
        raise DimensionError("transverse coordinates do not match config.g - 1")
    return cfg.nu * sum((complex(a) * complex(b).conjugate() for a, b in zip(zp_u, zp_v)), 0j)


def gaussian_weight(cfg: SpaceConfig, u: Point) -> float:
    """The density factor exp(-H(u, u))."""
    u.check(cfg)
    sq = abs(u.z) ** 2 + sum(abs(c) ** 2 for c in u.zprime)
    return math.exp(-cfg.nu * sq)


def wrap_to_fundamental(cfg: SpaceConfig, u: Point) -> tuple[Point, int]:
    """Translate ``u`` by a lattice vector into the cell [0, 1) x R x C^(g-1).

    Returns the translated point and the integer m with u = wrapped + m * omega.
    """
    u.check(cfg)
    m = math.floor(u.z.real)
    z = complex(u.z.real - m, u.z.imag)
    if z.real >= 1.0:  # rounding for tiny negative inputs such as -1e-17
        z -= 1.0
        m += 1
    return Point(z, u.zprime), m
