"""Characters of the rank-one lattice Z*omega.

A nonzero space exists only when chi is a genuine character, so the only
constructible object is the one-parameter family chi(m omega) = exp(2 pi i alpha m).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Character:
    alpha: float

    @classmethod
    def from_config(cls, cfg) -> "Character":
        return cls(cfg.alpha)

    def __call__(self, m: int) -> complex:
        return chi_of(self, m)


def chi_of(ch: Character, m: int) -> complex:
    """exp(2 pi i alpha m), with alpha * m reduced mod 1 in exact arithmetic."""
    return cmath.exp(2j * math.pi * _phase(ch.alpha, m))


def _phase(alpha: float, m: int) -> float:
    # a float is an exact rational, so the reduction itself adds no rounding
    frac = (Fraction(alpha) * int(m)) % 1
    return float(frac - 1 if frac > Fraction(1, 2) else frac)


def check_rdq(ch: Character, m1: int, m2: int) -> float:
    """Residual |chi(m1 + m2) - chi(m1) chi(m2)| of the quantization condition.

    On Z*omega x Z*omega the form H is real, so the cocycle factor
    exp(i Im H) is 1 and the condition is plain multiplicativity.
    """
    return abs(chi_of(ch, m1 + m2) - chi_of(ch, m1) * chi_of(ch, m2))


def rdq_tolerance(m1: int, m2: int) -> float:
    return 4 * EPS * (abs(m1) + abs(m2) + 1)
