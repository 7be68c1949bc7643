"""Reproducible log-uniform parameter draws."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class SamplingConfig:
    seed: int = 0
    samples: int = 1000
    lo: float = 1e-3
    hi: float = 1e3
    digits: int = 6
    target: int = 3

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise ValueError("need 0 < lo < hi")
        if self.samples < 0:
            raise ValueError("samples must be nonnegative")


def draw_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator keyed by ``(seed, *path)``; draws never depend on execution order."""
    return np.random.default_rng(np.random.SeedSequence([seed, *path]))


def log_uniform(rng: np.random.Generator, lo: float = 1e-3, hi: float = 1e3,
                digits: int = 6) -> Fraction:
    """Log-uniform value rounded to ``digits`` significant digits, as an exact rational."""
    v = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    return Fraction(f"{v:.{digits - 1}e}")


def draw_vector(rng: np.random.Generator, n: int, cfg: SamplingConfig) -> list[Fraction]:
    return [log_uniform(rng, cfg.lo, cfg.hi, cfg.digits) for _ in range(n)]
