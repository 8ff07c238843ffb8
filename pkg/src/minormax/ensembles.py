"""Reproducible samplers for the deformed GOE and for Wishart data matrices.

Every replicate owns its generators.  A replicate's streams are derived from
``numpy.random.SeedSequence(entropy=master_seed, spawn_key=(replicate, stream))``
feeding a ``PCG64`` bit generator, so the draws are a pure function of
``(master_seed, replicate_index)`` and never depend on thread count or
execution order.  Normal variates come from numpy's ziggurat sampler
(``Generator.standard_normal``); that choice is part of the reproducibility
contract.

Indices are 0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

__all__ = [
    "DeformedGoe",
    "EntryDistribution",
    "MemoryBudgetExceeded",
    "Rademacher",
    "ScaledStudentT",
    "SeedSpec",
    "StdGaussian",
    "UniformVar1",
    "Wishart",
    "distribution_from_name",
    "draw_goe_diag",
    "draw_wishart_X",
    "iter_goe_offdiag_blocks",
    "stream_goe_offdiag",
]

# stream ids inside one replicate
_DIAG, _OFFDIAG, _WISHART = 0, 1, 2

DEFAULT_MAX_ENTRIES = 200_000_000
DEFAULT_BLOCK_ENTRIES = 1 << 16


class MemoryBudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    replicate_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if self.replicate_index < 0:
            raise ValueError("replicate_index must be nonnegative")

    def generator(self, stream: int) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.master_seed,
                                    spawn_key=(self.replicate_index, stream))
        return np.random.Generator(np.random.PCG64(ss))


# ---------------------------------------------------------------------------
# Entry distributions (mean 0, variance 1)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StdGaussian:
    name = "gaussian"
    xi = 2.0

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.standard_normal(size)


@dataclass(frozen=True)
class Rademacher:
    name = "rademacher"
    xi = 0.0

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        bits = rng.integers(0, 2, size=size, dtype=np.int8)
        return 2.0 * bits - 1.0


@dataclass(frozen=True)
class UniformVar1:
    """Uniform on [-sqrt3, sqrt3]; ``E u^4 = 9/5`` so ``xi = 4/5``."""

    name = "uniform"
    xi = 0.8

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        r = math.sqrt(3.0)
        return rng.uniform(-r, r, size)


@dataclass(frozen=True)
class ScaledStudentT:
    """Student t with ``df > 6`` degrees of freedom rescaled to unit variance.

    ``E x^4 = 3 (df - 2) / (df - 4)``, so ``xi = 2 (df - 1) / (df - 4)``;
    ``df = 7`` gives ``xi = 4``.  ``df > 6`` keeps the sixth moment finite.
    """

    df: float = 7.0
    name = "student"

    def __post_init__(self):
        if not self.df > 6:
            raise ValueError("df must exceed 6 for a finite sixth moment")

    @property
    def xi(self) -> float:
        return 2.0 * (self.df - 1.0) / (self.df - 4.0)

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.standard_t(self.df, size) * math.sqrt((self.df - 2.0) / self.df)


EntryDistribution = StdGaussian | Rademacher | UniformVar1 | ScaledStudentT


def distribution_from_name(name: str, df: float = 7.0) -> EntryDistribution:
    table = {"gaussian": StdGaussian(), "rademacher": Rademacher(), "uniform": UniformVar1()}
    if name == "student":
        return ScaledStudentT(df)
    try:
        return table[name]
    except KeyError:
        raise ValueError(f"unknown entry distribution {name!r}") from None


# ---------------------------------------------------------------------------
# Ensemble descriptions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeformedGoe:
    xi: float
    p: int

    def __post_init__(self):
        if not self.xi >= 0:
            raise ValueError("xi must be >= 0")
        if self.p < 2:
            raise ValueError("p must be >= 2")


@dataclass(frozen=True)
class Wishart:
    n: int
    p: int
    dist: EntryDistribution = StdGaussian()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.p < 2:
            raise ValueError("p must be >= 2")

    @property
    def xi(self) -> float:
        return self.dist.xi


# ---------------------------------------------------------------------------
# Deformed GOE
# ---------------------------------------------------------------------------

def draw_goe_diag(xi: float, p: int, seed: SeedSpec) -> np.ndarray:
    """The ``p`` diagonal entries, i.i.d. ``N(0, xi)``.

    The diagonal has its own stream of standard normals scaled by
    ``sqrt(xi)``, so runs that differ only in ``xi`` share the same
    underlying draws.  ``xi = 0`` returns exact zeros without drawing.
    """
    if not xi >= 0:
        raise ValueError("xi must be >= 0")
    if xi == 0:
        return np.zeros(p)
    return math.sqrt(xi) * seed.generator(_DIAG).standard_normal(p)


def iter_goe_offdiag_blocks(p: int, seed: SeedSpec,
                            block_entries: int = DEFAULT_BLOCK_ENTRIES
                            ) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield ``(row_start, row_stop, values)`` chunks of the strict upper triangle.

    ``values`` holds the entries ``z_ij`` for ``row_start <= i < row_stop`` and
    ``j > i`` in row-major order.  Chunks are drawn sequentially from one
    generator, so the concatenated stream does not depend on
    ``block_entries``.
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    rng = seed.generator(_OFFDIAG)
    i = 0
    while i < p - 1:
        start, count = i, 0
        while i < p - 1 and (count == 0 or count + (p - 1 - i) <= block_entries):
            count += p - 1 - i
            i += 1
        yield start, i, rng.standard_normal(count)


def stream_goe_offdiag(p: int, seed: SeedSpec,
                       consumer: Callable[[int, int, float], bool | None]) -> int:
    """Feed every ``(i, j, z_ij)`` with ``i < j`` to ``consumer`` in row-major order.

    Stops early if ``consumer`` returns ``False``.  Returns the number of
    callbacks made.  The matrix is never materialised.
    """
    calls = 0
    for start, stop, values in iter_goe_offdiag_blocks(p, seed):
        k = 0
        for i in range(start, stop):
            for j in range(i + 1, p):
                calls += 1
                if consumer(i, j, float(values[k])) is False:
                    return calls
                k += 1
    return calls


# ---------------------------------------------------------------------------
# Wishart
# ---------------------------------------------------------------------------

def draw_wishart_X(n: int, p: int, dist: EntryDistribution, seed: SeedSpec,
                   max_entries: int = DEFAULT_MAX_ENTRIES) -> np.ndarray:
    """An ``n x p`` matrix of i.i.d. entries in column-major (Fortran) layout.

    Column ``j`` is the ``j``-th contiguous run of ``n`` draws from the
    replicate's Wishart stream.
    """
    if n * p > max_entries:
        raise MemoryBudgetExceeded(f"n*p = {n * p} exceeds budget {max_entries}")
    rng = seed.generator(_WISHART)
    return dist.draw(rng, (p, n)).T
