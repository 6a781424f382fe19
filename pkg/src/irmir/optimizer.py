"""IR-based brightness optimizer and K-sweep curves.

The optimizer scans K = k_start, k_start + step, ... up to (2**D - 1)/mean
and stops at the first K whose IR does not exceed the previous one,
returning that previous K.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyGrid, InvalidGrid, InvalidProbability, ZeroMeanChannel
from .measures import (
    Channel,
    ChannelHistogram,
    build_histogram,
    entropy,
    information_ratio,
    lir,
)
from .transform import _check_coefficient, _check_distance, transform_histogram

# grid points are rounded to this many decimals so 0.9 + 2*0.1 is exactly 1.1
_GRID_DECIMALS = 12


@dataclass(frozen=True)
class OptimizeConfig:
    d: int = 8
    k_start: float = 0.9
    k_step: float = 0.1
    k_max: float | None = None  # None: (2**D - 1) / mean

    def __post_init__(self):
        if not self.k_step > 0:
            raise InvalidGrid(f"k_step must be positive, got {self.k_step}")
        if not self.k_start > 0:
            raise InvalidGrid(f"k_start must be positive, got {self.k_start}")


@dataclass(frozen=True)
class OptimizeResult:
    k_optimizer: float
    ir_at_k: float
    ir_at_one: float
    evaluations: int
    elapsed: float
    early_stop: bool
    grid: tuple[float, ...] = field(repr=False, default=())
    ir_values: tuple[float, ...] = field(repr=False, default=())


@dataclass(frozen=True)
class SweepSample:
    k: float
    ir: float
    lir: float


@dataclass(frozen=True)
class SweepCurve:
    samples: tuple[SweepSample, ...]
    d: int
    width: int
    height: int
    levels: int

    @property
    def ks(self):
        return np.array([s.k for s in self.samples])

    @property
    def irs(self):
        return np.array([s.ir for s in self.samples])

    @property
    def lirs(self):
        return np.array([s.lir for s in self.samples])


def k_grid(k_start: float, k_step: float, k_max: float) -> list[float]:
    """Grid points k_start + n*step (integer n) that do not exceed k_max.

    A point within float noise of k_max counts as landing on it.
    """
    if k_max < k_start:
        raise InvalidGrid(f"grid upper bound {k_max:g} is below k_start {k_start:g}")
    n_max = math.floor((k_max - k_start) / k_step + 1e-9)
    return [round(k_start + n * k_step, _GRID_DECIMALS) for n in range(n_max + 1)]


def grid_upper_bound(channel: Channel) -> float:
    m = float(channel.intensities.mean())
    if m == 0:
        raise ZeroMeanChannel("channel mean is zero; the K grid upper bound is undefined")
    return (2**channel.depth - 1) / m


def _ir_at(hist: ChannelHistogram, k: float, d: int) -> float:
    return information_ratio(transform_histogram(hist, k, d))


def optimize_k(channel: Channel, config: OptimizeConfig = OptimizeConfig()) -> OptimizeResult:
    t0 = time.perf_counter()
    d = _check_distance(config.d, channel)
    k_max = grid_upper_bound(channel) if config.k_max is None else config.k_max
    grid = k_grid(config.k_start, config.k_step, k_max)

    hist = build_histogram(channel)
    irs = [_ir_at(hist, grid[0], d)]
    k_opt = None
    for n in range(1, len(grid)):
        irs.append(_ir_at(hist, grid[n], d))
        if irs[n] - irs[n - 1] <= 0:
            k_opt = n - 1
            break
    early = k_opt is not None
    if not early:
        k_opt = int(np.argmax(irs))
    ir_one = _ir_at(hist, 1.0, d)
    elapsed = time.perf_counter() - t0
    return OptimizeResult(
        k_optimizer=grid[k_opt],
        ir_at_k=irs[k_opt],
        ir_at_one=ir_one,
        evaluations=len(irs),
        elapsed=elapsed,
        early_stop=early,
        grid=tuple(grid[: len(irs)]),
        ir_values=tuple(irs),
    )


def sweep(channel: Channel, d: int, k_values: Sequence[float]) -> SweepCurve:
    """IR and LIR of the scaled-then-quantized channel at every K in the grid."""
    ks = [_check_coefficient(k) for k in k_values]
    if not ks:
        raise EmptyGrid("sweep grid is empty")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise InvalidGrid("sweep grid must be strictly increasing")
    d = _check_distance(d, channel)
    hist = build_histogram(channel)
    samples = []
    for k in ks:
        h = transform_histogram(hist, k, d)
        samples.append(SweepSample(k, information_ratio(h), lir(h)))
    return SweepCurve(tuple(samples), d, channel.width, channel.height, hist.levels)


@dataclass(frozen=True)
class TwoSymbolPoint:
    p: float
    count_a: int
    count_b: int
    normalized_ir: float
    normalized_entropy: float

    @property
    def singleton(self) -> bool:
        return self.count_a == 1 or self.count_b == 1


def two_symbol_grid(nm: int, steps: int) -> np.ndarray:
    """``steps`` evenly spaced probabilities strictly inside (1/nm, 1 - 1/nm)."""
    return np.linspace(1 / nm, 1 - 1 / nm, steps + 2)[1:-1]


def two_symbol_profile(nm: int, p_grid: Sequence[float]) -> list[TwoSymbolPoint]:
    """Normalized IR (IR/NM) and entropy (H/ln NM) of a two-symbol signal of size nm."""
    if nm < 2:
        raise InvalidProbability("nm must be at least 2")
    out = []
    lo, hi = 1 / nm, 1 - 1 / nm
    for p in p_grid:
        p = float(p)
        if not lo < p < hi:
            raise InvalidProbability(f"p={p} outside the open interval ({lo:g}, {hi:g})")
        k = int(math.floor(p * nm + 0.5))
        hist = ChannelHistogram.from_counts([k, nm - k])
        out.append(
            TwoSymbolPoint(p, k, nm - k, information_ratio(hist) / nm, entropy(hist) / math.log(nm))
        )
    return out
