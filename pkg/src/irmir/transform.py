"""Intensity transforms applied before measurement.

The pipeline order everywhere is: scale brightness by K, then merge levels
by the feature distance d, then take the histogram.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidCoefficient, InvalidDistance
from .measures import Channel, ChannelHistogram


def _check_distance(d, channel: Channel) -> int:
    if int(d) != d or d < 1:
        raise InvalidDistance(f"feature distance must be a positive integer, got {d}")
    if d > 2**channel.depth:
        raise InvalidDistance(f"feature distance {d} exceeds 2**depth = {2**channel.depth}")
    return int(d)


def _check_coefficient(k) -> float:
    k = float(k)
    if not k > 0 or not np.isfinite(k):
        raise InvalidCoefficient(f"brightness coefficient must be positive and finite, got {k}")
    return k


def quantized_levels(levels: int, d: int) -> int:
    return -(-levels // d)


def quantize(channel: Channel, d: int) -> Channel:
    """Merge each run of ``d`` contiguous levels into one (i -> i // d)."""
    d = _check_distance(d, channel)
    if d == 1:
        return channel
    return Channel(channel.intensities // d, channel.depth, quantized_levels(channel.levels, d))


def _round_half_up(x):
    # inputs are non-negative, so half-up is half-away-from-zero
    return np.floor(x + 0.5)


def scale_lut(levels: int, k: float) -> np.ndarray:
    """Intensity map v -> clamp(round(k * v), 0, levels - 1) for every level."""
    k = _check_coefficient(k)
    v = np.arange(levels, dtype=np.float64)
    return np.clip(_round_half_up(k * v), 0, levels - 1).astype(np.int64)


def scale_brightness(channel: Channel, k: float) -> Channel:
    lut = scale_lut(channel.levels, k)
    return Channel(lut[channel.intensities], channel.depth, channel.levels)


def channel_mean(channel: Channel) -> float:
    return float(channel.intensities.mean())


def transform_histogram(hist: ChannelHistogram, k: float = 1.0, d: int = 1) -> ChannelHistogram:
    """Histogram of ``quantize(scale_brightness(x, k), d)`` computed from the histogram of x.

    Both transforms act pixel-wise on intensities, so each source level maps
    to exactly one target level and its count moves with it.  This is the
    same result as transforming the pixels, at O(levels) cost.
    """
    if int(d) != d or d < 1:
        raise InvalidDistance(f"feature distance must be a positive integer, got {d}")
    target = scale_lut(hist.levels, k) // int(d)
    out_levels = quantized_levels(hist.levels, int(d))
    counts = np.bincount(target, weights=hist.counts, minlength=out_levels)
    return ChannelHistogram(np.rint(counts).astype(np.int64), hist.nm, out_levels)
