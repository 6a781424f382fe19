"""Histogram-based information measures for image channels.

All logarithms are natural; entropies and mutual information come out in
nats while IR, MIR, LIR and LMIR are in pixel units (the ratio features do
not depend on the logarithm base).  Probabilities are always derived from
the integer counts at the point of use.

Sums go through ``math.fsum`` so results are correctly rounded and do not
depend on the number of empty bins or on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DegenerateSize, DimensionMismatch, IndexOutOfRange, InvalidChannel

MAX_DEPTH = 16
_NEG_ZERO_TOL = 1e-12


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Channel:
    """One intensity plane.

    ``intensities`` is a 2-D integer grid of shape ``(height, width)``.
    ``levels`` is the number of representable levels, ``2**depth`` unless
    the channel has been quantized.
    """

    intensities: np.ndarray
    depth: int = 8
    levels: int | None = None

    def __post_init__(self):
        data = np.asarray(self.intensities)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise InvalidChannel(f"intensities must be a non-empty 2-D grid, got shape {data.shape}")
        if not 1 <= self.depth <= MAX_DEPTH:
            raise InvalidChannel(f"depth must be in [1, {MAX_DEPTH}], got {self.depth}")
        if data.dtype.kind not in "iu":
            if data.dtype.kind == "f" and np.all(data == np.floor(data)):
                data = data.astype(np.int64)
            else:
                raise InvalidChannel(f"intensities must be integers, got dtype {data.dtype}")
        levels = 2**self.depth if self.levels is None else int(self.levels)
        if not 1 <= levels <= 2**self.depth:
            raise InvalidChannel(f"levels must be in [1, 2**depth], got {levels}")
        if data.min() < 0 or data.max() >= levels:
            raise InvalidChannel(f"intensities must lie in [0, {levels - 1}]")
        object.__setattr__(self, "intensities", _readonly(data.astype(np.int64, copy=False)))
        object.__setattr__(self, "levels", levels)

    @property
    def width(self) -> int:
        return self.intensities.shape[1]

    @property
    def height(self) -> int:
        return self.intensities.shape[0]

    @property
    def nm(self) -> int:
        return self.intensities.size

    @classmethod
    def from_values(cls, values, width, height, depth=8, levels=None):
        """Build a channel from a flat row-major sequence."""
        grid = np.asarray(values).reshape(height, width)
        return cls(grid, depth=depth, levels=levels)


@dataclass(frozen=True, eq=False)
class ChannelHistogram:
    counts: np.ndarray
    nm: int
    levels: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size != self.levels:
            raise InvalidChannel("histogram must have one count per level")
        if counts.min(initial=0) < 0 or int(counts.sum()) != self.nm:
            raise InvalidChannel("histogram counts must be non-negative and sum to nm")
        object.__setattr__(self, "counts", _readonly(counts))

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.nm

    @classmethod
    def from_counts(cls, counts):
        counts = np.asarray(counts, dtype=np.int64)
        return cls(counts, int(counts.sum()), counts.size)


@dataclass(frozen=True, eq=False)
class JointHistogram:
    """Counts indexed ``[i, j]`` with ``i`` from the first channel."""

    counts: np.ndarray
    nm: int
    levels: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.levels, self.levels):
            raise InvalidChannel("joint histogram must be levels x levels")
        if counts.min(initial=0) < 0 or int(counts.sum()) != self.nm:
            raise InvalidChannel("joint counts must be non-negative and sum to nm")
        object.__setattr__(self, "counts", _readonly(counts))

    def marginal(self, which: Literal["first", "second"] = "first") -> ChannelHistogram:
        axis = 1 if which == "first" else 0
        return ChannelHistogram(self.counts.sum(axis=axis), self.nm, self.levels)


@dataclass(frozen=True)
class MeasureReport:
    entropy: float
    ir: float
    lir: float
    nm: int
    levels: int
    d: int = 1


@dataclass(frozen=True)
class MatchReport:
    mutual_information: float
    joint_entropy: float
    mir: float
    lmir: float
    nm: int
    levels: int
    d: int = 1


def build_histogram(channel: Channel) -> ChannelHistogram:
    counts = np.bincount(channel.intensities.ravel(), minlength=channel.levels)
    return ChannelHistogram(counts, channel.nm, channel.levels)


def build_joint_histogram(a: Channel, b: Channel) -> JointHistogram:
    if a.intensities.shape != b.intensities.shape:
        raise DimensionMismatch(
            f"channel sizes differ: {a.width}x{a.height} vs {b.width}x{b.height}; resample first"
        )
    if a.levels != b.levels:
        raise DimensionMismatch(f"channel levels differ: {a.levels} vs {b.levels}")
    levels = a.levels
    flat = a.intensities.ravel() * levels + b.intensities.ravel()
    counts = np.bincount(flat, minlength=levels * levels).reshape(levels, levels)
    return JointHistogram(counts, a.nm, levels)


def _entropy_of_counts(counts, nm) -> float:
    h = counts[counts > 0]
    p = h / nm
    return max(0.0, -math.fsum(p * np.log(p)))


def entropy(hist: ChannelHistogram) -> float:
    """Sample entropy in nats."""
    return _entropy_of_counts(hist.counts, hist.nm)


def joint_entropy(joint: JointHistogram) -> float:
    return _entropy_of_counts(joint.counts.ravel(), joint.nm)


def _clamp(x: float) -> float:
    return 0.0 if abs(x) < _NEG_ZERO_TOL else x


def mutual_information(joint: JointHistogram) -> float:
    h1 = entropy(joint.marginal("first"))
    h2 = entropy(joint.marginal("second"))
    return _clamp(h1 + h2 - joint_entropy(joint))


def _ratio_terms(counts, nm):
    """Per-level terms h * (-ln p) / ln h for the bins with h > 1."""
    h = counts[counts > 1].astype(np.float64)
    return h * -np.log(h / nm) / np.log(h)


def level_information_ratio(hist: ChannelHistogram, i: int) -> float:
    if not 0 <= i < hist.levels:
        raise IndexOutOfRange(f"level {i} outside [0, {hist.levels})")
    h = int(hist.counts[i])
    if h <= 1:
        return 0.0
    return -math.log(h / hist.nm) / math.log(h)


def information_ratio(hist: ChannelHistogram) -> float:
    """IR: sum over levels of h_i * r_i, in pixels."""
    return math.fsum(_ratio_terms(hist.counts, hist.nm))


def _lower_bound(nm: int, info: float) -> float:
    if nm < 2:
        raise DegenerateSize("bound needs at least 2 pixels (ln NM = 0)")
    return nm * info / math.log(nm)


def lir(hist: ChannelHistogram) -> float:
    """Entropy lower bound on the IR: NM * H / ln(NM)."""
    return _lower_bound(hist.nm, entropy(hist))


def _cells(joint: JointHistogram):
    """Non-singleton cells as (h_ij, h_i, h_j) float arrays."""
    counts = joint.counts
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    ii, jj = np.nonzero(counts > 1)
    return (
        counts[ii, jj].astype(np.float64),
        rows[ii].astype(np.float64),
        cols[jj].astype(np.float64),
    )


def mutual_information_ratio(joint: JointHistogram) -> float:
    """MIR in pixels.  Cells with a single pixel contribute nothing."""
    nm = joint.nm
    hij, hi, hj = _cells(joint)
    # (ln p_ij - ln p_i) - ln p_j keeps the diagonal of a self-match bitwise
    # equal to -ln p_i, so MIR(X, X) reproduces IR(X) exactly.
    pmi = (np.log(hij / nm) - np.log(hi / nm)) - np.log(hj / nm)
    return math.fsum(hij * pmi / np.log(hij))


def lmir(joint: JointHistogram) -> float:
    return _clamp(_lower_bound(joint.nm, mutual_information(joint)))


def ir_joint_upper_bound(joint: JointHistogram, which: Literal["first", "second"] = "first") -> float:
    """Joint-histogram upper bound on the IR of one marginal.

    Only guaranteed to bound the IR when no joint cell holds a single pixel.
    """
    if which not in ("first", "second"):
        raise ValueError(f"which must be 'first' or 'second', got {which!r}")
    hij, hi, hj = _cells(joint)
    marginal = hi if which == "first" else hj
    return math.fsum(hij * -np.log(marginal / joint.nm) / np.log(hij))


def bound_condition_holds(depth: int, width: int, height: int) -> bool:
    """Whether D <= ln(NM) / (2 ln 2), under which IR and MIR stay <= NM."""
    nm = width * height
    if depth < 1 or nm < 2:
        raise DegenerateSize("need depth >= 1 and at least 2 pixels")
    # D <= log2(NM)/2  <=>  4**D <= NM, checked in integers to keep the boundary exact
    return 4**depth <= nm


def measure(channel: Channel, d: int = 1) -> MeasureReport:
    """Entropy, IR and LIR of an already-quantized channel; ``d`` is metadata."""
    hist = build_histogram(channel)
    return MeasureReport(entropy(hist), information_ratio(hist), lir(hist), hist.nm, hist.levels, d)


def match(a: Channel, b: Channel, d: int = 1) -> MatchReport:
    joint = build_joint_histogram(a, b)
    return MatchReport(
        mutual_information(joint),
        joint_entropy(joint),
        mutual_information_ratio(joint),
        lmir(joint),
        joint.nm,
        joint.levels,
        d,
    )
