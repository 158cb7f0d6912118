"""Per-frame mask processing: column noise filter, temporal OR, depth cut, column histogram.

Masks are ``(h, w)`` uint8 arrays holding 0/1 (1 = vegetation). Depth frames are
``(h, w)`` float64 arrays in meters; pixels without a valid range hold
``NO_RETURN`` (``+inf``), so they never pass a ``depth <= d_th`` test.
"""
from collections import deque
from dataclasses import dataclass

import numpy as np

NO_RETURN = np.inf
DEFAULT_SIZE = 224


class DimensionError(ValueError):
    """Raised when frames that must be paired have different shapes."""


@dataclass(frozen=True)
class PipelineConfig:
    noise_column_background_fraction: float = 0.97
    history_len: int = 3
    depth_threshold: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.noise_column_background_fraction <= 1.0:
            raise ValueError("noise_column_background_fraction must be in (0, 1]")
        if int(self.history_len) != self.history_len or self.history_len < 1:
            raise ValueError("history_len must be a positive integer")
        if not self.depth_threshold > 0.0:
            raise ValueError("depth_threshold must be > 0")


def as_mask(mask):
    """Validate ``mask`` and return it as a 2-D uint8 array of 0/1."""
    arr = np.asarray(mask)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"mask must be a non-empty 2-D array, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    if arr.dtype == np.uint8:
        ok = arr.max() <= 1
    else:
        ok = ((arr == 0) | (arr == 1)).all()
    if not ok:
        raise ValueError("mask values must be 0 or 1")
    return arr.astype(np.uint8, copy=False)


def as_depth(depth):
    arr = np.asarray(depth, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"depth must be a 2-D array, got shape {arr.shape}")
    if np.isnan(arr).any() or (arr < 0).any():
        raise ValueError("depth values must be >= 0 (use NO_RETURN for missing range)")
    return arr


def _check_same_shape(a, b, what):
    if a.shape != b.shape:
        raise DimensionError(f"{what}: shape {a.shape} does not match {b.shape}")


class MaskHistory:
    """Ring buffer of the most recent ``capacity`` masks (oldest evicted first)."""

    def __init__(self, capacity, masks=()):
        if int(capacity) != capacity or capacity < 1:
            raise ValueError("capacity must be a positive integer")
        self.capacity = int(capacity)
        self._buffer = deque(maxlen=self.capacity)
        for m in masks:
            self.push(m)

    def __len__(self):
        return len(self._buffer)

    def __iter__(self):
        return iter(self._buffer)

    @property
    def shape(self):
        return self._buffer[0].shape if self._buffer else None

    def push(self, mask):
        mask = as_mask(mask)
        if self._buffer and mask.shape != self.shape:
            raise DimensionError(
                f"mask shape {mask.shape} does not match history shape {self.shape}"
            )
        self._buffer.append(mask.copy())

    def union(self):
        if not self._buffer:
            raise ValueError("empty history has no cumulative mask")
        out = np.zeros(self.shape, dtype=np.uint8)
        for m in self._buffer:
            np.bitwise_or(out, m, out=out)
        return out

    def clear(self):
        self._buffer.clear()


def column_noise_filter(mask, background_fraction=0.97):
    """Zero every column whose background share is strictly above ``background_fraction``."""
    if not 0.0 < background_fraction <= 1.0:
        raise ValueError("background_fraction must be in (0, 1]")
    mask = as_mask(mask)
    h = mask.shape[0]
    background = h - mask.sum(axis=0, dtype=np.int64)
    noisy = background / h > background_fraction
    out = mask.copy()
    out[:, noisy] = 0
    return out


def accumulate(history, new_mask):
    """Push ``new_mask`` into ``history`` and return the OR of everything buffered."""
    history.push(new_mask)
    return history.union()


def depth_cut(cum_mask, depth, d_th):
    """Keep mask pixels whose depth is within ``d_th``; NO_RETURN pixels are dropped."""
    if not d_th > 0:
        raise ValueError("d_th must be > 0")
    cum_mask = as_mask(cum_mask)
    depth = as_depth(depth)
    _check_same_shape(cum_mask, depth, "depth_cut")
    return (cum_mask.astype(bool) & (depth <= d_th)).astype(np.uint8)


def column_histogram(mask):
    """Vegetation pixel count per column, summed over all rows."""
    return as_mask(mask).sum(axis=0, dtype=np.int64)


def process_frame(history, mask, depth, cfg):
    """Run one frame through noise filter, accumulation, depth cut and histogram."""
    mask = as_mask(mask)
    depth = as_depth(depth)
    _check_same_shape(mask, depth, "process_frame")
    if history.shape is not None and history.shape != mask.shape:
        raise DimensionError(
            f"mask shape {mask.shape} does not match history shape {history.shape}"
        )
    clean = column_noise_filter(mask, cfg.noise_column_background_fraction)
    cumulative = accumulate(history, clean)
    return column_histogram(depth_cut(cumulative, depth, cfg.depth_threshold))
