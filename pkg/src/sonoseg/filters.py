"""Gaussian pre-smoothing and slice-wise morphological closing."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .volume import BinaryMask, VoxelVolume


def gaussian_kernel(sigma):
    """Normalised 1D Gaussian taps on ``[-r, r]`` with ``r = ceil(3 sigma)``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    r = math.ceil(3.0 * sigma)
    k = np.arange(-r, r + 1, dtype=np.float64)
    w = np.exp(-(k * k) / (2.0 * sigma * sigma))
    return w / w.sum()


def gaussian_blur3d(vol, sigma):
    """Separable blur along x, y, then z; edges replicate the border voxel."""
    w = gaussian_kernel(sigma)
    out = vol.voxels
    for axis in range(3):
        out = ndimage.correlate1d(out, w, axis=axis, mode="nearest")
    return VoxelVolume(out, vol.spacing)


@dataclass(frozen=True)
class StructuringElement:
    """Square in-plane element; ``width`` must be odd so it has a centre."""

    width: int = 21

    def __post_init__(self):
        if self.width < 1 or self.width % 2 == 0:
            raise ValueError(f"structuring element width must be odd and >= 1, got {self.width}")

    @classmethod
    def square(cls, width):
        """Build from a requested width, rounding even sizes up (20 -> 21)."""
        width = int(width)
        if width < 1:
            raise ValueError(f"structuring element width must be >= 1, got {width}")
        return cls(width + 1 if width % 2 == 0 else width)


def _sweep(bits, width, op):
    out = bits.astype(np.uint8)
    for axis in (0, 1):
        out = op(out, size=width, axis=axis, mode="constant", cval=0)
    return out.astype(bool)


def dilate2d(mask, se):
    return BinaryMask(_sweep(mask.bits, se.width, ndimage.maximum_filter1d), mask.spacing)


def erode2d(mask, se):
    # off-slice pixels count as background, so erosion eats in from the border
    return BinaryMask(_sweep(mask.bits, se.width, ndimage.minimum_filter1d), mask.spacing)


def close_mask(mask, se):
    """Dilate then erode each z-slice with the square element."""
    return erode2d(dilate2d(mask, se), se)
