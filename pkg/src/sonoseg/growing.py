"""Seeded 3D region growing over the six face neighbours."""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .volume import BinaryMask

# enqueue order is part of the contract: running-mean results depend on it
NEIGHBOURS = ((-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, -1), (0, 0, 1))

ACCEPTANCE_MODES = ("seed-fixed", "running-mean")


@dataclass(frozen=True)
class GrowParams:
    threshold: float = 5.0
    acceptance: str = "running-mean"

    def __post_init__(self):
        if not (np.isfinite(self.threshold) and self.threshold >= 0):
            raise ValueError(f"threshold must be finite and >= 0, got {self.threshold}")
        if self.acceptance not in ACCEPTANCE_MODES:
            raise ValueError(f"acceptance must be one of {ACCEPTANCE_MODES}")


def check_seed(seed, dims):
    seed = tuple(int(s) for s in seed)
    if len(seed) != 3 or not all(0 <= s < n for s, n in zip(seed, dims)):
        raise IndexError(f"seed {seed} outside volume of dims {tuple(dims)}")
    return seed


def region_grow(vol, seed, params=GrowParams()):
    """Grow the 6-connected region around ``seed`` by FIFO frontier expansion.

    A neighbour is tested once, the first time it is reached, and joins when
    ``|I(v) - ref| < threshold``.  ``ref`` is the seed intensity in
    ``seed-fixed`` mode, or the mean of all voxels accepted so far in
    ``running-mean`` mode (updated after every acceptance).
    """
    img = vol.voxels
    nx, ny, nz = img.shape
    seed = check_seed(seed, img.shape)
    t = float(params.threshold)
    running = params.acceptance == "running-mean"

    seen = np.zeros(img.shape, dtype=bool)
    inside = np.zeros(img.shape, dtype=bool)
    seen[seed] = inside[seed] = True
    ref = total = float(img[seed])
    count = 1
    queue = deque([seed])
    while queue:
        x, y, z = queue.popleft()
        for dx, dy, dz in NEIGHBOURS:
            p = (x + dx, y + dy, z + dz)
            if not (0 <= p[0] < nx and 0 <= p[1] < ny and 0 <= p[2] < nz) or seen[p]:
                continue
            seen[p] = True
            val = float(img[p])
            if abs(val - ref) < t:
                inside[p] = True
                queue.append(p)
                if running:
                    total += val
                    count += 1
                    ref = total / count
    return BinaryMask(inside, vol.spacing)
