"""Synthetic ultrasound-like tumour volumes with analytic ground truth."""

import json
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import rng
from .volume import BinaryMask, VoxelVolume


@dataclass(frozen=True)
class PhantomSpec:
    shape: str = "ellipsoid"
    center: tuple = (32.0, 32.0, 32.0)
    radii: tuple = (10.0, 12.0, 8.0)
    lobe_count: int = 0
    lobe_amplitude: float = 0.0
    fg_intensity: float = 200.0
    bg_intensity: float = 50.0
    speckle_sigma: float = 0.0
    additive_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if self.shape not in ("ellipsoid", "lobulated"):
            raise ValueError(f"unknown phantom shape {self.shape!r}")
        if len(self.center) != 3 or len(self.radii) != 3:
            raise ValueError("center and radii need three components")
        if min(self.radii) <= 0:
            raise ValueError("radii must be positive")
        if self.lobe_count < 0:
            raise ValueError("lobe_count must be >= 0")
        if not 0.0 <= self.lobe_amplitude <= 0.5:
            raise ValueError("lobe_amplitude must lie in [0, 0.5]")
        for name in ("fg_intensity", "bg_intensity"):
            if not 0.0 <= getattr(self, name) <= 255.0:
                raise ValueError(f"{name} must lie in [0, 255]")
        if self.fg_intensity == self.bg_intensity:
            raise ValueError("fg_intensity and bg_intensity must differ")
        if self.speckle_sigma < 0 or self.additive_sigma < 0:
            raise ValueError("noise sigmas must be >= 0")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown phantom spec fields: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        d = asdict(self)
        d["center"], d["radii"] = list(self.center), list(self.radii)
        return d


def phantom_mask(dims, spec):
    """Analytic inside test evaluated at voxel centres."""
    x, y, z = np.meshgrid(*(np.arange(n, dtype=np.float64) for n in dims), indexing="ij")
    u = (x - spec.center[0]) / spec.radii[0]
    v = (y - spec.center[1]) / spec.radii[1]
    w = (z - spec.center[2]) / spec.radii[2]
    rho2 = u * u + v * v + w * w
    if spec.shape == "ellipsoid" or spec.lobe_amplitude == 0.0:
        return rho2 <= 1.0
    # modulation uses the angles of the normalised offset, so lobes follow the ellipsoid
    polar = np.arctan2(np.hypot(u, v), w)
    azimuth = np.arctan2(v, u)
    k = spec.lobe_count
    scale = 1.0 + spec.lobe_amplitude * np.sin(k * polar) * np.sin(k * azimuth)
    return rho2 <= scale * scale


def generate_phantom(dims, spec):
    """Return ``(volume, ground_truth)`` for ``spec`` on a grid of ``dims``.

    Noise is multiplicative log-normal speckle followed by additive Gaussian
    noise, each clamped to [0, 255].  Both draw from the SplitMix64 stream of
    ``spec.rng_seed``: speckle uses outputs ``[0, 2n)``, additive ``[2n, 4n)``
    with voxels enumerated x-fastest.
    """
    dims = tuple(int(n) for n in dims)
    if len(dims) != 3 or min(dims) < 16:
        raise ValueError(f"phantom dims must be >= 16 per axis, got {dims}")
    reach = 1.0 + (spec.lobe_amplitude if spec.shape == "lobulated" else 0.0)
    for c, r, n, ax in zip(spec.center, spec.radii, dims, "xyz"):
        if c - r * reach < 0 or c + r * reach > n - 1:
            raise ValueError(f"phantom exceeds volume bounds along {ax}")

    inside = phantom_mask(dims, spec)
    vol = np.where(inside, spec.fg_intensity, spec.bg_intensity).astype(np.float64)
    n = vol.size
    if spec.speckle_sigma > 0:
        g = rng.normal(spec.rng_seed, 0, n).reshape(dims, order="F")
        vol = np.clip(vol * np.exp(spec.speckle_sigma * g), 0.0, 255.0)
    if spec.additive_sigma > 0:
        g = rng.normal(spec.rng_seed, 2 * n, n).reshape(dims, order="F")
        vol = np.clip(vol + spec.additive_sigma * g, 0.0, 255.0)
    return VoxelVolume(vol), BinaryMask(inside)
