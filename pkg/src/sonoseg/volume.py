"""Voxel grids, the VOL1 on-disk format, signed distance initialisation and
slice overlays.

Arrays are indexed ``[x, y, z]`` (shape ``(nx, ny, nz)``).  On disk the
payload is x-fastest, i.e. Fortran order for that shape.  Level-set fields use
the convention ``phi < 0`` inside.
"""

import json
import os
from dataclasses import dataclass, field

import numba
import numpy as np


class VolumeFormatError(ValueError):
    """Raised for malformed VOL1 headers or payloads."""


def _frozen(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class VoxelVolume:
    voxels: np.ndarray
    spacing: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        v = np.array(self.voxels, dtype=np.float64)
        if v.ndim != 3 or min(v.shape) < 1:
            raise ValueError(f"volume must be 3D with positive dims, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("volume contains non-finite intensities")
        object.__setattr__(self, "voxels", _frozen(v))
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))

    @property
    def dims(self):
        return self.voxels.shape


@dataclass(frozen=True, eq=False)
class BinaryMask:
    bits: np.ndarray
    spacing: tuple = field(default=(1.0, 1.0, 1.0))

    def __post_init__(self):
        b = np.array(self.bits, dtype=bool)
        if b.ndim != 3 or min(b.shape) < 1:
            raise ValueError(f"mask must be 3D with positive dims, got shape {b.shape}")
        object.__setattr__(self, "bits", _frozen(b))
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))

    @property
    def dims(self):
        return self.bits.shape

    def count(self):
        return int(np.count_nonzero(self.bits))

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.dims == other.dims and bool(np.array_equal(self.bits, other.bits))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class LevelSetField:
    phi: np.ndarray

    def __post_init__(self):
        p = np.array(self.phi, dtype=np.float64)
        if p.ndim != 3:
            raise ValueError("level-set field must be 3D")
        if not np.all(np.isfinite(p)):
            raise ValueError("level-set field contains non-finite values")
        object.__setattr__(self, "phi", _frozen(p))

    @property
    def dims(self):
        return self.phi.shape

    def mask(self):
        return BinaryMask(self.phi < 0)


# --------------------------------------------------------------------- VOL1 I/O

_DTYPES = {"f32": np.dtype("<f4"), "u8": np.dtype("u1")}


def _header_path(path):
    path = os.fspath(path)
    return path if path.endswith(".vol.json") else path + ".vol.json"


def _read(path):
    hdr_path = _header_path(path)
    with open(hdr_path, encoding="utf-8") as fh:
        try:
            hdr = json.load(fh)
        except json.JSONDecodeError as exc:
            raise VolumeFormatError(f"{hdr_path}: header is not valid JSON ({exc})") from exc
    try:
        dims = [int(d) for d in hdr["dims"]]
        spacing = [float(s) for s in hdr.get("spacing", (1.0, 1.0, 1.0))]
        dtype = _DTYPES[hdr["dtype"]]
        data = hdr["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise VolumeFormatError(f"{hdr_path}: malformed header ({exc!r})") from exc
    if len(dims) != 3 or min(dims) < 1 or len(spacing) != 3:
        raise VolumeFormatError(f"{hdr_path}: dims/spacing must be 3 positive entries")
    raw_path = os.path.join(os.path.dirname(hdr_path), data)
    payload = np.fromfile(raw_path, dtype=dtype)
    n = dims[0] * dims[1] * dims[2]
    if payload.size != n or os.path.getsize(raw_path) != n * dtype.itemsize:
        raise VolumeFormatError(
            f"{raw_path}: payload size mismatch, expected {n} elements of {hdr['dtype']}, "
            f"file holds {os.path.getsize(raw_path)} bytes"
        )
    return payload.reshape(dims, order="F"), tuple(spacing), hdr["dtype"]


def _write(arr, spacing, dtype_name, path):
    hdr_path = _header_path(path)
    base = os.path.basename(hdr_path)[: -len(".vol.json")]
    raw_name = base + ".raw"
    hdr = {
        "dims": [int(d) for d in arr.shape],
        "spacing": [float(s) for s in spacing],
        "dtype": dtype_name,
        "data": raw_name,
    }
    arr.astype(_DTYPES[dtype_name]).ravel(order="F").tofile(
        os.path.join(os.path.dirname(hdr_path), raw_name)
    )
    with open(hdr_path, "w", encoding="utf-8") as fh:
        json.dump(hdr, fh)
        fh.write("\n")


def load_volume(path):
    """Read a VOL1 volume.  ``path`` is the header file or its basename."""
    arr, spacing, _ = _read(path)
    if not np.all(np.isfinite(arr)):
        raise VolumeFormatError(f"{_header_path(path)}: payload contains non-finite values")
    return VoxelVolume(arr.astype(np.float64), spacing)


def load_mask(path):
    arr, spacing, dtype_name = _read(path)
    if dtype_name != "u8":
        raise VolumeFormatError(f"{_header_path(path)}: masks must be stored as u8")
    if np.any(arr > 1):
        raise VolumeFormatError(f"{_header_path(path)}: mask payload must be 0/1 bytes")
    return BinaryMask(arr.astype(bool), spacing)


def save_volume(vol, path):
    _write(vol.voxels, vol.spacing, "f32", path)


def save_mask(mask, path):
    _write(mask.bits.astype(np.uint8), mask.spacing, "u8", path)


# ------------------------------------------------------------- chamfer <3,4,5>

_FAR = np.int64(2**40)


def _half_offsets(forward):
    offs = []
    for dz in (-1, 0, 1):
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                key = (dz, dy, dx)
                if key == (0, 0, 0):
                    continue
                if (key < (0, 0, 0)) == forward:
                    nz = abs(dx) + abs(dy) + abs(dz)
                    offs.append((dx, dy, dz, (0, 3, 4, 5)[nz]))
    return np.array(offs, dtype=np.int64)


_FWD = _half_offsets(True)
_BWD = _half_offsets(False)


@numba.njit(cache=True)
def _chamfer_pass(d, offs, forward):
    nx, ny, nz = d.shape
    for kk in range(nz):
        z = kk if forward else nz - 1 - kk
        for jj in range(ny):
            y = jj if forward else ny - 1 - jj
            for ii in range(nx):
                x = ii if forward else nx - 1 - ii
                best = d[x, y, z]
                for m in range(offs.shape[0]):
                    xx = x + offs[m, 0]
                    yy = y + offs[m, 1]
                    zz = z + offs[m, 2]
                    if 0 <= xx < nx and 0 <= yy < ny and 0 <= zz < nz:
                        c = d[xx, yy, zz] + offs[m, 3]
                        if c < best:
                            best = c
                d[x, y, z] = best


def chamfer_distance(features):
    """Integer <3,4,5> chamfer distance from every voxel to the nearest feature voxel.

    Divide by 3 for voxel units.  Voxels are unreachable only when there are no
    features at all, in which case they keep a huge sentinel.
    """
    d = np.where(np.asarray(features, dtype=bool), 0, _FAR).astype(np.int64)
    _chamfer_pass(d, _FWD, True)
    _chamfer_pass(d, _BWD, False)
    return d


def mask_to_sdf(mask):
    """Signed chamfer distance: negative inside, ``{phi < 0}`` equals ``mask``.

    Outside voxels get the distance to the nearest inside voxel, inside voxels
    minus the distance to the nearest outside voxel, so neither side is ever 0.
    """
    bits = mask.bits if isinstance(mask, BinaryMask) else np.asarray(mask, dtype=bool)
    n_in = int(np.count_nonzero(bits))
    if n_in == 0 or n_in == bits.size:
        raise ValueError("mask_to_sdf needs both inside and outside voxels")
    d_out = chamfer_distance(bits)
    d_in = chamfer_distance(~bits)
    phi = np.where(bits, -d_in, d_out).astype(np.float64) / 3.0
    return LevelSetField(phi)


# ---------------------------------------------------------------------- overlay

_AXES = {"x": 0, "y": 1, "z": 2}


def _slice(arr, axis, index):
    # rows follow the higher in-plane axis, columns the lower one
    return np.take(arr, index, axis=_AXES[axis]).T


def boundary_2d(bits):
    """In-plane boundary: true pixels with a false (or off-slice) 4-neighbour."""
    p = np.pad(bits, 1, constant_values=False)
    interior = p[:-2, 1:-1] & p[2:, 1:-1] & p[1:-1, :-2] & p[1:-1, 2:]
    return bits & ~interior


def overlay_image(vol, mask, axis, index):
    if axis not in _AXES:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    if vol.dims != mask.dims:
        raise ValueError(f"volume dims {vol.dims} != mask dims {mask.dims}")
    n = vol.dims[_AXES[axis]]
    if not 0 <= index < n:
        raise IndexError(f"slice index {index} outside [0, {n}) along {axis}")
    img = _slice(vol.voxels, axis, index)
    lo, hi = float(img.min()), float(img.max())
    scaled = (img - lo) * (255.0 / (hi - lo)) if hi > lo else np.zeros_like(img)
    out = np.clip(np.rint(scaled), 0, 255).astype(np.uint8)
    out[boundary_2d(_slice(mask.bits, axis, index))] = 255
    return out


def export_overlay(vol, mask, axis, index, path):
    """Write one slice as binary PGM with the mask boundary painted white."""
    img = overlay_image(vol, mask, axis, index)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())
