"""Rotational (VOCAL-style) contouring: six planar contours at 30 degree steps
about a z-parallel axis, and the volume rebuilt from them by angular
interpolation of the boundary radius.

A contour lives in its half-turn plane with coordinates ``(a, r)``: ``a`` is
the height along the axis (the z index) and ``r`` the signed distance from the
axis along the direction ``(cos angle, sin angle)``.  The side ``r > 0`` is
the half-plane at ``angle``, ``r < 0`` the one at ``angle + 180``.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage import measure

from .volume import BinaryMask

CANONICAL_ANGLES = (0, 30, 60, 90, 120, 150)
STEP = 30


class NotStarShaped(ValueError):
    """A radial scan crossed a contour more than once on one side of the axis."""

    def __init__(self, problems):
        self.problems = problems
        detail = "; ".join(f"angle {a}: height {z}" for a, z in problems[:6])
        more = f" (+{len(problems) - 6} more)" if len(problems) > 6 else ""
        super().__init__(f"contours are not star-shaped about the axis: {detail}{more}")


def _segments_cross(p, q):
    # proper intersections between non-adjacent edges of a closed polygon
    n = len(p)
    a, b = p[:, None, :], q[:, None, :]
    c, d = p[None, :, :], q[None, :, :]

    def orient(u, v, w):
        return np.sign((v[..., 0] - u[..., 0]) * (w[..., 1] - u[..., 1]) - (v[..., 1] - u[..., 1]) * (w[..., 0] - u[..., 0]))

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    i, j = np.indices((n, n))
    adjacent = (np.abs(i - j) <= 1) | (np.abs(i - j) == n - 1)
    return bool(np.any(hit & ~adjacent))


@dataclass(frozen=True, eq=False)
class PlanarContour:
    angle: float
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64).reshape(-1, 2)
        if len(pts) > 1 and np.array_equal(pts[0], pts[-1]):
            pts = pts[:-1]
        if len(pts) < 3:
            raise ValueError("a planar contour needs at least 3 vertices")
        if _segments_cross(pts, np.roll(pts, -1, axis=0)):
            raise ValueError(f"contour at angle {self.angle} is self-intersecting")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "angle", float(self.angle))

    def to_dict(self):
        return {"angle": self.angle, "points": self.points.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["angle"], d["points"])

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def canonical(self):
        """Same contour labelled with an angle in [0, 180)."""
        a = self.angle % 360.0
        if a >= 180.0:
            return PlanarContour(a - 180.0, self.points * np.array([1.0, -1.0]))
        return PlanarContour(a, self.points)


def mask_centroid_xy(mask):
    idx = np.argwhere(mask.bits)
    if len(idx) == 0:
        raise ValueError("mask is empty")
    cx, cy = idx[:, 0].mean(), idx[:, 1].mean()
    return float(cx), float(cy)


def _half_extent(dims, axis_point):
    corners = [(x, y) for x in (0, dims[0] - 1) for y in (0, dims[1] - 1)]
    return int(math.ceil(max(math.hypot(x - axis_point[0], y - axis_point[1]) for x, y in corners))) + 1


def slice_at_angle(mask, axis_point=None, angle=0.0):
    """Trace the mask's outline on the half-turn plane at ``angle`` degrees.

    The plane is sampled at unit steps in ``r`` and at every z slice with
    bilinear in-plane interpolation, thresholded at 0.5.  Of the 4-connected
    pieces, the largest one touching the axis is kept (or, if none touches it,
    the one nearest to it), and its outline is traced by marching squares.
    """
    if axis_point is None:
        axis_point = mask_centroid_xy(mask)
    ax, ay = axis_point
    nx, ny, nz = mask.dims
    s_max = _half_extent(mask.dims, axis_point)
    s = np.arange(-s_max, s_max + 1, dtype=np.float64)
    th = math.radians(angle)
    xs, ys = ax + s * math.cos(th), ay + s * math.sin(th)
    zz, ss = np.meshgrid(np.arange(nz, dtype=np.float64), np.arange(len(s)), indexing="ij")
    coords = np.stack([xs[ss], ys[ss], zz])
    plane = ndimage.map_coordinates(mask.bits.astype(np.float64), coords, order=1, mode="constant", cval=0.0)
    solid = plane >= 0.5
    labels, n = ndimage.label(solid)
    if n == 0:
        raise ValueError(f"plane at angle {angle} does not intersect the mask")
    sizes = ndimage.sum_labels(solid, labels, index=np.arange(1, n + 1))
    on_axis = set(np.unique(labels[:, s_max])) - {0}
    if on_axis:
        keep = max(on_axis, key=lambda k: (sizes[k - 1], -k))
    else:
        cols = np.abs(np.arange(len(s)) - s_max)
        dist = ndimage.minimum(np.broadcast_to(cols, labels.shape), labels, index=np.arange(1, n + 1))
        keep = min(range(1, n + 1), key=lambda k: (dist[k - 1], -sizes[k - 1], k))
    piece = np.pad((labels == keep).astype(np.float64), 1)
    outlines = measure.find_contours(piece, 0.5)
    outline = max(outlines, key=len)
    pts = np.column_stack([outline[:, 0] - 1.0, outline[:, 1] - 1.0 - s_max])
    return PlanarContour(float(angle), pts)


def _side_radii(contour, nz, outermost=False):
    """Boundary radius at each integer height on the ``r > 0`` and ``r < 0`` sides.

    Heights the contour does not reach get radius 0.  Returns the two radius
    arrays and the heights where a side was crossed more than once; with
    ``outermost`` such heights take the crossing farthest from the axis instead.
    """
    p = contour.points
    q = np.roll(p, -1, axis=0)
    plus, minus = np.zeros(nz), np.zeros(nz)
    bad = []
    for z in range(nz):
        lo, hi = np.minimum(p[:, 0], q[:, 0]), np.maximum(p[:, 0], q[:, 0])
        e = (lo <= z) & (z < hi)
        if not np.any(e):
            continue
        pa, pr, qa, qr = p[e, 0], p[e, 1], q[e, 0], q[e, 1]
        r = pr + (z - pa) / (qa - pa) * (qr - pr)
        # a vertex on the scan line is shared by two edges: take it verbatim so
        # both report the identical crossing, then merge duplicates
        r = np.where(pa == z, pr, np.where(qa == z, qr, r))
        r = np.unique(r)
        pos, neg = r[r >= 0], r[r < 0]
        if len(pos) > 1 or len(neg) > 1:
            bad.append(z)
            if not outermost:
                continue
        if len(pos):
            plus[z] = pos.max()
        if len(neg):
            minus[z] = -neg.min()
    return plus, minus, bad


def vocal_reconstruct(contours, dims, axis_point, outermost=False):
    """Rebuild a mask from six contours by interpolating the boundary radius
    linearly in angle between neighbouring half-planes (12 of them, 30 degrees
    apart).  A voxel is inside when its distance to the axis is below the
    interpolated radius at its own height and angle.

    Contours must be star-shaped about the axis; otherwise
    :class:`NotStarShaped` lists every offending (angle, height).  Passing
    ``outermost=True`` opts into resolving multiple crossings by the one
    farthest from the axis, which fills concavities along each ray.
    """
    dims = tuple(int(n) for n in dims)
    canon = [c.canonical() for c in contours]
    angles = sorted(round(c.angle, 6) for c in canon)
    if len(canon) != 6 or angles != [float(a) for a in CANONICAL_ANGLES]:
        raise ValueError(f"need exactly one contour per angle in {CANONICAL_ANGLES}, got {angles}")
    nz = dims[2]
    radius = np.zeros((12, nz))
    problems = []
    for c in canon:
        plus, minus, bad = _side_radii(c, nz, outermost)
        k = int(round(c.angle)) // STEP
        radius[k], radius[k + 6] = plus, minus
        problems.extend((c.angle, z) for z in bad)
    if problems and not outermost:
        raise NotStarShaped(problems)

    ax, ay = axis_point
    x, y = np.meshgrid(np.arange(dims[0]) - ax, np.arange(dims[1]) - ay, indexing="ij")
    rho = np.hypot(x, y)
    theta = np.degrees(np.arctan2(y, x)) % 360.0
    lo = np.floor(theta / STEP).astype(int) % 12
    hi = (lo + 1) % 12
    t = (theta - lo * STEP) / STEP
    # radius tables indexed [half-plane, z] -> per-voxel [x, y, z]
    r_at = (1.0 - t)[..., None] * radius[lo] + t[..., None] * radius[hi]
    return BinaryMask(rho[..., None] < r_at)


def vocal_from_mask(mask, axis_point=None, outermost=False):
    """Slice ``mask`` at the six canonical angles and rebuild it."""
    if axis_point is None:
        axis_point = mask_centroid_xy(mask)
    contours = [slice_at_angle(mask, axis_point, a) for a in CANONICAL_ANGLES]
    return vocal_reconstruct(contours, mask.dims, axis_point, outermost), contours
