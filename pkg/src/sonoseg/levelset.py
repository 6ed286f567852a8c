"""Three-dimensional Chan-Vese evolution with periodic chamfer redistancing.

Sign convention: ``phi < 0`` is inside.  ``c1`` is the mean intensity over
``phi >= 0`` (outside) and ``c2`` the mean over ``phi < 0`` (inside).  The
update is the gradient flow of :func:`cv_energy`::

    phi += dt * delta_eps(phi) * (mu*kappa - lambda1*(u0-c1)**2 + lambda2*(u0-c2)**2 + nu)

so a voxel whose intensity is closer to ``c2`` is pushed towards ``phi < 0``
and the length term shrinks convex fronts.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .volume import BinaryMask, LevelSetField, mask_to_sdf

ETA = 1e-8


class PhaseCollapse(RuntimeError):
    """One of the two regions became empty during evolution."""

    def __init__(self, iteration, detail="one region is empty"):
        super().__init__(f"phase collapse at iteration {iteration}: {detail}")
        self.iteration = iteration


@dataclass(frozen=True)
class ChanVeseParams:
    mu: float = 0.2
    nu: float = 0.0
    lambda1: float = 1.0
    lambda2: float = 1.0
    dt: float = 0.5
    epsilon: float = 1.5
    max_iters: int = 500
    redistance_every: int = 20
    stop_tol: float = 5e-4

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise ValueError("lambda1 and lambda2 must be > 0")
        if self.dt < 0:
            raise ValueError("dt must be >= 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.redistance_every < 1:
            raise ValueError("redistance_every must be >= 1")
        if self.stop_tol < 0:
            raise ValueError("stop_tol must be >= 0")


@dataclass(frozen=True, eq=False)
class CvState:
    phi: np.ndarray
    c1: float
    c2: float
    iter: int = 0
    last_change: float = 0.0


@dataclass
class CvTrace:
    """Per-iteration ``(iter, c1, c2, last_change, energy)`` rows.

    ``redistanced_at`` holds ``(iter, mask_unchanged)`` for every redistance.
    """

    rows: list = field(default_factory=list)
    redistanced_at: list = field(default_factory=list)

    HEADER = ("iter", "c1", "c2", "last_change", "energy")

    def append(self, it, c1, c2, last_change, energy):
        self.rows.append((int(it), float(c1), float(c2), float(last_change), float(energy)))

    def column(self, name):
        i = self.HEADER.index(name)
        return np.array([r[i] for r in self.rows])

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(self.HEADER)
            for r in self.rows:
                w.writerow([r[0]] + [repr(v) for v in r[1:]])


def _u0(vol):
    return vol.voxels if hasattr(vol, "voxels") else np.asarray(vol, dtype=np.float64)


def _phi(phi):
    return phi.phi if isinstance(phi, LevelSetField) else np.asarray(phi, dtype=np.float64)


def dirac(phi, eps):
    return eps / (math.pi * (eps * eps + phi * phi))


def region_means(vol, phi):
    """Sharp means ``(c1, c2)`` over ``phi >= 0`` and ``phi < 0``."""
    u0, p = _u0(vol), _phi(phi)
    inside = p < 0
    n_in = int(np.count_nonzero(inside))
    if n_in == 0 or n_in == p.size:
        raise PhaseCollapse(-1)
    return float(u0[~inside].mean()), float(u0[inside].mean())


# --------------------------------------------------------------- differences
# All stencils read a 1-voxel edge-padded copy ``q`` of phi and produce values
# for the z-slab [z0, z1) of the unpadded grid.


def _view(q, dx, dy, dz, z0, z1):
    nx, ny = q.shape[0] - 2, q.shape[1] - 2
    return q[1 + dx : 1 + dx + nx, 1 + dy : 1 + dy + ny, 1 + z0 + dz : 1 + z1 + dz]


def _gradient(q, z0, z1):
    gx = (_view(q, 1, 0, 0, z0, z1) - _view(q, -1, 0, 0, z0, z1)) * 0.5
    gy = (_view(q, 0, 1, 0, z0, z1) - _view(q, 0, -1, 0, z0, z1)) * 0.5
    gz = (_view(q, 0, 0, 1, z0, z1) - _view(q, 0, 0, -1, z0, z1)) * 0.5
    return gx, gy, gz


def _curvature(q, z0, z1):
    c = _view(q, 0, 0, 0, z0, z1)
    v = lambda dx, dy, dz: _view(q, dx, dy, dz, z0, z1)  # noqa: E731
    gx, gy, gz = _gradient(q, z0, z1)
    gxx = v(1, 0, 0) - 2.0 * c + v(-1, 0, 0)
    gyy = v(0, 1, 0) - 2.0 * c + v(0, -1, 0)
    gzz = v(0, 0, 1) - 2.0 * c + v(0, 0, -1)
    gxy = (v(1, 1, 0) - v(1, -1, 0) - v(-1, 1, 0) + v(-1, -1, 0)) * 0.25
    gxz = (v(1, 0, 1) - v(1, 0, -1) - v(-1, 0, 1) + v(-1, 0, -1)) * 0.25
    gyz = (v(0, 1, 1) - v(0, 1, -1) - v(0, -1, 1) + v(0, -1, -1)) * 0.25
    x2, y2, z2 = gx * gx, gy * gy, gz * gz
    num = (
        gxx * (y2 + z2)
        + gyy * (x2 + z2)
        + gzz * (x2 + y2)
        - 2.0 * (gx * gy * gxy + gx * gz * gxz + gy * gz * gyz)
    )
    s = x2 + y2 + z2 + ETA
    return np.clip(num / (s * np.sqrt(s)), -1.0, 1.0)


def curvature_field(phi):
    """Mean curvature ``div(grad phi / |grad phi|)``, clamped to [-1, 1]."""
    p = _phi(phi)
    q = np.pad(p, 1, mode="edge")
    return _curvature(q, 0, p.shape[2])


def _slabs(nz, threads):
    threads = max(1, min(int(threads), nz))
    edges = np.linspace(0, nz, threads + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _update(q, u0, c1, c2, params, z0, z1):
    p = _view(q, 0, 0, 0, z0, z1)
    u = u0[:, :, z0:z1]
    force = params.lambda2 * (u - c2) ** 2 - params.lambda1 * (u - c1) ** 2 + params.nu
    if params.mu != 0.0:
        force = force + params.mu * _curvature(q, z0, z1)
    return p + params.dt * dirac(p, params.epsilon) * force


def cv_step(vol, state, params, threads=1):
    """One explicit Euler step; returns a new state with refreshed means.

    With ``threads > 1`` the voxel update is split into z-slabs run on a
    thread pool.  Every voxel goes through the same elementwise arithmetic, and
    the mean reductions stay serial, so the result is bitwise identical to the
    single-threaded step.
    """
    u0 = _u0(vol)
    phi = state.phi
    try:
        c1, c2 = region_means(u0, phi)
    except PhaseCollapse:
        raise PhaseCollapse(state.iter) from None
    q = np.pad(phi, 1, mode="edge")
    slabs = _slabs(phi.shape[2], threads)
    if len(slabs) == 1:
        new = _update(q, u0, c1, c2, params, 0, phi.shape[2])
    else:
        with ThreadPoolExecutor(max_workers=len(slabs)) as pool:
            parts = list(pool.map(lambda s: _update(q, u0, c1, c2, params, *s), slabs))
        new = np.concatenate(parts, axis=2)
    flips = int(np.count_nonzero((new < 0) != (phi < 0)))
    it = state.iter + 1
    try:
        n1, n2 = region_means(u0, new)
    except PhaseCollapse:
        raise PhaseCollapse(it) from None
    return CvState(new, n1, n2, it, flips / phi.size)


def cv_energy(vol, phi, params):
    """Discrete Chan-Vese energy of ``phi`` (length, area and fit terms)."""
    u0, p = _u0(vol), _phi(phi)
    inside = p < 0
    q = np.pad(p, 1, mode="edge")
    gx, gy, gz = _gradient(q, 0, p.shape[2])
    energy = params.mu * float(np.sum(dirac(p, params.epsilon) * np.sqrt(gx * gx + gy * gy + gz * gz)))
    energy += params.nu * int(np.count_nonzero(inside))
    for weight, region in ((params.lambda1, ~inside), (params.lambda2, inside)):
        vals = u0[region]
        if vals.size:
            energy += weight * float(np.sum((vals - vals.mean()) ** 2))
    return energy


def init_state(vol, mask):
    phi = mask_to_sdf(mask).phi.copy()
    c1, c2 = region_means(vol, phi)
    return CvState(phi, c1, c2, 0, 0.0)


def cv_run(vol, initial, params=ChanVeseParams(), threads=1, record_energy=True):
    """Evolve from the signed distance of ``initial`` until the contour settles.

    Every ``redistance_every`` steps phi is rebuilt as the chamfer signed
    distance of its own ``{phi < 0}`` set.  Stops once the fraction of voxels
    that changed sign in a step drops below ``stop_tol`` or after
    ``max_iters`` steps.  Returns ``(mask, trace)``.
    """
    trace = CvTrace()
    if params.max_iters == 0:
        return initial, trace
    u0 = _u0(vol)
    try:
        state = init_state(u0, initial)
    except ValueError as exc:
        raise PhaseCollapse(0, str(exc)) from None
    energy = (lambda p: cv_energy(u0, p, params)) if record_energy else (lambda p: math.nan)
    trace.append(0, state.c1, state.c2, 0.0, energy(state.phi))
    while state.iter < params.max_iters:
        state = cv_step(u0, state, params, threads=threads)
        if state.iter % params.redistance_every == 0:
            phi = mask_to_sdf(state.phi < 0).phi.copy()
            trace.redistanced_at.append((state.iter, bool(np.array_equal(phi < 0, state.phi < 0))))
            state = CvState(phi, state.c1, state.c2, state.iter, state.last_change)
        trace.append(state.iter, state.c1, state.c2, state.last_change, energy(state.phi))
        if state.last_change < params.stop_tol:
            break
    return BinaryMask(state.phi < 0, getattr(initial, "spacing", (1.0, 1.0, 1.0))), trace
