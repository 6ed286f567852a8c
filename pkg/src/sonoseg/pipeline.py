"""Region growing -> closing -> blur -> Chan-Vese, wired together."""

import os
import time
from dataclasses import dataclass, field

from .filters import StructuringElement, close_mask, gaussian_blur3d
from .growing import GrowParams, check_seed, region_grow
from .levelset import ChanVeseParams, PhaseCollapse, cv_run
from .volume import save_mask


class EmptyRegion(RuntimeError):
    """The initial mask vanished before the level-set stage."""


@dataclass(frozen=True)
class PipelineConfig:
    seed: tuple
    grow: GrowParams = field(default_factory=GrowParams)
    se_width: int = 21
    sigma: float = 1.5
    cv: ChanVeseParams = field(default_factory=ChanVeseParams)
    blur_before_grow: bool = False

    def __post_init__(self):
        object.__setattr__(self, "seed", tuple(int(s) for s in self.seed))
        if len(self.seed) != 3:
            raise ValueError("seed needs three coordinates")
        StructuringElement(self.se_width)
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


def segment_pipeline(vol, config, threads=1, debug_dir=None, stages=None):
    """Run the full chain and return ``(final_mask, trace)``.

    Region growing sees the raw volume unless ``config.blur_before_grow``; the
    level set always runs on the blurred one.  Pass a dict as ``stages`` to
    collect the intermediate masks and per-stage wall times; ``debug_dir``
    additionally writes the intermediate masks as VOL1 files.
    """
    stages = {} if stages is None else stages
    timings = stages.setdefault("timings", {})
    check_seed(config.seed, vol.dims)

    t = time.perf_counter()
    blurred = gaussian_blur3d(vol, config.sigma)
    timings["blur"] = time.perf_counter() - t

    t = time.perf_counter()
    grown = region_grow(blurred if config.blur_before_grow else vol, config.seed, config.grow)
    timings["grow"] = time.perf_counter() - t

    t = time.perf_counter()
    closed = close_mask(grown, StructuringElement(config.se_width))
    timings["close"] = time.perf_counter() - t
    stages.update(grown=grown, closed=closed)

    if debug_dir is not None:
        os.makedirs(debug_dir, exist_ok=True)
        save_mask(grown, os.path.join(debug_dir, "initial"))
        save_mask(closed, os.path.join(debug_dir, "closed"))

    if grown.count() == grown.bits.size:
        raise PhaseCollapse(0, "region growing flooded the whole volume, nothing is left outside")
    if closed.count() == 0:
        raise EmptyRegion("closing removed the whole grown region; move the seed away from the border")

    t = time.perf_counter()
    final, trace = cv_run(blurred, closed, config.cv, threads=threads)
    timings["levelset"] = time.perf_counter() - t
    return final, trace
