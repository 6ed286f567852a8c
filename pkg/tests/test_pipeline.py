import numpy as np
import pytest

from sonoseg.filters import StructuringElement, close_mask, gaussian_blur3d
from sonoseg.growing import GrowParams, region_grow
from sonoseg.levelset import ChanVeseParams, PhaseCollapse
from sonoseg.metrics import similarity
from sonoseg.phantom import PhantomSpec, generate_phantom
from sonoseg.pipeline import EmptyRegion, PipelineConfig, segment_pipeline
from sonoseg.volume import VoxelVolume, load_mask


@pytest.fixture(scope="module")
def clean_phantom():
    return generate_phantom((64, 64, 64), PhantomSpec())


def test_noiseless_ellipsoid(clean_phantom):
    vol, gt = clean_phantom
    mask, trace = segment_pipeline(vol, PipelineConfig(seed=(32, 32, 32)))
    assert similarity(gt, mask).si >= 0.98
    assert trace.rows


def test_disabled_level_set_returns_closed_region(clean_phantom):
    vol, _ = clean_phantom
    cfg = PipelineConfig(seed=(32, 32, 32), cv=ChanVeseParams(max_iters=0))
    stages = {}
    mask, trace = segment_pipeline(vol, cfg, stages=stages)
    closed = close_mask(region_grow(vol, (32, 32, 32), GrowParams()), StructuringElement(21))
    assert mask == closed == stages["closed"]
    assert trace.rows == []
    assert {"blur", "grow", "close"} <= set(stages["timings"])


def test_background_seed_floods_background(clean_phantom):
    vol, gt = clean_phantom
    stages = {}
    mask, _ = segment_pipeline(vol, PipelineConfig(seed=(2, 2, 2)), stages=stages)
    assert np.array_equal(stages["grown"].bits, ~gt.bits)
    # the flood is returned as the segmentation, swallowing the tumour
    report = similarity(gt, mask)
    assert report.si < 0.2 and report.ef > 10


def test_constant_volume_collapses():
    vol = VoxelVolume(np.full((20, 20, 20), 80.0))
    with pytest.raises(PhaseCollapse) as info:
        segment_pipeline(vol, PipelineConfig(seed=(10, 10, 10)))
    assert info.value.iteration == 0


def test_border_seed_eroded_away():
    v = np.zeros((24, 24, 24))
    v[0, 0, :] = 100.0
    with pytest.raises(EmptyRegion):
        segment_pipeline(VoxelVolume(v), PipelineConfig(seed=(0, 0, 5), grow=GrowParams(1.0)))


def test_debug_dir(tmp_path, clean_phantom):
    vol, _ = clean_phantom
    cfg = PipelineConfig(seed=(32, 32, 32), cv=ChanVeseParams(max_iters=2))
    stages = {}
    segment_pipeline(vol, cfg, debug_dir=tmp_path / "dbg", stages=stages)
    assert load_mask(tmp_path / "dbg" / "initial") == stages["grown"]
    assert load_mask(tmp_path / "dbg" / "closed") == stages["closed"]


def test_blur_before_grow_grows_on_blurred_volume():
    vol, _ = generate_phantom((32, 32, 32), PhantomSpec(center=(16, 16, 16), radii=(6, 6, 6), additive_sigma=4.0, rng_seed=2))
    cfg = PipelineConfig(seed=(16, 16, 16), cv=ChanVeseParams(max_iters=0), blur_before_grow=True)
    raw, blurred = {}, {}
    segment_pipeline(vol, PipelineConfig(seed=(16, 16, 16), cv=ChanVeseParams(max_iters=0)), stages=raw)
    segment_pipeline(vol, cfg, stages=blurred)
    assert blurred["grown"] == region_grow(gaussian_blur3d(vol, 1.5), (16, 16, 16), GrowParams())
    assert raw["grown"] == region_grow(vol, (16, 16, 16), GrowParams())
    assert blurred["grown"] != raw["grown"]


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(seed=(1, 2))
    with pytest.raises(ValueError):
        PipelineConfig(seed=(1, 2, 3), se_width=20)
    with pytest.raises(ValueError):
        PipelineConfig(seed=(1, 2, 3), sigma=0)
