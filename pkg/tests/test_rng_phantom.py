import itertools
import json
import math

import numpy as np
import pytest

from oracles import splitmix64_sequential
from sonoseg import rng
from sonoseg.phantom import PhantomSpec, generate_phantom


def test_splitmix_matches_reference_vector():
    assert rng.splitmix64(1234567, 0, 5).tolist() == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ]


@pytest.mark.parametrize("seed", [0, 1, 2**63 + 5, -1])
def test_splitmix_block_equals_sequential(seed):
    seq = splitmix64_sequential(seed, 300)
    assert rng.splitmix64(seed, 0, 300).tolist() == seq
    assert rng.splitmix64(seed, 137, 50).tolist() == seq[137:187]


def test_normals_look_standard():
    z = rng.normal(7, 0, 200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01
    u = rng.uniform(7, 0, 1000)
    assert np.all((u > 0) & (u <= 1))


def test_noiseless_ellipsoid_two_levels_and_analytic_mask():
    spec = PhantomSpec(center=(20.0, 18.5, 17.0), radii=(9.0, 6.5, 5.0))
    vol, gt = generate_phantom((40, 36, 34), spec)
    assert set(np.unique(vol.voxels)) == {50.0, 200.0}
    assert np.array_equal(vol.voxels == 200.0, gt.bits)
    for x, y, z in itertools.product(range(0, 40, 3), range(0, 36, 2), range(34)):
        q = ((x - 20) / 9.0) ** 2 + ((y - 18.5) / 6.5) ** 2 + ((z - 17) / 5.0) ** 2
        assert gt.bits[x, y, z] == (q <= 1.0)


def test_ellipsoid_voxel_count_near_volume():
    _, gt = generate_phantom((64, 64, 64), PhantomSpec(center=(32, 32, 32), radii=(10, 12, 8)))
    brute = sum(
        1
        for x, y, z in itertools.product(range(22, 43), range(20, 45), range(24, 41))
        if ((x - 32) / 10) ** 2 + ((y - 32) / 12) ** 2 + ((z - 32) / 8) ** 2 <= 1
    )
    assert gt.count() == brute
    expected = 4.0 / 3.0 * math.pi * 10 * 12 * 8
    assert abs(brute - expected) / expected < 0.02


def test_determinism_and_seed_dependence():
    kw = dict(center=(12, 12, 12), radii=(5, 6, 4), speckle_sigma=0.2, additive_sigma=5.0)
    a, ga = generate_phantom((24, 24, 24), PhantomSpec(**kw, rng_seed=99))
    b, gb = generate_phantom((24, 24, 24), PhantomSpec(**kw, rng_seed=99))
    assert a.voxels.tobytes() == b.voxels.tobytes() and ga == gb
    c, _ = generate_phantom((24, 24, 24), PhantomSpec(**kw, rng_seed=100))
    assert a.voxels.tobytes() != c.voxels.tobytes()


def test_noise_is_clamped_and_leaves_truth_alone():
    base = dict(center=(16, 16, 16), radii=(6, 6, 6), fg_intensity=250.0, bg_intensity=5.0)
    clean_vol, clean = generate_phantom((32, 32, 32), PhantomSpec(**base))
    noisy_vol, noisy = generate_phantom((32, 32, 32), PhantomSpec(**base, speckle_sigma=0.5, additive_sigma=30, rng_seed=3))
    assert noisy == clean
    assert noisy_vol.voxels.min() >= 0 and noisy_vol.voxels.max() <= 255
    assert noisy_vol.voxels.max() == 255 and noisy_vol.voxels.min() == 0


def test_zero_amplitude_lobulated_equals_ellipsoid():
    kw = dict(center=(20, 20, 20), radii=(8, 7, 6))
    _, e = generate_phantom((40, 40, 40), PhantomSpec(**kw))
    _, l = generate_phantom((40, 40, 40), PhantomSpec(shape="lobulated", lobe_count=8, lobe_amplitude=0.0, **kw))
    assert e == l


def test_lobes_change_shape():
    kw = dict(center=(32, 32, 32), radii=(12, 14, 10))
    _, e = generate_phantom((64, 64, 64), PhantomSpec(**kw))
    _, l = generate_phantom((64, 64, 64), PhantomSpec(shape="lobulated", lobe_count=8, lobe_amplitude=0.3, **kw))
    assert np.count_nonzero(e.bits & ~l.bits) > 300
    assert np.count_nonzero(l.bits & ~e.bits) > 300


@pytest.mark.parametrize(
    "kw",
    [
        dict(radii=(0, 1, 1)),
        dict(fg_intensity=50.0, bg_intensity=50.0),
        dict(shape="cube"),
        dict(lobe_amplitude=0.7),
        dict(speckle_sigma=-1),
        dict(fg_intensity=300.0),
    ],
)
def test_invalid_spec(kw):
    with pytest.raises(ValueError):
        PhantomSpec(**kw)


def test_bounds_and_dims_checked():
    with pytest.raises(ValueError, match="bounds"):
        generate_phantom((32, 32, 32), PhantomSpec(center=(5, 16, 16), radii=(8, 4, 4)))
    with pytest.raises(ValueError, match=">= 16"):
        generate_phantom((15, 32, 32), PhantomSpec(center=(7, 16, 16), radii=(3, 3, 3)))


def test_spec_json_round_trip(tmp_path):
    spec = PhantomSpec(shape="lobulated", lobe_count=6, lobe_amplitude=0.2, rng_seed=11)
    (tmp_path / "s.json").write_text(json.dumps(spec.to_dict()))
    assert PhantomSpec.from_json(tmp_path / "s.json") == spec
    with pytest.raises(ValueError, match="unknown"):
        PhantomSpec.from_dict({"colour": "red"})
