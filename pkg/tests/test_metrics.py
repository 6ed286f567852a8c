import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.extra.numpy import arrays

from oracles import voxel_set
from sonoseg.metrics import similarity
from sonoseg.volume import BinaryMask


def test_identical_masks(rng):
    m = BinaryMask(rng.random((6, 6, 6)) < 0.3)
    r = similarity(m, m)
    assert (r.si, r.ov, r.of, r.ef) == (1.0, 1.0, 1.0, 0.0)


def test_shifted_block():
    a = np.zeros((6, 6, 6), bool)
    b = np.zeros((6, 6, 6), bool)
    a[1:3, 1:3, 1:3] = True
    b[2:4, 1:3, 1:3] = True
    sa, sb = voxel_set(a), voxel_set(b)
    n_ov = len(sa & sb)
    assert (len(sa), len(sb), n_ov) == (8, 8, 4)
    r = similarity(BinaryMask(a), BinaryMask(b))
    assert r.si == 0.5 and r.of == 0.5 and r.ef == 0.5
    assert r.ov == pytest.approx(4 / 12)
    assert (r.n_ref, r.n_seg, r.n_overlap) == (8, 8, 4)


def test_disjoint():
    a = np.zeros((4, 4, 4), bool)
    b = np.zeros((4, 4, 4), bool)
    a[0, 0, :2] = True
    b[3, 3, :] = True
    r = similarity(BinaryMask(a), BinaryMask(b))
    assert (r.si, r.ov, r.of) == (0.0, 0.0, 0.0) and r.ef == 2.0


def test_errors():
    with pytest.raises(ValueError, match="dims"):
        similarity(BinaryMask(np.ones((2, 2, 2))), BinaryMask(np.ones((2, 2, 3))))
    with pytest.raises(ValueError, match="empty"):
        similarity(BinaryMask(np.zeros((2, 2, 2))), BinaryMask(np.ones((2, 2, 2))))


@settings(max_examples=100, deadline=None)
@given(arrays(bool, (5, 5, 5)), arrays(bool, (5, 5, 5)))
def test_identities_and_symmetry(a, b):
    if not a.any() or not b.any():
        return
    r = similarity(BinaryMask(a), BinaryMask(b))
    s = similarity(BinaryMask(b), BinaryMask(a))
    assert r.si == pytest.approx(2 * r.ov / (1 + r.ov), abs=1e-12)
    assert Fraction(r.n_overlap, r.n_ref) + Fraction(r.n_seg - r.n_overlap, r.n_ref) == Fraction(r.n_seg, r.n_ref)
    assert r.si == s.si and r.ov == s.ov
    assert r.of == pytest.approx(s.of * s.n_ref / r.n_ref)
    assert 0 <= r.si <= 1 and 0 <= r.ov <= 1 and 0 <= r.of <= 1 and r.ef >= 0


def test_of_ef_not_symmetric():
    a = np.zeros((4, 4, 4), bool)
    b = np.zeros((4, 4, 4), bool)
    a[:2] = True
    b[:1] = True
    r, s = similarity(BinaryMask(a), BinaryMask(b)), similarity(BinaryMask(b), BinaryMask(a))
    assert (r.of, r.ef) == (0.5, 0.0) and (s.of, s.ef) == (1.0, 1.0)


def test_json_fields(tmp_path):
    a = np.ones((2, 2, 2), bool)
    r = similarity(BinaryMask(a), BinaryMask(a))
    r.to_json(tmp_path / "r.json")
    d = json.loads((tmp_path / "r.json").read_text())
    assert set(d) == {"si", "of", "ov", "ef", "n_ref", "n_seg", "n_overlap"}
