"""Volumetric overlap measures between a reference and a segmentation."""

import json
from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class SimilarityReport:
    si: float
    of: float
    ov: float
    ef: float
    n_ref: int
    n_seg: int
    n_overlap: int

    def to_json(self, path=None):
        text = json.dumps(asdict(self), indent=2)
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        return text


def similarity(ref, seg):
    """SI (Dice), OF (overlap / ref), OV (Jaccard) and EF (false positives / ref)."""
    if ref.dims != seg.dims:
        raise ValueError(f"dims mismatch: ref {ref.dims} vs seg {seg.dims}")
    n_ref = int(np.count_nonzero(ref.bits))
    n_seg = int(np.count_nonzero(seg.bits))
    n_ov = int(np.count_nonzero(ref.bits & seg.bits))
    if n_ref == 0:
        raise ValueError("reference mask is empty; OF and EF are undefined")
    return SimilarityReport(
        si=2 * n_ov / (n_ref + n_seg),
        of=n_ov / n_ref,
        ov=n_ov / (n_ref + n_seg - n_ov),
        ef=(n_seg - n_ov) / n_ref,
        n_ref=n_ref,
        n_seg=n_seg,
        n_overlap=n_ov,
    )
