"""Automatic 3D tumour contouring for volumetric sonography.

Seeded region growing gives an initial mask, slice-wise closing tidies it,
and a 3D Chan-Vese level set run on the Gaussian-blurred volume refines it.
Overlap metrics and a rotational-contour comparator are included for
evaluation against ground truth.
"""

from .filters import StructuringElement, close_mask, dilate2d, erode2d, gaussian_blur3d
from .growing import GrowParams, region_grow
from .levelset import (
    ChanVeseParams,
    CvState,
    CvTrace,
    PhaseCollapse,
    curvature_field,
    cv_energy,
    cv_run,
    cv_step,
    region_means,
)
from .metrics import SimilarityReport, similarity
from .phantom import PhantomSpec, generate_phantom
from .pipeline import EmptyRegion, PipelineConfig, segment_pipeline
from .vocal import NotStarShaped, PlanarContour, slice_at_angle, vocal_reconstruct
from .volume import (
    BinaryMask,
    LevelSetField,
    VolumeFormatError,
    VoxelVolume,
    export_overlay,
    load_mask,
    load_volume,
    mask_to_sdf,
    save_mask,
    save_volume,
)

__version__ = "0.1.0"
