"""Procedural generator for synthetic soccer-field detection datasets."""

__version__ = "0.1.0"

from .geometry import (  # noqa: F401
    CLASS_TO_ID,
    FAKE_LINE_ID,
    LINE_CLASSES,
    FieldDimensions,
    FieldModel,
    build_field_model,
    perimeter_point,
    sample_primitive_points,
)
from .camera import (  # noqa: F401
    CameraParams,
    clip_segment,
    ground_homography,
    project_point,
    sample_camera,
)
from .randomization import (  # noqa: F401
    DatasetVariant,
    RandomizationConfig,
    SceneSpec,
    sample_scene,
    variant_config,
)
from .annotation import emit_annotation, generate_keypoints, parse_annotation  # noqa: F401
from .renderer import render_image, render_mask  # noqa: F401
from .metrics import ConfusionTally, accumulate, mean_iou, pixel_accuracy  # noqa: F401
from .builder import (  # noqa: F401
    DatasetConfig,
    dataset_stats,
    generate_dataset,
    validate_dataset,
)
