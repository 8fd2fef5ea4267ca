__version__ = "0.1.0"

from .config import ConfigError, ExperimentConfig, RunRecord, load_config_file
from .data import (
    CLASS_TO_ID,
    LINE_CLASSES,
    NUM_CLASSES,
    DatasetFormatError,
    SegmentationDataset,
    annotation_to_mask,
    load_real_annotations,
    parse_annotation_file,
)
from .metrics import confusion, mean_iou, pixel_accuracy
from .model import ToySegNet, build_model
from .runner import CheckpointMissingError, PROTOCOLS, evaluate, run_protocol
