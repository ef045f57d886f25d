"""Lung CT analysis pipeline: segmentation, ROI features, classical classifiers."""

try:
    from ._lungpipe import *  # noqa: F401,F403 (wheel layout: extension inside the package)
    from ._lungpipe import MODEL_KINDS, ALL_PREDICTORS, THREE_PREDICTORS, Model
except ImportError:
    from _lungpipe import *  # noqa: F401,F403 (build-tree layout: extension on sys.path)
    from _lungpipe import MODEL_KINDS, ALL_PREDICTORS, THREE_PREDICTORS, Model

__all__ = [
    "median_filter",
    "equalize_histogram",
    "otsu_threshold",
    "sobel_gradient",
    "segment_lungs",
    "dice",
    "extract_features",
    "phantom_suite",
    "train",
    "evaluate",
    "Model",
    "MODEL_KINDS",
    "ALL_PREDICTORS",
    "THREE_PREDICTORS",
]
