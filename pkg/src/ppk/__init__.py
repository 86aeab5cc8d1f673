"""Toolkit for part-level action parsing pipelines: annotations, box
geometry, keypoint-dot augmentation, label transformation, late fusion and
the IoU-thresholded challenge scorer."""
__version__ = "0.1.0"
