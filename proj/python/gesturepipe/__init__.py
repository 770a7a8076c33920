"""Gesture recognition and command dispatch pipeline.

Thin python layer over the C++ core: image preprocessing, hand geometry,
the CNN gesture classifier, Kalman cursor smoothing and the command
responder, plus the synthetic dataset generator and the frame-loop runner.
"""

from ._core import (
    CnnModel,
    HandObservation,
    PointTracker,
    Responder,
    analyze_hand,
    calibrate,
    class_names,
    color_filter,
    distance_transform,
    evaluate_model,
    gaussian_blur,
    load_netpbm,
    map_to_screen,
    morphology,
    normalize_canvas,
    otsu_threshold,
    render_silhouette,
    run_pipeline,
    save_netpbm,
    subtract_background,
    threshold_fixed,
    threshold_otsu,
    to_gray,
    train_model,
    write_dataset,
)

__all__ = [
    "CnnModel",
    "HandObservation",
    "PointTracker",
    "Responder",
    "analyze_hand",
    "calibrate",
    "class_names",
    "color_filter",
    "distance_transform",
    "evaluate_model",
    "gaussian_blur",
    "load_netpbm",
    "map_to_screen",
    "morphology",
    "normalize_canvas",
    "otsu_threshold",
    "render_silhouette",
    "run_pipeline",
    "save_netpbm",
    "subtract_background",
    "threshold_fixed",
    "threshold_otsu",
    "to_gray",
    "train_model",
    "write_dataset",
]
