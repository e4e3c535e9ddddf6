"""Sub-region and feature-selected MAP fingerprint positioning."""

from ._core import (
    Error,
    EvalReport,
    Fingerprint,
    GriddedRFM,
    GridSpec,
    LassoConfig,
    ParseError,
    PositionEstimate,
    PrecomputeConfig,
    PrecomputedCache,
    RawRFM,
    Scene,
    SceneConfig,
    TestPoint,
    evaluate,
    generate_survey,
    generate_testset,
    grid_interpolate,
    hash_identifier,
    load_survey,
    locate,
    locate_full,
    make_scene,
    precompute,
    predicted_ratio,
    spearman,
)

__all__ = [name for name in dir() if not name.startswith("_")]
