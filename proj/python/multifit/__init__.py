"""Two-view multi-structure geometric model fitting.

Superpixel-guided deterministic fitting (SDF) for homographies and
fundamental matrices, with seeded RANSAC/PROSAC baselines, a synthetic
scene generator, and the MULTIFIT-MATCHES file format.
"""

from ._multifit import (  # noqa: F401
    Correspondence,
    DegeneracyError,
    FitConfig,
    FitResult,
    Hypothesis,
    InvalidConfigError,
    LabelMap,
    ModelKind,
    NoHypothesesError,
    ParseFileError,
    BaselineConfig,
    SceneSpec,
    StructureSpec,
    LabeledScene,
    SlicConfig,
    __version__,
    fit_fundamental,
    fit_homography,
    fundamental_from_cameras,
    generate_scene,
    grid_interval,
    load_matches,
    oracle_inlier_count,
    prosac_fit,
    ransac_fit,
    sampson_residual,
    save_matches,
    sdf_fit,
    slic_segment,
)

__all__ = [
    "Correspondence",
    "DegeneracyError",
    "FitConfig",
    "FitResult",
    "Hypothesis",
    "InvalidConfigError",
    "LabelMap",
    "ModelKind",
    "NoHypothesesError",
    "ParseFileError",
    "BaselineConfig",
    "SceneSpec",
    "StructureSpec",
    "LabeledScene",
    "SlicConfig",
    "fit_fundamental",
    "fit_homography",
    "fundamental_from_cameras",
    "generate_scene",
    "grid_interval",
    "load_matches",
    "oracle_inlier_count",
    "prosac_fit",
    "ransac_fit",
    "sampson_residual",
    "save_matches",
    "sdf_fit",
    "slic_segment",
]
