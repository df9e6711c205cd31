"""Score-based transport modeling samplers (C++ core)."""
import os
from pathlib import Path

# wheels ship the presets next to the module
_bundled = Path(__file__).with_name("presets")
if "SBTM_PRESET_DIR" not in os.environ and _bundled.is_dir():
    os.environ["SBTM_PRESET_DIR"] = str(_bundled)

from ._core import (  # noqa: E402
    AnalyticSolution,
    Architecture,
    ConfigError,
    ScoreModel,
    TargetDensity,
    compare_runs,
    dissipation_rate,
    estimate_kl,
    fisher_estimate,
    fp_kl_trajectory,
    gaussian_mixture,
    git_revision,
    grid_mixture,
    implicit_loss,
    kde,
    load_preset,
    noisy_circle,
    normalize_config,
    ntk_matrix,
    ntk_min_eigenvalue,
    run,
    run_to_directory,
    standard_gaussian,
)

__all__ = [
    "AnalyticSolution",
    "Architecture",
    "ConfigError",
    "ScoreModel",
    "TargetDensity",
    "compare_runs",
    "dissipation_rate",
    "estimate_kl",
    "fisher_estimate",
    "fp_kl_trajectory",
    "gaussian_mixture",
    "git_revision",
    "grid_mixture",
    "implicit_loss",
    "kde",
    "load_preset",
    "noisy_circle",
    "normalize_config",
    "ntk_matrix",
    "ntk_min_eigenvalue",
    "run",
    "run_to_directory",
    "standard_gaussian",
]
