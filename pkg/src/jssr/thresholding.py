"""Turning soft activity scores into hard decisions.

Every detector in this package ends with the same rule: a device is
declared active when its score meets a common threshold r, and r is
picked on a validation set by scanning a fixed grid and keeping the
value with the lowest per-device error (ties -> smallest r, so the
choice is deterministic).  Raw power-type outputs of the classical
detectors are squashed through x / (1 + x) first so one grid serves
all score families.
"""

from __future__ import annotations

import numpy as np

GRID_STEP = 0.01


def default_grid() -> np.ndarray:
    """Thresholds 0.01, 0.02, ..., 0.99."""
    return np.arange(1, 100) * GRID_STEP


def apply_threshold(scores: np.ndarray, r: float) -> np.ndarray:
    """Hard decisions; a score exactly at the threshold counts as active."""
    return (scores >= r).astype(np.float64)


def error_rate(alpha_hat: np.ndarray, alpha: np.ndarray) -> float:
    """Fraction of wrong per-device decisions, averaged over everything."""
    if alpha_hat.shape != alpha.shape:
        raise ValueError(f"shape mismatch {alpha_hat.shape} vs {alpha.shape}")
    return float(np.mean(alpha_hat != alpha))


def error_at(scores: np.ndarray, alpha: np.ndarray, r: float) -> float:
    return error_rate(apply_threshold(scores, r), alpha)


def calibrate_threshold(scores: np.ndarray, alpha: np.ndarray,
                        grid: np.ndarray | None = None
                        ) -> tuple[float, np.ndarray]:
    """Scan the grid; return (best threshold, error at every grid point).

    The first minimizer wins, i.e. the smallest threshold on ties.
    """
    if grid is None:
        grid = default_grid()
    errs = np.array([error_at(scores, alpha, r) for r in grid])
    return float(grid[int(np.argmin(errs))]), errs


def squash_scores(x: np.ndarray) -> np.ndarray:
    """Map nonnegative power-type scores into [0, 1) monotonically.

    Keeps per-device comparability across samples, unlike per-sample
    max-normalization, which would force false positives on all-inactive
    samples.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("power scores must be nonnegative")
    return x / (1.0 + x)
