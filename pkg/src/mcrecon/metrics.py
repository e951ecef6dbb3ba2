"""Image-quality metrics and the combined dual-domain loss.

SSIM uses dense (stride-1) uniform 7x7 windows (7x7x7 for volumes) with
population statistics and stabilizers C1 = (0.01 * data_range)^2,
C2 = (0.03 * data_range)^2; with inputs normalized to [0, 1] and
data_range = 1 this reduces to raw constants 0.01 and 0.03. HFEN uses a
15x15 Laplacian-of-Gaussian filter (sigma 2.5, zero-sum) with symmetric
boundary padding.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

SSIM_WINDOW = 7
LOG_SIZE = 15
LOG_SIGMA = 2.5


class UndefinedMetricError(ValueError):
    """Raised when a metric's normalizer vanishes (e.g. a zero reference)."""


@dataclass(frozen=True)
class LossWeights:
    """Weights of the dual-domain loss components; defaults (1, 1, 1, 1, 3)."""

    w_ssim: float = 1.0
    w_ssim3d: float = 1.0
    w_l1: float = 1.0
    w_hfen1: float = 1.0
    w_nmae: float = 3.0

    def __post_init__(self):
        for name in ("w_ssim", "w_ssim3d", "w_l1", "w_hfen1", "w_nmae"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative")


def _ssim_windows(u: np.ndarray, v: np.ndarray, window_shape, data_range: float) -> float:
    wu = sliding_window_view(u, window_shape)
    wv = sliding_window_view(v, window_shape)
    axes = tuple(range(-len(window_shape), 0))
    mu_u = wu.mean(axis=axes)
    mu_v = wv.mean(axis=axes)
    var_u = (wu**2).mean(axis=axes) - mu_u**2
    var_v = (wv**2).mean(axis=axes) - mu_v**2
    cov = (wu * wv).mean(axis=axes) - mu_u * mu_v
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2
    num = (2 * mu_u * mu_v + c1) * (2 * cov + c2)
    den = (mu_u**2 + mu_v**2 + c1) * (var_u + var_v + c2)
    return float(np.mean(num / den))


def ssim(u: np.ndarray, v: np.ndarray, data_range: float = 1.0) -> float:
    """Mean SSIM over dense 7x7 windows of two real 2D images."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    if u.ndim != 2 or min(u.shape) < SSIM_WINDOW:
        raise ValueError(f"ssim needs 2D inputs of at least {SSIM_WINDOW}x{SSIM_WINDOW}")
    if data_range <= 0:
        raise ValueError("data_range must be positive")
    return _ssim_windows(u, v, (SSIM_WINDOW, SSIM_WINDOW), data_range)


def ssim3d(u: np.ndarray, v: np.ndarray, data_range: float = 1.0) -> float:
    """Mean SSIM over dense 7x7x7 windows of two real volumes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    if u.ndim != 3 or min(u.shape) < SSIM_WINDOW:
        raise ValueError(f"ssim3d needs 3D inputs of at least {SSIM_WINDOW} per axis")
    if data_range <= 0:
        raise ValueError("data_range must be positive")
    return _ssim_windows(u, v, (SSIM_WINDOW,) * 3, data_range)


def log_kernel(size: int = LOG_SIZE, sigma: float = LOG_SIGMA) -> np.ndarray:
    """Laplacian-of-Gaussian kernel, mean-subtracted so it sums to zero."""
    half = (size - 1) / 2
    yy, xx = np.mgrid[0:size, 0:size] - half
    r2 = yy**2 + xx**2
    k = -(1.0 / (np.pi * sigma**4)) * (1.0 - r2 / (2 * sigma**2)) * np.exp(-r2 / (2 * sigma**2))
    return k - k.mean()


def hfen1(u: np.ndarray, v: np.ndarray) -> float:
    """High-frequency error norm: L1 ratio of LoG-filtered difference to
    LoG-filtered reference."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    k = log_kernel()
    gu = ndimage.convolve(u, k, mode="reflect")
    gv = ndimage.convolve(v, k, mode="reflect")
    denom = np.abs(gu).sum()
    # constants leave only rounding residue after the zero-sum kernel
    if denom <= 1e-12 * max(1.0, float(np.abs(u).sum())):
        raise UndefinedMetricError("hfen1 undefined: LoG of the reference is zero")
    return float(np.abs(gu - gv).sum() / denom)


def nmae(u: np.ndarray, v: np.ndarray) -> float:
    """Normalized mean absolute error, ||u - v||_1 / ||u||_1 (complex-aware)."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    denom = np.abs(u).sum()
    if denom == 0:
        raise UndefinedMetricError("nmae undefined: reference has zero L1 norm")
    return float(np.abs(u - v).sum() / denom)


def nmse(u: np.ndarray, v: np.ndarray) -> float:
    """Normalized mean squared error, ||u - v||_2^2 / ||u||_2^2."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    denom = float(np.sum(np.abs(u) ** 2))
    if denom == 0:
        raise UndefinedMetricError("nmse undefined: reference has zero energy")
    return float(np.sum(np.abs(u - v) ** 2) / denom)


def psnr(u: np.ndarray, v: np.ndarray, data_range: float) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical inputs."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    if data_range <= 0:
        raise ValueError("data_range must be positive")
    mse = float(np.mean((u - v) ** 2))
    if mse == 0:
        return float("inf")
    return 10.0 * np.log10(data_range**2 / mse)


def dual_domain_loss(
    x_true: np.ndarray,
    x_pred: np.ndarray,
    y_true: np.ndarray,
    y_pred: np.ndarray,
    weights: LossWeights = LossWeights(),
    data_range: float | None = None,
) -> float:
    """Weighted image-domain (SSIM, L1, HFEN1, optionally SSIM3D for
    multi-frame stacks) plus frequency-domain (NMAE on k-space) loss.

    Image inputs are real magnitudes, 2D or (frame, row, col) stacks;
    SSIM and HFEN are computed per frame and averaged.
    """
    x_true = np.asarray(x_true, dtype=float)
    x_pred = np.asarray(x_pred, dtype=float)
    if x_true.shape != x_pred.shape:
        raise ValueError(f"shape mismatch: {x_true.shape} vs {x_pred.shape}")
    if data_range is None:
        data_range = float(x_true.max())
        if data_range <= 0:
            data_range = 1.0
    frames_t = x_true[np.newaxis] if x_true.ndim == 2 else x_true
    frames_p = x_pred[np.newaxis] if x_pred.ndim == 2 else x_pred

    ssim_loss = np.mean(
        [1.0 - ssim(ft, fp, data_range) for ft, fp in zip(frames_t, frames_p)]
    )
    hfen_loss = np.mean([hfen1(ft, fp) for ft, fp in zip(frames_t, frames_p)])
    l1_loss = float(np.abs(x_true - x_pred).sum())

    total = (
        weights.w_ssim * ssim_loss
        + weights.w_l1 * l1_loss
        + weights.w_hfen1 * hfen_loss
    )
    if frames_t.shape[0] > 1:
        total += weights.w_ssim3d * (1.0 - ssim3d(frames_t, frames_p, data_range))
    total += weights.w_nmae * nmae(y_true, y_pred)
    return float(total)
