"""Centered orthonormal 2D FFTs and the per-coil SENSE forward/adjoint pair.

Convention: unitary transforms (1/sqrt(N) both directions) with the DC
component at index (h//2, w//2). With RSS-normalized sensitivity maps this
makes the stacked forward operator nonexpansive and adjoint == inverse for
the full-sampling case.
"""

from dataclasses import dataclass

import numpy as np

from .core import ComplexImage, KSpaceData, SamplingMask, SensitivityMaps


def _check_grid(arr: np.ndarray) -> None:
    if arr.ndim < 2 or arr.shape[-1] < 1 or arr.shape[-2] < 1:
        raise ValueError(f"expected a nonempty 2D spatial grid, got shape {arr.shape}")


def fft2c(x: np.ndarray) -> np.ndarray:
    """Centered orthonormal 2D FFT over the trailing two axes."""
    x = np.asarray(x)
    _check_grid(x)
    axes = (-2, -1)
    return np.fft.fftshift(
        np.fft.fft2(np.fft.ifftshift(x, axes=axes), axes=axes, norm="ortho"), axes=axes
    )


def ifft2c(k: np.ndarray) -> np.ndarray:
    """Inverse of :func:`fft2c`."""
    k = np.asarray(k)
    _check_grid(k)
    axes = (-2, -1)
    return np.fft.fftshift(
        np.fft.ifft2(np.fft.ifftshift(k, axes=axes), axes=axes, norm="ortho"), axes=axes
    )


@dataclass(frozen=True)
class ForwardOperator:
    """Per-coil acquisition operator: mask * fft2c(S_k * x), stacked over coils."""

    mask: SamplingMask
    sens: SensitivityMaps

    def __post_init__(self):
        if (self.mask.height, self.mask.width) != (self.sens.height, self.sens.width):
            raise ValueError(
                f"mask grid {self.mask.pattern.shape} does not match "
                f"sensitivity grid {self.sens.maps.shape[1:]}"
            )

    @property
    def n_coils(self) -> int:
        return self.sens.n_coils

    def apply_arr(self, x: np.ndarray) -> np.ndarray:
        """Forward map on a raw (frame, row, col) array -> (coil, frame, row, col)."""
        coil_imgs = self.sens.maps[:, np.newaxis] * x[np.newaxis]
        return self.mask.pattern * fft2c(coil_imgs)

    def adjoint_arr(self, y: np.ndarray) -> np.ndarray:
        """Adjoint map on a raw (coil, frame, row, col) array -> (frame, row, col)."""
        imgs = ifft2c(self.mask.pattern * y)
        return np.sum(np.conj(self.sens.maps)[:, np.newaxis] * imgs, axis=0)


def forward(op: ForwardOperator, x: ComplexImage) -> KSpaceData:
    """Apply the multi-coil forward operator; unsampled locations are exactly 0."""
    if (x.height, x.width) != (op.mask.height, op.mask.width):
        raise ValueError(f"image grid {x.data.shape[1:]} does not match operator grid")
    return KSpaceData(op.apply_arr(x.data))


def adjoint(op: ForwardOperator, y: KSpaceData) -> ComplexImage:
    """Apply the adjoint of :func:`forward` (coil-combined zero-filled recon)."""
    if (y.height, y.width) != (op.mask.height, op.mask.width):
        raise ValueError(f"k-space grid {y.data.shape[2:]} does not match operator grid")
    if y.n_coils != op.n_coils:
        raise ValueError(f"expected {op.n_coils} coils, got {y.n_coils}")
    return ComplexImage(op.adjoint_arr(y.data))
