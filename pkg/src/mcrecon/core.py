"""Shared domain types for multi-coil MRI reconstruction.

All containers are immutable after construction: the wrapped numpy arrays
are marked read-only, so instances can be shared freely across threads.
Complex data is stored as complex128 in memory; on-disk storage (see the
``data`` module) uses interleaved float32.
"""

from dataclasses import dataclass, field

import numpy as np

RECTILINEAR_SCHEMES = ("equispaced", "random-rectilinear")
MASK_SCHEMES = RECTILINEAR_SCHEMES + ("gaussian2d", "pseudo-radial", "pseudo-spiral", "full")

SENS_NORMALIZATION_TOL = 1e-6


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


def _require_finite(arr: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")


@dataclass(frozen=True)
class ComplexImage:
    """Complex spatial image, indexed (frame, row, col); n_frames >= 1.

    A single frame covers the static case; dynamic (cine) data stacks
    frames along the leading axis.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim == 2:
            arr = arr[np.newaxis]
        if arr.ndim != 3:
            raise ValueError(f"image data must be 2D or 3D, got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValueError(f"image axes must be nonempty, got shape {arr.shape}")
        arr = arr.astype(np.complex128, copy=False)
        _require_finite(arr, "image")
        object.__setattr__(self, "data", _readonly(arr))

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class KSpaceData:
    """Complex multi-coil k-space samples, indexed (coil, frame, row, col)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim == 3:
            arr = arr[:, np.newaxis]
        if arr.ndim != 4:
            raise ValueError(f"k-space data must be 3D or 4D, got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValueError(f"k-space axes must be nonempty, got shape {arr.shape}")
        arr = arr.astype(np.complex128, copy=False)
        _require_finite(arr, "k-space")
        object.__setattr__(self, "data", _readonly(arr))

    @property
    def n_coils(self) -> int:
        return self.data.shape[0]

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[2]

    @property
    def width(self) -> int:
        return self.data.shape[3]


@dataclass(frozen=True)
class SamplingMask:
    """Binary Cartesian undersampling pattern with ACS metadata.

    ``acs_lines`` counts contiguous fully-sampled central columns
    (rectilinear schemes); ``acs_radius`` is the fully-sampled central
    disc radius for 2D point schemes. Whichever does not apply is 0.
    """

    pattern: np.ndarray
    scheme: str
    nominal_acceleration: float
    acs_lines: int = 0
    acs_radius: int = 0

    def __post_init__(self):
        arr = np.asarray(self.pattern)
        if arr.ndim != 2 or min(arr.shape) < 1:
            raise ValueError(f"mask pattern must be 2D and nonempty, got shape {arr.shape}")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("mask entries must be 0 or 1")
        arr = arr.astype(np.uint8, copy=False)
        if arr.sum() == 0:
            raise ValueError("mask has no sampled locations")
        if self.scheme not in MASK_SCHEMES:
            raise ValueError(f"unknown mask scheme {self.scheme!r}")
        if self.nominal_acceleration <= 0:
            raise ValueError("nominal acceleration must be positive")
        if self.scheme in RECTILINEAR_SCHEMES or self.scheme == "full":
            cols = arr.max(axis=0)
            if not np.array_equal(arr, np.broadcast_to(cols, arr.shape)):
                raise ValueError("rectilinear mask columns must be constant")
        if self.acs_lines > 0:
            w = arr.shape[1]
            start = (w - self.acs_lines) // 2
            if not np.all(arr[:, start : start + self.acs_lines] == 1):
                raise ValueError("ACS columns must be centered and fully sampled")
        object.__setattr__(self, "pattern", _readonly(arr))

    @property
    def height(self) -> int:
        return self.pattern.shape[0]

    @property
    def width(self) -> int:
        return self.pattern.shape[1]

    @property
    def n_sampled(self) -> int:
        return int(self.pattern.sum())


@dataclass(frozen=True)
class SensitivityMaps:
    """Per-coil complex sensitivity maps, RSS-normalized on their support.

    ``support`` marks voxels where the calibration RSS exceeded the
    estimation threshold; maps are exactly zero off support.
    """

    maps: np.ndarray
    support: np.ndarray = field(default=None)

    def __post_init__(self):
        arr = np.asarray(self.maps)
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ValueError(f"sensitivity maps must be 3D (coil, row, col), got {arr.shape}")
        arr = arr.astype(np.complex128, copy=False)
        _require_finite(arr, "sensitivity maps")
        sup = self.support
        if sup is None:
            sup = np.any(arr != 0, axis=0)
        sup = np.asarray(sup).astype(bool)
        if sup.shape != arr.shape[1:]:
            raise ValueError("support shape must match the spatial grid")
        sq = np.sum(np.abs(arr) ** 2, axis=0)
        if sup.any() and np.max(np.abs(sq[sup] - 1.0)) > SENS_NORMALIZATION_TOL:
            raise ValueError("maps are not RSS-normalized on support")
        if np.any(sq[~sup] != 0):
            raise ValueError("maps must vanish off support")
        object.__setattr__(self, "maps", _readonly(arr))
        object.__setattr__(self, "support", _readonly(sup))

    @property
    def n_coils(self) -> int:
        return self.maps.shape[0]

    @property
    def height(self) -> int:
        return self.maps.shape[1]

    @property
    def width(self) -> int:
        return self.maps.shape[2]


def rss(coil_images: np.ndarray) -> np.ndarray:
    """Root-sum-of-squares coil combination over the leading (coil) axis."""
    arr = np.asarray(coil_images)
    if arr.ndim < 1 or arr.shape[0] < 1:
        raise ValueError("rss requires at least one coil")
    _require_finite(arr, "coil images")
    return np.sqrt(np.sum(np.abs(arr) ** 2, axis=0))
