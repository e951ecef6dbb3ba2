"""Phantom simulation, k-space cropping, and file I/O.

The on-disk CKS container is a fixed little-endian layout:
magic "CKS1" | u16 version | u8 kind | 4 x u32 dims (coils, frames, rows,
cols; unused axes 1) | payload. Complex payloads are interleaved (re, im)
float32 in (coil, frame, row, col) row-major order; masks store one byte
per element. Kinds: 0 k-space, 1 image, 2 mask, 3 sensitivity maps.
"""

import math
import struct
from pathlib import Path

import numpy as np

from .core import ComplexImage, KSpaceData, SamplingMask, SensitivityMaps
from .fourier import fft2c, ifft2c
from .sampling import Lcg

CKS_MAGIC = b"CKS1"
CKS_VERSION = 1
KIND_KSPACE = 0
KIND_IMAGE = 1
KIND_MASK = 2
KIND_SENSMAPS = 3

_HEADER = struct.Struct("<4sHB4I")


class FormatError(ValueError):
    """Raised for malformed CKS files; message includes the byte offset."""


# Modified Shepp-Logan ellipses: (intensity, a, b, x0, y0, phi_degrees),
# on the [-1, 1]^2 square, intensities stack to values in [0, 1].
SHEPP_LOGAN_ELLIPSES = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.605, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)

# Index of the ellipse animated by dynamic_phantom (the large upper blob).
_DYNAMIC_ELLIPSE = 4
_DYNAMIC_AMPLITUDE = 0.35


def _phantom_grid(n: int):
    # Origin at (n//2, n//2), matching the centered FFT convention.
    coords = (np.arange(n) - n // 2) / (n / 2.0)
    return np.meshgrid(coords, coords, indexing="ij")


def _render_ellipse(yy, xx, ellipse, scale: float = 1.0) -> np.ndarray:
    inten, a, b, x0, y0, phi = ellipse
    phi = math.radians(phi)
    xr = (xx - x0) * math.cos(phi) + (yy - y0) * math.sin(phi)
    yr = -(xx - x0) * math.sin(phi) + (yy - y0) * math.cos(phi)
    inside = (xr / (a * scale)) ** 2 + (yr / (b * scale)) ** 2 <= 1.0
    return inten * inside


def shepp_logan(n: int) -> ComplexImage:
    """Classical 10-ellipse Shepp-Logan phantom, intensities in [0, 1]."""
    if n < 16:
        raise ValueError("phantom side length must be >= 16")
    yy, xx = _phantom_grid(n)
    img = np.zeros((n, n))
    for e in SHEPP_LOGAN_ELLIPSES:
        img += _render_ellipse(yy, xx, e)
    return ComplexImage(np.clip(img, 0.0, 1.0)[np.newaxis])


def dynamic_phantom(n: int, n_frames: int) -> ComplexImage:
    """Shepp-Logan stack whose upper interior ellipse contracts and
    re-expands once over the frame sequence; frame 0 is the static phantom."""
    if n < 16:
        raise ValueError("phantom side length must be >= 16")
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    yy, xx = _phantom_grid(n)
    base = np.zeros((n, n))
    for i, e in enumerate(SHEPP_LOGAN_ELLIPSES):
        if i != _DYNAMIC_ELLIPSE:
            base += _render_ellipse(yy, xx, e)
    frames = np.empty((n_frames, n, n))
    for t in range(n_frames):
        scale = 1.0 - _DYNAMIC_AMPLITUDE * 0.5 * (1.0 - math.cos(2 * math.pi * t / n_frames))
        frame = base + _render_ellipse(yy, xx, SHEPP_LOGAN_ELLIPSES[_DYNAMIC_ELLIPSE], scale)
        frames[t] = np.clip(frame, 0.0, 1.0)
    return ComplexImage(frames)


def simulate_coils(
    img: ComplexImage, n_coils: int, seed: int
) -> tuple[SensitivityMaps, KSpaceData]:
    """Synthesize smooth complex coil profiles and fully-sampled k-space.

    Gaussian-bump magnitudes centered at equiangular positions around the
    FOV, RSS-normalized everywhere; coil 0 carries zero phase so the
    single-coil case reduces to S == 1 and k-space == fft2c(x).
    """
    if n_coils < 1:
        raise ValueError("n_coils must be >= 1")
    n_h, n_w = img.height, img.width
    ys = (np.arange(n_h) - n_h // 2) / (n_h / 2.0)
    xs = (np.arange(n_w) - n_w // 2) / (n_w / 2.0)
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    rng = Lcg(seed)
    base_angle = rng.uniform() * 2 * math.pi
    profiles = np.empty((n_coils, n_h, n_w), dtype=complex)
    for k in range(n_coils):
        ang = base_angle + 2 * math.pi * k / n_coils
        cy, cx = 1.2 * math.sin(ang), 1.2 * math.cos(ang)
        mag = np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * 0.8**2))
        phase = 0.5 * k * (xx * math.cos(ang) + yy * math.sin(ang))
        profiles[k] = mag * np.exp(1j * phase)
    norm = np.sqrt(np.sum(np.abs(profiles) ** 2, axis=0))
    maps = SensitivityMaps(maps=profiles / norm, support=np.ones((n_h, n_w), bool))
    ksp = fft2c(maps.maps[:, np.newaxis] * img.data[np.newaxis])
    return maps, KSpaceData(ksp)


def random_kspace_crop(ksp: KSpaceData, crop_h: int, crop_w: int, seed: int) -> KSpaceData:
    """Crop fully-sampled k-space in the image domain: per coil/frame
    ifft2c -> extract one seed-chosen window (shared by all coils and
    frames) -> fft2c."""
    if crop_h > ksp.height or crop_w > ksp.width:
        raise ValueError(
            f"crop {crop_h}x{crop_w} exceeds grid {ksp.height}x{ksp.width}"
        )
    if crop_h < 1 or crop_w < 1:
        raise ValueError("crop dimensions must be >= 1")
    rng = Lcg(seed)
    r0 = rng.randint(ksp.height - crop_h + 1)
    c0 = rng.randint(ksp.width - crop_w + 1)
    imgs = ifft2c(ksp.data)
    window = imgs[..., r0 : r0 + crop_h, c0 : c0 + crop_w]
    return KSpaceData(fft2c(window))


def _mask_from_pattern(pattern: np.ndarray) -> SamplingMask:
    """Rebuild mask metadata from a bare pattern (the CKS mask payload
    carries no scheme/ACS fields): infer the centered ACS block or disc."""
    h, w = pattern.shape
    accel = h * w / max(int(pattern.sum()), 1)
    if pattern.all():
        return SamplingMask(pattern=pattern, scheme="full", nominal_acceleration=1.0)
    cols = pattern.max(axis=0)
    rectilinear = np.array_equal(pattern, np.broadcast_to(cols, pattern.shape))
    if rectilinear:
        full_cols = pattern.min(axis=0).astype(bool)
        acs = 0
        for n in range(w, 0, -1):
            start = (w - n) // 2
            if full_cols[start : start + n].all():
                acs = n
                break
        return SamplingMask(
            pattern=pattern,
            scheme="equispaced",
            nominal_acceleration=accel,
            acs_lines=acs,
        )
    cy, cx = h // 2, w // 2
    yy, xx = np.mgrid[0:h, 0:w]
    r2 = (yy - cy) ** 2 + (xx - cx) ** 2
    radius = 0
    while radius + 1 <= min(h, w) // 2 and np.all(pattern[r2 <= (radius + 1) ** 2] == 1):
        radius += 1
    return SamplingMask(
        pattern=pattern,
        scheme="gaussian2d",
        nominal_acceleration=accel,
        acs_radius=radius,
    )


def _complex_payload(arr: np.ndarray) -> bytes:
    inter = np.empty(arr.shape + (2,), dtype="<f4")
    inter[..., 0] = arr.real
    inter[..., 1] = arr.imag
    return inter.tobytes()


def write_cks(path, obj) -> None:
    """Serialize a core object to the CKS binary format."""
    path = Path(path)
    if isinstance(obj, KSpaceData):
        kind = KIND_KSPACE
        dims = (obj.n_coils, obj.n_frames, obj.height, obj.width)
        payload = _complex_payload(obj.data)
    elif isinstance(obj, ComplexImage):
        kind = KIND_IMAGE
        dims = (1, obj.n_frames, obj.height, obj.width)
        payload = _complex_payload(obj.data)
    elif isinstance(obj, SamplingMask):
        kind = KIND_MASK
        dims = (1, 1, obj.height, obj.width)
        payload = obj.pattern.astype(np.uint8).tobytes()
    elif isinstance(obj, SensitivityMaps):
        kind = KIND_SENSMAPS
        dims = (obj.n_coils, 1, obj.height, obj.width)
        payload = _complex_payload(obj.maps)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(CKS_MAGIC, CKS_VERSION, kind, *dims))
        f.write(payload)


def read_cks(path):
    """Deserialize a CKS file back into the corresponding core object."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(
            f"truncated header at byte {len(raw)}: expected {_HEADER.size} header bytes"
        )
    magic, version, kind, *dims = _HEADER.unpack_from(raw)
    if magic != CKS_MAGIC:
        raise FormatError(f"bad magic {magic!r} at byte 0: expected {CKS_MAGIC!r}")
    if version != CKS_VERSION:
        raise FormatError(f"unsupported version {version} at byte 4")
    n_el = int(np.prod(dims))
    elem_size = 1 if kind == KIND_MASK else 8
    expected = _HEADER.size + n_el * elem_size
    if len(raw) != expected:
        raise FormatError(
            f"payload length mismatch at byte {_HEADER.size}: "
            f"expected {expected} total bytes, got {len(raw)}"
        )
    body = raw[_HEADER.size :]
    coils, frames, h, w = dims
    if kind == KIND_MASK:
        pattern = np.frombuffer(body, dtype=np.uint8).reshape(h, w).copy()
        return _mask_from_pattern(pattern)
    inter = np.frombuffer(body, dtype="<f4").reshape(coils, frames, h, w, 2)
    arr = inter[..., 0].astype(np.complex128) + 1j * inter[..., 1].astype(np.complex128)
    if kind == KIND_KSPACE:
        return KSpaceData(arr)
    if kind == KIND_IMAGE:
        return ComplexImage(arr[0])
    if kind == KIND_SENSMAPS:
        return SensitivityMaps(maps=arr[:, 0])
    raise FormatError(f"unknown kind {kind} at byte 6")


def write_pgm(path, image: np.ndarray, sidecar: bool = True) -> None:
    """8-bit binary PGM export; min-max scaling recorded in a sidecar file.

    Binary {0,1} masks map to {0, 255} with no sidecar.
    """
    path = Path(path)
    arr = np.asarray(image, dtype=float)
    if arr.ndim != 2:
        raise ValueError("PGM export needs a 2D array")
    lo, hi = float(arr.min()), float(arr.max())
    is_binary = np.all((arr == 0) | (arr == 1))
    if is_binary:
        scaled = (arr * 255).astype(np.uint8)
    else:
        span = hi - lo if hi > lo else 1.0
        scaled = np.round((arr - lo) / span * 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode())
        f.write(scaled.tobytes())
    if sidecar and not is_binary:
        path.with_suffix(path.suffix + ".scale.txt").write_text(
            f"min={lo!r}\nmax={hi!r}\n"
        )
