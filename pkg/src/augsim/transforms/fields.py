"""Procedural scalar fields and convolution kernels used by corruptions."""

from __future__ import annotations

import numpy as np
from scipy import ndimage


def spectral_noise(h: int, w: int, stream: np.random.Generator, beta: float) -> np.ndarray:
    """Gaussian noise shaped to a power spectrum ~ f**(-beta).

    beta=2 gives brown (random-walk) noise, beta=0 white, negative values
    tilt energy toward high frequencies (blue-ish).  Returned field has
    zero mean and unit variance.
    """
    white = stream.standard_normal((h, w))
    spec = np.fft.rfft2(white)
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.rfftfreq(w)[None, :]
    freq = np.hypot(fy, fx)
    freq[0, 0] = 1.0
    shaping = freq ** (-beta / 2.0)
    shaping[0, 0] = 0.0  # drop DC so the field is zero-mean
    field = np.fft.irfft2(spec * shaping, s=(h, w))
    std = field.std()
    if std > 0:
        field = field / std
    return field


def fractal_cloud(
    h: int,
    w: int,
    stream: np.random.Generator,
    roughness: float = 0.6,
    base: int = 4,
) -> np.ndarray:
    """Midpoint-displacement cloud in [0, 1].

    Starts from a coarse random grid and repeatedly upsamples x2 (bilinear)
    while adding noise attenuated by `roughness` per octave.  Lower
    roughness gives smoother clouds.
    """
    size = base
    acc = stream.uniform(0.0, 1.0, (size, size))
    amp = roughness
    while size < max(h, w):
        size *= 2
        acc = ndimage.zoom(acc, 2.0, order=1)
        acc = acc + amp * stream.standard_normal(acc.shape)
        amp *= roughness
    acc = acc[:h, :w]
    lo, hi = acc.min(), acc.max()
    if hi > lo:
        acc = (acc - lo) / (hi - lo)
    else:
        acc = np.full((h, w), 0.5)
    return acc


def _fade(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def perlin(h: int, w: int, stream: np.random.Generator, cells: int = 8) -> np.ndarray:
    """Classic gradient (Perlin) noise with a seeded gradient lattice.

    Output is roughly in [-0.8, 0.8] with zero mean.
    """
    cells = max(1, int(cells))
    theta = stream.uniform(0.0, 2.0 * np.pi, (cells + 1, cells + 1))
    grad_r, grad_c = np.sin(theta), np.cos(theta)
    r = np.linspace(0.0, cells, h, endpoint=False)
    c = np.linspace(0.0, cells, w, endpoint=False)
    rr, cc = np.meshgrid(r, c, indexing="ij")
    r0 = rr.astype(int)
    c0 = cc.astype(int)
    fr = rr - r0
    fc = cc - c0

    def corner_dot(dr: int, dc: int) -> np.ndarray:
        return grad_r[r0 + dr, c0 + dc] * (fr - dr) + grad_c[r0 + dr, c0 + dc] * (fc - dc)

    u = _fade(fr)
    v = _fade(fc)
    top = corner_dot(0, 0) + v * (corner_dot(0, 1) - corner_dot(0, 0))
    bottom = corner_dot(1, 0) + v * (corner_dot(1, 1) - corner_dot(1, 0))
    return top + u * (bottom - top)


def disk_kernel(radius: float) -> np.ndarray:
    """Anti-aliased disk, normalized to sum 1.  Radius may be fractional."""
    r = max(1, int(np.ceil(radius)))
    y, x = np.mgrid[-r : r + 1, -r : r + 1]
    dist = np.hypot(y, x)
    kernel = np.clip(radius + 0.5 - dist, 0.0, 1.0)
    return kernel / kernel.sum()


def line_kernel(length: float, angle: float) -> np.ndarray:
    """Anti-aliased line segment of given pixel length and angle (radians)."""
    half = max(length, 1.0) / 2.0
    r = max(1, int(np.ceil(half)))
    y, x = np.mgrid[-r : r + 1, -r : r + 1]
    dy, dx = np.sin(angle), np.cos(angle)
    t = np.clip(y * dy + x * dx, -half, half)
    dist = np.hypot(y - t * dy, x - t * dx)
    kernel = np.clip(1.0 - dist, 0.0, 1.0)
    return kernel / kernel.sum()


def convolve_rgb(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Convolve each channel with reflect boundaries (one call, 3-D kernel)."""
    return ndimage.convolve(img, kernel[:, :, None], mode="reflect")
