"""The extended corruption family, severities 1-10.

Fifteen corruptions built from common filters and noise distributions:
noise additions (blue/brown/perlin/plasma/single-frequency/sine rings),
obscuring effects (checkerboard, lines, sparkles, inverse sparkles), and
warps/blurs/color distortions (caustic refraction, circular motion blur,
pinch-and-twirl, ripple, chromatic aberration).  Each docstring records
the exact kernel since no published parameterization exists for them.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .fields import fractal_cloud, perlin, spectral_noise
from .warp import affine_warp, displacement_warp, rotation_warp


def _min_dim(img: np.ndarray) -> int:
    return min(img.shape[0], img.shape[1])


def _center_grid(h: int, w: int):
    rr, cc = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    return rr - (h - 1) / 2.0, cc - (w - 1) / 2.0


def blue_noise_sample(img, params, stream):
    """Darken the top-`fraction` pixels of a high-pass filtered noise field.

    The high-pass shaping spreads the selected pixels evenly (blue-noise
    spacing); selected pixels are set to black.
    """
    h, w = img.shape[:2]
    field = spectral_noise(h, w, stream, beta=-2.0)
    k = int(round(params["fraction"] * h * w))
    out = img.copy()
    if k <= 0:
        return out
    flat = np.argpartition(field.ravel(), -k)[-k:]
    mask = np.zeros(h * w, dtype=bool)
    mask[flat] = True
    out[mask.reshape(h, w)] = 0.0
    return out


def plasma_noise(img, params, stream):
    """Additive per-channel midpoint-displacement clouds."""
    h, w = img.shape[:2]
    amp = params["amplitude"]
    out = img.copy()
    for ch in range(3):
        field = fractal_cloud(h, w, stream, params["roughness"])
        out[:, :, ch] += amp * (field - 0.5) * 2.0
    return np.clip(out, 0.0, 1.0)


def checkerboard(img, params, stream):
    """Occlude exactly round(fraction * H * W) pixels with mid-gray cells.

    Cells lie on a checker lattice, are taken in a seeded random order,
    and the final cell is trimmed row-major so the pixel count is exact.
    """
    h, w = img.shape[:2]
    cell = max(2, int(round(params["cell_frac"] * _min_dim(img))))
    budget = min(int(round(params["fraction"] * h * w)), h * w)
    n_rows = -(-h // cell)
    n_cols = -(-w // cell)
    even = [(i, j) for i in range(n_rows) for j in range(n_cols) if (i + j) % 2 == 0]
    odd = [(i, j) for i in range(n_rows) for j in range(n_cols) if (i + j) % 2 == 1]
    cells = [even[i] for i in stream.permutation(len(even))]
    cells += [odd[i] for i in stream.permutation(len(odd))]
    mask = np.zeros((h, w), dtype=bool)
    remaining = budget
    for i, j in cells:
        if remaining <= 0:
            break
        r0, c0 = i * cell, j * cell
        r1, c1 = min(r0 + cell, h), min(c0 + cell, w)
        size = (r1 - r0) * (c1 - c0)
        if size <= remaining:
            mask[r0:r1, c0:c1] = True
            remaining -= size
        else:
            partial = np.zeros(size, dtype=bool)
            partial[:remaining] = True
            mask[r0:r1, c0:c1] = partial.reshape(r1 - r0, c1 - c0)
            remaining = 0
    out = img.copy()
    out[mask] = 0.5
    return out


def cocentric_sine_waves(img, params, stream):
    """Concentric sinusoidal rings added around the image center."""
    h, w = img.shape[:2]
    dr, dc = _center_grid(h, w)
    radius = np.hypot(dr, dc)
    r_max = radius.max() + 1e-12
    phase = stream.uniform(0.0, 2.0 * np.pi)
    wave = np.sin(2.0 * np.pi * params["cycles"] * radius / r_max + phase)
    return np.clip(img + params["amplitude"] * wave[:, :, None], 0.0, 1.0)


def single_frequency(img, params, stream):
    """One additive sinusoidal grating at a seeded orientation and phase."""
    h, w = img.shape[:2]
    rr, cc = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    theta = stream.uniform(0.0, np.pi)
    phase = stream.uniform(0.0, 2.0 * np.pi)
    proj = np.cos(theta) * cc + np.sin(theta) * rr
    wave = np.sin(2.0 * np.pi * params["cycles"] * proj / _min_dim(img) + phase)
    return np.clip(img + params["amplitude"] * wave[:, :, None], 0.0, 1.0)


def brown_noise(img, params, stream):
    """Additive noise with a 1/f^2 power spectrum (smooth blotches)."""
    h, w = img.shape[:2]
    field = spectral_noise(h, w, stream, beta=2.0)
    return np.clip(img + params["amplitude"] * field[:, :, None], 0.0, 1.0)


def perlin_noise(img, params, stream):
    """Additive gradient-lattice noise, one field over all channels."""
    h, w = img.shape[:2]
    field = perlin(h, w, stream, cells=int(params["cells"]))
    return np.clip(img + params["amplitude"] * field[:, :, None], 0.0, 1.0)


def _flare_field(h, w, stream, count, radius, spokes=7):
    """Union of star-shaped flares: radial falloff modulated by angular lobes."""
    field = np.zeros((h, w))
    rr, cc = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    for _ in range(int(count)):
        cy = stream.uniform(0.1, 0.9) * h
        cx = stream.uniform(0.1, 0.9) * w
        phase = stream.uniform(0.0, 2.0 * np.pi)
        dy, dx = rr - cy, cc - cx
        dist = np.hypot(dy, dx)
        ang = np.arctan2(dy, dx)
        lobes = np.abs(np.cos((ang - phase) * spokes / 2.0)) ** 3
        radial = np.clip(1.0 - dist / radius, 0.0, 1.0)
        core = np.clip(1.0 - dist / (0.25 * radius), 0.0, 1.0)
        field = np.maximum(field, np.clip(radial**1.5 * (0.25 + 0.75 * lobes) + core, 0, 1))
    return field


def sparkles(img, params, stream):
    """Blend star-shaped bright flares toward white."""
    h, w = img.shape[:2]
    radius = params["radius_frac"] * _min_dim(img)
    field = _flare_field(h, w, stream, params["count"], radius)
    weight = (params["strength"] * field)[:, :, None]
    return np.clip(img * (1.0 - weight) + weight, 0.0, 1.0)


def inverse_sparkles(img, params, stream):
    """Same flare geometry as sparkles, but darkening toward black."""
    h, w = img.shape[:2]
    radius = params["radius_frac"] * _min_dim(img)
    field = _flare_field(h, w, stream, params["count"], radius)
    weight = (params["strength"] * field)[:, :, None]
    return np.clip(img * (1.0 - weight), 0.0, 1.0)


def caustic_refraction(img, params, stream):
    """Warp along the gradient of a smooth field, plus ridge highlights."""
    h, w = img.shape[:2]
    field = fractal_cloud(h, w, stream, params["roughness"])
    smooth = ndimage.gaussian_filter(field, 0.02 * _min_dim(img) + 1.0, mode="reflect")
    gy, gx = np.gradient(smooth)
    peak = max(np.abs(gy).max(), np.abs(gx).max(), 1e-12)
    amp = params["displace_frac"] * _min_dim(img)
    out = displacement_warp(img, gy * amp / peak, gx * amp / peak)
    ridge = (1.0 - np.abs(2.0 * smooth - 1.0)) ** 3
    out = out + params["brightness"] * ridge[:, :, None]
    return np.clip(out, 0.0, 1.0)


def circular_motion_blur(img, params, stream):
    """Average of small rotations about the center (rotational smear)."""
    angles = np.linspace(-params["degrees"], params["degrees"], int(params["steps"]))
    acc = np.zeros_like(img)
    for a in angles:
        acc += rotation_warp(img, a)
    return np.clip(acc / len(angles), 0.0, 1.0)


def lines(img, params, stream):
    """Overlay seeded straight lines, alternating dark and light."""
    h, w = img.shape[:2]
    rr, cc = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    out = img.copy()
    for k in range(int(params["count"])):
        p0 = stream.uniform(0.0, 1.0, 2) * (h - 1, w - 1)
        ang = stream.uniform(0.0, np.pi)
        direction = np.array([np.sin(ang), np.cos(ang)])
        # distance from each pixel to the infinite line through p0
        dy, dx = rr - p0[0], cc - p0[1]
        dist = np.abs(dy * direction[1] - dx * direction[0])
        alpha = np.clip(1.5 - dist, 0.0, 1.0) * params["strength"]
        color = 0.9 if stream.random() < 0.5 else 0.1
        out = out * (1.0 - alpha[:, :, None]) + alpha[:, :, None] * color
    return np.clip(out, 0.0, 1.0)


def pinch_and_twirl(img, params, stream):
    """Radial pinch (r -> r^gamma) combined with a center twirl."""
    h, w = img.shape[:2]
    dr, dc = _center_grid(h, w)
    dist = np.hypot(dr, dc)
    extent = 0.48 * _min_dim(img)
    inside = dist < extent
    unit = np.clip(dist / extent, 0.0, 1.0)
    theta = np.arctan2(dr, dc)
    twist = params["angle"] * (1.0 - unit) ** 2 * inside
    r_src = np.where(inside, extent * unit ** params["pinch"], dist)
    src_r = r_src * np.sin(theta + twist) + (h - 1) / 2.0
    src_c = r_src * np.cos(theta + twist) + (w - 1) / 2.0
    rows, cols = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    return displacement_warp(img, src_r - rows, src_c - cols)


def ripple(img, params, stream):
    """Crossed sinusoidal displacement (water-surface wobble)."""
    h, w = img.shape[:2]
    rr, cc = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    lam = params["wavelength_frac"] * _min_dim(img)
    amp = params["amplitude_frac"] * _min_dim(img)
    p1, p2 = stream.uniform(0.0, 2.0 * np.pi, 2)
    dr = amp * np.sin(2.0 * np.pi * cc / lam + p1)
    dc = amp * np.sin(2.0 * np.pi * rr / lam + p2)
    return displacement_warp(img, dr, dc)


def transverse_chromatic_aberration(img, params, stream):
    """Scale red and blue channels oppositely about the center."""
    delta = params["delta"]
    center = (np.asarray(img.shape[:2], dtype=np.float64) - 1.0) / 2.0
    out = np.empty_like(img)
    for ch, scale in ((0, 1.0 + delta), (1, 1.0), (2, 1.0 - delta)):
        matrix = np.diag([1.0 / scale, 1.0 / scale])
        offset = center - matrix @ center
        single = img[:, :, ch : ch + 1]
        out[:, :, ch : ch + 1] = affine_warp(single, matrix, offset)
    return np.clip(out, 0.0, 1.0)


EXTENDED_CORRUPTIONS = {
    "blue-noise-sample": blue_noise_sample,
    "plasma-noise": plasma_noise,
    "checkerboard": checkerboard,
    "cocentric-sine-waves": cocentric_sine_waves,
    "single-frequency": single_frequency,
    "brown-noise": brown_noise,
    "perlin-noise": perlin_noise,
    "sparkles": sparkles,
    "inverse-sparkles": inverse_sparkles,
    "caustic-refraction": caustic_refraction,
    "circular-motion-blur": circular_motion_blur,
    "lines": lines,
    "pinch-and-twirl": pinch_and_twirl,
    "ripple": ripple,
    "transverse-chromatic-aberration": transverse_chromatic_aberration,
}
