"""The 15 reference-benchmark corruptions, severities 1-5.

Four groups: per-pixel noise (gaussian, shot, impulse), blurs (motion,
defocus, zoom, glass), synthetic weather (brightness, fog, frost, snow),
and digital transforms (contrast, pixelate, jpeg, elastic).  Frost is
procedural (thresholded fractal overlay) rather than photographic, so the
toolkit stays self-contained; jpeg uses the in-process baseline codec.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image
from scipy import ndimage

from ..images import from_uint8, quantize
from .fields import convolve_rgb, disk_kernel, fractal_cloud, line_kernel
from .warp import displacement_warp, scale_warp


def _min_dim(img: np.ndarray) -> int:
    return min(img.shape[0], img.shape[1])


def gaussian_noise(img, params, stream):
    noise = stream.standard_normal(img.shape)
    return np.clip(img + params["sigma"] * noise, 0.0, 1.0)


def shot_noise(img, params, stream):
    lam = params["photons"]
    return np.clip(stream.poisson(img * lam) / lam, 0.0, 1.0)


def impulse_noise(img, params, stream):
    """Salt-and-pepper applied to whole pixels (all three channels)."""
    p = params["fraction"]
    roll = stream.random(img.shape[:2])
    out = img.copy()
    out[roll < p / 2.0] = 1.0
    out[(roll >= p / 2.0) & (roll < p)] = 0.0
    return out


def motion_blur(img, params, stream):
    length = params["length_frac"] * _min_dim(img)
    angle = stream.uniform(0.0, np.pi)
    return np.clip(convolve_rgb(img, line_kernel(length, angle)), 0.0, 1.0)


def defocus_blur(img, params, stream):
    radius = params["radius_frac"] * _min_dim(img)
    return np.clip(convolve_rgb(img, disk_kernel(radius)), 0.0, 1.0)


def zoom_blur(img, params, stream):
    scales = np.linspace(1.0, params["max_zoom"], int(params["steps"]))
    acc = np.zeros_like(img)
    for s in scales:
        acc += scale_warp(img, s, s)
    return np.clip(acc / len(scales), 0.0, 1.0)


def glass_blur(img, params, stream):
    """Local pixel shuffling between gaussian pre/post smoothing."""
    sigma = params["sigma_frac"] * _min_dim(img)
    delta = max(1, int(round(params["delta_frac"] * _min_dim(img))))
    h, w = img.shape[:2]
    out = ndimage.gaussian_filter(img, (sigma, sigma, 0), mode="reflect")
    rows, cols = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    for _ in range(int(params["iterations"])):
        dr = stream.integers(-delta, delta + 1, (h, w))
        dc = stream.integers(-delta, delta + 1, (h, w))
        src_r = np.clip(rows + dr, 0, h - 1)
        src_c = np.clip(cols + dc, 0, w - 1)
        out = out[src_r, src_c]
    out = ndimage.gaussian_filter(out, (sigma, sigma, 0), mode="reflect")
    return np.clip(out, 0.0, 1.0)


def brightness(img, params, stream):
    return np.clip(img + params["shift"], 0.0, 1.0)


def fog(img, params, stream):
    t = params["amount"]
    haze = fractal_cloud(img.shape[0], img.shape[1], stream, params["roughness"])
    veil = 0.6 + 0.4 * haze[:, :, None]
    return np.clip(img * (1.0 - t) + t * veil, 0.0, 1.0)


def frost(img, params, stream):
    """Icy overlay: a fractal field thresholded into crystalline patches."""
    field = fractal_cloud(img.shape[0], img.shape[1], stream, params["roughness"])
    tau = np.quantile(field, 1.0 - params["coverage"])
    width = 0.08
    mask = np.clip((field - tau) / width, 0.0, 1.0) * params["strength"]
    tint = (0.75 + 0.25 * field)[:, :, None] * np.array([0.94, 0.97, 1.0])
    return np.clip(img * (1.0 - mask[:, :, None]) + mask[:, :, None] * tint, 0.0, 1.0)


def snow(img, params, stream):
    h, w = img.shape[:2]
    flecks = (stream.random((h, w)) < params["density"]).astype(np.float64)
    flecks *= stream.uniform(0.5, 1.0, (h, w))
    length = params["length_frac"] * _min_dim(img)
    angle = stream.uniform(-np.pi * 3 / 4, -np.pi / 4)  # falling direction
    streaks = ndimage.convolve(flecks, line_kernel(length, angle), mode="reflect")
    peak = streaks.max()
    if peak > 0:
        streaks = streaks / peak
    t = params["whiten"]
    out = img * (1.0 - t) + t * 0.85
    out = out + params["brightness"] * streaks[:, :, None]
    return np.clip(out, 0.0, 1.0)


def contrast(img, params, stream):
    mean = img.mean()
    return np.clip((img - mean) * params["factor"] + mean, 0.0, 1.0)


def pixelate(img, params, stream):
    block = max(2, int(round(params["block_frac"] * _min_dim(img))))
    h, w = img.shape[:2]
    row_edges = np.arange(0, h, block)
    col_edges = np.arange(0, w, block)
    sums = np.add.reduceat(np.add.reduceat(img, row_edges, axis=0), col_edges, axis=1)
    row_sizes = np.diff(np.append(row_edges, h))
    col_sizes = np.diff(np.append(col_edges, w))
    means = sums / (row_sizes[:, None, None] * col_sizes[None, :, None])
    return means[np.arange(h) // block][:, np.arange(w) // block]


def jpeg_compression(img, params, stream):
    buf = io.BytesIO()
    Image.fromarray(quantize(img), mode="RGB").save(
        buf, format="JPEG", quality=int(params["quality"])
    )
    buf.seek(0)
    with Image.open(buf) as im:
        data = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return from_uint8(data)


def elastic_transform(img, params, stream):
    h, w = img.shape[:2]
    sigma = params["sigma_frac"] * _min_dim(img)
    alpha = params["alpha_frac"] * _min_dim(img)
    dr = ndimage.gaussian_filter(stream.uniform(-1, 1, (h, w)), sigma, mode="reflect")
    dc = ndimage.gaussian_filter(stream.uniform(-1, 1, (h, w)), sigma, mode="reflect")
    peak = max(np.abs(dr).max(), np.abs(dc).max(), 1e-12)
    return np.clip(displacement_warp(img, dr * alpha / peak, dc * alpha / peak), 0.0, 1.0)


REFERENCE_CORRUPTIONS = {
    "gaussian-noise": gaussian_noise,
    "shot-noise": shot_noise,
    "impulse-noise": impulse_noise,
    "motion-blur": motion_blur,
    "defocus-blur": defocus_blur,
    "zoom-blur": zoom_blur,
    "glass-blur": glass_blur,
    "brightness": brightness,
    "fog": fog,
    "frost": frost,
    "snow": snow,
    "contrast": contrast,
    "pixelate": pixelate,
    "jpeg-compression": jpeg_compression,
    "elastic-transform": elastic_transform,
}
