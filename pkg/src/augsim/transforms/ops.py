"""The nine base augmentations: five geometric, four color.

Every op is a pure function of (image, params).  Magnitude is a unitless
level in [0, 1] mapped here to physical parameters; signed ops take the
direction from params["sign"].  Randomness lives entirely in the sampler
(compose.py), never in the ops themselves.
"""

from __future__ import annotations

import numpy as np

from ..images import quantize
from .warp import rotation_warp, shear_warp, translate_warp

MAX_SHEAR = 0.3  # shear factor at magnitude 1
MAX_TRANSLATE = 0.33  # fraction of the image extent at magnitude 1
MAX_ROTATE = 30.0  # degrees at magnitude 1


def shear_x(img: np.ndarray, params: dict) -> np.ndarray:
    factor = params["magnitude"] * MAX_SHEAR * params["sign"]
    return np.clip(shear_warp(img, factor, axis=1), 0.0, 1.0)


def shear_y(img: np.ndarray, params: dict) -> np.ndarray:
    factor = params["magnitude"] * MAX_SHEAR * params["sign"]
    return np.clip(shear_warp(img, factor, axis=0), 0.0, 1.0)


def translate_x(img: np.ndarray, params: dict) -> np.ndarray:
    shift = params["magnitude"] * MAX_TRANSLATE * img.shape[1] * params["sign"]
    return np.clip(translate_warp(img, 0.0, shift), 0.0, 1.0)


def translate_y(img: np.ndarray, params: dict) -> np.ndarray:
    shift = params["magnitude"] * MAX_TRANSLATE * img.shape[0] * params["sign"]
    return np.clip(translate_warp(img, shift, 0.0), 0.0, 1.0)


def rotate(img: np.ndarray, params: dict) -> np.ndarray:
    degrees = params["magnitude"] * MAX_ROTATE * params["sign"]
    return np.clip(rotation_warp(img, degrees), 0.0, 1.0)


def solarize(img: np.ndarray, params: dict) -> np.ndarray:
    """Invert all values at or above a threshold that drops with magnitude."""
    threshold = 1.0 - 0.6 * params["magnitude"]
    return np.where(img >= threshold, 1.0 - img, img)


def posterize(img: np.ndarray, params: dict) -> np.ndarray:
    """Keep only the top bits of each 8-bit channel value."""
    keep_bits = 8 - int(round(params["magnitude"] * 6))  # 8 .. 2
    if keep_bits >= 8:
        return img.copy()
    q = quantize(img)
    mask = 0xFF & ~((1 << (8 - keep_bits)) - 1)
    return (q & mask).astype(np.float64) / 255.0


def equalize(img: np.ndarray, params: dict) -> np.ndarray:
    """Per-channel histogram equalization on the 8-bit quantization."""
    q = quantize(img)
    out = np.empty_like(q)
    for ch in range(3):
        channel = q[:, :, ch]
        hist = np.bincount(channel.ravel(), minlength=256)
        cdf = np.cumsum(hist)
        nonzero = cdf[cdf > 0]
        if len(nonzero) == 0 or nonzero[0] == cdf[-1]:
            out[:, :, ch] = channel  # flat channel, nothing to equalize
            continue
        cdf_min = nonzero[0]
        lut = np.floor((cdf - cdf_min) * 255.0 / (cdf[-1] - cdf_min) + 0.5)
        out[:, :, ch] = np.clip(lut, 0, 255).astype(np.uint8)[channel]
    return out.astype(np.float64) / 255.0


def autocontrast(img: np.ndarray, params: dict) -> np.ndarray:
    """Stretch each channel to span [0, 1]; flat channels pass through."""
    out = img.copy()
    for ch in range(3):
        lo = img[:, :, ch].min()
        hi = img[:, :, ch].max()
        if hi > lo:
            out[:, :, ch] = (img[:, :, ch] - lo) / (hi - lo)
    return out


# Canonical op order; powerset scheme bit j corresponds to BASE_OPS[j].
BASE_OPS = (
    "shear-x",
    "shear-y",
    "translate-x",
    "translate-y",
    "rotate",
    "solarize",
    "equalize",
    "autocontrast",
    "posterize",
)

SIGNED_OPS = frozenset({"shear-x", "shear-y", "translate-x", "translate-y", "rotate"})

OP_FUNCTIONS = {
    "shear-x": shear_x,
    "shear-y": shear_y,
    "translate-x": translate_x,
    "translate-y": translate_y,
    "rotate": rotate,
    "solarize": solarize,
    "equalize": equalize,
    "autocontrast": autocontrast,
    "posterize": posterize,
}
