"""Geometric warp helpers.

All warps use bilinear interpolation with reflect boundary handling so no
transform introduces black borders (which would masquerade as occlusion
corruptions).  The 2-D affines are lifted to 3-D block-diagonal form so
one scipy call covers all three channels.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage


def affine_warp(img: np.ndarray, matrix: np.ndarray, offset: np.ndarray) -> np.ndarray:
    """Warp with the inverse-map convention: src = matrix @ dst + offset.

    Coordinates are (row, col); the channel axis passes through unchanged.
    """
    full_matrix = np.eye(3)
    full_matrix[:2, :2] = matrix
    full_offset = np.array([offset[0], offset[1], 0.0])
    return ndimage.affine_transform(
        img, full_matrix, offset=full_offset, order=1, mode="reflect"
    )


def rotation_warp(img: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate content by `degrees` about the image center."""
    theta = np.deg2rad(degrees)
    # inverse map rotates by -theta
    c, s = np.cos(-theta), np.sin(-theta)
    matrix = np.array([[c, -s], [s, c]])
    center = (np.asarray(img.shape[:2], dtype=np.float64) - 1.0) / 2.0
    offset = center - matrix @ center
    return affine_warp(img, matrix, offset)


def shear_warp(img: np.ndarray, factor: float, axis: int) -> np.ndarray:
    """Shear about the center; axis 0 shifts rows, axis 1 shifts columns."""
    matrix = np.eye(2)
    center = (np.asarray(img.shape[:2], dtype=np.float64) - 1.0) / 2.0
    if axis == 1:
        matrix[1, 0] = -factor  # src_col = col - factor * (row - cr)
    else:
        matrix[0, 1] = -factor  # src_row = row - factor * (col - cc)
    offset = center - matrix @ center
    return affine_warp(img, matrix, offset)


def translate_warp(img: np.ndarray, shift_rows: float, shift_cols: float) -> np.ndarray:
    matrix = np.eye(2)
    offset = np.array([-shift_rows, -shift_cols])
    return affine_warp(img, matrix, offset)


def scale_warp(img: np.ndarray, scale_rows: float, scale_cols: float) -> np.ndarray:
    """Scale content about the center (values > 1 magnify)."""
    matrix = np.diag([1.0 / scale_rows, 1.0 / scale_cols])
    center = (np.asarray(img.shape[:2], dtype=np.float64) - 1.0) / 2.0
    offset = center - matrix @ center
    return affine_warp(img, matrix, offset)


def displacement_warp(img: np.ndarray, dr: np.ndarray, dc: np.ndarray) -> np.ndarray:
    """Resample so that dst(r, c) = src(r + dr, c + dc)."""
    h, w, channels = img.shape
    rows, cols = np.meshgrid(
        np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij"
    )
    src_r = np.broadcast_to((rows + dr)[:, :, None], (h, w, channels))
    src_c = np.broadcast_to((cols + dc)[:, :, None], (h, w, channels))
    src_ch = np.broadcast_to(np.arange(channels, dtype=np.float64), (h, w, channels))
    return ndimage.map_coordinates(
        img, [src_r, src_c, src_ch], order=1, mode="reflect"
    )