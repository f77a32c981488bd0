import numpy as np
import pytest
from scipy import ndimage

from augsim import rng as augsim_rng
from augsim.images import save_image, subset_from_arrays


def make_calibration_images(n, size=32, seed=123):
    """Smooth mid-range images with mild texture.

    This is the documented calibration distribution for severity tables:
    gaussian-smoothed uniform noise rescaled into [0.2, 0.8] plus a small
    amount of per-pixel texture, so additive/clipping corruptions behave
    like they would on natural photos.
    """
    images = []
    for i in range(n):
        g = augsim_rng.generator(seed, "calib", i)
        base = g.random((size, size, 3))
        smooth = ndimage.gaussian_filter(base, (3, 3, 0), mode="reflect")
        lo, hi = smooth.min(), smooth.max()
        img = 0.2 + 0.6 * (smooth - lo) / (hi - lo)
        img = np.clip(img + 0.08 * (g.random((size, size, 3)) - 0.5), 0.0, 1.0)
        images.append(img)
    return images


def make_8bit_images(n, size=32, seed=99):
    """Random images quantized to exact 8-bit levels (k/255 values)."""
    images = []
    for i in range(n):
        g = augsim_rng.generator(seed, "u8", i)
        images.append(g.integers(0, 256, (size, size, 3)).astype(np.float64) / 255.0)
    return images


@pytest.fixture(scope="session")
def calibration_pool():
    return make_calibration_images(100, size=32)


@pytest.fixture()
def small_subset():
    return subset_from_arrays(make_calibration_images(6, size=16, seed=42))


@pytest.fixture()
def png_dataset(tmp_path):
    """Write a small PNG tree (with one class subfolder) and return its path."""
    root = tmp_path / "dataset"
    (root / "classA").mkdir(parents=True)
    images = make_8bit_images(8, size=16, seed=5)
    for i, img in enumerate(images[:5]):
        save_image(img, root / f"img_{i:02d}.png")
    for i, img in enumerate(images[5:]):
        save_image(img, root / "classA" / f"sub_{i:02d}.png")
    return root
