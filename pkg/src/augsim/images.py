"""Image representation and dataset I/O.

Images are H x W x 3 float64 arrays with values in [0, 1].  Pixel math
everywhere in the toolkit happens in this real domain; quantization to
8-bit happens only at file boundaries, using round-half-up
(``floor(v * 255 + 0.5)``) so the save/load round trip is lossless for
any buffer that originated from an 8-bit file.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from . import rng
from .errors import DataError, DomainError, FormatError

IMAGE_EXTENSIONS = (".png",)


def validate_image(img: np.ndarray) -> np.ndarray:
    """Check the buffer invariants; returns the array unchanged."""
    if not isinstance(img, np.ndarray):
        raise TypeError(f"image must be a numpy array, got {type(img).__name__}")
    if img.ndim != 3 or img.shape[2] != 3:
        raise DomainError(f"image must have shape (H, W, 3), got {img.shape}")
    if not np.isfinite(img).all():
        raise DomainError("image contains non-finite values")
    if img.min() < 0.0 or img.max() > 1.0:
        raise DomainError("image values must lie in [0, 1]")
    return img


def image_digest(img: np.ndarray) -> bytes:
    """Content digest used to derive per-image transform substreams."""
    h = hashlib.blake2b(digest_size=16)
    h.update(np.asarray(img.shape, dtype=np.int64).tobytes())
    h.update(np.ascontiguousarray(img, dtype=np.float64).tobytes())
    return h.digest()


def quantize(img: np.ndarray) -> np.ndarray:
    """Real [0,1] -> uint8, round-half-up."""
    return np.floor(np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def from_uint8(data: np.ndarray) -> np.ndarray:
    return data.astype(np.float64) / 255.0


def load_image(path) -> np.ndarray:
    """Load an 8-bit RGB PNG as a [0,1] float buffer."""
    try:
        with Image.open(path) as im:
            if im.mode != "RGB":
                raise FormatError(f"{path}: expected 8-bit RGB, got mode {im.mode!r}")
            data = np.asarray(im, dtype=np.uint8)
    except FormatError:
        raise
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read image {path}: {exc}") from exc
    return from_uint8(data)


def save_image(img: np.ndarray, path) -> None:
    """Quantize to 8-bit and write a PNG."""
    validate_image(img)
    out = Image.fromarray(quantize(img), mode="RGB")
    try:
        out.save(path, format="PNG")
    except OSError as exc:
        raise DataError(f"cannot write image {path}: {exc}") from exc


def list_images(dataset_dir) -> list[str]:
    """Relative paths of all images under a directory, lexicographic order.

    Class subfolders are tolerated (and flattened into the relative path);
    the lexicographic order on relative paths is the canonical image order,
    independent of filesystem enumeration order.
    """
    if not os.path.isdir(dataset_dir):
        raise DataError(f"not a directory: {dataset_dir}")
    found = []
    for root, _dirs, files in os.walk(dataset_dir):
        for name in files:
            if name.lower().endswith(IMAGE_EXTENSIONS):
                rel = os.path.relpath(os.path.join(root, name), dataset_dir)
                found.append(rel.replace(os.sep, "/"))
    return sorted(found)


@dataclass
class ImageSubset:
    """A fixed, ordered sample of images, reused for all featurizations."""

    ids: list[str]
    images: list[np.ndarray]
    subset_id: str = ""
    _embed_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.ids) != len(self.images):
            raise DomainError("ids and images must have equal length")
        if not self.subset_id:
            h = hashlib.blake2b(digest_size=8)
            for i in self.ids:
                h.update(i.encode("utf-8") + b"\x00")
            self.subset_id = h.hexdigest()

    def __len__(self) -> int:
        return len(self.ids)


def subset_from_arrays(images: list[np.ndarray], ids=None) -> ImageSubset:
    """Wrap in-memory arrays (synthetic pools, tests) as a subset."""
    if ids is None:
        ids = [f"img{i:05d}" for i in range(len(images))]
    return ImageSubset(ids=list(ids), images=[validate_image(im) for im in images])


def sample_ids(all_ids: list[str], n: int, seed: int) -> list[str]:
    """Choose n ids uniformly without replacement, deterministic in seed.

    The canonical listing is shuffled by the fixed generator and the first
    n entries taken, so membership and order depend only on
    (listing, n, seed).
    """
    if n < 0:
        raise DomainError(f"subset size must be >= 0, got {n}")
    if n > len(all_ids):
        raise DomainError(f"requested {n} images but only {len(all_ids)} available")
    order = rng.generator(seed, "image-subset").permutation(len(all_ids))
    return [all_ids[i] for i in order[:n]]


def sample_subset(dataset_dir, n: int, seed: int) -> ImageSubset:
    """Sample n images from a directory tree of PNGs."""
    all_ids = list_images(dataset_dir)
    chosen = sample_ids(all_ids, n, seed)
    images = [load_image(os.path.join(dataset_dir, rel)) for rel in chosen]
    return ImageSubset(ids=chosen, images=images)
