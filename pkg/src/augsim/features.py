"""Transform feature space.

A transform's feature is the mean embedded difference it induces over a
fixed image subset: embed every image with and without the transform and
average the per-image differences.  The image subset is a property of the
extractor context and must stay fixed across the transforms being
compared.

Two extractor kinds:
  - builtin-pixelstats: a deterministic image statistic vector (luminance
    grid + channel moments + radial frequency-band energies).  A proxy
    that keeps the toolkit self-contained; desk-scale only.
  - external-file: precomputed embeddings (e.g. from a trained network)
    loaded from a `CBF1` file and looked up by image id.

Feature vectors from different extractor fingerprints are never mixed;
distance code rejects them.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import rng
from .cbf import read_features, write_features
from .errors import CoverageError, DomainError, FingerprintError
from .images import ImageSubset, validate_image
from .transforms import TransformSpec, apply_transform
from .transforms.compose import SampledAugmentation, apply_augmentation

LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class TransformFeature:
    transform_id: str
    vector: np.ndarray
    subset_id: str
    fingerprint: str


class BuiltinExtractor:
    """Deterministic pixel-statistics embedding.

    Concatenates, in order:
      - a grid x grid block-mean of luminance (row-major),
      - per-channel mean and standard deviation (R, G, B means then stds),
      - `bands` radial frequency-band energies of the one-sided luminance
        power spectrum (DC excluded), each the square root of the band's
        total power.

    Default config gives dim = 8*8 + 2*3 + 8 = 78.
    """

    kind = "builtin-pixelstats"

    def __init__(self, grid: int = 8, bands: int = 8):
        if grid < 1 or bands < 1:
            raise DomainError("grid and bands must be >= 1")
        self.grid = grid
        self.bands = bands
        config = f"{self.kind}:grid={grid}:bands={bands}"
        digest = hashlib.sha256(config.encode()).hexdigest()[:16]
        self.fingerprint = f"{self.kind}/{digest}"

    @property
    def dim(self) -> int:
        return self.grid * self.grid + 6 + self.bands

    def embed(self, img: np.ndarray) -> np.ndarray:
        validate_image(img)
        h, w = img.shape[:2]
        if h < self.grid or w < self.grid:
            raise DomainError(f"image {h}x{w} smaller than {self.grid}x{self.grid} grid")
        lum = img @ LUMA

        row_edges = np.linspace(0, h, self.grid + 1).astype(int)
        col_edges = np.linspace(0, w, self.grid + 1).astype(int)
        sums = np.add.reduceat(
            np.add.reduceat(lum, row_edges[:-1], axis=0), col_edges[:-1], axis=1
        )
        areas = np.outer(np.diff(row_edges), np.diff(col_edges))
        grid_means = (sums / areas).ravel()

        moments = np.concatenate([img.mean(axis=(0, 1)), img.std(axis=(0, 1))])

        spectrum = np.abs(np.fft.rfft2(lum)) ** 2 / (h * w) ** 2
        fy = np.fft.fftfreq(h)[:, None]
        fx = np.fft.rfftfreq(w)[None, :]
        freq = np.hypot(fy, fx)
        max_freq = np.hypot(0.5, 0.5)
        edges = np.linspace(0.0, max_freq, self.bands + 1)
        energies = np.empty(self.bands)
        for b in range(self.bands):
            lo, hi = edges[b], edges[b + 1]
            sel = (freq > lo if b > 0 else (freq > 0)) & (freq <= hi)
            energies[b] = np.sqrt(spectrum[sel].sum())

        return np.concatenate([grid_means, moments, energies])


class FileExtractor:
    """Embeddings precomputed externally, looked up by image id."""

    kind = "external-file"

    def __init__(self, path):
        items, fingerprint = read_features(path)
        if not fingerprint:
            raise FingerprintError(f"{path}: feature file has no fingerprint")
        self.fingerprint = fingerprint
        self.table = {item_id: vec for item_id, vec in items}
        dims = {len(v) for v in self.table.values()}
        if len(dims) > 1:
            raise FingerprintError(f"{path}: inconsistent dims {sorted(dims)}")
        self._dim = dims.pop() if dims else 0

    @property
    def dim(self) -> int:
        return self._dim

    def embed_id(self, image_id: str) -> np.ndarray:
        try:
            return self.table[image_id]
        except KeyError:
            raise CoverageError(f"image id not in feature file: {image_id!r}") from None

    def embed(self, img: np.ndarray) -> np.ndarray:
        raise DomainError(
            "external-file extractors embed by id; use embed_id or "
            "feature_from_embedding_files"
        )


def embed_image(extractor, img: np.ndarray = None, image_id: str = None) -> np.ndarray:
    """Embed one image: by pixels (builtin) or by id (external-file)."""
    if isinstance(extractor, FileExtractor):
        if image_id is None:
            raise DomainError("external-file extractor requires image_id")
        return extractor.embed_id(image_id)
    if img is None:
        raise DomainError("builtin extractor requires an image")
    return extractor.embed(img)


def _clean_matrix(extractor, subset: ImageSubset) -> np.ndarray:
    """Clean-image embeddings, cached on the subset per fingerprint."""
    cached = subset._embed_cache.get(extractor.fingerprint)
    if cached is None:
        cached = np.stack([extractor.embed(im) for im in subset.images])
        subset._embed_cache[extractor.fingerprint] = cached
    return cached


def _apply_any(transform, img: np.ndarray) -> np.ndarray:
    if transform is None:
        return img
    if isinstance(transform, TransformSpec):
        return apply_transform(transform, img)
    if isinstance(transform, SampledAugmentation):
        return apply_augmentation(transform, img)
    if callable(transform):
        return transform(img)
    raise DomainError(f"cannot apply object of type {type(transform).__name__}")


def default_transform_id(transform) -> str:
    if transform is None:
        return "identity"
    if isinstance(transform, TransformSpec):
        sev = "" if transform.severity is None else f"@{transform.severity}"
        return f"{transform.name}{sev}#{transform.seed}"
    return f"{type(transform).__name__}#{abs(hash(repr(transform))) % 10**10}"


def featurize_transform(
    extractor,
    transform,
    subset: ImageSubset,
    transform_id: str = None,
) -> TransformFeature:
    """Mean embedded difference of the transform over the fixed subset."""
    if len(subset) == 0:
        raise DomainError("subset must be nonempty")
    clean = _clean_matrix(extractor, subset)
    total = np.zeros(extractor.dim)
    for i, img in enumerate(subset.images):
        total += extractor.embed(_apply_any(transform, img)) - clean[i]
    return TransformFeature(
        transform_id=transform_id or default_transform_id(transform),
        vector=total / len(subset),
        subset_id=subset.subset_id,
        fingerprint=extractor.fingerprint,
    )


def corruption_center(
    extractor,
    name: str,
    severity: int,
    subset: ImageSubset,
    n_samples: int,
    seed: int,
    paired: bool = False,
) -> np.ndarray:
    """Mean transform feature over seeded draws of one corruption.

    Default: every corruption draw is featurized over the whole subset
    (n_samples x len(subset) embedded differences).  With ``paired=True``,
    n_samples (image, corruption-draw) pairs are sampled jointly — the
    image uniformly from the subset with replacement — which scales to
    large budgets where the cross product would not.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    if paired:
        if len(subset) == 0:
            raise DomainError("subset must be nonempty")
        clean = _clean_matrix(extractor, subset)
        picks = rng.generator(seed, "paired-images", name, severity).integers(
            len(subset), size=n_samples
        )
        total = np.zeros(extractor.dim)
        for i, img_idx in enumerate(picks):
            spec = TransformSpec(
                name=name,
                severity=severity,
                seed=rng.derive_seed(seed, "corruption-sample", name, severity, i),
            )
            img = subset.images[img_idx]
            total += extractor.embed(apply_transform(spec, img)) - clean[img_idx]
        return total / n_samples
    total = np.zeros(extractor.dim)
    for i in range(n_samples):
        spec = TransformSpec(
            name=name,
            severity=severity,
            seed=rng.derive_seed(seed, "corruption-sample", name, severity, i),
        )
        total += featurize_transform(extractor, spec, subset).vector
    return total / n_samples


def feature_from_embedding_files(clean_path, transformed_path, transform_id: str = None):
    """Transform feature from two externally produced embedding files.

    Both files must share a fingerprint; the transformed file's ids must
    all be present in the clean file (pairing is by id).
    """
    clean_items, clean_fp = read_features(clean_path)
    trans_items, trans_fp = read_features(transformed_path)
    if clean_fp != trans_fp:
        raise FingerprintError(
            f"fingerprint mismatch: {clean_fp!r} vs {trans_fp!r}"
        )
    clean = dict(clean_items)
    if not trans_items:
        raise DomainError("transformed feature file is empty")
    total = None
    for item_id, vec in trans_items:
        if item_id not in clean:
            raise CoverageError(f"id missing from clean features: {item_id!r}")
        diff = vec - clean[item_id]
        total = diff if total is None else total + diff
    subset_id = hashlib.blake2b(
        "\x00".join(i for i, _ in trans_items).encode(), digest_size=8
    ).hexdigest()
    return TransformFeature(
        transform_id=transform_id or str(transformed_path),
        vector=total / len(trans_items),
        subset_id=subset_id,
        fingerprint=clean_fp,
    )


def write_transform_features(path, features: list[TransformFeature]) -> None:
    fps = {f.fingerprint for f in features}
    if len(fps) > 1:
        raise FingerprintError(f"mixed fingerprints: {sorted(fps)}")
    write_features(
        path,
        [(f.transform_id, f.vector) for f in features],
        fingerprint=fps.pop() if fps else "",
    )


def read_transform_features(path) -> tuple[list[tuple[str, np.ndarray]], str]:
    return read_features(path)
