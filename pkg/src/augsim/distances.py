"""Distances between augmentation schemes and corruption distributions.

The nearest-sample distance (``msd``) is the Euclidean distance from a
corruption's center (its mean transform feature) to the closest of
finitely many sampled augmentation features.  The mean discrepancy
(``mmd``) is the Euclidean distance between two sample means in the same
fixed feature space.  No feature normalization is applied anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import rng
from .errors import DomainError, FingerprintError
from .features import corruption_center, featurize_transform
from .images import ImageSubset
from .transforms.compose import AugmentationScheme, sample_augmentation
from .transforms.ops import BASE_OPS


@dataclass
class SampleSet:
    """A finite set of transform features sharing one extractor."""

    features: np.ndarray  # (n, dim)
    fingerprint: Optional[str] = None
    ids: Optional[list[str]] = None

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        if self.ids is not None and len(self.ids) != len(self.features):
            raise DomainError("ids length must match feature count")

    def __len__(self) -> int:
        return len(self.features)

    @classmethod
    def from_transform_features(cls, feats) -> "SampleSet":
        fps = {f.fingerprint for f in feats}
        if len(fps) > 1:
            raise FingerprintError(f"mixed fingerprints: {sorted(fps)}")
        return cls(
            features=np.stack([f.vector for f in feats]),
            fingerprint=fps.pop() if fps else None,
            ids=[f.transform_id for f in feats],
        )

    @classmethod
    def from_items(cls, items, fingerprint=None) -> "SampleSet":
        return cls(
            features=np.stack([vec for _, vec in items]),
            fingerprint=fingerprint,
            ids=[item_id for item_id, _ in items],
        )


@dataclass
class DistanceReport:
    msd: float
    argmin: int
    sample_count: int


def _check_fingerprints(a: Optional[str], b: Optional[str]) -> None:
    if a is not None and b is not None and a != b:
        raise FingerprintError(f"fingerprint mismatch: {a!r} vs {b!r}")


def _check_dims(features: np.ndarray, center: np.ndarray) -> None:
    if features.shape[1] != len(center):
        raise DomainError(
            f"dim mismatch: samples {features.shape[1]} vs center {len(center)}"
        )


def msd(
    samples: SampleSet,
    center: np.ndarray,
    center_fingerprint: Optional[str] = None,
    chunk: int = 8192,
) -> DistanceReport:
    """Minimum Euclidean distance from any sample to the center.

    Scans in fixed-size chunks so memory stays O(chunk * dim) for large
    sample budgets; the running minimum is order-independent.
    """
    if len(samples) == 0:
        raise DomainError("sample set is empty")
    _check_fingerprints(samples.fingerprint, center_fingerprint)
    center = np.asarray(center, dtype=np.float64)
    _check_dims(samples.features, center)
    best = np.inf
    best_idx = -1
    for start in range(0, len(samples), chunk):
        block = samples.features[start : start + chunk]
        # explicit sqrt-of-rowsum so any scan order (or an external oracle
        # using the same per-element formula) reproduces results bit-exactly
        dists = np.sqrt(np.square(block - center).sum(axis=1))
        idx = int(np.argmin(dists))
        if dists[idx] < best:
            best = float(dists[idx])
            best_idx = start + idx
    return DistanceReport(msd=best, argmin=best_idx, sample_count=len(samples))


def msd_stream(vectors, center: np.ndarray) -> DistanceReport:
    """msd over an iterable of (id, vector) or bare vectors; O(dim) memory.

    Uses the same per-element distance formula as msd, so the running
    minimum matches a full scan bit-exactly regardless of chunking.
    """
    center = np.asarray(center, dtype=np.float64)
    best = np.inf
    best_idx = -1
    count = 0
    for item in vectors:
        vec = item[1] if isinstance(item, tuple) else item
        vec = np.asarray(vec, dtype=np.float64)
        if len(vec) != len(center):
            raise DomainError(f"dim mismatch: sample {len(vec)} vs center {len(center)}")
        dist = float(np.sqrt(np.square(vec - center).sum()))
        if dist < best:
            best = dist
            best_idx = count
        count += 1
    if count == 0:
        raise DomainError("sample set is empty")
    return DistanceReport(msd=best, argmin=best_idx, sample_count=count)


def mmd(samples: SampleSet, corruption_samples: SampleSet) -> float:
    """Euclidean distance between the two sample means."""
    if len(samples) == 0 or len(corruption_samples) == 0:
        raise DomainError("sample sets must be nonempty")
    _check_fingerprints(samples.fingerprint, corruption_samples.fingerprint)
    if samples.features.shape[1] != corruption_samples.features.shape[1]:
        raise DomainError("dim mismatch between sample sets")
    return float(
        np.linalg.norm(samples.features.mean(axis=0) - corruption_samples.features.mean(axis=0))
    )


def mmd_to_center(samples: SampleSet, center: np.ndarray) -> float:
    if len(samples) == 0:
        raise DomainError("sample set is empty")
    center = np.asarray(center, dtype=np.float64)
    _check_dims(samples.features, center)
    return float(np.linalg.norm(samples.features.mean(axis=0) - center))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the average of their positions."""
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    lo = np.searchsorted(sorted_vals, values, side="left")
    hi = np.searchsorted(sorted_vals, values, side="right")
    return (lo + hi + 1) / 2.0


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Rank correlation with average-rank tie handling."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise DomainError("inputs must be 1-D with equal length")
    if len(xs) < 2:
        raise DomainError("need at least 2 observations")
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    sx, sy = rx.std(), ry.std()
    if sx == 0.0 or sy == 0.0:
        raise DomainError("rank correlation undefined: zero rank variance")
    return float(((rx - rx.mean()) * (ry - ry.mean())).mean() / (sx * sy))


def rank_augmentations(samples: SampleSet, centers: np.ndarray) -> list[int]:
    """Round-robin nearest ordering across corruption centers.

    Output position k * m + j (with m centers) holds the (k+1)-th closest
    not-yet-used sample to center j, so the first m entries are each
    center's nearest sample.  Returns sample indices.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    if len(centers) == 0:
        raise DomainError("need at least one center")
    _check_dims(samples.features, centers[0])
    n, m = len(samples), len(centers)
    dists = np.linalg.norm(samples.features[:, None, :] - centers[None, :, :], axis=2)
    per_center = [np.argsort(dists[:, j], kind="stable") for j in range(m)]
    pointers = [0] * m
    used = np.zeros(n, dtype=bool)
    order: list[int] = []
    while len(order) < n:
        for j in range(m):
            ptr = pointers[j]
            while ptr < n and used[per_center[j][ptr]]:
                ptr += 1
            pointers[j] = ptr
            if ptr < n:
                idx = int(per_center[j][ptr])
                used[idx] = True
                order.append(idx)
                if len(order) == n:
                    break
    return order


def select_subset(ordered: Sequence, k: int, mode: str, seed: int = 0) -> list:
    """Take k items from a ranked list: its head, its tail, or at random."""
    if k > len(ordered):
        raise DomainError(f"k={k} exceeds list length {len(ordered)}")
    if k < 0:
        raise DomainError("k must be >= 0")
    if mode == "closest":
        return list(ordered[:k])
    if mode == "farthest":
        return list(ordered[len(ordered) - k :])
    if mode == "random":
        idx = rng.generator(seed, "select-subset").permutation(len(ordered))[:k]
        return [ordered[i] for i in sorted(idx)]
    raise DomainError(f"unknown mode: {mode!r}")


def probe_distances(
    extractor,
    corruption: tuple[str, int],
    pool: ImageSubset,
    n_images: int,
    n_corruptions: int,
    repeat_seeds: Sequence[int],
    probe=None,
) -> list[float]:
    """Distance from a fixed probe augmentation to a corruption center,
    once per (image-subset, corruption-sample) redraw."""
    name, severity = corruption
    if n_images > len(pool):
        raise DomainError(f"pool has {len(pool)} images, need {n_images}")
    if probe is None:
        probe = sample_augmentation(
            AugmentationScheme(base_ops=BASE_OPS), seed=rng.derive_seed(0, "probe-aug")
        )
    out = []
    for r_seed in repeat_seeds:
        idx = rng.generator(r_seed, "probe-subset").permutation(len(pool))[:n_images]
        subset = ImageSubset(
            ids=[pool.ids[i] for i in idx], images=[pool.images[i] for i in idx]
        )
        center = corruption_center(
            extractor, name, severity, subset, n_corruptions,
            seed=rng.derive_seed(r_seed, "probe-corruption"),
        )
        aug_feat = featurize_transform(extractor, probe, subset).vector
        out.append(float(np.linalg.norm(aug_feat - center)))
    return out


def variance_probe(
    extractor,
    corruption: tuple[str, int],
    pool: ImageSubset,
    n_images: int,
    n_corruptions: int,
    repeats: int,
    seed: int,
    probe=None,
) -> float:
    """Std of the probe distance across redraws, as a percentage of its mean."""
    if repeats < 2:
        raise DomainError("repeats must be >= 2")
    seeds = [rng.derive_seed(seed, "probe-repeat", r) for r in range(repeats)]
    dists = probe_distances(
        extractor, corruption, pool, n_images, n_corruptions, seeds, probe=probe
    )
    mean = float(np.mean(dists))
    if mean <= 0.0:
        raise DomainError("variance probe undefined: zero mean distance")
    return 100.0 * float(np.std(dists)) / mean
