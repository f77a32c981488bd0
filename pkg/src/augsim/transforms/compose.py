"""Augmentation schemes and their sampler.

A scheme composites base ops two ways: chains (ops applied one after
another) and mixtures (chains applied to copies of the image, linearly
superimposed with Dirichlet weights, then blended with the untransformed
image by a Beta-distributed skip weight).  Defaults follow the common
mixing convention: width 3, depth uniform in {1,2,3}, Dirichlet(1,...,1),
Beta(1,1); all four are overridable per scheme.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import rng
from ..errors import DomainError
from ..images import validate_image
from .ops import BASE_OPS, SIGNED_OPS

MAGNITUDE_RANGE = (0.1, 1.0)


@dataclass(frozen=True)
class AugmentationScheme:
    """A distribution over composite augmentations of the base ops."""

    base_ops: tuple[str, ...]
    width: int = 3
    depth_min: int = 1
    depth_max: int = 3
    mix_concentration: float = 1.0
    skip_beta: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        unknown = [op for op in self.base_ops if op not in BASE_OPS]
        if unknown:
            raise DomainError(f"unknown base ops: {unknown}")
        if len(set(self.base_ops)) != len(self.base_ops):
            raise DomainError("base_ops must be distinct")
        if self.width < 1:
            raise DomainError("width must be >= 1")
        if not 1 <= self.depth_min <= self.depth_max:
            raise DomainError("need 1 <= depth_min <= depth_max")


@dataclass(frozen=True)
class SampledAugmentation:
    """One concrete composite transform drawn from a scheme.

    branches[i] is a chain of (op name, params) pairs; weights are the
    convex mixture coefficients over branches; skip_weight blends with
    the untransformed image.
    """

    branches: tuple[tuple[tuple[str, dict], ...], ...]
    weights: tuple[float, ...]
    skip_weight: float


def enumerate_powerset(
    width: int = 3,
    depth_min: int = 1,
    depth_max: int = 3,
    mix_concentration: float = 1.0,
    skip_beta: tuple[float, float] = (1.0, 1.0),
) -> list[AugmentationScheme]:
    """All 2**9 = 512 schemes, one per subset of the base ops.

    Scheme index i includes BASE_OPS[j] iff bit j of i is set; scheme 0 is
    the identity scheme (empty subset).
    """
    schemes = []
    for index in range(2 ** len(BASE_OPS)):
        ops = tuple(op for j, op in enumerate(BASE_OPS) if index >> j & 1)
        schemes.append(
            AugmentationScheme(
                base_ops=ops,
                width=width,
                depth_min=depth_min,
                depth_max=depth_max,
                mix_concentration=mix_concentration,
                skip_beta=skip_beta,
            )
        )
    return schemes


def scheme_key(scheme: AugmentationScheme) -> str:
    """Stable text key for a scheme (its op subset), e.g. 'rotate+solarize'."""
    if not scheme.base_ops:
        return "identity"
    ordered = [op for op in BASE_OPS if op in scheme.base_ops]
    return "+".join(ordered)


def sample_augmentation(scheme: AugmentationScheme, seed: int) -> SampledAugmentation:
    """Draw one composite transform; a pure function of (scheme, seed).

    Sampling order (fixed): per branch, depth ~ U{depth_min..depth_max},
    then per chain slot an op uniform over scheme.base_ops, its magnitude
    ~ U[0.1, 1], and a sign ~ U{-1,+1} for signed ops; then branch weights
    ~ Dirichlet(concentration), then skip_weight ~ Beta(a, b).
    """
    if not scheme.base_ops:
        return SampledAugmentation(branches=(), weights=(), skip_weight=1.0)
    stream = rng.generator(seed, "sample-augmentation")
    branches = []
    for _ in range(scheme.width):
        depth = int(stream.integers(scheme.depth_min, scheme.depth_max + 1))
        chain = []
        for _ in range(depth):
            op = scheme.base_ops[int(stream.integers(len(scheme.base_ops)))]
            params = {"magnitude": float(stream.uniform(*MAGNITUDE_RANGE))}
            if op in SIGNED_OPS:
                params["sign"] = -1 if stream.random() < 0.5 else 1
            chain.append((op, params))
        branches.append(tuple(chain))
    weights = stream.dirichlet(np.full(scheme.width, scheme.mix_concentration))
    skip = float(stream.beta(*scheme.skip_beta))
    return SampledAugmentation(
        branches=tuple(branches),
        weights=tuple(float(w) for w in weights),
        skip_weight=skip,
    )


def apply_augmentation(sampled: SampledAugmentation, img: np.ndarray) -> np.ndarray:
    """Apply a sampled composite: exact convex mixture, single final clamp."""
    from . import TransformSpec, apply_transform  # registry lives in the package root

    validate_image(img)
    if not sampled.branches:
        return img.copy()
    acc = sampled.skip_weight * img
    scale = 1.0 - sampled.skip_weight
    for weight, chain in zip(sampled.weights, sampled.branches):
        branch_img = img
        for op, params in chain:
            branch_img = apply_transform(TransformSpec(name=op, params=params), branch_img)
        acc = acc + scale * weight * branch_img
    return np.clip(acc, 0.0, 1.0)


def sample_and_apply(
    scheme: AugmentationScheme, seed: int, img: np.ndarray
) -> np.ndarray:
    return apply_augmentation(sample_augmentation(scheme, seed), img)


def scheme_from_ops(ops: Sequence[str], **kwargs) -> AugmentationScheme:
    return AugmentationScheme(base_ops=tuple(ops), **kwargs)
