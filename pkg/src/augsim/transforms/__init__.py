"""Transform registry: base augmentations plus two disjoint corruption families.

Registered kinds:
  - ``augmentation``          the 9 base ops, no severity
  - ``corruption-reference``  the 15 reference-benchmark corruptions, severities 1-5
  - ``corruption-cbar``       the 15 extended corruptions, severities 1-10

The namespaces are disjoint by construction: no name may be registered in
more than one kind.  Severity parameter tables are loaded from the
packaged ``severity_params.yaml``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Optional

import numpy as np
import yaml

from .. import rng
from ..errors import DomainError, RegistryError
from ..images import image_digest, validate_image
from .extended import EXTENDED_CORRUPTIONS
from .ops import BASE_OPS, OP_FUNCTIONS, SIGNED_OPS
from .reference import REFERENCE_CORRUPTIONS

KIND_AUGMENTATION = "augmentation"
KIND_REFERENCE = "corruption-reference"
KIND_CBAR = "corruption-cbar"


@dataclass(frozen=True)
class TransformSpec:
    """A named, parameterized, seeded, deterministic image transform."""

    name: str
    severity: Optional[int] = None
    seed: int = 0
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    kind: str
    severity_range: Optional[tuple[int, int]]
    fn: Callable


def _load_severity_params() -> dict:
    text = resources.files("augsim").joinpath("severity_params.yaml").read_text()
    return yaml.safe_load(text)


_SEVERITY_TABLES = _load_severity_params()

_REGISTRY: dict[str, RegistryEntry] = {}


def _register(name: str, kind: str, severity_range, fn) -> None:
    if name in _REGISTRY:
        raise RegistryError(f"duplicate registration: {name}")
    _REGISTRY[name] = RegistryEntry(name, kind, severity_range, fn)


for _name in BASE_OPS:
    _register(_name, KIND_AUGMENTATION, None, OP_FUNCTIONS[_name])
for _name, _fn in REFERENCE_CORRUPTIONS.items():
    _register(_name, KIND_REFERENCE, (1, 5), _fn)
for _name, _fn in EXTENDED_CORRUPTIONS.items():
    _register(_name, KIND_CBAR, (1, 10), _fn)


def registry_list(kind: Optional[str] = None) -> list[RegistryEntry]:
    """All registered transforms, optionally filtered by kind."""
    entries = list(_REGISTRY.values())
    if kind is not None:
        entries = [e for e in entries if e.kind == kind]
    return entries


def get_entry(name: str) -> RegistryEntry:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise RegistryError(f"unknown transform: {name!r}") from None


def severity_params(name: str, severity: int) -> dict:
    """Resolve the per-severity parameter dict for a corruption."""
    entry = get_entry(name)
    if entry.kind == KIND_AUGMENTATION:
        raise RegistryError(f"{name} is an augmentation and has no severity table")
    section = "reference" if entry.kind == KIND_REFERENCE else "extended"
    table = _SEVERITY_TABLES[section][name]
    lo, hi = entry.severity_range
    if not (isinstance(severity, (int, np.integer)) and lo <= severity <= hi):
        raise DomainError(f"{name}: severity must be in [{lo}, {hi}], got {severity}")
    resolved = {}
    for key, value in table.items():
        resolved[key] = value[severity - 1] if isinstance(value, list) else value
    return resolved


def _check_severity(entry: RegistryEntry, severity) -> None:
    if entry.severity_range is None:
        if severity is not None:
            raise DomainError(f"{entry.name}: augmentations take no severity")
        return
    lo, hi = entry.severity_range
    if severity is None or not (
        isinstance(severity, (int, np.integer)) and lo <= severity <= hi
    ):
        raise DomainError(
            f"{entry.name}: severity must be in [{lo}, {hi}], got {severity}"
        )


def apply_transform(spec: TransformSpec, img: np.ndarray) -> np.ndarray:
    """Apply a registered transform; pure in (spec, img).

    Stochastic corruptions draw from a substream keyed by the spec's seed,
    the transform identity, and the image content digest, so the transform
    is a deterministic function of the image while distinct images (and
    distinct spec seeds) still receive independent randomness.
    """
    entry = get_entry(spec.name)
    _check_severity(entry, spec.severity)
    validate_image(img)
    if entry.kind == KIND_AUGMENTATION:
        params = {"magnitude": 0.5, "sign": 1, **spec.params}
        if params["magnitude"] < 0.0 or params["magnitude"] > 1.0:
            raise DomainError(f"{spec.name}: magnitude must be in [0, 1]")
        if spec.name in SIGNED_OPS and params["sign"] not in (-1, 1):
            raise DomainError(f"{spec.name}: sign must be -1 or +1")
        out = entry.fn(img, params)
    else:
        params = severity_params(spec.name, spec.severity)
        params.update(spec.params)
        stream = rng.generator(
            spec.seed, "apply", spec.name, int(spec.severity), image_digest(img)
        )
        out = entry.fn(img, params, stream)
    return validate_image(np.ascontiguousarray(out, dtype=np.float64))


from .compose import (  # noqa: E402  (depends on the registry above)
    AugmentationScheme,
    SampledAugmentation,
    apply_augmentation,
    enumerate_powerset,
    sample_augmentation,
)
from .render import render_dataset  # noqa: E402

__all__ = [
    "TransformSpec",
    "RegistryEntry",
    "registry_list",
    "get_entry",
    "severity_params",
    "apply_transform",
    "AugmentationScheme",
    "SampledAugmentation",
    "sample_augmentation",
    "apply_augmentation",
    "enumerate_powerset",
    "render_dataset",
    "BASE_OPS",
    "KIND_AUGMENTATION",
    "KIND_REFERENCE",
    "KIND_CBAR",
]
