"""Materialize corrupted datasets as severity-layout directory trees."""

from __future__ import annotations

import json
import os
from typing import Sequence

from .. import rng
from ..errors import DataError
from ..images import list_images, load_image, save_image


def render_dataset(
    input_dir,
    spec_list: Sequence,
    output_dir,
    seed: int,
) -> list[dict]:
    """Apply every spec to every input image and write the output tree.

    Output layout is ``<name>/<severity>/<relative path>`` (augmentation
    specs use severity directory ``0``).  Each (spec, image) pair gets a
    sub-seed derived from (seed, name, severity, relative path), recorded
    in the returned manifest so any single file can be regenerated.
    """
    from . import TransformSpec, apply_transform

    rel_paths = list_images(input_dir)
    manifest = []
    for spec in spec_list:
        severity = spec.severity if spec.severity is not None else 0
        for rel in rel_paths:
            sub_seed = rng.derive_seed(seed, "render", spec.name, severity, rel)
            img = load_image(os.path.join(input_dir, rel))
            out = apply_transform(
                TransformSpec(
                    name=spec.name,
                    severity=spec.severity,
                    seed=sub_seed,
                    params=dict(spec.params),
                ),
                img,
            )
            out_rel = os.path.join(spec.name, str(severity), rel)
            out_path = os.path.join(output_dir, out_rel)
            try:
                os.makedirs(os.path.dirname(out_path), exist_ok=True)
            except OSError as exc:
                raise DataError(f"cannot create output directory: {exc}") from exc
            save_image(out, out_path)
            manifest.append(
                {
                    "name": spec.name,
                    "severity": severity,
                    "input": rel,
                    "output": out_rel.replace(os.sep, "/"),
                    "seed": sub_seed,
                }
            )
    return manifest


def write_manifest(manifest: list[dict], path) -> None:
    """Line-delimited JSON records, one per rendered file."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in manifest:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_manifest(path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
