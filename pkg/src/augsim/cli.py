"""Command-line surface binding the pipeline end to end.

Subcommands: render, featurize, msd, mmd, correlate, rank-augs, subset,
variance-probe, build-benchmark, toy-mix.  Every command is deterministic
given (config, seed) and needs no network.  Exit codes: 0 success,
2 config error, 3 data/format error, 4 feasibility error.

Defaults can be set in a YAML config file (flat mapping, same names as
the long flags); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import yaml

from . import rng
from .builder import (
    build_benchmark,
    read_error_table,
    write_benchmark_manifest,
)
from .cbf import read_features, write_features
from .distances import (
    SampleSet,
    mmd_to_center,
    msd,
    rank_augmentations,
    select_subset,
    spearman,
    variance_probe,
)
from .errors import AugsimError, ConfigError, DataError, DomainError
from .features import (
    BuiltinExtractor,
    FileExtractor,
    corruption_center,
    featurize_transform,
    write_transform_features,
)
from .images import sample_subset
from .transforms import (
    KIND_CBAR,
    KIND_REFERENCE,
    TransformSpec,
    enumerate_powerset,
    registry_list,
    render_dataset,
    sample_augmentation,
)
from .transforms.compose import scheme_key
from .transforms.render import write_manifest

DEFAULTS = {
    "seed": None,
    "jobs": 1,
    "n_images": 100,
    "corruption_samples": 100,
    "aug_samples": 100,
    "candidates": 100000,
    "tolerance": 1.0,
    "spread_band": 0.5,
    "runs": 5,
    "extractor": "builtin",
}


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def resolve(args, config: dict, key: str):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config and config[key] is not None:
        return config[key]
    return DEFAULTS.get(key)


def resolve_seed(args, config) -> int:
    seed = resolve(args, config, "seed")
    if seed is None:
        if args.ci:
            raise ConfigError("--seed is mandatory in CI mode")
        seed = 0
    return rng.check_seed(int(seed))


def make_extractor(selector: str):
    if selector == "builtin":
        return BuiltinExtractor()
    if selector.startswith("builtin:"):
        grid, bands = selector.split(":", 1)[1].split(",")
        return BuiltinExtractor(grid=int(grid), bands=int(bands))
    if selector.startswith("file:"):
        return FileExtractor(selector.split(":", 1)[1])
    raise ConfigError(f"unknown extractor selector: {selector!r}")


def parse_severities(text: str) -> list[int]:
    """'1-5' or '2,4,6' -> list of ints."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def parse_corruptions(text: str) -> list[str]:
    """Corruption names, or the family aliases 'reference'/'extended'."""
    if text.strip() == "":
        return []
    names = []
    for part in text.split(","):
        part = part.strip()
        if part == "reference":
            names.extend(e.name for e in registry_list(KIND_REFERENCE))
        elif part == "extended":
            names.extend(e.name for e in registry_list(KIND_CBAR))
        elif part:
            names.append(part)
    return names


def corruption_specs(names: list[str], severities: list[int], seed: int):
    from .transforms import get_entry

    specs = []
    for name in names:
        entry = get_entry(name)
        if entry.severity_range is None:
            specs.append(
                TransformSpec(name=name, seed=rng.derive_seed(seed, "spec", name, 0))
            )
            continue
        lo, hi = entry.severity_range
        for sev in severities:
            if not lo <= sev <= hi:
                continue
            specs.append(
                TransformSpec(
                    name=name, severity=sev, seed=rng.derive_seed(seed, "spec", name, sev)
                )
            )
    return specs


def _parallel(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# --- subcommands ---------------------------------------------------------


def cmd_render(args, config) -> int:
    seed = resolve_seed(args, config)
    names = parse_corruptions(args.corruptions)
    if not names:
        return 0  # empty list is an explicit no-op
    severities = parse_severities(args.severities)
    specs = corruption_specs(names, severities, seed)
    manifest = render_dataset(args.input, specs, args.output, seed)
    if args.manifest:
        write_manifest(manifest, args.manifest)
    print(f"rendered {len(manifest)} files to {args.output}")
    return 0


def cmd_featurize(args, config) -> int:
    seed = resolve_seed(args, config)
    jobs = int(resolve(args, config, "jobs"))
    extractor = make_extractor(resolve(args, config, "extractor"))
    n_images = int(resolve(args, config, "n_images"))
    subset = sample_subset(args.images, n_images, rng.derive_seed(seed, "featurize-subset"))
    rows = []

    if args.identity:
        feat = featurize_transform(extractor, None, subset, transform_id="identity")
        rows.append((feat.transform_id, feat.vector))

    if args.corruptions:
        names = parse_corruptions(args.corruptions)
        severities = parse_severities(args.severities)
        n_samples = int(resolve(args, config, "corruption_samples"))
        pairs = [
            (name, sev)
            for name, sev in (
                (n, s)
                for n in names
                for s in severities
            )
        ]

        def center_row(pair):
            name, sev = pair
            vec = corruption_center(
                extractor, name, sev, subset, n_samples,
                seed=rng.derive_seed(seed, "center", name, sev),
                paired=args.paired,
            )
            return (f"{name}@{sev}", vec)

        rows.extend(_parallel(center_row, pairs, jobs))

    if args.schemes:
        schemes = enumerate_powerset()
        if args.schemes != "powerset":
            if args.schemes.startswith("powerset:"):
                count = int(args.schemes.split(":", 1)[1])
                schemes = schemes[:count]
            else:
                raise ConfigError(f"unknown scheme selector: {args.schemes!r}")
        n_aug = int(resolve(args, config, "aug_samples"))

        def scheme_rows(indexed):
            index, scheme = indexed
            key = scheme_key(scheme)
            out = []
            for k in range(n_aug):
                sampled = sample_augmentation(
                    scheme, seed=rng.derive_seed(seed, "aug", index, k)
                )
                feat = featurize_transform(
                    extractor, sampled, subset, transform_id=f"{key}#{k}"
                )
                out.append((feat.transform_id, feat.vector))
            return out

        for chunk in _parallel(scheme_rows, list(enumerate(schemes)), jobs):
            rows.extend(chunk)

    write_features(args.output, rows, fingerprint=extractor.fingerprint)
    print(f"wrote {len(rows)} feature rows to {args.output}")
    return 0


def _load_sample_set(path) -> SampleSet:
    items, fingerprint = read_features(path)
    if not items:
        raise DataError(f"{path}: no feature rows")
    return SampleSet.from_items(items, fingerprint=fingerprint)


def cmd_msd(args, config) -> int:
    samples = _load_sample_set(args.samples)
    centers, center_fp = read_features(args.centers)
    if args.center_id is not None:
        centers = [(i, v) for i, v in centers if i == args.center_id]
        if not centers:
            raise DataError(f"center id {args.center_id!r} not found")
    print("center,msd,argmin_id,samples")
    for center_id, vec in centers:
        report = msd(samples, vec, center_fingerprint=center_fp)
        argmin_id = samples.ids[report.argmin] if samples.ids else str(report.argmin)
        print(f"{center_id},{report.msd:.6g},{argmin_id},{report.sample_count}")
    return 0


def cmd_mmd(args, config) -> int:
    set_a = _load_sample_set(args.features_a)
    set_b = _load_sample_set(args.features_b)
    from .distances import mmd as mmd_fn

    print(f"{mmd_fn(set_a, set_b):.6g}")
    return 0


def _group_by_scheme(items):
    groups: dict[str, list[np.ndarray]] = {}
    for item_id, vec in items:
        key = item_id.rsplit("#", 1)[0]
        groups.setdefault(key, []).append(vec)
    return groups


def cmd_correlate(args, config) -> int:
    sample_items, sample_fp = read_features(args.samples)
    center_items, center_fp = read_features(args.centers)
    if sample_fp and center_fp and sample_fp != center_fp:
        raise DataError(f"fingerprint mismatch: {sample_fp!r} vs {center_fp!r}")
    errors = _read_scheme_errors(args.error_table)
    groups = _group_by_scheme(sample_items)
    plot_rows = []
    summary = []
    for corruption_id, center in center_items:
        xs, ys = [], []
        for scheme, vectors in sorted(groups.items()):
            if (scheme, corruption_id) not in errors:
                continue
            report = msd(SampleSet(np.stack(vectors)), center)
            xs.append(report.msd)
            ys.append(errors[(scheme, corruption_id)])
            plot_rows.append((corruption_id, scheme, report.msd, ys[-1]))
        if len(xs) >= 2:
            rho = spearman(xs, ys)
            summary.append((corruption_id, rho, len(xs)))
    print("corruption,spearman_rho,schemes")
    for corruption_id, rho, n in summary:
        print(f"{corruption_id},{rho:.4f},{n}")
    if args.plot_data:
        with open(args.plot_data, "w", encoding="utf-8") as fh:
            fh.write("corruption,scheme,msd,error\n")
            for corruption_id, scheme, value, err in plot_rows:
                fh.write(f"{corruption_id},{scheme},{value:.6g},{err}\n")
    return 0


def _read_scheme_errors(path) -> dict[tuple[str, str], float]:
    """Rows `scheme,corruption,error` keyed on text columns."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read error table {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("scheme,"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise DataError(f"{path}:{lineno}: expected scheme,corruption,error")
        try:
            out[(parts[0], parts[1])] = float(parts[2])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
    return out


def cmd_rank_augs(args, config) -> int:
    samples = _load_sample_set(args.samples)
    centers, center_fp = read_features(args.centers)
    if samples.fingerprint and center_fp and samples.fingerprint != center_fp:
        raise DataError(f"fingerprint mismatch: {samples.fingerprint!r} vs {center_fp!r}")
    order = rank_augmentations(samples, np.stack([v for _, v in centers]))
    lines = [samples.ids[i] if samples.ids else str(i) for i in order]
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        print("\n".join(lines))
    return 0


def cmd_subset(args, config) -> int:
    seed = resolve_seed(args, config)
    with open(args.ordered, encoding="utf-8") as fh:
        ordered = [line.strip() for line in fh if line.strip()]
    chosen = select_subset(ordered, args.k, args.mode, seed=seed)
    print("\n".join(chosen))
    return 0


def cmd_variance_probe(args, config) -> int:
    seed = resolve_seed(args, config)
    extractor = make_extractor(resolve(args, config, "extractor"))
    counts = [int(c) for c in str(args.image_counts).split(",")]
    pool = sample_subset(args.images, args.pool_size, rng.derive_seed(seed, "probe-pool"))
    print("n_images,std_pct_of_mean")
    for n in counts:
        pct = variance_probe(
            extractor,
            (args.corruption, args.severity),
            pool,
            n_images=n,
            n_corruptions=int(resolve(args, config, "corruption_samples")),
            repeats=args.repeats,
            seed=seed,
        )
        print(f"{n},{pct:.3f}")
    return 0


def cmd_build_benchmark(args, config) -> int:
    seed = resolve_seed(args, config)
    new_table = read_error_table(args.error_table)
    reference_table = read_error_table(args.reference_error_table)
    center_items, center_fp = read_features(args.centers)
    ref_items, ref_fp = read_features(args.reference_centers)
    if center_fp and ref_fp and center_fp != ref_fp:
        raise DataError(f"fingerprint mismatch: {center_fp!r} vs {ref_fp!r}")
    new_centers = {}
    for item_id, vec in center_items:
        name, _, sev = item_id.rpartition("@")
        if not name:
            raise DataError(f"center id {item_id!r} is not of the form name@severity")
        new_centers[(name, int(sev))] = vec
    result = build_benchmark(
        new_table,
        reference_table,
        new_centers,
        np.stack([v for _, v in ref_items]),
        n_candidates=int(resolve(args, config, "candidates")),
        tolerance=float(resolve(args, config, "tolerance")),
        n_runs=int(resolve(args, config, "runs")),
        seed=seed,
        spread_band=float(resolve(args, config, "spread_band")),
    )
    write_benchmark_manifest(args.output, result)
    print(json.dumps(result.manifest()["corruptions"], indent=2))
    print(
        f"benchmark avg error {result.selected.avg_error:.3f} "
        f"vs reference {result.reference_avg:.3f}"
    )
    return 0


def cmd_toy_mix(args, config) -> int:
    seed = resolve_seed(args, config)
    alphas = [float(a) for a in str(args.alphas).split(",")]
    dim, sep, sigma = args.dim, args.separation, args.sigma
    n = args.samples
    n_center = int(resolve(args, config, "corruption_samples"))
    mu_far = np.zeros(dim)
    mu_far[0] = sep
    print("alpha,mmd,msd")
    rows = []
    for alpha in alphas:
        stream = rng.generator(seed, "toy-mix", f"{alpha:.6f}")
        picks = stream.random(n) < alpha
        samples = stream.standard_normal((n, dim)) * sigma
        samples[~picks] += mu_far
        center = (stream.standard_normal((n_center, dim)) * sigma).mean(axis=0)
        sset = SampleSet(samples)
        mmd_val = mmd_to_center(sset, center)
        msd_val = msd(sset, center).msd
        rows.append((alpha, mmd_val, msd_val))
        print(f"{alpha},{mmd_val:.6g},{msd_val:.6g}")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write("alpha,mmd,msd\n")
            for alpha, m1, m2 in rows:
                fh.write(f"{alpha},{m1:.6g},{m2:.6g}\n")
    return 0


# --- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="augsim",
        description="Perceptual augmentation/corruption similarity toolkit",
    )
    parser.add_argument("--config", help="YAML config file with flag defaults")
    parser.add_argument("--seed", type=int, help="global random seed")
    parser.add_argument("--jobs", type=int, help="worker count (results independent of it)")
    parser.add_argument("--ci", action="store_true", help="require an explicit --seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="materialize corrupted datasets")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--corruptions", default="", help="names, 'reference', or 'extended'")
    p.add_argument("--severities", default="1-5")
    p.add_argument("--manifest")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("featurize", help="embed transforms into the feature space")
    p.add_argument("--images", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--n-images", dest="n_images", type=int)
    p.add_argument("--corruption-samples", dest="corruption_samples", type=int)
    p.add_argument("--aug-samples", dest="aug_samples", type=int)
    p.add_argument("--extractor")
    p.add_argument("--corruptions", default="", help="write corruption-center rows")
    p.add_argument("--severities", default="1-5")
    p.add_argument("--schemes", default="", help="'powerset' or 'powerset:N'")
    p.add_argument("--identity", action="store_true", help="include the identity row")
    p.add_argument("--paired", action="store_true",
                   help="jointly sample (image, corruption) pairs for centers")
    p.set_defaults(fn=cmd_featurize)

    p = sub.add_parser("msd", help="nearest-sample distance to each center")
    p.add_argument("--samples", required=True)
    p.add_argument("--centers", required=True)
    p.add_argument("--center-id", dest="center_id")
    p.set_defaults(fn=cmd_msd)

    p = sub.add_parser("mmd", help="distance between two sample means")
    p.add_argument("--features-a", dest="features_a", required=True)
    p.add_argument("--features-b", dest="features_b", required=True)
    p.set_defaults(fn=cmd_mmd)

    p = sub.add_parser("correlate", help="per-corruption MSD/error rank correlation")
    p.add_argument("--samples", required=True, help="augmentation sample features")
    p.add_argument("--centers", required=True, help="corruption center features")
    p.add_argument("--error-table", dest="error_table", required=True,
                   help="rows scheme,corruption,error")
    p.add_argument("--plot-data", dest="plot_data", help="write x=MSD,y=error rows")
    p.set_defaults(fn=cmd_correlate)

    p = sub.add_parser("rank-augs", help="round-robin nearest ordering to centers")
    p.add_argument("--samples", required=True)
    p.add_argument("--centers", required=True)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_rank_augs)

    p = sub.add_parser("subset", help="take k of a ranked list")
    p.add_argument("--ordered", required=True, help="line-delimited ids")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=["random", "closest", "farthest"], required=True)
    p.set_defaults(fn=cmd_subset)

    p = sub.add_parser("variance-probe", help="distance std/mean vs sample budgets")
    p.add_argument("--images", required=True)
    p.add_argument("--corruption", required=True)
    p.add_argument("--severity", type=int, required=True)
    p.add_argument("--image-counts", dest="image_counts", default="25,100,400")
    p.add_argument("--pool-size", dest="pool_size", type=int, default=400)
    p.add_argument("--repeats", type=int, default=8)
    p.add_argument("--extractor")
    p.add_argument("--corruption-samples", dest="corruption_samples", type=int)
    p.set_defaults(fn=cmd_variance_probe)

    p = sub.add_parser("build-benchmark", help="synthesize a dissimilar benchmark")
    p.add_argument("--error-table", dest="error_table", required=True)
    p.add_argument("--reference-error-table", dest="reference_error_table", required=True)
    p.add_argument("--centers", required=True, help="new corruption centers (name@severity)")
    p.add_argument("--reference-centers", dest="reference_centers", required=True)
    p.add_argument("--candidates", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--runs", type=int)
    p.add_argument("--spread-band", dest="spread_band", type=float)
    p.add_argument("--output", required=True, help="benchmark manifest (JSON)")
    p.set_defaults(fn=cmd_build_benchmark)

    p = sub.add_parser("toy-mix", help="mixture experiment: MMD grows, MSD stays low")
    p.add_argument("--alphas", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--separation", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--corruption-samples", dest="corruption_samples", type=int)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_toy_mix)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        return args.fn(args, config)
    except AugsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
