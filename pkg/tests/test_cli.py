import json

import numpy as np
import pytest

from augsim.cbf import read_features, write_features
from augsim.cli import main, parse_corruptions, parse_severities

from conftest import make_8bit_images
from augsim.images import save_image


@pytest.fixture()
def tiny_dataset(tmp_path):
    root = tmp_path / "imgs"
    root.mkdir()
    for i, img in enumerate(make_8bit_images(2, size=16, seed=1)):
        save_image(img, root / f"im{i}.png")
    return root


def test_parse_helpers():
    assert parse_severities("1-3") == [1, 2, 3]
    assert parse_severities("2,5") == [2, 5]
    assert len(parse_corruptions("reference")) == 15
    assert len(parse_corruptions("extended")) == 15
    assert parse_corruptions("fog,ripple") == ["fog", "ripple"]
    assert parse_corruptions("") == []


def test_render_reference_on_two_images(tiny_dataset, tmp_path):
    out = tmp_path / "out"
    manifest = tmp_path / "manifest.jsonl"
    code = main([
        "--seed", "3", "render",
        "--input", str(tiny_dataset), "--output", str(out),
        "--corruptions", "reference", "--severities", "1-5",
        "--manifest", str(manifest),
    ])
    assert code == 0
    files = sorted(out.rglob("*.png"))
    assert len(files) == 15 * 5 * 2 == 150
    assert len(manifest.read_text().splitlines()) == 150


def test_render_empty_corruptions_is_noop(tiny_dataset, tmp_path):
    code = main([
        "render", "--input", str(tiny_dataset), "--output", str(tmp_path / "o"),
        "--corruptions", "",
    ])
    assert code == 0
    assert not (tmp_path / "o").exists()


def test_render_is_reproducible(tiny_dataset, tmp_path):
    args = [
        "--seed", "5", "render", "--input", str(tiny_dataset),
        "--corruptions", "checkerboard", "--severities", "2",
    ]
    assert main(args + ["--output", str(tmp_path / "a")]) == 0
    assert main(args + ["--output", str(tmp_path / "b")]) == 0
    files_a = sorted((tmp_path / "a").rglob("*.png"))
    files_b = sorted((tmp_path / "b").rglob("*.png"))
    assert [f.read_bytes() for f in files_a] == [f.read_bytes() for f in files_b]


def test_featurize_identity_and_rerun_identical(tiny_dataset, tmp_path):
    out1 = tmp_path / "f1.cbf"
    out2 = tmp_path / "f2.cbf"
    args = [
        "--seed", "9", "featurize", "--images", str(tiny_dataset),
        "--n-images", "2", "--identity",
        "--corruptions", "contrast", "--severities", "1-2",
        "--corruption-samples", "2",
    ]
    assert main(args + ["--output", str(out1)]) == 0
    assert main(args + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    items, fp = read_features(out1)
    ids = [i for i, _ in items]
    assert ids[0] == "identity"
    assert "contrast@1" in ids and "contrast@2" in ids
    identity_vec = items[0][1]
    assert np.abs(identity_vec).max() < 1e-9
    assert fp.startswith("builtin-pixelstats/")


def test_featurize_powerset_row_count(tiny_dataset, tmp_path):
    out = tmp_path / "p.cbf"
    code = main([
        "--seed", "2", "featurize", "--images", str(tiny_dataset),
        "--n-images", "2", "--schemes", "powerset:4", "--aug-samples", "3",
        "--output", str(out),
    ])
    assert code == 0
    items, _ = read_features(out)
    assert len(items) == 4 * 3


def test_msd_and_mmd_commands(tmp_path, capsys):
    samples = tmp_path / "s.cbf"
    centers = tmp_path / "c.cbf"
    write_features(samples, [("a#0", np.array([3.0, 4.0])), ("a#1", np.array([6.0, 8.0]))], "fp")
    write_features(centers, [("corr@1", np.array([0.0, 0.0]))], "fp")
    assert main(["msd", "--samples", str(samples), "--centers", str(centers)]) == 0
    out = capsys.readouterr().out
    assert "corr@1,5," in out
    assert main(["mmd", "--features-a", str(samples), "--features-b", str(samples)]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_msd_fingerprint_mismatch_exit_code(tmp_path):
    samples = tmp_path / "s.cbf"
    centers = tmp_path / "c.cbf"
    write_features(samples, [("a#0", np.zeros(2))], "fp-one")
    write_features(centers, [("c@1", np.zeros(2))], "fp-two")
    assert main(["msd", "--samples", str(samples), "--centers", str(centers)]) == 3


def test_correlate_monotone_synthetic(tmp_path, capsys):
    # error strictly increases with distance from the center -> rho = 1
    samples = tmp_path / "s.cbf"
    centers = tmp_path / "c.cbf"
    rows = []
    errors = ["scheme,corruption,error"]
    for i in range(5):
        rows.append((f"s{i}#0", np.array([float(i + 1), 0.0])))
        errors.append(f"s{i},corrA,{10.0 + 5.0 * i}")
    write_features(samples, rows, "fp")
    write_features(centers, [("corrA", np.array([0.0, 0.0]))], "fp")
    table = tmp_path / "err.csv"
    table.write_text("\n".join(errors) + "\n")
    plot = tmp_path / "plot.csv"
    code = main([
        "correlate", "--samples", str(samples), "--centers", str(centers),
        "--error-table", str(table), "--plot-data", str(plot),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "corrA,1.0000,5" in out
    assert len(plot.read_text().splitlines()) == 6  # header + 5 schemes


def test_correlate_antimonotone(tmp_path, capsys):
    samples = tmp_path / "s.cbf"
    centers = tmp_path / "c.cbf"
    rows = []
    errors = ["scheme,corruption,error"]
    for i in range(4):
        rows.append((f"s{i}#0", np.array([float(i + 1), 0.0])))
        errors.append(f"s{i},corrA,{50.0 - 5.0 * i}")
    write_features(samples, rows, "fp")
    write_features(centers, [("corrA", np.array([0.0, 0.0]))], "fp")
    table = tmp_path / "err.csv"
    table.write_text("\n".join(errors) + "\n")
    assert main([
        "correlate", "--samples", str(samples), "--centers", str(centers),
        "--error-table", str(table),
    ]) == 0
    assert "corrA,-1.0000,4" in capsys.readouterr().out


def test_rank_and_subset_commands(tmp_path, capsys):
    samples = tmp_path / "s.cbf"
    centers = tmp_path / "c.cbf"
    write_features(
        samples,
        [("p0", np.array([1.0])), ("p1", np.array([2.0])),
         ("p2", np.array([8.0])), ("p3", np.array([9.0]))],
        "fp",
    )
    write_features(centers, [("c0", np.array([0.0])), ("c1", np.array([10.0]))], "fp")
    ordered_path = tmp_path / "ordered.txt"
    assert main([
        "rank-augs", "--samples", str(samples), "--centers", str(centers),
        "--output", str(ordered_path),
    ]) == 0
    assert ordered_path.read_text().splitlines() == ["p0", "p3", "p1", "p2"]
    assert main([
        "--seed", "1", "subset", "--ordered", str(ordered_path),
        "--k", "2", "--mode", "closest",
    ]) == 0
    assert capsys.readouterr().out.splitlines() == ["p0", "p3"]


def test_featurize_independent_of_jobs(tiny_dataset, tmp_path):
    out1 = tmp_path / "j1.cbf"
    out4 = tmp_path / "j4.cbf"
    base = [
        "--seed", "8", "featurize", "--images", str(tiny_dataset),
        "--n-images", "2", "--corruptions", "brightness,contrast",
        "--severities", "1-3", "--corruption-samples", "2",
        "--schemes", "powerset:3", "--aug-samples", "2",
    ]
    assert main(base + ["--jobs", "1", "--output", str(out1)]) == 0
    assert main(base + ["--jobs", "4", "--output", str(out4)]) == 0
    assert out1.read_bytes() == out4.read_bytes()


def test_featurize_paired_centers(tiny_dataset, tmp_path):
    out = tmp_path / "paired.cbf"
    code = main([
        "--seed", "4", "featurize", "--images", str(tiny_dataset),
        "--n-images", "2", "--corruptions", "brightness", "--severities", "1",
        "--corruption-samples", "5", "--paired", "--output", str(out),
    ])
    assert code == 0
    items, _ = read_features(out)
    assert [i for i, _ in items] == ["brightness@1"]


def test_ci_mode_requires_seed(tiny_dataset, tmp_path):
    code = main([
        "--ci", "render", "--input", str(tiny_dataset),
        "--output", str(tmp_path / "x"), "--corruptions", "fog",
    ])
    assert code == 2


def test_toy_mix_alpha_one_is_near_zero(capsys):
    assert main([
        "--seed", "4", "toy-mix", "--alphas", "1.0", "--samples", "2000",
    ]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    alpha, mmd_val, msd_val = lines[-1].split(",")
    # "near zero" relative to the unit cluster separation
    assert float(mmd_val) < 0.05
    assert float(msd_val) < 0.05


def test_build_benchmark_command(tmp_path, capsys):
    from augsim.builder import write_error_table
    from test_builder import planted_inputs

    new_table, ref_table, new_centers, ref_centers, planted = planted_inputs(seed=7)
    new_path = tmp_path / "new.csv"
    ref_path = tmp_path / "ref.csv"
    write_error_table(new_path, new_table)
    write_error_table(ref_path, ref_table)
    centers_path = tmp_path / "centers.cbf"
    refcenters_path = tmp_path / "refcenters.cbf"
    write_features(
        centers_path,
        [(f"{n}@{s}", v) for (n, s), v in sorted(new_centers.items())],
        "fp",
    )
    write_features(
        refcenters_path,
        [(f"ref{i:02d}", v) for i, v in enumerate(ref_centers)],
        "fp",
    )
    manifest = tmp_path / "manifest.json"
    code = main([
        "--seed", "13", "build-benchmark",
        "--error-table", str(new_path),
        "--reference-error-table", str(ref_path),
        "--centers", str(centers_path),
        "--reference-centers", str(refcenters_path),
        "--candidates", "200", "--runs", "2",
        "--output", str(manifest),
    ])
    assert code == 0
    data = json.loads(manifest.read_text())
    assert len(data["corruptions"]) == 10
    assert {row["name"] for row in data["corruptions"]} == planted
    for row in data["corruptions"]:
        assert len(row["severities"]) == 5


def test_build_benchmark_infeasible_exit_4(tmp_path):
    from augsim.builder import ErrorTable, write_error_table

    names = [f"n{i}" for i in range(10)]
    ref_names = [f"r{i}" for i in range(15)]
    # spreads match the reference, but the error level is ~35 points off:
    # groups form, yet no candidate can satisfy the 1% constraint
    new_table = ErrorTable(
        entries={(n, s): 90.0 + 1.0 * s for n in names for s in range(1, 11)}
    )
    ref_table = ErrorTable(
        entries={(n, s): 53.0 + s for n in ref_names for s in range(1, 6)}
    )
    new_path, ref_path = tmp_path / "n.csv", tmp_path / "r.csv"
    write_error_table(new_path, new_table)
    write_error_table(ref_path, ref_table)
    centers_path = tmp_path / "c.cbf"
    refc_path = tmp_path / "rc.cbf"
    write_features(
        centers_path,
        [(f"{n}@{s}", np.ones(3)) for n in names for s in range(1, 11)],
        "fp",
    )
    write_features(refc_path, [("r0", np.zeros(3))], "fp")
    code = main([
        "--seed", "1", "build-benchmark",
        "--error-table", str(new_path),
        "--reference-error-table", str(ref_path),
        "--centers", str(centers_path),
        "--reference-centers", str(refc_path),
        "--candidates", "20", "--runs", "1",
        "--output", str(tmp_path / "m.json"),
    ])
    assert code == 4


def test_config_file_defaults(tiny_dataset, tmp_path):
    config = tmp_path / "cfg.yaml"
    config.write_text("seed: 11\nn_images: 2\n")
    out = tmp_path / "f.cbf"
    code = main([
        "--config", str(config), "featurize", "--images", str(tiny_dataset),
        "--identity", "--output", str(out),
    ])
    assert code == 0
    items, _ = read_features(out)
    assert len(items) == 1


def test_config_unknown_key_rejected(tmp_path):
    config = tmp_path / "cfg.yaml"
    config.write_text("seeed: 1\n")
    code = main(["--config", str(config), "toy-mix", "--alphas", "0.5"])
    assert code == 2
