from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from modules.controller import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, controller
from modules.views.image_io import load_image


def bilevel_args(outdir: Path) -> list[str]:
    return [
        "--pipeline",
        "bilevel",
        "--synthetic",
        "squares-stripes",
        "--seed",
        "7",
        "--out",
        str(outdir),
        "--iters",
        "2",
        "--set",
        "inner_iters=3",
        "--set",
        "size=16",
        "--set",
        "n_dirs_l=3",
        "--set",
        "n_dirs_s=3",
    ]


def test_bilevel_run_is_deterministic(tmp_path: Path):
    assert controller(bilevel_args(tmp_path / "first")) == EXIT_OK
    assert controller(bilevel_args(tmp_path / "second")) == EXIT_OK
    first = (tmp_path / "first" / "manifest.txt").read_bytes()
    second = (tmp_path / "second" / "manifest.txt").read_bytes()
    assert first == second
    assert b"pipeline: bilevel" in first
    phases = [load_image(tmp_path / "first" / f"p_{n}.png") for n in range(3)]
    assert np.allclose(sum(phases), 1.0, atol=3 * 0.5 / 255)
    table = pd.read_csv(tmp_path / "first" / "convergence.csv")
    assert len(table) == 6


def test_seeded_noise_is_reproducible(tmp_path: Path):
    def args(outdir: Path) -> list[str]:
        return [
            "--pipeline",
            "twophase",
            "--synthetic",
            "two-plateau",
            "--out",
            str(outdir),
            "--seed",
            "11",
            "--iters",
            "3",
            "--set",
            "size=16",
            "--set",
            "noise_sigma=0.1",
            "--set",
            "raw_dumps=true",
        ]

    assert controller(args(tmp_path / "a")) == EXIT_OK
    assert controller(args(tmp_path / "b")) == EXIT_OK
    first = np.load(tmp_path / "a" / "f.npy")
    np.testing.assert_array_equal(first, np.load(tmp_path / "b" / "f.npy"))
    assert not np.all(np.isin(first, [0.38, 0.94]))


def test_config_file_with_overrides(tmp_path: Path):
    config = tmp_path / "run.cfg"
    config.write_text(
        "# decomposition only\n"
        "pipeline = dg3pd-only\n"
        "synthetic = three-level\n"
        "size = 16\n"
        "iters = 8\n"
        f"out = {tmp_path / 'from-file'}\n"
    )
    assert controller(["--config", str(config), "--iters", "4"]) == EXIT_OK
    table = pd.read_csv(tmp_path / "from-file" / "convergence.csv")
    assert len(table) == 4
    assert not (tmp_path / "from-file" / "b.png").exists()


def test_input_image(tmp_path: Path):
    image = tmp_path / "in.pgm"
    image.write_bytes(b"P5\n8 8\n255\n" + bytes(range(0, 256, 4)))
    outdir = tmp_path / "out"
    args = ["--pipeline", "sht", "--input", str(image), "--out", str(outdir), "--iters", "5"]
    assert controller(args) == EXIT_OK
    manifest = (outdir / "manifest.txt").read_text()
    assert "shape: 8x8" in manifest


@pytest.mark.parametrize(
    "extra",
    [
        ["--pipeline", "sht", "--synthetic", "two-plateau", "--set", "bogus=1"],
        ["--synthetic", "two-plateau"],
        ["--pipeline", "sht"],
        ["--pipeline", "sht", "--input", "absent.pgm"],
        ["--pipeline", "sht", "--synthetic", "two-plateau", "--set", "seed"],
        ["--pipeline", "sht", "--synthetic", "two-plateau", "--set", "noise_sigma=-1"],
        ["--pipeline", "sht", "--synthetic", "two-plateau", "--log-level", "LOUD"],
    ],
)
def test_settings_errors_exit_with_usage_status(tmp_path: Path, extra):
    outdir = tmp_path / "out"
    assert controller(extra + ["--out", str(outdir)]) == EXIT_USAGE
    assert not outdir.exists()


def test_solver_errors_exit_with_failure_status(tmp_path: Path):
    args = ["--pipeline", "dg3pd-only", "--synthetic", "two-plateau", "--set", "theta=1.5"]
    assert controller(args + ["--out", str(tmp_path / "out")]) == EXIT_FAILURE
