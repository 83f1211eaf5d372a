"""
Command line controller: reads the run settings, builds the input image,
runs the selected pipeline and writes its artifacts.
"""

import argparse
import logging
from collections.abc import Sequence

import numpy as np
from scipy import fft

from .data import config_data
from .data.synthetic import GroundTruth, SyntheticNames, add_gaussian_noise, generate
from .metrics import MAX_PERMUTED_LABELS, pixel_accuracy
from .models.loader import PipelineNames, get_pipeline_class, load_pipeline
from .operators.lattice import Image
from .utils import ImageFormatError, SettingsError
from .views.artifacts import save_components
from .views.image_io import load_image

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    """Command line flags; every flag overrides the matching config file key.

    Returns:
        argparse.ArgumentParser: the parser
    """
    parser = argparse.ArgumentParser(
        description="Decompose a grayscale image into cartoon, texture and residual "
        "and segment it into phases."
    )
    parser.add_argument("--config", help="flat key=value settings file")
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--input", help="PGM or PNG image")
    source.add_argument(
        "--synthetic", choices=[n.value for n in SyntheticNames], help="built-in test image"
    )
    parser.add_argument(
        "--pipeline", choices=[p.value for p in PipelineNames], help="pipeline to run"
    )
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="seed of synthetic features and noise")
    parser.add_argument("--threads", type=int, help="FFT worker count")
    parser.add_argument("--iters", type=int, help="iteration count of the pipeline")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any setting, repeatable",
    )
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return parser


def apply_arguments(args: argparse.Namespace) -> None:
    """Load the config file, then layer the command line flags over it.

    Args:
        args (argparse.Namespace): parsed flags

    Raises:
        SettingsError: if the config file or a --set value is malformed
    """
    if args.config:
        config_data.load_config_file(args.config)
    if args.input is not None:
        config_data.synthetic.reset()
        config_data.input_path.set(args.input)
    if args.synthetic is not None:
        config_data.input_path.reset()
        config_data.synthetic.set(args.synthetic)
    overrides = {
        config_data.pipeline: args.pipeline,
        config_data.out: args.out,
        config_data.seed: args.seed,
        config_data.threads: args.threads,
        config_data.log_level: args.log_level,
    }
    for entry, value in overrides.items():
        if value is not None:
            entry.set(value)
    if args.iters is not None:
        config_data.settings["iters"] = str(args.iters)
    for item in args.set:
        if "=" not in item:
            raise SettingsError(f"Expected KEY=VALUE after --set, got {item!r}")
        config_data.settings.update(config_data.parse_config_text(item))


def configure_logging() -> None:
    """Set up the root handler from the log_level setting.

    Raises:
        SettingsError: if the level name is unknown
    """
    level = config_data.log_level.get().upper()
    if not isinstance(logging.getLevelName(level), int):
        raise SettingsError(f"Unknown log level {level}")
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)


def build_input(rng: np.random.Generator) -> tuple[Image, GroundTruth | None]:
    """Load or generate the input image and add the configured noise.

    Args:
        rng (np.random.Generator): seeded generator of the run

    Raises:
        SettingsError: if the noise level is negative

    Returns:
        tuple[Image, GroundTruth | None]: noisy input and, for synthetic
            images, its known partition
    """
    sigma = config_data.noise_sigma.get()
    if sigma < 0:
        raise SettingsError(f"noise_sigma must be non-negative, got {sigma}")
    truth = None
    name = config_data.synthetic.get()
    if name is not None:
        f, truth = generate(name, config_data.size.get(), rng)
    else:
        f = load_image(config_data.input_path.get())
    return add_gaussian_noise(f, sigma, rng), truth


def run_pipeline() -> dict[str, str]:
    """Run one pipeline from the current settings.

    Raises:
        SettingsError: on missing, unknown or invalid settings
        ImageFormatError: if the input image cannot be read

    Returns:
        dict[str, str]: manifest of the written artifacts
    """
    config_data.check_required()
    name = config_data.pipeline.get()
    pipeline_class = get_pipeline_class(name)
    config_data.check_keys(pipeline_class.params_type.setting_keys())

    threads = config_data.threads.get()
    if threads < 1:
        raise SettingsError(f"threads must be at least 1, got {threads}")

    rng = np.random.default_rng(config_data.seed.get())
    f, truth = build_input(rng)
    model = load_pipeline(name, config_data.settings)
    logger.info("Running %s on a %dx%d image", name, *f.shape)

    with fft.set_workers(threads):
        result = model.run(f)

    labels = result.label_map
    if truth is not None and labels is not None and len(result.labels) <= MAX_PERMUTED_LABELS:
        accuracy = pixel_accuracy(labels, truth.labels)
        logger.info("Pixel accuracy against ground truth: %.4f", accuracy)
    return save_components(result, config_data.out.get(), config_data.raw_dumps.get())


def controller(argv: Sequence[str] | None = None) -> int:
    """Application main function.

    Args:
        argv (Sequence[str] | None, optional): command line arguments.
            Defaults to sys.argv[1:].

    Returns:
        int: 0 on success, 2 on settings or image errors, 1 otherwise
    """
    args = build_parser().parse_args(argv)
    config_data.clear()
    try:
        apply_arguments(args)
        configure_logging()
        run_pipeline()
    except (SettingsError, ImageFormatError) as err:
        logger.error("%s", err)
        return EXIT_USAGE
    except Exception as err:
        logger.error("Run failed: %s", err)
        return EXIT_FAILURE
    return EXIT_OK
