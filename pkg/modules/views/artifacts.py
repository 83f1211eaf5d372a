import logging
from pathlib import Path

import numpy as np

from modules.data.result_data import SegmentationResult
from modules.metrics import extract_contours
from modules.operators.lattice import Image

from .image_io import save_image

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.txt"
CONVERGENCE_NAME = "convergence.csv"


def component_images(result: SegmentationResult) -> dict[str, tuple[Image, bool]]:
    """Images to emit for a run, keyed by file stem.

    Args:
        result (SegmentationResult): finished run

    Returns:
        dict[str, tuple[Image, bool]]: image and whether it is signed
    """
    images = {
        "f": (result.f, False),
        "u": (result.u, False),
        "v": (result.v, True),
        "v_bin": (result.v_bin, False),
        "eps": (result.eps, True),
    }
    if result.phases is not None:
        images["b"] = (result.b, True)
        for n, p_n in enumerate(result.phases):
            images[f"p_{n}"] = (p_n, False)
        images["f_seg"] = (result.f_seg, False)
    if result.labels is not None:
        contours = extract_contours(result.labels)
        images["contours"] = (np.where(contours > 0, 1.0, result.u), False)
    return images


def format_manifest(manifest: dict[str, str]) -> str:
    return "".join(f"{key}: {value}\n" for key, value in manifest.items())


def save_components(
    result: SegmentationResult, outdir: str | Path, raw_dumps: bool = False
) -> dict[str, str]:
    """Write component images, the manifest and the convergence table.

    The directory is created when its parent exists. Files written before
    a failure are removed.

    Args:
        result (SegmentationResult): finished run
        outdir (str | Path): destination directory
        raw_dumps (bool, optional): also write full precision .npy arrays.
            Defaults to False.

    Raises:
        FileNotFoundError: if neither outdir nor its parent exists
        OSError: if a write fails

    Returns:
        dict[str, str]: the manifest fields
    """
    outdir = Path(outdir)
    created = False
    if not outdir.exists():
        if not outdir.parent.exists():
            raise FileNotFoundError(f"Output parent directory does not exist: {outdir.parent}")
        outdir.mkdir()
        created = True

    written: list[Path] = []
    try:
        for stem, (image, signed) in component_images(result).items():
            path = outdir / f"{stem}.png"
            written.append(path)
            save_image(path, image, signed=signed)
            if raw_dumps:
                raw_path = outdir / f"{stem}.npy"
                written.append(raw_path)
                np.save(raw_path, image)

        manifest = result.manifest()
        manifest_path = outdir / MANIFEST_NAME
        written.append(manifest_path)
        manifest_path.write_text(format_manifest(manifest), encoding="utf-8")

        convergence_path = outdir / CONVERGENCE_NAME
        written.append(convergence_path)
        result.history.to_frame().to_csv(convergence_path, index=False)
    except Exception:
        logger.error("Writing artifacts to %s failed, removing partial output", outdir)
        for path in written:
            path.unlink(missing_ok=True)
        if created:
            outdir.rmdir()
        raise

    logger.info("Wrote %d artifacts to %s", len(written), outdir)
    return manifest
