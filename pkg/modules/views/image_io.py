"""
Grayscale image codecs: 8-bit PGM (P2 ASCII and P5 binary) and PNG.

Loaded intensities are mapped to [0, 1].
"""

import logging
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from modules.operators.lattice import Image, as_image
from modules.utils import ImageFormatError

logger = logging.getLogger(__name__)

PGM_MAGICS = (b"P2", b"P5")
PNG_MAGIC = b"\x89PNG"
MAX_8BIT = 255
MAX_16BIT = 65535
PNG_16BIT_MODES = ("I;16", "I;16B", "I;16L", "I")
PNG_8BIT_MODES = ("1", "L", "LA", "P", "RGB", "RGBA")
SIGNED_OFFSET = 0.5


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-separated header token, skipping '#' comments."""
    while pos < len(data):
        if data[pos : pos + 1].isspace():
            pos += 1
        elif data[pos : pos + 1] == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        else:
            break
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise ImageFormatError(f"PGM header truncated at byte offset {pos}")
    return data[start:pos], pos


def _header_int(data: bytes, pos: int, name: str) -> tuple[int, int]:
    token, end = _read_token(data, pos)
    try:
        value = int(token)
    except ValueError as err:
        raise ImageFormatError(f"Invalid PGM {name} {token!r} at byte offset {end - len(token)}") from err
    if value <= 0:
        raise ImageFormatError(f"PGM {name} must be positive, got {value}")
    return value, end


def decode_pgm(data: bytes) -> Image:
    """Decode an 8-bit P2 or P5 PGM.

    Args:
        data (bytes): file content

    Raises:
        ImageFormatError: if the header is invalid, the depth is not 8-bit or
            the pixel data ends early

    Returns:
        Image: intensities divided by the file's maximum value
    """
    magic = data[:2]
    if magic not in PGM_MAGICS:
        raise ImageFormatError(f"Not a grayscale PGM, magic {magic!r}")
    width, pos = _header_int(data, 2, "width")
    height, pos = _header_int(data, pos, "height")
    maxval, pos = _header_int(data, pos, "maxval")
    if maxval > MAX_8BIT:
        raise ImageFormatError(f"Only 8-bit PGM is supported, maxval is {maxval}")
    count = width * height

    if magic == b"P5":
        start = pos + 1
        if len(data) < start + count:
            raise ImageFormatError(
                f"PGM pixel data truncated at byte offset {len(data)}, expected {start + count} bytes"
            )
        pixels = np.frombuffer(data, dtype=np.uint8, count=count, offset=start)
    else:
        values = []
        for _ in range(count):
            try:
                token, pos = _read_token(data, pos)
            except ImageFormatError as err:
                raise ImageFormatError(
                    f"PGM pixel data truncated at byte offset {pos}, "
                    f"read {len(values)} of {count} values"
                ) from err
            if not token.isdigit():
                raise ImageFormatError(f"Invalid PGM pixel {token!r} at byte offset {pos - len(token)}")
            values.append(int(token))
        pixels = np.asarray(values)

    if np.any(pixels > maxval):
        raise ImageFormatError(f"PGM pixel value exceeds maxval {maxval}")
    return pixels.reshape(height, width).astype(np.float64) / maxval


def _decode_png(png: PILImage.Image, path: Path) -> np.ndarray:
    if png.mode in PNG_16BIT_MODES:
        return np.asarray(png, dtype=np.float64) / MAX_16BIT
    if png.mode in PNG_8BIT_MODES:
        return np.asarray(png.convert("L"), dtype=np.float64) / MAX_8BIT
    raise ImageFormatError(f"Unsupported PNG mode {png.mode!r} in {path}")


def load_image(path: str | Path) -> Image:
    """Load a grayscale image.

    Color PNGs are converted by luminance, 16-bit PNGs keep their full depth.

    Args:
        path (str | Path): PGM or PNG file

    Raises:
        ImageFormatError: if the file is unreadable or not a supported format

    Returns:
        Image: intensities on the [0, 1] scale
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as err:
        raise ImageFormatError(f"Cannot read image {path}: {err}") from err

    if data[:2] in PGM_MAGICS:
        image = decode_pgm(data)
    elif data.startswith(PNG_MAGIC):
        try:
            with PILImage.open(path) as png:
                image = _decode_png(png, path)
        except (UnidentifiedImageError, OSError) as err:
            raise ImageFormatError(f"Cannot decode PNG {path}: {err}") from err
    else:
        raise ImageFormatError(f"Unsupported image format: {path}")

    logger.info("Loaded %s with shape %dx%d", path, *image.shape)
    return as_image(image, name=str(path))


def to_8bit(x: Image, signed: bool = False) -> np.ndarray:
    """Quantize [0, 1] intensities to uint8; signed arrays are offset to mid-gray first."""
    if signed:
        x = x + SIGNED_OFFSET
    return np.clip(np.rint(x * MAX_8BIT), 0, MAX_8BIT).astype(np.uint8)


def save_image(path: str | Path, x: Image, signed: bool = False) -> None:
    """Write an 8-bit PNG or binary PGM chosen by suffix.

    Args:
        path (str | Path): .png or .pgm destination
        x (Image): intensities on the [0, 1] scale
        signed (bool, optional): add a mid-gray offset so that zero maps
            to gray. Defaults to False.

    Raises:
        ImageFormatError: if the suffix is not supported
    """
    path = Path(path)
    pixels = to_8bit(x, signed)
    suffix = path.suffix.lower()
    if suffix == ".png":
        PILImage.fromarray(pixels).save(path)
    elif suffix == ".pgm":
        PILImage.fromarray(pixels).save(path, format="PPM")
    else:
        raise ImageFormatError(f"Unsupported image suffix {path.suffix!r}")
