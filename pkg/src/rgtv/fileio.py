"""Image and kernel file I/O.

Images: 8-bit grayscale PGM (binary P5) and PNG, normalized to [0, 1]
doubles in memory.  Kernels: plain text, first line the side, then one
row of taps per line at 17 significant digits so a written kernel reads
back bit-exact.
"""
from __future__ import annotations

import os

import numpy as np

from .errors import InvalidInput, InvalidParameter
from .fourier import BlurKernel

IMAGE_SUFFIXES = (".png", ".pgm")


def _read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise InvalidInput(f"{path}: not a binary (P5) PGM file")
    # Header: magic, width, height, maxval; '#' comments may interleave.
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise InvalidInput(f"{path}: malformed PGM header") from exc
    if maxval != 255:
        raise InvalidInput(f"{path}: only 8-bit PGM supported (maxval 255)")
    raw = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    if raw.size != width * height:
        raise InvalidInput(f"{path}: truncated PGM payload")
    return raw.reshape(height, width).astype(np.float64) / 255.0


def _write_pgm(path: str, img8: np.ndarray) -> None:
    header = f"P5\n{img8.shape[1]} {img8.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img8.tobytes())


def _to_uint8(img) -> np.ndarray:
    a = np.asarray(img, dtype=np.float64)
    return np.clip(np.round(a * 255.0), 0, 255).astype(np.uint8)


def load_image(path: str) -> np.ndarray:
    """Load a PGM or PNG file as a [0, 1] luminance image."""
    suffix = os.path.splitext(path)[1].lower()
    if suffix == ".pgm":
        return _read_pgm(path)
    if suffix == ".png":
        from PIL import Image

        with Image.open(path) as im:
            gray = im.convert("L")
            return np.asarray(gray, dtype=np.float64) / 255.0
    raise InvalidInput(f"{path}: unsupported image format (use .png or .pgm)")


def load_image_channels(path: str) -> list[np.ndarray]:
    """Load color channels ([0, 1] each); grayscale inputs yield one channel."""
    suffix = os.path.splitext(path)[1].lower()
    if suffix == ".pgm":
        return [_read_pgm(path)]
    if suffix == ".png":
        from PIL import Image

        with Image.open(path) as im:
            if im.mode in ("L", "I", "1"):
                return [np.asarray(im.convert("L"), dtype=np.float64) / 255.0]
            rgb = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
            return [rgb[:, :, c].copy() for c in range(3)]
    raise InvalidInput(f"{path}: unsupported image format (use .png or .pgm)")


def save_image(path: str, img) -> None:
    """Write a [0, 1] image as 8-bit PGM or PNG, chosen by extension."""
    suffix = os.path.splitext(path)[1].lower()
    img8 = _to_uint8(img)
    if suffix == ".pgm":
        _write_pgm(path, img8)
        return
    if suffix == ".png":
        from PIL import Image

        Image.fromarray(img8, mode="L").save(path)
        return
    raise InvalidInput(f"{path}: unsupported image format (use .png or .pgm)")


def save_image_channels(path: str, channels: list) -> None:
    """Write one or three channels; three become an RGB PNG (PGM saves luma)."""
    if len(channels) == 1:
        save_image(path, channels[0])
        return
    if len(channels) != 3:
        raise InvalidParameter("expected one or three channels")
    suffix = os.path.splitext(path)[1].lower()
    stack = np.stack([_to_uint8(c) for c in channels], axis=-1)
    if suffix == ".png":
        from PIL import Image

        Image.fromarray(stack, mode="RGB").save(path)
        return
    if suffix == ".pgm":
        luma = 0.299 * channels[0] + 0.587 * channels[1] + 0.114 * channels[2]
        _write_pgm(path, _to_uint8(luma))
        return
    raise InvalidInput(f"{path}: unsupported image format (use .png or .pgm)")


def save_image_both(path: str, img) -> list[str]:
    """Write the requested file plus its twin in the other format.

    Given foo.png this also writes foo.pgm (and vice versa); returns the
    paths written.
    """
    suffix = os.path.splitext(path)[1].lower()
    if suffix not in IMAGE_SUFFIXES:
        raise InvalidInput(f"{path}: unsupported image format (use .png or .pgm)")
    twin = os.path.splitext(path)[0] + (".pgm" if suffix == ".png" else ".png")
    save_image(path, img)
    save_image(twin, img)
    return [path, twin]


def save_kernel(path: str, k: BlurKernel) -> None:
    """Write a kernel as text: side on the first line, then tap rows."""
    lines = [str(k.side)]
    for row in k.taps:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_kernel(path: str) -> BlurKernel:
    """Read a kernel written by :func:`save_kernel`."""
    with open(path, "r", encoding="ascii") as fh:
        tokens = fh.read().split()
    if not tokens:
        raise InvalidInput(f"{path}: empty kernel file")
    try:
        side = int(tokens[0])
        values = [float(t) for t in tokens[1:]]
    except ValueError as exc:
        raise InvalidInput(f"{path}: malformed kernel file") from exc
    if len(values) != side * side:
        raise InvalidInput(
            f"{path}: expected {side * side} taps, found {len(values)}")
    return BlurKernel(np.asarray(values).reshape(side, side))
