"""16x16 grayscale encoding of byte histograms and its graymap interchange.

Each of the 256 histogram bins becomes one pixel: intensities are the counts
max-normalized to 255 with round-half-up, laid out row-major so byte 0x00 is
the top-left pixel and 0xFF the bottom-right. An empty histogram maps to an
all-black image (max count treated as 1); a perfectly flat histogram maps to
solid white. Images interchange as binary portable graymaps (P5, 16 16, 255).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .bytestats import ByteHistogram
from .errors import MalformedImageError

SIDE = 16
MAXVAL = 255


@dataclass(frozen=True)
class HistImage:
    pixels: np.ndarray  # (16, 16) uint8, row-major over byte values
    source_total: int  # bytes behind the histogram; 0 when unknown (e.g. read back)

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.shape != (SIDE, SIDE):
            raise ValueError(f"image must be {SIDE}x{SIDE}")
        if self.source_total > 0 and int(px.max()) != MAXVAL:
            raise ValueError("max-normalized image of a non-empty histogram must peak at 255")
        object.__setattr__(self, "pixels", px)

    def __eq__(self, other):
        # interchange identity is pixel identity; source_total is metadata
        if not isinstance(other, HistImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


def encode(hist: ByteHistogram) -> HistImage:
    """Max-normalize counts to 8-bit intensities and reshape to 16x16."""
    max_count = int(hist.counts.max()) if hist.total > 0 else 1
    scaled = np.floor(MAXVAL * hist.counts / max_count + 0.5).astype(np.uint8)
    return HistImage(pixels=scaled.reshape(SIDE, SIDE), source_total=hist.total)


def write_image(img: HistImage, path: Union[str, Path]) -> None:
    """Write a binary portable graymap (P5, 16x16, maxval 255)."""
    with open(path, "wb") as fh:
        fh.write(b"P5\n16 16\n255\n")
        fh.write(img.pixels.tobytes())


def read_image(path: Union[str, Path]) -> HistImage:
    """Read a binary portable graymap written by write_image.

    Comment lines in the header are tolerated; anything other than a 16x16
    maxval-255 P5 raises MalformedImageError.
    """
    with open(path, "rb") as fh:
        data = fh.read()

    tokens = []
    pos = 0
    while len(tokens) < 4 and pos < len(data):
        if data[pos:pos + 1].isspace():
            pos += 1
            continue
        if data[pos:pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            pos = len(data) if eol < 0 else eol + 1
            continue
        end = pos
        while end < len(data) and not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if len(tokens) < 4:
        raise MalformedImageError("truncated graymap header")
    magic, w, h, maxval = tokens
    if magic != b"P5":
        raise MalformedImageError(f"not a binary graymap: magic {magic!r}")
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise MalformedImageError("non-numeric graymap header") from exc
    if (w, h) != (SIDE, SIDE):
        raise MalformedImageError(f"expected {SIDE}x{SIDE}, got {w}x{h}")
    if maxval != MAXVAL:
        raise MalformedImageError(f"expected maxval {MAXVAL}, got {maxval}")

    raster = data[pos + 1:pos + 1 + SIDE * SIDE]  # single whitespace after maxval
    if len(raster) != SIDE * SIDE:
        raise MalformedImageError("raster shorter than 256 bytes")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(SIDE, SIDE)
    return HistImage(pixels=pixels.copy(), source_total=0)
