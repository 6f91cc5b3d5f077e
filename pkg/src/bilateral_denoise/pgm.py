"""8-bit grayscale PGM (Netpbm P2/P5) reading and writing."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import BinaryIO, Union

import numpy as np

from .image import as_image

__all__ = ["PgmError", "PgmHeader", "read_pgm", "write_pgm", "load_pgm", "save_pgm", "quantize"]

_WHITESPACE = b" \t\n\r\v\f"


class PgmError(ValueError):
    """Malformed or unsupported PGM data."""


@dataclass(frozen=True)
class PgmHeader:
    magic: str
    width: int
    height: int
    maxval: int


class _Tokens:
    """Header tokenizer that skips whitespace and ``#`` comments."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def next(self, field: str) -> bytes:
        data, n = self.data, len(self.data)
        while self.pos < n:
            ch = data[self.pos : self.pos + 1]
            if ch in _WHITESPACE:
                self.pos += 1
            elif ch == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = n if end < 0 else end + 1
            else:
                break
        start = self.pos
        while self.pos < n and data[self.pos : self.pos + 1] not in _WHITESPACE and data[self.pos : self.pos + 1] != b"#":
            self.pos += 1
        if start == self.pos:
            raise PgmError(f"unexpected end of data reading {field} at offset {start}")
        return data[start : self.pos]

    def next_int(self, field: str) -> int:
        offset = self.pos
        tok = self.next(field)
        try:
            return int(tok)
        except ValueError:
            raise PgmError(f"invalid {field} {tok!r} at offset {offset}") from None


def _parse_header(tokens: _Tokens) -> PgmHeader:
    magic = tokens.next("magic")
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"bad magic {magic!r} at offset 0 (expected P2 or P5)")
    width = tokens.next_int("width")
    height = tokens.next_int("height")
    maxval = tokens.next_int("maxval")
    if width <= 0 or height <= 0:
        raise PgmError(f"non-positive dimensions {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise PgmError(f"maxval {maxval} out of range [1, 65535]")
    if maxval != 255:
        raise PgmError(f"unsupported maxval {maxval} (only 8-bit, maxval 255)")
    return PgmHeader(magic.decode(), width, height, maxval)


def read_pgm(data: Union[bytes, bytearray, BinaryIO]) -> np.ndarray:
    """Decode a P2 or P5 stream into a float64 image with values in [0, 255]."""
    if hasattr(data, "read"):
        data = data.read()
    data = bytes(data)
    tokens = _Tokens(data)
    header = _parse_header(tokens)
    count = header.width * header.height

    if header.magic == "P5":
        # exactly one whitespace byte separates maxval from the raster
        start = tokens.pos + 1
        if tokens.pos >= len(data) or data[tokens.pos : tokens.pos + 1] not in _WHITESPACE:
            raise PgmError(f"missing whitespace before raster at offset {tokens.pos}")
        payload = data[start : start + count]
        if len(payload) < count:
            raise PgmError(
                f"truncated raster: expected {count} bytes at offset {start}, got {len(payload)}"
            )
        values = np.frombuffer(payload, dtype=np.uint8)
    else:
        values = np.empty(count, dtype=np.int64)
        for k in range(count):
            offset = tokens.pos
            try:
                values[k] = tokens.next_int(f"pixel {k}")
            except PgmError:
                raise PgmError(
                    f"truncated raster: expected {count} samples, got {k} (offset {offset})"
                ) from None
            if not 0 <= values[k] <= header.maxval:
                raise PgmError(f"pixel {k} value {values[k]} exceeds maxval at offset {offset}")
    return values.reshape(header.height, header.width).astype(np.float64)


def quantize(img: np.ndarray) -> np.ndarray:
    """Round half away from zero, then clamp to [0, 255], as uint8."""
    img = as_image(img)
    rounded = np.sign(img) * np.floor(np.abs(img) + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8)


def write_pgm(img: np.ndarray, fmt: str = "P5") -> bytes:
    """Encode ``img`` as PGM bytes after quantization."""
    if fmt not in ("P2", "P5"):
        raise ValueError(f"format must be 'P2' or 'P5', got {fmt!r}")
    q = quantize(img)
    h, w = q.shape
    header = f"{fmt}\n{w} {h}\n255\n".encode("ascii")
    if fmt == "P5":
        return header + q.tobytes()
    lines = [" ".join(str(v) for v in row) for row in q]
    return header + ("\n".join(lines) + "\n").encode("ascii")


def load_pgm(path: Union[str, os.PathLike]) -> np.ndarray:
    with open(path, "rb") as fh:
        return read_pgm(fh.read())


def save_pgm(path: Union[str, os.PathLike], img: np.ndarray, fmt: str = "P5") -> None:
    with open(path, "wb") as fh:
        fh.write(write_pgm(img, fmt))
