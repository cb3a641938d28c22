"""File formats: PGM images, a raw float32 matrix container, whitespace
corpora, and CSV with full-precision floats.

All writers are deterministic (no timestamps, fixed float formatting), so
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

__all__ = [
    "read_pgm",
    "write_pgm",
    "spins_to_gray",
    "gray_to_spins",
    "read_float_matrix",
    "write_float_matrix",
    "load_corpus",
    "save_corpus",
    "load_vocab",
    "save_vocab",
    "format_float",
    "write_csv",
    "read_csv_rows",
]

FLOAT_MATRIX_MAGIC = b"WGIBBSF0"


def read_pgm(path) -> np.ndarray:
    """Read a P2 (ascii) or P5 (binary) PGM with maxval <= 255 as uint8."""
    data = Path(path).read_bytes()
    if data[:2] not in (b"P2", b"P5"):
        raise ValueError(f"{path}: not a P2/P5 PGM")
    binary = data[:2] == b"P5"
    # tokenize the header, skipping comment lines
    tokens: list[bytes] = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        tok = bytearray()
        while pos < len(data) and not data[pos:pos + 1].isspace():
            tok += data[pos:pos + 1]
            pos += 1
        if not tok:
            raise ValueError(f"{path}: truncated PGM header")
        tokens.append(bytes(tok))
    width, height, maxval = (int(t) for t in tokens)
    if not 0 < maxval <= 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    if binary:
        pos += 1  # single whitespace after maxval
        raster = data[pos:pos + width * height]
        if len(raster) != width * height:
            raise ValueError(f"{path}: truncated raster")
        img = np.frombuffer(raster, dtype=np.uint8)
    else:
        values = data[pos:].split()
        if len(values) != width * height:
            raise ValueError(f"{path}: expected {width * height} pixels, got {len(values)}")
        img = np.array([int(v) for v in values], dtype=np.uint8)
    return img.reshape(height, width)


def write_pgm(path, image: np.ndarray) -> None:
    """Write uint8 grayscale as binary P5."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError("image must be 2-d")
    if image.dtype != np.uint8:
        if np.any(image < 0) or np.any(image > 255):
            raise ValueError("pixel values must lie in [0, 255]")
        image = image.astype(np.uint8)
    header = f"P5\n{image.shape[1]} {image.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.tobytes())


def spins_to_gray(spins: np.ndarray) -> np.ndarray:
    """{-1,+1} to {0,255}."""
    spins = np.asarray(spins)
    if not np.all(np.isin(spins, (-1.0, 1.0))):
        raise ValueError("spins must be -1 or +1")
    return np.where(spins > 0, 255, 0).astype(np.uint8)


def gray_to_spins(gray: np.ndarray) -> np.ndarray:
    """Inverse of spins_to_gray for binary images; natural grayscale is
    binarized at its median (at or above maps to +1)."""
    gray = np.asarray(gray, dtype=np.float64)
    levels = np.unique(gray)
    if levels.size <= 2:
        lo = levels[0]
        return np.where(gray > lo, 1.0, -1.0) if levels.size == 2 \
            else np.ones_like(gray)
    return np.where(gray >= np.median(gray), 1.0, -1.0)


def write_float_matrix(path, matrix: np.ndarray) -> None:
    """16-byte header (8-byte magic, uint32 rows, uint32 cols, little endian)
    followed by row-major float32 payload."""
    matrix = np.asarray(matrix, dtype=np.float32)
    if matrix.ndim != 2:
        raise ValueError("matrix must be 2-d")
    header = FLOAT_MATRIX_MAGIC + struct.pack("<II", *matrix.shape)
    Path(path).write_bytes(header + matrix.tobytes(order="C"))


def read_float_matrix(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 16 or data[:8] != FLOAT_MATRIX_MAGIC:
        raise ValueError(f"{path}: not a float-matrix container")
    rows, cols = struct.unpack("<II", data[8:16])
    payload = data[16:]
    if len(payload) != rows * cols * 4:
        raise ValueError(f"{path}: payload size mismatch")
    return np.frombuffer(payload, dtype="<f4").reshape(rows, cols).astype(np.float32)


def save_corpus(path, docs) -> None:
    """One document per line, whitespace-separated integer word ids."""
    lines = [" ".join(str(int(w)) for w in doc) for doc in docs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_corpus(path) -> list[np.ndarray]:
    docs = []
    for line in Path(path).read_text(encoding="ascii").splitlines():
        parts = line.split()
        try:
            ids = [int(p) for p in parts]
        except ValueError as err:
            raise ValueError(f"{path}: non-integer word id: {err}") from None
        if any(i < 0 for i in ids):
            raise ValueError(f"{path}: negative word id")
        docs.append(np.array(ids, dtype=np.int32))
    return docs


def save_vocab(path, tokens) -> None:
    """One token per line; the line number is the word id."""
    Path(path).write_text("\n".join(tokens) + "\n", encoding="utf-8")


def load_vocab(path) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip any float64."""
    return format(float(x), ".17g")


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_float(value)


def write_csv(path, header: list[str], rows) -> None:
    """CSV with comma separators, a mandatory header row, '.' decimal marks
    and floats at 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def read_csv_rows(path) -> tuple[list[str], list[list[str]]]:
    """Header and data rows, cells kept as strings."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV, header required") from None
        return header, [row for row in reader]
