"""Image file I/O: binary PGM (P5) and PNG.

Loaded images become float ScalarFields in [0, 1].  Color PNGs collapse
to luminance with the Rec. 601 weights.  Writers are deterministic:
identical arrays produce identical bytes.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import UnreadableInputError, UnsupportedFormatError
from .scalespace import ScalarField

REC601 = (0.299, 0.587, 0.114)


def load_image(path) -> ScalarField:
    p = Path(path)
    if not p.is_file():
        raise UnreadableInputError(f"no such file: {p}")
    suffix = p.suffix.lower()
    if suffix == ".pgm":
        return _load_pgm(p)
    if suffix == ".png":
        return _load_png(p)
    raise UnsupportedFormatError(f"unsupported extension {suffix!r} (want .pgm or .png)")


def _load_pgm(p: Path) -> ScalarField:
    raw = p.read_bytes()
    if not raw.startswith(b"P5"):
        raise UnsupportedFormatError(f"{p}: only binary (P5) PGM is supported")
    # header: magic, width, height, maxval; '#' comments allowed between tokens
    tokens = []
    pos = 2
    while len(tokens) < 3:
        m = re.match(rb"(?:\s+|#[^\n]*\n)*(\d+)", raw[pos:])
        if not m:
            raise UnreadableInputError(f"{p}: truncated PGM header")
        tokens.append(int(m.group(1)))
        pos += m.end()
    width, height, maxval = tokens
    if maxval <= 0 or maxval > 255:
        raise UnsupportedFormatError(f"{p}: PGM maxval {maxval} not in 1..255")
    pos += 1  # single whitespace after maxval
    data = raw[pos:pos + width * height]
    if len(data) != width * height:
        raise UnreadableInputError(f"{p}: pixel payload truncated")
    arr = np.frombuffer(data, dtype=np.uint8).reshape(height, width)
    return ScalarField(arr.astype(np.float64) / float(maxval))


def _load_png(p: Path) -> ScalarField:
    try:
        with Image.open(p) as im:
            im.load()
            mode = im.mode
            if mode == "L":
                arr = np.asarray(im, dtype=np.float64) / 255.0
            elif mode in ("I;16", "I;16B"):
                arr = np.asarray(im, dtype=np.float64) / 65535.0
            elif mode == "I":
                arr = np.asarray(im, dtype=np.float64) / 65535.0
            elif mode == "RGB":
                rgb = np.asarray(im, dtype=np.float64) / 255.0
                arr = REC601[0] * rgb[..., 0] + REC601[1] * rgb[..., 1] \
                    + REC601[2] * rgb[..., 2]
            else:
                raise UnsupportedFormatError(
                    f"{p}: PNG mode {mode!r} not supported (want gray or RGB)")
    except UnidentifiedImageError as exc:
        raise UnreadableInputError(f"{p}: not a readable PNG") from exc
    return ScalarField(arr)


def _to_u8(data: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(data * 255.0), 0, 255).astype(np.uint8)


def save_gray(path, data: np.ndarray, fmt: str = "pgm") -> Path:
    """Write a [0,1] float array as 8-bit grayscale PGM or PNG."""
    p = Path(path)
    u8 = _to_u8(data)
    if fmt == "pgm":
        header = f"P5\n{u8.shape[1]} {u8.shape[0]}\n255\n".encode()
        p.write_bytes(header + u8.tobytes())
    elif fmt == "png":
        Image.fromarray(u8, mode="L").save(p, format="PNG")
    else:
        raise UnsupportedFormatError(f"unsupported output format {fmt!r}")
    return p


def save_edges(path, mask: np.ndarray, fmt: str = "pgm") -> Path:
    """Write a binary edge mask: P5 with values {0,255}, or 1-bit PNG."""
    p = Path(path)
    if fmt == "pgm":
        u8 = np.where(mask, 255, 0).astype(np.uint8)
        header = f"P5\n{u8.shape[1]} {u8.shape[0]}\n255\n".encode()
        p.write_bytes(header + u8.tobytes())
    elif fmt == "png":
        Image.fromarray(mask.astype(bool)).save(p, format="PNG", bits=1)
    else:
        raise UnsupportedFormatError(f"unsupported output format {fmt!r}")
    return p


def save_float32(path, data: np.ndarray) -> Path:
    """Raw float grid for debugging: 32-bit .npy, loadable with np.load."""
    p = Path(path)
    np.save(p, np.asarray(data, dtype=np.float32), allow_pickle=False)
    return p if p.suffix == ".npy" else p.with_suffix(p.suffix + ".npy")


def normalized(data: np.ndarray) -> np.ndarray:
    """Affinely map an array onto [0,1] (constant arrays go to 0)."""
    lo = float(data.min())
    hi = float(data.max())
    if hi <= lo:
        return np.zeros_like(data)
    return (data - lo) / (hi - lo)


def montage(masks: list[np.ndarray], gap: int = 2) -> np.ndarray:
    """Edge maps side by side with white separators, as a [0,1] array."""
    if not masks:
        raise ValueError("montage needs at least one image")
    h = max(m.shape[0] for m in masks)
    cols = []
    for i, m in enumerate(masks):
        tile = np.zeros((h, m.shape[1]))
        tile[:m.shape[0], :] = m.astype(float)
        cols.append(tile)
        if i != len(masks) - 1:
            cols.append(np.ones((h, gap)))
    return np.hstack(cols)
