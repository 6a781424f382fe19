"""Image decoding and dataset manifests."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .errors import CorruptFile, IoError, MissingField, ParseError, UnsupportedFormat
from .measures import Channel

CHANNEL_NAMES = ("r", "g", "b")

# Pillow reports both P5 and P6 as "PPM"
_FORMATS = {"PNG": "png", "JPEG": "jpeg", "PPM": "ppm"}
_LOSSY = {"jpeg"}
_SIGNATURES = (b"\x89PNG", b"\xff\xd8", b"P5", b"P6")


@dataclass(frozen=True, eq=False)
class Image:
    red: Channel
    green: Channel
    blue: Channel
    source_format: str = "raw"
    depth: int = 8

    def __post_init__(self):
        shapes = {c.intensities.shape for c in (self.red, self.green, self.blue)}
        depths = {c.depth for c in (self.red, self.green, self.blue)}
        if len(shapes) != 1 or len(depths) != 1:
            raise ValueError("all channels must share dimensions and depth")

    @property
    def width(self) -> int:
        return self.red.width

    @property
    def height(self) -> int:
        return self.red.height

    @property
    def lossy(self) -> bool:
        return self.source_format in _LOSSY

    def channel(self, name: str) -> Channel:
        return {"r": self.red, "g": self.green, "b": self.blue}[name]

    @classmethod
    def from_array(cls, rgb, source_format="raw"):
        """From an (H, W, 3) or (H, W) uint8 array; gray is replicated."""
        a = np.asarray(rgb)
        if a.ndim == 2:
            a = np.stack([a, a, a], axis=-1)
        return cls(Channel(a[..., 0]), Channel(a[..., 1]), Channel(a[..., 2]), source_format)

    def to_array(self) -> np.ndarray:
        return np.stack(
            [self.red.intensities, self.green.intensities, self.blue.intensities], axis=-1
        ).astype(np.uint8)


def decode_image(path) -> Image:
    """Decode PNG, JPEG, or binary PPM/PGM into 8-bit RGB planes."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            head = fh.read(8)
            fh.seek(0)
            try:
                img = PILImage.open(fh)
                fmt = img.format
                if fmt not in _FORMATS:
                    raise UnsupportedFormat(f"{path}: unsupported image format {fmt}")
                img.load()
            except UnidentifiedImageError:
                if head.startswith(_SIGNATURES):
                    raise CorruptFile(f"{path}: cannot parse image data") from None
                raise UnsupportedFormat(f"{path}: not a PNG, JPEG, PPM or PGM file") from None
            except (OSError, SyntaxError, ValueError) as exc:
                raise CorruptFile(f"{path}: {exc}") from exc
    except FileNotFoundError as exc:
        raise IoError(f"{path}: no such file") from exc
    except IsADirectoryError as exc:
        raise IoError(f"{path}: is a directory") from exc
    except PermissionError as exc:
        raise IoError(f"{path}: permission denied") from exc

    if img.mode in ("I;16", "I;16B", "I;16L", "I", "F"):
        raise UnsupportedFormat(f"{path}: only 8-bit channels are supported (mode {img.mode})")
    if img.mode in ("L", "1"):
        a = np.asarray(img.convert("L"))
    else:
        a = np.asarray(img.convert("RGB"))
    return Image.from_array(a, _FORMATS[fmt])


def encode_image(image: Image, path) -> None:
    """Write an image losslessly; format follows the suffix (.png, .ppm)."""
    PILImage.fromarray(image.to_array(), mode="RGB").save(path)


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    category: str
    pair_with: Path | None = None


def load_manifest(path) -> list[ManifestEntry]:
    """Read a JSON array of ``{"path", "category", "pair_with"?}`` objects.

    Relative paths are resolved against the manifest's directory.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise IoError(f"{path}: no such file") from exc
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(doc, list):
        raise ParseError(f"{path}: manifest must be a JSON array", 1, 1)

    base = path.parent
    entries = []
    for idx, item in enumerate(doc):
        if not isinstance(item, dict):
            raise ParseError(f"{path}: entry {idx} is not an object")
        for key in ("path", "category"):
            if key not in item:
                raise MissingField(key, idx)
        pair = item.get("pair_with")
        entries.append(
            ManifestEntry(
                _resolve(base, item["path"]),
                str(item["category"]),
                _resolve(base, pair) if pair else None,
            )
        )
    return entries


def _resolve(base: Path, p) -> Path:
    p = Path(os.path.expanduser(str(p)))
    return p if p.is_absolute() else base / p
