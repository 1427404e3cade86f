"""Grayscale image datasets: PGM codec and CSV manifests.

Only 8-bit PGM (binary ``P5`` or ASCII ``P2``, maxval 255) is supported;
pixel bytes are normalized to floats in [0, 1] by dividing by 255.
A dataset is described by a UTF-8 manifest CSV with header ``id,path,label``
(the ``label`` column is optional); image paths are resolved relative to
the manifest's directory.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidArg,
    IoFailure,
    MalformedManifest,
    MissingFile,
    UnsupportedFormat,
)


@dataclass
class ImageGrid:
    """One grayscale image with intensities in [0, 1].

    Rows index the vertical (s) axis and columns the horizontal (t) axis.
    """

    id: str
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 2 or px.shape[0] < 2 or px.shape[1] < 2:
            raise DimensionMismatch(
                f"image {self.id!r}: need at least a 2x2 grid, got shape {px.shape}"
            )
        if not np.all(np.isfinite(px)) or px.min() < 0.0 or px.max() > 1.0:
            raise InvalidArg(f"image {self.id!r}: pixel values must lie in [0, 1]")
        self.pixels = px

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass
class Dataset:
    """A collection of equally sized images, optionally labeled."""

    images: list[ImageGrid]
    labels: list[int] | None = None
    positive_class: int | None = None

    def __post_init__(self):
        if len(self.images) < 2:
            raise InvalidArg("a dataset needs at least 2 images")
        h, w = self.images[0].height, self.images[0].width
        for img in self.images[1:]:
            if (img.height, img.width) != (h, w):
                raise DimensionMismatch(
                    f"image {img.id!r} is {img.height}x{img.width}, expected {h}x{w}"
                )
        if self.labels is not None:
            if len(self.labels) != len(self.images):
                raise InvalidArg("labels length must match the number of images")
            if any(int(l) != l or l < 1 for l in self.labels):
                raise InvalidArg("labels must be integers >= 1")
            self.labels = [int(l) for l in self.labels]

    def __len__(self) -> int:
        return len(self.images)

    @property
    def height(self) -> int:
        return self.images[0].height

    @property
    def width(self) -> int:
        return self.images[0].width

    def pixel_stack(self) -> np.ndarray:
        """All images as one N x height x width array."""
        return np.stack([img.pixels for img in self.images])

    def index_of(self, image_id: str) -> int:
        for i, img in enumerate(self.images):
            if img.id == image_id:
                return i
        from .errors import UnknownId

        raise UnknownId(f"no image with id {image_id!r}")


def _pgm_tokens(data: bytes):
    """Yield whitespace-separated tokens, skipping '#' comments."""
    i, n = 0, len(data)
    while i < n:
        c = data[i : i + 1]
        if c in b" \t\r\n":
            i += 1
        elif c == b"#":
            while i < n and data[i : i + 1] != b"\n":
                i += 1
        else:
            j = i
            while j < n and data[j : j + 1] not in b" \t\r\n#":
                j += 1
            yield data[i:j], j
            i = j


def read_pgm(path) -> np.ndarray:
    """Decode a P2/P5 PGM file into a float array in [0, 1].

    Raises UnsupportedFormat for anything other than 8-bit maxval-255 PGM,
    and MissingFile when the path does not exist.
    """
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"image file not found: {path}")
    data = path.read_bytes()

    toks = _pgm_tokens(data)
    try:
        magic, _ = next(toks)
        (wtok, _), (htok, _), (mtok, mend) = next(toks), next(toks), next(toks)
        width, height, maxval = int(wtok), int(htok), int(mtok)
    except (StopIteration, ValueError):
        raise UnsupportedFormat(f"{path}: truncated or malformed PGM header")
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormat(f"{path}: not a P2/P5 PGM (magic {magic!r})")
    if maxval != 255:
        raise UnsupportedFormat(f"{path}: maxval {maxval} unsupported (must be 255)")
    if width < 1 or height < 1:
        raise UnsupportedFormat(f"{path}: bad dimensions {width}x{height}")

    count = width * height
    if magic == b"P5":
        raster = data[mend + 1 : mend + 1 + count]
        if len(raster) < count:
            raise UnsupportedFormat(f"{path}: raster shorter than {count} bytes")
        values = np.frombuffer(raster, dtype=np.uint8).astype(float)
    else:
        values = np.empty(count)
        try:
            for i in range(count):
                tok, _ = next(toks)
                v = int(tok)
                if not 0 <= v <= 255:
                    raise ValueError(v)
                values[i] = v
        except (StopIteration, ValueError):
            raise UnsupportedFormat(f"{path}: bad or missing ASCII sample data")
    return values.reshape(height, width) / 255.0


def write_pgm(image: ImageGrid, path) -> None:
    """Write an image as binary PGM (P5, maxval 255).

    Pixels are clamped to [0, 1] and rounded half-up to the nearest byte,
    so a reload agrees with the clamped original within 1/(2*255).
    """
    px = np.clip(image.pixels, 0.0, 1.0)
    raster = np.floor(px * 255.0 + 0.5).astype(np.uint8)
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    try:
        Path(path).write_bytes(header + raster.tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_manifest(path) -> Dataset:
    """Load a dataset from a manifest CSV, preserving row order.

    The header must be ``id,path,label`` or ``id,path``; when the label
    column is present every row needs an integer label >= 1.
    """
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"manifest not found: {path}")
    base = path.parent

    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MalformedManifest(f"{path}: empty manifest")
    header = [c.strip() for c in rows[0]]
    if header not in (["id", "path", "label"], ["id", "path"]):
        raise MalformedManifest(f"{path}: bad header {header!r}, expected id,path[,label]")
    has_labels = len(header) == 3

    images: list[ImageGrid] = []
    labels: list[int] | None = [] if has_labels else None
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise MalformedManifest(f"{path}:{lineno}: expected {len(header)} columns")
        img_id, rel = row[0].strip(), row[1].strip()
        img_path = base / rel
        if not img_path.exists():
            raise MissingFile(f"{path}:{lineno}: image file not found: {img_path}")
        images.append(ImageGrid(id=img_id, pixels=read_pgm(img_path)))
        if has_labels:
            try:
                label = int(row[2].strip())
            except ValueError:
                raise MalformedManifest(f"{path}:{lineno}: non-integer label {row[2]!r}")
            if label < 1:
                raise MalformedManifest(f"{path}:{lineno}: label must be >= 1")
            labels.append(label)
    if len(images) < 2:
        raise MalformedManifest(f"{path}: manifest must reference at least 2 images")
    return Dataset(images=images, labels=labels)


def write_manifest(dataset: Dataset, directory, name: str = "manifest.csv") -> Path:
    """Write a dataset as PGM files plus a manifest CSV in ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = directory / name
    has_labels = dataset.labels is not None
    try:
        with open(manifest, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "path", "label"] if has_labels else ["id", "path"])
            for i, img in enumerate(dataset.images):
                fname = f"{img.id}.pgm"
                write_pgm(img, directory / fname)
                row = [img.id, fname]
                if has_labels:
                    row.append(str(dataset.labels[i]))
                writer.writerow(row)
    except OSError as exc:
        raise IoFailure(f"cannot write manifest under {directory}: {exc}") from exc
    return manifest
