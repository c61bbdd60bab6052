"""The 8-dimensional word feature vector.

Every classified sample is a single word image, tightly cropped to its
ink.  Four features are directional on-pixel densities (OPD): the word
is opened by reconstruction with a line SE at 0, 45, 90 and 135
degrees, holes are filled, and the surviving ink fraction of the crop
is recorded.  Components with a long enough stroke in the probed
direction survive whole; everything else vanishes, so the four numbers
profile the word's stroke directions.  The remaining four are plain
regional descriptors: average aspect ratio, hole-filled pixel ratio,
average eccentricity and average extent over the word's 8-connected
components.

Canonical feature order (fixed; stamped into model files):
``opd_0, opd_45, opd_90, opd_135, aar, pr, ecc, ext``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from scriptid._util import round_half_up
from scriptid.imaging import (
    ComponentStats,
    as_binary,
    component_eccentricity,
    component_extent,
    connected_components,
)
from scriptid.morphology import fill_holes, line_se, opening_by_reconstruction

__all__ = [
    "DIRECTIONS",
    "FEATURE_NAMES",
    "WordImage",
    "aar",
    "avg_eccentricity",
    "avg_extent",
    "extract_features",
    "format_feature_line",
    "opd",
    "parse_feature_line",
    "pixel_ratio",
    "se_length_for",
]

FEATURE_NAMES = ("opd_0", "opd_45", "opd_90", "opd_135", "aar", "pr", "ecc", "ext")
DIRECTIONS = (0, 45, 90, 135)


@dataclass(frozen=True)
class WordImage:
    """A word crop plus its connected components.

    ``img`` is the tight ink crop (first/last rows and columns contain
    ink); ``components`` are its 8-connected components.  Construct via
    :meth:`from_image`, which rejects empty images.
    """

    img: np.ndarray
    components: tuple[ComponentStats, ...] = field(repr=False)

    @classmethod
    def from_image(cls, img) -> "WordImage":
        b = as_binary(img)
        rows = np.flatnonzero(b.any(axis=1))
        if rows.size == 0:
            raise ValueError("word image contains no ink")
        cols = np.flatnonzero(b.any(axis=0))
        crop = b[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]
        stats, _ = connected_components(crop, connectivity=8)
        view = crop.view()
        view.flags.writeable = False
        return cls(img=view, components=tuple(stats))


def se_length_for(word: WordImage, ratio: float = 0.7, min_len: int = 3) -> int:
    """Line-SE length for a word: ``ratio`` of the mean component height.

    Rounded half-up, floored at ``min_len``, bumped up to odd so the SE
    stays centered.  One length is shared by all four directions.
    """
    mean_h = sum(c.bbox_height for c in word.components) / len(word.components)
    length = round_half_up(ratio * mean_h)
    if length < min_len:
        length = min_len
    if length % 2 == 0:
        length += 1
    return length


def opd(word: WordImage, direction: int, ratio: float = 0.7, min_len: int = 3) -> float:
    """Directional on-pixel density after reconstruction and hole fill."""
    se = line_se(direction, se_length_for(word, ratio=ratio, min_len=min_len))
    g = fill_holes(opening_by_reconstruction(word.img, se))
    return float(int(g.sum()) / g.size)


def aar(word: WordImage) -> float:
    """Average over components of bounding-box height / width."""
    return sum(c.bbox_height / c.bbox_width for c in word.components) / len(word.components)


def pixel_ratio(word: WordImage) -> float:
    """Ink fraction of the hole-filled word relative to the crop area."""
    filled = fill_holes(word.img)
    return float(int(filled.sum()) / filled.size)


def avg_eccentricity(word: WordImage) -> float:
    """Average minor/major axis ratio over components."""
    return sum(component_eccentricity(c) for c in word.components) / len(word.components)


def avg_extent(word: WordImage) -> float:
    """Average bounding-box coverage over components."""
    return sum(component_extent(c) for c in word.components) / len(word.components)


def extract_features(word: WordImage, ratio: float = 0.7, min_len: int = 3) -> np.ndarray:
    """All 8 features in canonical order as a float64 vector."""
    vec = [opd(word, d, ratio=ratio, min_len=min_len) for d in DIRECTIONS]
    vec += [aar(word), pixel_ratio(word), avg_eccentricity(word), avg_extent(word)]
    return np.array(vec, dtype=np.float64)


# ---------------------------------------------------------------------------
# feature dump lines: path,label,f1..f8 (label may be empty)


def format_feature_line(path: str, label: str | None, vec: np.ndarray) -> str:
    if len(vec) != len(FEATURE_NAMES):
        raise ValueError(f"expected {len(FEATURE_NAMES)} features, got {len(vec)}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="")
    writer.writerow([path, label or ""] + [repr(float(v)) for v in vec])
    return buf.getvalue()


def parse_feature_line(line: str) -> tuple[str, str | None, np.ndarray]:
    row = next(csv.reader([line]))
    if len(row) != 2 + len(FEATURE_NAMES):
        raise ValueError(f"malformed feature line ({len(row)} fields): {line!r}")
    vec = np.array([float(v) for v in row[2:]], dtype=np.float64)
    return row[0], row[1] or None, vec
