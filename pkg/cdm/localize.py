# localize.py - find the bounding box of every colored glyph
# coding: utf-8
#
# Copyright (C) 2024-2025 The python-cdm developers
#
# This library is free software; you can redistribute it and/or
# modify it under the terms of the GNU Lesser General Public
# License as published by the Free Software Foundation; either
# version 2.1 of the License, or (at your option) any later version.
#
# This library is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public
# License along with this library; if not, write to the Free Software
# Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA
# 02110-1301 USA

"""Find the bounding box of every colored glyph in a rendered formula.

Pixels are snapped to the nearest color of the 15-step lattice. A pixel
that is further than the tolerance from every lattice color (a blend of two
glyphs or of a glyph and the background) is ignored. The element of a
color is the bounding box of all its pixels.

>>> from cdm.color import assign_colors
>>> from cdm.latex import tokenize
>>> from cdm.render import RenderConfig, render
>>> src = assign_colors(tokenize('a+b'))
>>> elements = localize(render(src, RenderConfig(engine='stub')), src)
>>> [(e.token.text, tuple(e.bbox)) for e in elements]
[('a', (0, 0, 7, 11)), ('+', (12, 0, 19, 11)), ('b', (24, 0, 31, 11))]
>>> elements.elements[2].norm_order
1.0
"""

import dataclasses
import json
import logging
from collections import namedtuple

import numpy as np

from cdm.color import BACKGROUND, STEP
from cdm.exceptions import *
from cdm.latex import Token, TokenKind


_log = logging.getLogger(__name__)


BBox = namedtuple('BBox', 'x1 y1 x2 y2')
BBox.__doc__ = 'Inclusive pixel coordinates of a glyph, origin top-left.'


@dataclasses.dataclass(frozen=True)
class Element():
    """A localized glyph: the token with its position in the image."""

    token: Token
    bbox: BBox
    norm_bbox: tuple
    norm_order: float
    color: tuple = None


@dataclasses.dataclass
class ElementSet():
    """The elements found in one rendered formula."""

    elements: list
    image: object = None
    anomalies: int = 0
    omitted: list = dataclasses.field(default_factory=list)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def quantize(pixels, tolerance=7):
    """Snap pixels to the color lattice.

    Returns the lattice colors and a mask of the pixels that are within
    the tolerance on every channel.

    >>> colors, valid = quantize(np.array([[[2, 16, 250], [8, 0, 0]]]), tolerance=5)
    >>> colors.tolist()
    [[[0, 15, 255], [15, 0, 0]]]
    >>> valid.tolist()
    [[True, False]]
    """
    if not 0 <= tolerance <= STEP // 2:
        raise ConfigError('The color tolerance must be between 0 and %d.' % (STEP // 2))
    pixels = np.asarray(pixels, dtype=np.int16)
    snapped = np.clip(np.rint(pixels / STEP) * STEP, 0, 255).astype(np.int16)
    valid = np.all(np.abs(pixels - snapped) <= tolerance, axis=-1)
    return snapped.astype(np.uint8), valid


def _code(color):
    return (int(color[0]) << 16) | (int(color[1]) << 8) | int(color[2])


def _token(src, index, text):
    if src.sequence is not None:
        return src.sequence.tokens[index]
    return Token(text, TokenKind.Char, index, text)


def localize(img, src, tolerance=7, min_pixels=2):
    """Extract the element of every assigned color from the image.

    Colors with fewer than min_pixels pixels are omitted and counted as
    anomalies. Raises LocalizationAnomaly when the image is blank while the
    formula has glyphs."""
    snapped, valid = quantize(img.pixels, tolerance)
    codes = (
        (snapped[..., 0].astype(np.int32) << 16) |
        (snapped[..., 1].astype(np.int32) << 8) |
        snapped[..., 2].astype(np.int32))
    mask = valid & (codes != _code(BACKGROUND))
    if not mask.any():
        if src.assignment:
            raise LocalizationAnomaly()
        return ElementSet([], img)
    ys, xs = np.nonzero(mask)
    codes = codes[ys, xs]
    order = np.argsort(codes, kind='stable')
    codes, xs, ys = codes[order], xs[order], ys[order]
    found, starts, counts = np.unique(codes, return_index=True, return_counts=True)
    x1 = np.minimum.reduceat(xs, starts)
    x2 = np.maximum.reduceat(xs, starts)
    y1 = np.minimum.reduceat(ys, starts)
    y2 = np.maximum.reduceat(ys, starts)
    positions = dict((int(code), i) for i, code in enumerate(found))
    length = len(src.sequence.tokens) if src.sequence is not None else len(src.assignment)
    span = max(1, length - 1)
    elements = []
    omitted = []
    for color, (text, index) in sorted(src.assignment.items(), key=lambda item: item[1][1]):
        i = positions.get(_code(color))
        if i is None or counts[i] < min_pixels:
            omitted.append((text, index))
            continue
        bbox = BBox(int(x1[i]), int(y1[i]), int(x2[i]), int(y2[i]))
        elements.append(Element(
            token=_token(src, index, text),
            bbox=bbox,
            norm_bbox=(
                bbox.x1 / img.width, bbox.y1 / img.height,
                bbox.x2 / img.width, bbox.y2 / img.height),
            norm_order=index / span,
            color=tuple(color)))
    if omitted:
        _log.info('%d glyphs without pixels: %s', len(omitted), ' '.join(t for t, _i in omitted))
    return ElementSet(elements, img, anomalies=len(omitted), omitted=omitted)


def dump_elements(elements, filename):
    """Write the elements as JSON for visual inspection."""
    data = [
        {
            'token': e.token.text,
            'order_index': e.token.order_index,
            'color': list(e.color) if e.color else None,
            'bbox': list(e.bbox),
        }
        for e in elements]
    with open(filename, 'w', encoding='utf-8') as fp:
        json.dump(data, fp, indent=2)
