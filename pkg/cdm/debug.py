# debug.py - visual inspection of the glyph matching
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

"""Visual inspection of the glyph matching.

The overlay shows the ground truth image above the predicted image.
Matched glyphs get a green box and a line connecting both boxes,
unmatched glyphs a red box and pairs dropped by validation an orange box.
"""

from PIL import Image, ImageDraw


MATCHED = (0, 160, 0)
UNMATCHED = (220, 0, 0)
ELIMINATED = (255, 140, 0)

_MARGIN = 10


def _box(element, dy):
    x1, y1, x2, y2 = element.bbox
    return (x1, y1 + dy, x2, y2 + dy)


def _center(box):
    return ((box[0] + box[2]) / 2, (box[1] + box[3]) / 2)


def overlay(gt_image, pred_image, match):
    """Return a PIL image with both renders and the matching drawn on it."""
    width = max(gt_image.width, pred_image.width)
    offset = gt_image.height + _MARGIN
    im = Image.new('RGB', (width, offset + pred_image.height), (255, 255, 255))
    im.paste(Image.fromarray(gt_image.pixels), (0, 0))
    im.paste(Image.fromarray(pred_image.pixels), (0, offset))
    # fade the renders
    im = Image.blend(im, Image.new('RGB', im.size, (255, 255, 255)), 0.5)
    draw = ImageDraw.Draw(im)
    for pair in match.pairs:
        gt_box, pred_box = _box(pair.gt, 0), _box(pair.pred, offset)
        draw.rectangle(gt_box, outline=MATCHED)
        draw.rectangle(pred_box, outline=MATCHED)
        draw.line([_center(gt_box), _center(pred_box)], fill=MATCHED)
    for pair in match.eliminated:
        draw.rectangle(_box(pair.gt, 0), outline=ELIMINATED)
        draw.rectangle(_box(pair.pred, offset), outline=ELIMINATED)
    eliminated = set(id(pair.gt) for pair in match.eliminated)
    eliminated.update(id(pair.pred) for pair in match.eliminated)
    for element in match.unmatched_gt:
        if id(element) not in eliminated:
            draw.rectangle(_box(element, 0), outline=UNMATCHED)
    for element in match.unmatched_pred:
        if id(element) not in eliminated:
            draw.rectangle(_box(element, offset), outline=UNMATCHED)
    return im


def write_overlay(gt_image, pred_image, match, filename):
    """Write the matching overlay as a PNG file."""
    overlay(gt_image, pred_image, match).save(filename, 'PNG')
