# test_color.py - tests for the glyph color assignment
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

"""Tests for the cdm.color module."""

import unittest

import numpy as np

from cdm.color import BACKGROUND, STEP, assign_colors, palette
from cdm.exceptions import *
from cdm.latex import tokenize
from cdm.localize import quantize


class TestPalette(unittest.TestCase):
    """Test the lattice of glyph colors."""

    def test_colors(self):
        """Test the size and the values of the palette."""
        colors = palette().colors
        self.assertEqual(palette().capacity, 5831)
        self.assertEqual(len(set(colors)), 5831)
        self.assertNotIn(BACKGROUND, colors)
        self.assertEqual(colors[-1], (0, 0, 0))
        for color in colors:
            self.assertTrue(all(channel % 15 == 0 for channel in color), color)
            self.assertTrue(all(0 <= channel <= 255 for channel in color), color)

    def test_capacity(self):
        """Test that formulas up to the palette size can be colored."""
        src = assign_colors(tokenize(' '.join(['x'] * 5831)))
        self.assertEqual(len(src.assignment), 5831)
        self.assertEqual(set(src.assignment), set(palette().colors))
        with self.assertRaises(PaletteExhausted):
            assign_colors(tokenize(' '.join(['x'] * 5832)))

    def test_structural(self):
        """Test that only glyphs get a color."""
        seq = tokenize('\\mathbf{x}^{2} \\, \\left. y \\right|')
        src = assign_colors(seq)
        self.assertEqual(len(src.assignment), seq.colorable_count)
        self.assertEqual(
            sorted(index for _text, index in src.assignment.values()),
            [token.order_index for token in seq.colorable()])


class TestQuantize(unittest.TestCase):
    """Test snapping rendered pixels back to the palette."""

    def setUp(self):
        """Prepare the test."""
        self.colors = np.array(palette().colors, dtype=np.int16)

    def test_within_tolerance(self):
        """Test that every palette color survives a shift up to the tolerance."""
        for tolerance in range(STEP // 2 + 1):
            for offset in range(-tolerance, tolerance + 1):
                pixels = np.clip(self.colors + offset, 0, 255)[None]
                snapped, valid = quantize(pixels, tolerance)
                self.assertTrue((snapped[0] == self.colors).all(), (tolerance, offset))
                self.assertTrue(valid.all(), (tolerance, offset))

    def test_outside_tolerance(self):
        """Test that pixels between two lattice values are flagged."""
        inner = self.colors[(self.colors > 0).all(axis=1) & (self.colors < 255).all(axis=1)]
        _snapped, valid = quantize((inner + 5)[None], tolerance=4)
        self.assertFalse(valid.any())
        with self.assertRaises(ConfigError):
            quantize(inner[None], tolerance=8)
