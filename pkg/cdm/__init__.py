# __init__.py - main module
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

"""Evaluate formula recognition by matching rendered glyphs.

This library scores a predicted LaTeX formula against the ground truth by
rendering both with a unique color per glyph, locating every glyph in the
images and matching the glyphs by identity and position. The score (CDM)
is the F1 score of the matched glyphs so predictions that render the same
as the ground truth score 1 however they are written:

>>> from cdm.config import read_config
>>> from cdm.pipeline import evaluate_pair
>>> cfg = read_config(render_engine='stub')
>>> record = evaluate_pair(
...     '\\\\left(x+y\\\\right)+z=x+\\\\left(y+z\\\\right)', '(x+y)+z=x+(y+z)', cfg)
>>> record.cdm.f1
1.0
>>> record.baselines.exact_match
False

The modules for the separate steps (cdm.latex, cdm.color, cdm.render,
cdm.localize, cdm.matcher, cdm.validator and cdm.metrics) can also be used
on their own.
"""


__all__ = ('__version__',)

# the version number of the library
__version__ = '1.0'
