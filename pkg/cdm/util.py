# util.py - common utility functions
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

"""Common utility functions for other cdm modules.

This module is meant for internal use by cdm modules and is not
guaranteed to remain stable and as such not part of the public API of
cdm.
"""

import codecs
import unicodedata

from cdm.exceptions import *


def _mk_char_map(mapping):
    """Transform a dictionary with comma separated Unicode character names
    to tuples with Unicode characters as key."""
    for key, value in mapping.items():
        for char in key.split(','):
            yield (unicodedata.lookup(char), value)


# build mapping of Unicode characters that model output often contains
# to their LaTeX spelling (commands get a trailing space so that a
# following letter does not become part of the command name)
_char_map = dict(_mk_char_map({
    'HYPHEN,NON-BREAKING HYPHEN,FIGURE DASH,EN DASH,EM DASH,'
    'MINUS SIGN,FULLWIDTH HYPHEN-MINUS':
        '-',
    'NO-BREAK SPACE,EN QUAD,EM QUAD,EN SPACE,EM SPACE,'
    'THREE-PER-EM SPACE,FOUR-PER-EM SPACE,SIX-PER-EM SPACE,FIGURE SPACE,'
    'PUNCTUATION SPACE,THIN SPACE,HAIR SPACE,NARROW NO-BREAK SPACE,'
    'MEDIUM MATHEMATICAL SPACE,IDEOGRAPHIC SPACE,ZERO WIDTH SPACE':
        ' ',
    'FULLWIDTH PLUS SIGN': '+',
    'FULLWIDTH EQUALS SIGN': '=',
    'FULLWIDTH LEFT PARENTHESIS': '(',
    'FULLWIDTH RIGHT PARENTHESIS': ')',
    'FULLWIDTH COMMA,IDEOGRAPHIC COMMA': ',',
    'PRIME': "'",
    'LESS-THAN OR EQUAL TO': '\\le ',
    'GREATER-THAN OR EQUAL TO': '\\ge ',
    'NOT EQUAL TO': '\\ne ',
    'RIGHTWARDS ARROW': '\\to ',
    'LEFTWARDS ARROW': '\\gets ',
    'MULTIPLICATION SIGN': '\\times ',
    'DIVISION SIGN': '\\div ',
    'MIDDLE DOT,DOT OPERATOR': '\\cdot ',
    'PLUS-MINUS SIGN': '\\pm ',
    'INFINITY': '\\infty ',
    'ELEMENT OF': '\\in ',
    'N-ARY SUMMATION': '\\sum ',
    'N-ARY PRODUCT': '\\prod ',
    'INTEGRAL': '\\int ',
    'PARTIAL DIFFERENTIAL': '\\partial ',
    'NABLA': '\\nabla ',
    'SQUARE ROOT': '\\surd ',
    'HORIZONTAL ELLIPSIS': '\\ldots ',
    'GREEK SMALL LETTER ALPHA': '\\alpha ',
    'GREEK SMALL LETTER BETA': '\\beta ',
    'GREEK SMALL LETTER GAMMA': '\\gamma ',
    'GREEK SMALL LETTER DELTA': '\\delta ',
    'GREEK SMALL LETTER EPSILON': '\\epsilon ',
    'GREEK SMALL LETTER THETA': '\\theta ',
    'GREEK SMALL LETTER LAMDA': '\\lambda ',
    'GREEK SMALL LETTER MU,MICRO SIGN': '\\mu ',
    'GREEK SMALL LETTER PI': '\\pi ',
    'GREEK SMALL LETTER RHO': '\\rho ',
    'GREEK SMALL LETTER SIGMA': '\\sigma ',
    'GREEK SMALL LETTER TAU': '\\tau ',
    'GREEK SMALL LETTER PHI': '\\phi ',
    'GREEK SMALL LETTER OMEGA': '\\omega ',
    'GREEK CAPITAL LETTER DELTA,INCREMENT': '\\Delta ',
    'GREEK CAPITAL LETTER SIGMA': '\\Sigma ',
    'GREEK CAPITAL LETTER OMEGA,OHM SIGN': '\\Omega ',
}))


def clean(source):
    """Replace Unicode math characters with their LaTeX spelling.

    >>> clean('a − b ≤ c')
    'a - b \\\\le  c'
    >>> clean('2πr')
    '2\\\\pi r'
    """
    try:
        return ''.join(_char_map.get(x, x) for x in source)
    except Exception:  # noqa: B902
        raise InputError('Formula source must be a string.')


def get_resource_stream(name):
    """Return a readable text stream for a file shipped with the package."""
    reader = codecs.getreader('utf-8')
    try:  # pragma: no cover (Python 3.9 and newer)
        import importlib.resources
        return reader(importlib.resources.files(__package__).joinpath(name).open('rb'))
    except (ImportError, AttributeError):  # pragma: no cover (older Python versions)
        import pkg_resources
        return reader(pkg_resources.resource_stream(__name__, name))
