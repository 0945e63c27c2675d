# color.py - assign a unique color to every glyph of a formula
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

"""Assign a unique color to every glyph of a formula.

Colors are taken from the lattice of RGB triples with every channel a
multiple of 15. White is reserved for the background which leaves 5831
usable colors.

>>> p = palette()
>>> p.capacity
5831
>>> p.colors[:3]
((0, 0, 15), (0, 0, 30), (0, 0, 45))
>>> p.colors[-1]
(0, 0, 0)

Each colorable token of the normalized formula gets the next color of the
palette, structural tokens are passed through unchanged:

>>> from cdm.latex import tokenize
>>> src = assign_colors(tokenize('a+b'))
>>> print(src.latex)
\\mathcolor[RGB]{0,0,15}{a} \\mathcolor[RGB]{0,0,30}{+} \\mathcolor[RGB]{0,0,45}{b}
>>> src.assignment[(0, 0, 30)]
('+', 1)
"""

import dataclasses
import functools
import itertools

from cdm.exceptions import *
from cdm.latex import Group, Leaf, Macro, parse, split_sizer


# the channel values of the color lattice
STEP = 15
_LEVELS = tuple(range(0, 256, STEP))

BACKGROUND = (255, 255, 255)

# operators that keep their limits placement when wrapped in \mathop
BIG_OPERATORS = frozenset([
    '\\sum', '\\prod', '\\coprod', '\\int', '\\iint', '\\iiint', '\\oint',
    '\\bigcup', '\\bigcap', '\\bigoplus', '\\bigotimes', '\\bigodot',
    '\\biguplus', '\\bigsqcup', '\\bigvee', '\\bigwedge', '\\lim',
    '\\limsup', '\\liminf', '\\max', '\\min', '\\sup', '\\inf', '\\det',
    '\\Pr', '\\gcd', '\\argmax', '\\argmin'])


@dataclasses.dataclass(frozen=True)
class Palette():
    """Ordered list of distinct colors."""

    colors: tuple

    @property
    def capacity(self):
        """The number of available colors."""
        return len(self.colors)


@dataclasses.dataclass(frozen=True)
class ColoredSource():
    """A formula with a color assigned to every glyph."""

    latex: str
    assignment: dict
    sequence: object = None

    def colors_by_order(self):
        """Return a mapping of token order_index to color."""
        return dict((index, color) for color, (_text, index) in self.assignment.items())


@functools.lru_cache(maxsize=None)
def palette():
    """Return the palette of lattice colors.

    Colors are in lexicographic channel order with black moved to the
    end."""
    colors = [
        color for color in itertools.product(_LEVELS, repeat=3)
        if color not in (BACKGROUND, (0, 0, 0))]
    return Palette(tuple(colors) + ((0, 0, 0),))


def _colored(text, color):
    return '\\mathcolor[RGB]{%d,%d,%d}{%s}' % (color + (text,))


def _render_nodes(nodes, colors):
    """Produce the colorized LaTeX of the nodes."""
    return ' '.join(_render_node(node, colors) for node in nodes)


def _render_group(group, colors):
    return '{' + _render_nodes(group.children, colors) + '}'


def _render_node(node, colors):
    if isinstance(node, Leaf):
        token = node.atom
        color = colors.get(token.order_index)
        if color is None:
            return token.text
        if split_sizer(token.text):
            # a sized delimiter cannot be wrapped in a group
            return '\\color[RGB]{%d,%d,%d}%s' % (color + (token.text,))
        if token.text in BIG_OPERATORS:
            return '\\mathop{%s}' % _colored(token.text, color)
        return _colored(token.text, color)
    if isinstance(node, Group):
        return _render_group(node, colors)
    if isinstance(node, Macro):
        result = node.name.text
        if node.opt is not None:
            result += '[' + _render_nodes(node.opt.children, colors) + ']'
        result += ''.join(_render_group(arg, colors) for arg in node.args)
        color = colors.get(node.name.order_index)
        if color is None:
            return result
        return _colored(result, color)
    result = ''
    if node.base is not None:
        result = _render_node(node.base, colors)
    if node.limits is not None:
        result += node.limits.text
    if node.sup_mark is not None:
        result += '^' + _render_group(node.sup, colors)
    if node.sub_mark is not None:
        result += '_' + _render_group(node.sub, colors)
    return result


def assign_colors(seq, colors=None):
    """Assign the palette colors to the colorable tokens of the sequence.

    Raises PaletteExhausted when the formula has more glyphs than the
    palette has colors."""
    if colors is None:
        colors = palette()
    tokens = seq.colorable()
    if len(tokens) > colors.capacity:
        raise PaletteExhausted()
    by_order = dict(
        (token.order_index, color) for token, color in zip(tokens, colors.colors))
    assignment = dict(
        (color, (token.text, token.order_index)) for token, color in zip(tokens, colors.colors))
    latex = _render_nodes(parse(seq.tokens), by_order)
    return ColoredSource(latex=latex, assignment=assignment, sequence=seq)
