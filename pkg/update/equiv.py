#!/usr/bin/env python3

# update/equiv.py - script to generate the render equivalence table
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

"""This script generates the table of LaTeX tokens that render to the same
glyph. The delimiter families are expanded with all sizing prefixes the
tokenizer attaches to a delimiter. The output is suitable to be written to
cdm/equiv.dat."""


# prefixes that the tokenizer combines with the following delimiter
sizers = (
    r'\left', r'\right', r'\middle',
    r'\big', r'\Big', r'\bigg', r'\Bigg',
    r'\bigl', r'\Bigl', r'\biggl', r'\Biggl',
    r'\bigr', r'\Bigr', r'\biggr', r'\Biggr',
    r'\bigm', r'\Bigm', r'\biggm', r'\Biggm')

# delimiters with their alternative spellings, first is the class name
delimiters = (
    ('(',),
    (')',),
    ('[', r'\lbrack'),
    (']', r'\rbrack'),
    (r'\{', r'\lbrace'),
    (r'\}', r'\rbrace'),
    ('|', r'\vert', r'\lvert', r'\rvert', r'\mid'),
    (r'\|', r'\Vert', r'\lVert', r'\rVert'),
    (r'\langle',),
    (r'\rangle',),
    ('/',),
    (r'\lfloor',),
    (r'\rfloor',),
    (r'\lceil',),
    (r'\rceil',),
    (r'\uparrow',),
    (r'\downarrow',),
)

# symbols that have more than one command name
aliases = (
    (r'\le', r'\leq'),
    (r'\ge', r'\geq'),
    (r'\ne', r'\neq'),
    ('<', r'\lt'),
    ('>', r'\gt'),
    (r'\to', r'\rightarrow'),
    (r'\gets', r'\leftarrow'),
    (r'\iff', r'\Longleftrightarrow'),
    (r'\implies', r'\Longrightarrow'),
    (r'\impliedby', r'\Longleftarrow'),
    (r'\land', r'\wedge'),
    (r'\lor', r'\vee'),
    (r'\lnot', r'\neg'),
    (r'\ni', r'\owns'),
    (r'\ldots', r'\dots', r'\dotso'),
    (r'\cdots', r'\dotsb', r'\dotsc', r'\dotsm'),
    ('*', r'\ast'),
    (':', r'\colon'),
)


def delimiter_family(spellings):
    """Provide all members of the delimiter family."""
    yield from spellings
    for sizer in sizers:
        for spelling in spellings:
            yield sizer + spelling


if __name__ == '__main__':
    print('# generated from update/equiv.py')
    print('# one class per line, the first token names the class')
    print('# delimiters')
    for spellings in delimiters:
        print(' '.join(delimiter_family(spellings)))
    print('# command aliases')
    for spellings in aliases:
        print(' '.join(spellings))
