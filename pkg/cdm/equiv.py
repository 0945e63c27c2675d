# equiv.py - render equivalence classes of LaTeX tokens
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

"""Query the table of LaTeX tokens that render to identical glyphs.

Many different LaTeX spellings produce the same picture: ``\\le`` and
``\\leq`` both draw a less-than-or-equal sign and ``(``, ``\\left(`` and
``\\big(`` all draw an opening parenthesis. The table groups such spellings
into classes. Each line of the table file lists the members of one class,
separated by whitespace, and the first member names the class. Lines
starting with ``#`` are comments.

>>> import io
>>> table = read(io.StringIO('''
... # comparison
... \\\\le \\\\leq
... ( \\\\left( \\\\big(
... '''))
>>> table.lookup('\\\\leq')
'\\\\le'
>>> table.lookup('x')
'x'
>>> equiv('(', '\\\\big(', table)
<Equivalence.RenderEquivalent: 'RenderEquivalent'>
>>> equiv('z', '2', table)
<Equivalence.Different: 'Different'>

The table that ships with cdm can be loaded with get():

>>> get().lookup('\\\\neq')
'\\\\ne'
"""

import enum
import threading

from cdm.exceptions import *
from cdm.util import get_resource_stream


# this is a cache of loaded tables
_open_tables = {}
_open_lock = threading.Lock()


class Equivalence(enum.Enum):
    """The relation between two token texts."""

    Identical = 'Identical'
    RenderEquivalent = 'RenderEquivalent'
    Different = 'Different'


class EquivTable():
    """Mapping of token text to render equivalence class."""

    def __init__(self, classes=None):
        """Construct a table from a mapping of text to class id."""
        self.classes = dict(classes or {})

    def lookup(self, text):
        """Return the class id of the token text (the text itself for
        tokens that are not listed)."""
        return self.classes.get(text, text)

    def members(self, class_id):
        """Return all listed token texts of the class, sorted."""
        return sorted(t for t, c in self.classes.items() if c == class_id)

    def __len__(self):
        return len(self.classes)


def _parse(fp):
    """Read lines of text from the file pointer and generate the members
    of each class."""
    for line in fp:
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        yield line.split()


def read(fp):
    """Return a new table with the classes read from the file."""
    classes = {}
    for members in _parse(fp):
        for member in members:
            if member in classes:
                raise InvalidEquivTable(
                    'Token %r is listed in more than one class.' % member)
            classes[member] = members[0]
    return EquivTable(classes)


def read_file(filename):
    """Read a table from the named file."""
    try:
        with open(filename, 'r', encoding='utf-8') as fp:
            return read(fp)
    except OSError as e:
        raise ConfigError('Cannot read equivalence table %s: %s' % (filename, e))


def get(name='equiv'):
    """Return the named table that is shipped with cdm."""
    with _open_lock:
        if name not in _open_tables:
            with get_resource_stream(name + '.dat') as fp:
                _open_tables[name] = read(fp)
        return _open_tables[name]


def equiv(a, b, table=None):
    """Compare two tokens (or token texts) under the equivalence table."""
    if table is None:
        table = get()
    a = getattr(a, 'text', a)
    b = getattr(b, 'text', b)
    if a == b:
        return Equivalence.Identical
    if table.lookup(a) == table.lookup(b):
        return Equivalence.RenderEquivalent
    return Equivalence.Different
