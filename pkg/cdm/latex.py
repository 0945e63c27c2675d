# latex.py - tokenize and normalize LaTeX math source
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

"""Tokenize and normalize LaTeX math source.

The same formula can be written in many ways: ``x^b_a``, ``x^{b}_{a}`` and
``x_{a}^{b}`` all compile to the same picture. This module rewrites a
formula into a canonical sequence of tokens: arguments get explicit braces,
a superscript is always written before the subscript and multi-character
shorthand is expanded.

>>> seq = tokenize('x_{a}^{b}')
>>> print(detokenize(seq))
x ^ { b } _ { a }
>>> print(detokenize(tokenize('x^b_a')))
x ^ { b } _ { a }
>>> print(detokenize(tokenize('\\\\frac ab')))
\\frac { a } { b }

Each token has a kind. Only characters and commands produce glyphs, the
braces, script markers and layout commands do not:

>>> seq = tokenize('x^2')
>>> [(t.text, t.kind.name) for t in seq.tokens]
[('x', 'Char'), ('^', 'ScriptMarker'), ('{', 'GroupOpen'), ('2', 'Char'), ('}', 'GroupClose')]
>>> seq.colorable_count
2

Sizing commands are combined with their delimiter and commands without a
glyph are structural:

>>> [t.text for t in tokenize('\\\\left( a \\\\, b \\\\right.').tokens if t.colorable]
['\\\\left(', 'a', 'b']
>>> tokenize('\\\\left( a').tokens[0].equiv_class
'('
>>> tokenize('{x')
Traceback (most recent call last):
    ...
UnbalancedBraces: ...
"""

import collections
import dataclasses
import enum

from cdm import equiv as equivdb
from cdm.exceptions import *
from cdm.util import clean


class TokenKind(enum.Enum):
    """The role of a token in the formula."""

    Char = 'Char'
    Command = 'Command'
    GroupOpen = 'GroupOpen'
    GroupClose = 'GroupClose'
    ScriptMarker = 'ScriptMarker'
    Structural = 'Structural'


# kinds that never receive a color
_UNCOLORED = frozenset([
    TokenKind.GroupOpen, TokenKind.GroupClose, TokenKind.ScriptMarker,
    TokenKind.Structural])


@dataclasses.dataclass(frozen=True)
class Token():
    """One normalized LaTeX atom."""

    text: str
    kind: TokenKind
    order_index: int
    equiv_class: str

    @property
    def colorable(self):
        """Whether the token produces a glyph."""
        return self.kind not in _UNCOLORED


@dataclasses.dataclass(frozen=True)
class TokenSequence():
    """The normalized tokens of a formula."""

    tokens: tuple
    source: str = ''

    @property
    def colorable_count(self):
        """The number of tokens that produce a glyph."""
        return sum(1 for token in self.tokens if token.colorable)

    def colorable(self):
        """Return the tokens that produce a glyph in order."""
        return [token for token in self.tokens if token.colorable]

    def texts(self):
        """Return the token texts."""
        return [token.text for token in self.tokens]

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


# commands that are combined with the following delimiter
SIZERS = frozenset([
    '\\left', '\\right', '\\middle',
    '\\big', '\\Big', '\\bigg', '\\Bigg',
    '\\bigl', '\\Bigl', '\\biggl', '\\Biggl',
    '\\bigr', '\\Bigr', '\\biggr', '\\Biggr',
    '\\bigm', '\\Bigm', '\\biggm', '\\Biggm'])

# commands whose braced argument is copied verbatim into the token
_RAW_ARGUMENT = frozenset([
    '\\begin', '\\end', '\\hspace', '\\hspace*', '\\vspace', '\\vspace*',
    '\\label', '\\tag', '\\tag*', '\\color', '\\textcolor', '\\mathcolor',
    '\\phantom', '\\hphantom', '\\vphantom', '\\mspace', '\\hskip',
    '\\kern', '\\mkern'])

# raw commands that may carry a [model] before the braced argument
_COLOR_COMMANDS = frozenset(['\\color', '\\textcolor', '\\mathcolor'])

# environments whose \begin carries a column specification
_SPEC_ENVIRONMENTS = frozenset([
    'array', 'array*', 'tabular', 'subarray', 'alignat', 'alignat*',
    'alignedat', 'darray'])

# commands that may be followed by a star
_STARRED = frozenset([
    '\\operatorname', '\\hspace', '\\vspace', '\\tag'])

# commands that produce no glyph of their own
_STRUCTURAL = frozenset([
    '&', '~', '\\\\', '\\,', '\\;', '\\:', '\\!', '\\>', '\\quad', '\\qquad',
    '\\enspace', '\\thinspace', '\\medspace', '\\thickspace',
    '\\negthinspace', '\\negmedspace', '\\negthickspace',
    '\\displaystyle', '\\textstyle', '\\scriptstyle',
    '\\scriptscriptstyle', '\\limits', '\\nolimits', '\\nonumber',
    '\\notag', '\\hline', '\\cr', '\\newline', '\\relax', '\\allowbreak',
    '\\nobreak', '\\left', '\\right', '\\middle'])

# script modifiers that stay attached to their base
_LIMITS = frozenset(['\\limits', '\\nolimits'])

# font and style commands, their argument is tokenized letter by letter
STYLE_COMMANDS = frozenset([
    '\\mathrm', '\\mathbf', '\\mathit', '\\mathbb', '\\mathcal',
    '\\mathfrak', '\\mathsf', '\\mathtt', '\\mathscr', '\\mathnormal',
    '\\boldsymbol', '\\bm', '\\pmb', '\\operatorname', '\\operatorname*',
    '\\text', '\\textrm', '\\textbf', '\\textit', '\\textsf', '\\texttt',
    '\\textup', '\\textnormal', '\\emph', '\\mbox', '\\hbox'])

# commands with arguments that do not draw anything themselves
STACKING_COMMANDS = frozenset(['\\overset', '\\underset', '\\stackrel'])

# commands with two arguments that draw a glyph (a fraction bar, parentheses)
FRACTIONS = frozenset(['\\frac', '\\dfrac', '\\tfrac', '\\cfrac'])
BINOMIALS = frozenset(['\\binom', '\\dbinom', '\\tbinom'])

# accents that draw something above or below their argument
ACCENTS = frozenset([
    '\\hat', '\\widehat', '\\tilde', '\\widetilde', '\\bar', '\\overline',
    '\\vec', '\\overrightarrow', '\\overleftarrow', '\\overleftrightarrow',
    '\\dot', '\\ddot', '\\dddot', '\\check', '\\breve', '\\acute',
    '\\grave', '\\mathring', '\\overbrace', '\\boxed'])
UNDER_ACCENTS = frozenset([
    '\\underline', '\\underbrace', '\\underrightarrow', '\\underleftarrow'])

_ARITY = dict(
    [(name, 2) for name in FRACTIONS | BINOMIALS | STACKING_COMMANDS] +
    [(name, 1) for name in ACCENTS | UNDER_ACCENTS | STYLE_COMMANDS] +
    [('\\sqrt', 1), ('\\not', 1)])

# the optional [..] argument of these commands is parsed as formula
_OPTIONAL_ARGUMENT = frozenset(['\\sqrt'])


# nodes of the parsed formula, atoms are either strings or Tokens
Leaf = collections.namedtuple('Leaf', 'atom')
Group = collections.namedtuple('Group', 'open children close')
Macro = collections.namedtuple('Macro', 'name opt args')
Script = collections.namedtuple('Script', 'base limits sup_mark sup sub_mark sub')


def _text(atom):
    """Return the text of a string or Token atom."""
    return getattr(atom, 'text', atom)


def split_sizer(text):
    """Split a combined sizing token into the sizer and the delimiter.

    >>> split_sizer('\\\\left\\\\langle')
    ('\\\\left', '\\\\langle')
    >>> split_sizer('(') is None
    True
    """
    if not text.startswith('\\'):
        return None
    end = 1
    while end < len(text) and text[end].isascii() and text[end].isalpha():
        end += 1
    if text[:end] in SIZERS and end < len(text):
        return text[:end], text[end:]
    return None


def raw_command(text):
    """Return the command name of a token carrying a verbatim argument."""
    if text.startswith('\\'):
        name = text.split('{', 1)[0].split('[', 1)[0]
        if name in _RAW_ARGUMENT:
            return name
    return None


def arity(text):
    """Return the number of arguments the command takes."""
    if raw_command(text) in ('\\textcolor', '\\mathcolor') and '{' in text:
        return 1
    return _ARITY.get(text, 0)


def is_structural_command(text):
    """Whether the command with arguments draws nothing itself."""
    return (
        text in STYLE_COMMANDS or text in STACKING_COMMANDS or
        raw_command(text) is not None)


def _classify(text):
    """Determine the kind of a leaf token."""
    if text in _STRUCTURAL or raw_command(text) is not None:
        return TokenKind.Structural
    if len(text) > 2 and text[0] == '[' and text[-1] == ']':
        # row spacing after \\
        return TokenKind.Structural
    sizer = split_sizer(text)
    if sizer and sizer[1] == '.':
        return TokenKind.Structural
    if text.startswith('\\') and len(text) > 1:
        return TokenKind.Command
    return TokenKind.Char


def _read_command(source, pos):
    """Read the control sequence that starts at pos."""
    end = pos + 1
    if end >= len(source):
        return '\\', end
    if not (source[end].isascii() and source[end].isalpha()):
        if source[end].isspace():
            return '~', end + 1
        return source[pos:end + 1], end + 1
    while end < len(source) and source[end].isascii() and source[end].isalpha():
        end += 1
    return source[pos:end], end


def _skip_space(source, pos):
    while pos < len(source) and source[pos].isspace():
        pos += 1
    return pos


def _read_group(source, pos):
    """Read a braced argument verbatim, returning the content without
    whitespace or None if no argument follows."""
    pos = _skip_space(source, pos)
    if pos >= len(source) or source[pos] != '{':
        return None, pos
    depth = 0
    for end in range(pos, len(source)):
        if source[end] == '{' and source[end - 1:end] != '\\':
            depth += 1
        elif source[end] == '}' and source[end - 1:end] != '\\':
            depth -= 1
            if depth == 0:
                return ''.join(source[pos + 1:end].split()), end + 1
    raise UnbalancedBraces()


def _read_bracket(source, pos):
    """Read an optional [..] argument verbatim."""
    pos = _skip_space(source, pos)
    if pos >= len(source) or source[pos] != '[':
        return None, pos
    end = source.find(']', pos)
    if end < 0:
        return None, pos
    return ''.join(source[pos + 1:end].split()), end + 1


def _read_raw(name, source, pos):
    """Combine a command with its verbatim arguments."""
    text = name
    if name in _COLOR_COMMANDS:
        model, pos = _read_bracket(source, pos)
        if model is not None:
            text += '[%s]' % model
    argument, pos = _read_group(source, pos)
    if argument is None:
        return text, pos
    text += '{%s}' % argument
    if name == '\\begin' and argument in _SPEC_ENVIRONMENTS:
        option, pos = _read_bracket(source, pos)
        if option is not None:
            text += '[%s]' % option
        spec, pos = _read_group(source, pos)
        if spec is not None:
            text += '{%s}' % spec
    return text, pos


def _read_delimiter(source, pos):
    """Read the delimiter that follows a sizing command."""
    pos = _skip_space(source, pos)
    if pos >= len(source) or source[pos] in '{}%':
        return None, pos
    if source[pos] == '\\':
        delimiter, end = _read_command(source, pos)
        if delimiter in ('~', '\\'):
            return None, pos
        return delimiter, end
    if source[pos].isalnum():
        return None, pos
    return source[pos], pos + 1


def lex(source):
    """Split the LaTeX source into atoms.

    Whitespace and comments are dropped, sizing commands are combined with
    their delimiter and commands with a verbatim argument (environments,
    labels, spacing) are combined with that argument.

    >>> lex('\\\\left( x^2 \\\\right) % comment')
    ['\\\\left(', 'x', '^', '2', '\\\\right)']
    >>> lex('\\\\begin{array}{c c} a \\\\end{array}')
    ['\\\\begin{array}{cc}', 'a', '\\\\end{array}']
    >>> lex('a \\\\\\\\[2 pt] b')
    ['a', '\\\\\\\\', '[2pt]', 'b']
    """
    atoms = []
    pos = 0
    while pos < len(source):
        char = source[pos]
        if char.isspace():
            pos += 1
        elif char == '%':
            end = source.find('\n', pos)
            pos = len(source) if end < 0 else end + 1
        elif char != '\\':
            atoms.append(char)
            pos += 1
        else:
            name, pos = _read_command(source, pos)
            if name in _STARRED and source[pos:pos + 1] == '*':
                name += '*'
                pos += 1
            if name in SIZERS:
                delimiter, pos = _read_delimiter(source, pos)
                if delimiter is not None:
                    name += delimiter
            elif name in _RAW_ARGUMENT:
                name, pos = _read_raw(name, source, pos)
            elif name == '\\\\':
                spacing, pos = _read_bracket(source, pos)
                if spacing is not None:
                    atoms.append(name)
                    name = '[%s]' % spacing
            atoms.append(name)
    return atoms


class _Parser():
    """Recursive descent over a list of atoms."""

    def __init__(self, atoms):
        self.atoms = atoms
        self.pos = 0

    def peek(self):
        if self.pos < len(self.atoms):
            return _text(self.atoms[self.pos])
        return None

    def next(self):
        self.pos += 1
        return self.atoms[self.pos - 1]

    def sequence(self, closing=None):
        nodes = []
        while True:
            text = self.peek()
            if text is None:
                if closing is not None:
                    raise UnbalancedBraces()
                return nodes
            if text == '}':
                if closing != '}':
                    raise UnbalancedBraces()
                return nodes
            if text == ']' and closing == ']':
                return nodes
            nodes.append(self.item())

    def has_closing_bracket(self):
        depth = 0
        for atom in self.atoms[self.pos + 1:]:
            text = _text(atom)
            if text == '{':
                depth += 1
            elif text == '}':
                depth -= 1
                if depth < 0:
                    return False
            elif text == ']' and depth == 0:
                return True
        return False

    def simple(self):
        atom = self.next()
        text = _text(atom)
        if text == '{':
            children = self.sequence('}')
            return Group(atom, children, self.next())
        count = arity(text)
        if not count:
            return Leaf(atom)
        opt = None
        if text in _OPTIONAL_ARGUMENT and self.peek() == '[' and self.has_closing_bracket():
            bracket = self.next()
            children = self.sequence(']')
            opt = Group(bracket, children, self.next())
        return Macro(atom, opt, [self.argument() for _i in range(count)])

    def argument(self):
        text = self.peek()
        if text == '{':
            return self.simple()
        if text is None or text in ('}', '^', '_', '&', '\\\\'):
            return Group('{', [], '}')
        return Group('{', [self.simple()], '}')

    def item(self):
        base = None
        if self.peek() not in ('^', '_'):
            base = self.simple()
        limits = None
        if base is not None and self.peek() in _LIMITS:
            limits = self.next()
        sup_mark = sup = sub_mark = sub = None
        while self.peek() in ('^', '_'):
            if self.peek() == '^':
                if sup_mark is not None:
                    break
                sup_mark = self.next()
                sup = self.argument()
            else:
                if sub_mark is not None:
                    break
                sub_mark = self.next()
                sub = self.argument()
        if limits is None and sup_mark is None and sub_mark is None:
            return base
        return Script(base, limits, sup_mark, sup, sub_mark, sub)


def parse(atoms):
    """Parse atoms (strings from lex() or the Tokens of a sequence) into a
    list of Leaf, Group, Macro and Script nodes."""
    return _Parser(list(atoms)).sequence()


def _emit(nodes, out):
    """Generate (text, kind) for the nodes in canonical order."""
    for node in nodes:
        if isinstance(node, Leaf):
            text = _text(node.atom)
            out.append((text, _classify(text)))
        elif isinstance(node, Group):
            out.append((_text(node.open), TokenKind.GroupOpen))
            _emit(node.children, out)
            out.append((_text(node.close), TokenKind.GroupClose))
        elif isinstance(node, Macro):
            text = _text(node.name)
            if is_structural_command(text):
                out.append((text, TokenKind.Structural))
            else:
                out.append((text, TokenKind.Command))
            if node.opt is not None:
                out.append(('[', TokenKind.Structural))
                _emit(node.opt.children, out)
                out.append((']', TokenKind.Structural))
            _emit(node.args, out)
        else:
            if node.base is not None:
                _emit([node.base], out)
            if node.limits is not None:
                out.append((_text(node.limits), TokenKind.Structural))
            if node.sup_mark is not None:
                out.append(('^', TokenKind.ScriptMarker))
                _emit([node.sup], out)
            if node.sub_mark is not None:
                out.append(('_', TokenKind.ScriptMarker))
                _emit([node.sub], out)
    return out


def tokenize(source, table=None):
    """Tokenize and normalize the LaTeX math source.

    Unknown commands are kept as single tokens. Raises UnbalancedBraces
    when the brace nesting is broken."""
    if table is None:
        table = equivdb.get()
    nodes = parse(lex(clean(source)))
    return TokenSequence(
        tokens=tuple(
            Token(text, kind, index, table.lookup(text))
            for index, (text, kind) in enumerate(_emit(nodes, []))),
        source=source)


def detokenize(seq):
    """Join the token texts with single spaces."""
    return ' '.join(_text(token) for token in seq)


def tokenize_lenient(source, table=None):
    """Return the token texts of the source, falling back to the raw atoms
    of the lexer when the source cannot be parsed."""
    try:
        return tokenize(source, table).texts()
    except CDMError:
        try:
            return lex(clean(source))
        except CDMError:
            return source.split()
